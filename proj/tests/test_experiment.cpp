#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zlab/experiment.hpp"
#include "zlab/zygmund.hpp"

using namespace zlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zlab_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json kSparseConfig = json::parse(R"({
  "singular_set": {"generator": "explicit", "points": [0.0]},
  "signal": {"kind": "indicator", "interval": [0, 1]},
  "grid": {"n": 4096, "a": -8, "b": 8}
})");

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("json round trips") {
    const SingularSet xi({1.0, -2.0, 0.5}, {-10.0, 10.0});
    const SingularSet back = singular_set_from_json(to_json(xi));
    CHECK(back.points() == xi.points());
    CHECK(back.window() == xi.window());
    const SingularSet lac = singular_set_from_json(to_json(lacunary_set(2.0, 1, 0.0, 4, {-kInf, kInf})));
    CHECK(lac.lacunary().has_value());
    CHECK(singular_set_from_json(json::parse(R"({"points":[0], "window":["-inf","inf"]})")).window().a == -kInf);

    const DyadicInterval d{3, -5, 2};
    CHECK(dyadic_from_json(to_json(d)) == d);
    CHECK_THROWS_AS(dyadic_from_json(json{{"n", 1}, {"k", 0}, {"shift", 3}}), Error);

    const YoungFunction y{1.5, 0.25};
    CHECK(young_from_json(to_json(y)) == y);
    CHECK_THROWS_AS(young_from_json(json{{"family", "Y_ps"}, {"p", 0.5}}), Error);

    StepSymbol s;
    s.components.push_back({{0.0, 4.0}, {{0.0, 1.0}, {2.0, 3.0}}, {0.5, -0.25}});
    const StepSymbol sb = step_symbol_from_json(to_json(s));
    REQUIRE(sb.components.size() == 1);
    CHECK(sb.components[0].pieces == s.components[0].pieces);
    CHECK(sb.components[0].heights == s.components[0].heights);

    SparseCollection sc{{{0, 0, 0}, {2, 1, 1}}, {{{0.0, 0.5}}, {{0.1, 0.2}}}, 0.5};
    const SparseCollection sc2 = sparse_collection_from_json(to_json(sc));
    CHECK(sc2.intervals == sc.intervals);
    CHECK(sc2.witnesses == sc.witnesses);

    CHECK(number(kInf) == "inf");
    CHECK(std::isnan(to_double(number(std::nan("")))));
    CHECK(to_double(json(0.1)) == 0.1);
  }

  TEST_CASE("csv formatting") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CsvTable t({"name", "value"});
    t.add({std::string("x,y"), 2.5});
    CHECK(t.str() == "name,value\r\n\"x,y\",2.5\r\n");
    CHECK_THROWS_AS(t.add({1.0}), Error);
  }

  TEST_CASE("config hashing") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    const json a = json::parse(R"({"b": 1, "a": [1, 2]})");
    const json b = json::parse(R"({"a": [1, 2], "b": 1})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    CHECK(config_hash(a) != config_hash(json::parse(R"({"a": [2, 1], "b": 1})")));
  }

  TEST_CASE("validation") {
    for (const auto& cmd : experiment_commands()) CHECK_FALSE(validate_config(cmd, json::object()).empty());
    CHECK(validate_config("sparse-dominate", kSparseConfig).empty());
    json bad = kSparseConfig;
    bad["grid"]["n"] = 1000;
    CHECK_FALSE(validate_config("sparse-dominate", bad).empty());
    bad = kSparseConfig;
    bad["bogus"] = 1;
    CHECK_FALSE(validate_config("sparse-dominate", bad).empty());
    bad = kSparseConfig;
    bad["mode"] = "dense";
    CHECK_FALSE(validate_config("sparse-dominate", bad).empty());
    const json zyg = json::parse(R"({"singular_set": {"points": [0, 1]}, "orlicz": {"family": "Y_ps", "p": 2, "s": 0}})");
    CHECK_FALSE(validate_config("zygmund-estimate", zyg).empty());
    CHECK(validate_config("zygmund-estimate", zyg, true).empty());
    CHECK_THROWS_AS(run_experiment("sparse-dominate", json::object()), Error);
  }

  TEST_CASE("sparse-dominate on the indicator passes every audit") {
    const auto r = run_experiment("sparse-dominate", kSparseConfig);
    CHECK(r.ok());
    CHECK(r.report["audit"]["passed"] == true);
    CHECK(r.report["command"] == "sparse-dominate");
    CHECK(r.report["version"] == std::string(version()));
    CHECK(r.report["config_hash"].get<std::string>().size() == 16);
    bool has_audit = false;
    for (const auto& [stem, t] : r.tables) has_audit = has_audit || stem == "audit";
    CHECK(has_audit);
  }

  TEST_CASE("zygmund-estimate matches the module call") {
    const json cfg = json::parse(R"({"singular_set": {"points": [0, 1]}, "orlicz": {"family": "Y_ps", "p": 1.3333333333333333, "s": 0},
      "mode": "fixed", "frequencies": [0, 1], "seed": 9})");
    const auto r = run_experiment("zygmund-estimate", cfg);
    OptimizerConfig oc;
    oc.seed = 9;
    const auto e = zygmund_constant({0, 1}, YoungFunction{4.0 / 3.0, 0.0}, oc);
    CHECK(to_double(r.report["estimate"]["value"]) == e.value);
  }

  TEST_CASE("outputs are deterministic and exit codes follow the contract") {
    const fs::path dir = scratch_dir("exp");
    {
      std::ofstream(dir / "cfg.json") << kSparseConfig.dump();
      std::ofstream(dir / "empty.json") << "  \n";
      std::ofstream(dir / "broken.json") << "{\"grid\": ";
    }
    std::string diag;
    CHECK(run_command("sparse-dominate", (dir / "cfg.json").string(), {}, (dir / "o1").string(), diag) == 0);
    CHECK(run_command("sparse-dominate", (dir / "cfg.json").string(), {}, (dir / "o2").string(), diag) == 0);
    for (const auto& entry : fs::directory_iterator(dir / "o1")) {
      const fs::path other = dir / "o2" / entry.path().filename();
      REQUIRE(fs::exists(other));
      CHECK(slurp(entry.path()) == slurp(other));
    }
    CHECK(fs::exists(dir / "o1" / "report.json"));
    CHECK(run_command("sparse-dominate", (dir / "empty.json").string(), {}, (dir / "o3").string(), diag) == 1);
    CHECK(diag.find("empty") != std::string::npos);
    CHECK(run_command("sparse-dominate", (dir / "broken.json").string(), {}, (dir / "o3").string(), diag) == 1);
    CHECK(run_command("sparse-dominate", (dir / "missing.json").string(), {}, (dir / "o3").string(), diag) == 1);

    // a budget the construction cannot meet is an audit failure, not a config error
    json tight = kSparseConfig;
    tight["eta"] = 1.0;
    tight["mode"] = "bilinear";
    tight["signal"] = json::parse(R"({"kind": "noise", "support": [0, 1]})");
    tight["seed"] = 1;
    std::ofstream(dir / "tight.json") << tight.dump();
    const int code = run_command("sparse-dominate", (dir / "tight.json").string(), {}, (dir / "o4").string(), diag);
    CHECK((code == 0 || code == 2));
  }
}
