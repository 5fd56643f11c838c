#include "zlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

namespace zlab {

namespace {

enum class Kind { Object, Number, Integer, Unsigned, String, Bool, Array };

const std::map<std::string, Kind>& key_kinds() {
  static const std::map<std::string, Kind> kinds = {
      {"grid", Kind::Object},        {"singular_set", Kind::Object}, {"orlicz", Kind::Object},
      {"orlicz2", Kind::Object},     {"signal", Kind::Object},       {"signal2", Kind::Object},
      {"symbol", Kind::Object},      {"operator", Kind::Object},     {"weight", Kind::Object},
      {"optimizer", Kind::Object},   {"selection", Kind::Object},    {"root", Kind::Object},
      {"seed", Kind::Unsigned},      {"mode", Kind::String},         {"kind", Kind::String},
      {"theta", Kind::Number},       {"zygmund_star", Kind::Number}, {"p", Kind::Number},
      {"tau", Kind::Number},         {"eps", Kind::Number},          {"mu", Kind::Number},
      {"range", Kind::Number},       {"x0", Kind::Number},           {"eta", Kind::Number},
      {"scale", Kind::Number},       {"gamma", Kind::Number},        {"max_retries", Kind::Integer},
      {"recover_levels", Kind::Integer}, {"dict_size", Kind::Integer}, {"per_unit", Kind::Unsigned},
      {"corpus_size", Kind::Unsigned}, {"depth", Kind::Integer},      {"exponents", Kind::Array},
      {"ps", Kind::Array},           {"lambdas", Kind::Array},       {"coeffs", Kind::Array},
      {"frequencies", Kind::Array},  {"n_range", Kind::Array},       {"epsilons", Kind::Array},
      {"kinds", Kind::Array},        {"weak", Kind::Bool},           {"plot_points", Kind::Unsigned},
  };
  return kinds;
}

struct Schema {
  std::vector<std::string> required;
  std::vector<std::string> optional;
  std::vector<std::string> modes;
  bool stochastic = false;
};

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> s = {
      {"zygmund-estimate",
       {{"singular_set", "orlicz"},
        {"mode", "frequencies", "n_range", "optimizer", "selection", "seed", "epsilons", "gamma", "tau", "depth"},
        {"multiscale", "fixed", "maximal", "scaling"},
        true}},
      {"multiplier-apply",
       {{"singular_set", "symbol", "signal"}, {"grid", "seed", "plot_points"}, {}, false}},
      {"square-function",
       {{"singular_set", "signal"}, {"grid", "mode", "dict_size", "seed", "plot_points"}, {"rough", "smooth"}, false}},
      {"sparse-dominate",
       {{"singular_set", "signal"},
        {"grid", "orlicz", "orlicz2", "signal2", "mode", "root", "theta", "zygmund_star", "max_retries",
         "recover_levels", "eta", "seed", "plot_points"},
        {"rough", "bilinear"},
        false}},
      {"carleson-sparse",
       {{"singular_set", "signal"}, {"grid", "orlicz", "root", "seed", "plot_points"}, {}, false}},
      {"weights-scan",
       {{"mode"},
        {"grid", "singular_set", "operator", "p", "tau", "exponents", "ps", "x0", "weak", "corpus_size", "seed",
         "weight", "kinds"},
        {"exponent", "blowup", "characteristic"},
        true}},
      {"modular-check",
       {{"signal", "lambdas"},
        {"grid", "singular_set", "operator", "orlicz", "weight", "scale", "seed", "plot_points"},
        {},
        false}},
      {"lower-bound-witness",
       {{"singular_set", "coeffs", "mu"}, {"eps", "orlicz", "range", "per_unit", "seed", "plot_points"}, {}, false}},
  };
  return s;
}

bool kind_ok(const json& v, Kind k) {
  switch (k) {
    case Kind::Object: return v.is_object();
    case Kind::Number: return v.is_number() || (v.is_string() && (v == "inf" || v == "-inf"));
    case Kind::Integer: return v.is_number_integer();
    case Kind::Unsigned: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case Kind::String: return v.is_string();
    case Kind::Bool: return v.is_boolean();
    case Kind::Array: return v.is_array();
  }
  return false;
}

const char* kind_name(Kind k) {
  static const char* names[] = {"an object", "a number", "an integer", "a non-negative integer",
                                "a string", "a boolean", "an array"};
  return names[static_cast<int>(k)];
}

bool needs_seed(const std::string& command, const json& cfg) {
  if (schemas().at(command).stochastic) {
    if (command == "zygmund-estimate") return true;
    if (command == "weights-scan") return cfg.value("mode", "") != "characteristic";
  }
  for (const char* key : {"signal", "signal2"})
    if (cfg.contains(key) && cfg[key].is_object() && cfg[key].value("kind", "") == "noise") return true;
  if (cfg.contains("symbol") && cfg["symbol"].is_object() && cfg["symbol"].value("kind", "") == "hm") return true;
  if (cfg.contains("operator") && cfg["operator"].is_object() && cfg["operator"].value("kind", "") == "hm_multiplier")
    return true;
  return false;
}

Error config_error(const std::string& what) { return Error(ErrorCode::ConfigError, what); }

// ---- builders ------------------------------------------------------------

struct Grid {
  std::size_t n = 4096;
  double a = -8.0;
  double b = 8.0;
};

Grid grid_from(const json& cfg) {
  Grid g;
  if (!cfg.contains("grid")) return g;
  const json& j = cfg["grid"];
  g.n = j.value("n", g.n);
  g.a = j.contains("a") ? to_double(j["a"]) : g.a;
  g.b = j.contains("b") ? to_double(j["b"]) : g.b;
  if (!is_power_of_two(g.n) || g.n < 16 || g.n > (std::size_t{1} << 20))
    throw config_error("grid.n must be a power of two in [16, 2^20]");
  if (!(g.b > g.a) || !std::isfinite(g.a) || !std::isfinite(g.b)) throw config_error("grid needs finite a < b");
  return g;
}

std::vector<double> doubles(const json& arr, const char* what) {
  if (!arr.is_array()) throw config_error(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(to_double(v));
  return out;
}

Interval interval_or(const json& j, const char* key, Interval def) {
  if (!j.contains(key)) return def;
  const std::vector<double> v = doubles(j[key], key);
  if (v.size() != 2 || !(v[1] > v[0])) throw config_error(std::string(key) + " must be [a, b] with a < b");
  return {v[0], v[1]};
}

std::map<std::int64_t, cplx> coefficient_map(const json& arr) {
  std::map<std::int64_t, cplx> out;
  if (!arr.is_array()) throw config_error("coeffs must be an array of [k, re, im]");
  for (const auto& c : arr) {
    if (!c.is_array() || c.size() < 2 || c.size() > 3 || !c[0].is_number_integer())
      throw config_error("each coefficient must be [k, re] or [k, re, im]");
    out[c[0].get<std::int64_t>()] += cplx(to_double(c[1]), c.size() == 3 ? to_double(c[2]) : 0.0);
  }
  return out;
}

double smooth_window(double t) { return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

SampledSignal make_signal(const json& j, const Grid& g, std::uint64_t seed) {
  const std::string kind = j.value("kind", "");
  if (kind == "indicator") {
    const Interval i = interval_or(j, "interval", {0.0, 1.0});
    return SampledSignal::from_function(g.n, g.a, g.b, [=](double x) { return cplx(i.contains_halfopen(x) ? 1.0 : 0.0); });
  }
  if (kind == "trig") {
    const auto coeffs = coefficient_map(j.at("coeffs"));
    return SampledSignal::from_function(g.n, g.a, g.b, [&](double x) {
      cplx acc(0.0);
      for (const auto& [k, c] : coeffs) acc += c * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) * x);
      return acc;
    });
  }
  if (kind == "bump") {
    const double c = j.contains("center") ? to_double(j["center"]) : 0.5;
    const double r = j.contains("radius") ? to_double(j["radius"]) : 0.5;
    const double freq = j.contains("frequency") ? to_double(j["frequency"]) : 0.0;
    if (!(r > 0.0)) throw config_error("bump radius must be positive");
    return SampledSignal::from_function(g.n, g.a, g.b, [=](double x) {
      return std::polar(smooth_window((x - c) / r), 2.0 * kPi * freq * x);
    });
  }
  if (kind == "noise") {
    const Interval i = interval_or(j, "support", {0.0, 1.0});
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<cplx> v(g.n, cplx(0.0));
    const double h = (g.b - g.a) / static_cast<double>(g.n);
    for (std::size_t q = 0; q < g.n; ++q) {
      const double x = g.a + static_cast<double>(q) * h;
      const cplx z(nd(rng), nd(rng));
      if (i.contains_halfopen(x)) v[q] = z;
    }
    return SampledSignal(std::move(v), g.a, g.b);
  }
  if (kind == "lacunary") {
    const int top = j.value("octaves", 6);
    const double c = j.contains("center") ? to_double(j["center"]) : 0.5;
    const double r = j.contains("radius") ? to_double(j["radius"]) : 0.5;
    return SampledSignal::from_function(g.n, g.a, g.b, [=](double x) {
      cplx acc(0.0);
      for (int k = 0; k < top; ++k) acc += std::polar(1.0, 2.0 * kPi * std::ldexp(1.0, k) * x);
      return acc * smooth_window((x - c) / r);
    });
  }
  if (kind == "samples") {
    const std::vector<double> re = doubles(j.at("re"), "signal.re");
    const std::vector<double> im = j.contains("im") ? doubles(j["im"], "signal.im") : std::vector<double>(re.size());
    if (re.size() != g.n || im.size() != g.n) throw config_error("signal samples must match grid.n");
    std::vector<cplx> v(g.n);
    for (std::size_t q = 0; q < g.n; ++q) v[q] = cplx(re[q], im[q]);
    return SampledSignal(std::move(v), g.a, g.b);
  }
  throw config_error("signal.kind must be indicator, trig, bump, noise, lacunary or samples");
}

Symbol make_symbol_from(const json& j, const SingularSet& xi, const Grid& g, std::uint64_t seed) {
  const std::string kind = j.value("kind", "");
  if (kind == "hm") return synth_hm_symbol(xi, j.value("order", 2), j.value("seed", seed), g.n, g.a, g.b);
  if (kind == "steps") {
    const StepSymbol s = step_symbol_from_json(j);
    validate_steps(s);
    return step_symbol(s, xi, g.n, g.a, g.b);
  }
  if (kind == "indicator") {
    const Interval i = interval_or(j, "interval", {0.0, kInf});
    return make_symbol([=](double x) { return cplx(i.contains_halfopen(x) ? 1.0 : 0.0); }, xi, g.n, g.a, g.b,
                       SymbolClass::Mar);
  }
  if (kind == "constant") {
    const double v = j.contains("value") ? to_double(j["value"]) : 1.0;
    return make_symbol([=](double) { return cplx(v); }, xi, g.n, g.a, g.b, SymbolClass::Mar);
  }
  throw config_error("symbol.kind must be hm, steps, indicator or constant");
}

Operator make_operator(const json& cfg, const Grid& g, std::uint64_t seed) {
  const json op = cfg.value("operator", json{{"kind", "identity"}});
  const std::string kind = op.value("kind", "identity");
  if (kind == "identity") return [](const SampledSignal& f) { return f; };
  if (!cfg.contains("singular_set")) throw config_error("operator '" + kind + "' needs singular_set");
  const SingularSet xi = singular_set_from_json(cfg["singular_set"]);
  if (kind == "rough_square") {
    return [xi](const SampledSignal& f) {
      return rough_square_function(xi, std::vector<cplx>(f.size(), cplx(1.0)), f);
    };
  }
  if (kind == "smooth_square") {
    const int dict = op.value("dict_size", 8);
    return [xi, dict](const SampledSignal& f) { return smooth_square_function(xi, f, dict); };
  }
  if (kind == "hm_multiplier") {
    const auto m = std::make_shared<Symbol>(synth_hm_symbol(xi, op.value("order", 2), op.value("seed", seed), g.n, g.a, g.b));
    return [m](const SampledSignal& f) { return apply_multiplier(*m, f); };
  }
  if (kind == "step_multiplier") {
    const StepSymbol s = step_symbol_from_json(op);
    validate_steps(s);
    const auto m = std::make_shared<Symbol>(step_symbol(s, xi, g.n, g.a, g.b));
    return [m](const SampledSignal& f) { return apply_multiplier(*m, f); };
  }
  throw config_error("operator.kind must be identity, rough_square, smooth_square, hm_multiplier or step_multiplier");
}

Weight make_weight(const json& cfg, const Grid& g) {
  const json w = cfg.value("weight", json{{"family", "constant"}});
  const std::string fam = w.value("family", "constant");
  if (fam == "constant") return Weight::constant(g.n, g.a, g.b, w.contains("value") ? to_double(w["value"]) : 1.0);
  if (fam == "power")
    return Weight::power(g.n, g.a, g.b, w.contains("x0") ? to_double(w["x0"]) : 0.0,
                         w.contains("alpha") ? to_double(w["alpha"]) : 0.5);
  if (fam == "step")
    return Weight::step(g.n, g.a, g.b, w.contains("cut") ? to_double(w["cut"]) : 0.0,
                        w.contains("lo") ? to_double(w["lo"]) : 1.0, w.contains("hi") ? to_double(w["hi"]) : 2.0);
  throw config_error("weight.family must be constant, power or step");
}

OrliczSpace orlicz_or(const json& cfg, const char* key, OrliczSpace def) {
  return cfg.contains(key) ? young_from_json(cfg[key]) : def;
}

std::size_t plot_points(const json& cfg) { return cfg.value("plot_points", std::size_t{1024}); }

PlotSeries decimated(const std::string& name, const SampledSignal& grid, const std::vector<double>& y,
                     std::size_t points) {
  PlotSeries s{name, {}, {}};
  const std::size_t stride = std::max<std::size_t>(1, y.size() / std::max<std::size_t>(points, 1));
  for (std::size_t j = 0; j < y.size(); j += stride) {
    s.x.push_back(grid.x(j));
    s.y.push_back(y[j]);
  }
  return s;
}

// ---- commands ------------------------------------------------------------

ExperimentResult cmd_zygmund(const json& cfg, std::uint64_t seed) {
  ExperimentResult r;
  const std::string mode = cfg.value("mode", "multiscale");
  OptimizerConfig oc;
  oc.seed = seed;
  if (cfg.contains("optimizer")) {
    const json& o = cfg["optimizer"];
    oc.random_restarts = o.value("restarts", oc.random_restarts);
    oc.max_iterations = o.value("iterations", oc.max_iterations);
    oc.tolerance = o.value("tolerance", oc.tolerance);
    oc.frequency_cap = o.value("frequency_cap", oc.frequency_cap);
    oc.oversample = o.value("oversample", oc.oversample);
  }
  if (mode == "scaling") {
    const std::vector<double> eps = cfg.contains("epsilons") ? doubles(cfg["epsilons"], "epsilons")
                                                             : std::vector<double>{0.5, 0.25, 0.125, 0.0625};
    const ScalingProbe probe =
        lacunary_scaling_probe(cfg.value("gamma", 2.0), cfg.value("tau", 1), cfg.value("depth", 10), eps, oc);
    CsvTable t({"epsilon", "estimate", "best_n"});
    PlotSeries s{"loglog", {}, {}};
    for (const auto& row : probe.rows) {
      t.add({row.epsilon, row.estimate, static_cast<double>(row.best_n)});
      s.x.push_back(std::log(1.0 / row.epsilon));
      s.y.push_back(std::log(row.estimate));
    }
    r.report = {{"slope", number(probe.slope)}, {"intercept", number(probe.intercept)}, {"expected_slope", 0.5}};
    r.tables.emplace_back("scaling", std::move(t));
    r.plots.push_back(std::move(s));
    return r;
  }

  const SingularSet xi = singular_set_from_json(cfg.at("singular_set"));
  const OrliczSpace x = young_from_json(cfg.at("orlicz"));
  ZygmundEstimate e;
  if (mode == "fixed") {
    if (!cfg.contains("frequencies")) throw config_error("mode 'fixed' needs frequencies");
    std::vector<std::int64_t> k;
    for (const auto& v : cfg["frequencies"]) {
      if (!v.is_number_integer()) throw config_error("frequencies must be integers");
      k.push_back(v.get<std::int64_t>());
    }
    e = zygmund_constant(k, x, oc);
  } else if (mode == "maximal") {
    SelectionConfig sc;
    sc.seed = seed;
    if (cfg.contains("selection")) sc.random_selections = cfg["selection"].value("random", sc.random_selections);
    e = maximal_multiscale_constant(xi, x, sc, oc);
  } else {
    std::optional<std::vector<int>> nr;
    if (cfg.contains("n_range")) nr = cfg["n_range"].get<std::vector<int>>();
    e = multiscale_constant(xi.points(), x, nr, oc);
  }
  r.report = {{"estimate", to_json(e)}};
  const double upper = std::sqrt(static_cast<double>(e.frequencies.size()));
  json oracle = {{"trivial_upper", number(upper)}};
  if (x.is_lp() && x.p == 2.0) oracle["parseval"] = 1.0;
  r.report["oracle"] = oracle;
  if (e.value > upper * (1.0 + 1e-9)) r.audit_failures.push_back("estimate exceeds sqrt(#K)");
  if (x.is_lp() && x.p == 2.0 && std::abs(e.value - 1.0) > 1e-9) r.audit_failures.push_back("L^2 estimate differs from 1");

  CsvTable t({"k", "re", "im", "abs"});
  for (std::size_t i = 0; i < e.frequencies.size(); ++i)
    t.add({static_cast<double>(e.frequencies[i]), e.certificate[i].real(), e.certificate[i].imag(),
           std::abs(e.certificate[i])});
  r.tables.emplace_back("certificate", std::move(t));
  PlotSeries s{"certificate_modulus", {}, {}};
  for (int j = 0; j < 1024; ++j) {
    const double t0 = j / 1024.0;
    cplx acc(0.0);
    for (std::size_t i = 0; i < e.frequencies.size(); ++i)
      acc += e.certificate[i] * std::polar(1.0, 2.0 * kPi * static_cast<double>(e.frequencies[i]) * t0);
    s.x.push_back(t0);
    s.y.push_back(std::abs(acc));
  }
  r.plots.push_back(std::move(s));
  return r;
}

ExperimentResult cmd_multiplier(const json& cfg, std::uint64_t seed) {
  ExperimentResult r;
  const Grid g = grid_from(cfg);
  const SingularSet xi = singular_set_from_json(cfg.at("singular_set"));
  const SampledSignal f = make_signal(cfg.at("signal"), g, seed);
  const Symbol m = make_symbol_from(cfg.at("symbol"), xi, g, seed);
  const SampledSignal out = apply_multiplier(m, f);
  double sup_m = 0.0;
  for (const cplx& v : m.values) sup_m = std::max(sup_m, std::abs(v));
  const double n_in = f.norm2(), n_out = out.norm2();
  static const char* cls[] = {"HM", "Mar", "Rpq"};
  r.report = {{"symbol_class", cls[static_cast<int>(m.cls)]},
              {"symbol_norm", number(symbol_norm(m))},
              {"symbol_sup", number(sup_m)},
              {"l2_in", number(n_in)},
              {"l2_out", number(n_out)},
              {"plancherel_bound", number(sup_m * n_in)}};
  if (n_out > sup_m * n_in * (1.0 + 1e-10) + 1e-300) r.audit_failures.push_back("Plancherel bound violated");
  CsvTable t({"x", "re_in", "im_in", "re_out", "im_out"});
  for (std::size_t j = 0; j < f.size(); ++j) t.add({f.x(j), f[j].real(), f[j].imag(), out[j].real(), out[j].imag()});
  r.tables.emplace_back("signal", std::move(t));
  r.plots.push_back(decimated("output_modulus", f, out.abs(), plot_points(cfg)));
  return r;
}

ExperimentResult cmd_square(const json& cfg, std::uint64_t seed) {
  ExperimentResult r;
  const Grid g = grid_from(cfg);
  const SingularSet xi = singular_set_from_json(cfg.at("singular_set"));
  const SampledSignal f = make_signal(cfg.at("signal"), g, seed);
  const std::string mode = cfg.value("mode", "rough");
  SampledSignal out;
  if (mode == "smooth") {
    out = smooth_square_function(xi, f, cfg.value("dict_size", 8));
  } else {
    out = rough_square_function(xi, std::vector<cplx>(f.size(), cplx(1.0)), f);
  }
  // ‖𝟙_{O_Ξ} f̂‖: frequencies exactly on Ξ are removed
  std::vector<cplx> spec = f.spectrum();
  const std::set<double> pts(xi.points().begin(), xi.points().end());
  for (std::size_t q = 0; q < spec.size(); ++q)
    if (pts.count(f.xi(q))) spec[q] = 0.0;
  const double off = SampledSignal::from_spectrum(spec, f.a(), f.b()).norm2();
  r.report = {{"mode", mode}, {"l2_in", number(f.norm2())}, {"l2_out", number(out.norm2())}, {"l2_off_set", number(off)}};
  if (mode == "rough") {
    const double gap = std::abs(out.norm2() - off);
    r.report["parseval_gap"] = number(gap);
    if (gap > 1e-10 * std::max(1.0, off)) r.audit_failures.push_back("rough square function breaks Parseval");
  }
  CsvTable t({"x", "abs_f", "square"});
  for (std::size_t j = 0; j < f.size(); ++j) t.add({f.x(j), std::abs(f[j]), out[j].real()});
  r.tables.emplace_back("square", std::move(t));
  r.plots.push_back(decimated("square", f, out.abs(), plot_points(cfg)));
  return r;
}

void audit_sparse(ExperimentResult& r, const SparseCollection& s, double eta, const std::string& what) {
  if (!verify_witnesses(s)) r.audit_failures.push_back(what + ": witnesses fail");
  const SparseCheck c = is_sparse(s.intervals, eta);
  r.report[what + "_packing"] = number(c.packing);
  if (!c.sparse) r.audit_failures.push_back(what + ": not " + format_double(eta) + "-sparse");
}

ExperimentResult cmd_sparse(const json& cfg, std::uint64_t seed) {
  ExperimentResult r;
  const Grid g = grid_from(cfg);
  const SingularSet xi = singular_set_from_json(cfg.at("singular_set"));
  const SampledSignal f = make_signal(cfg.at("signal"), g, seed);
  const OrliczSpace x = orlicz_or(cfg, "orlicz", YoungFunction::lp(1.0));
  const double eta = cfg.contains("eta") ? to_double(cfg["eta"]) : 0.5;
  const DyadicInterval root = cfg.contains("root") ? dyadic_from_json(cfg["root"]) : DyadicInterval{0, 0, 0};
  const std::string mode = cfg.value("mode", "rough");
  if (mode == "bilinear") {
    const SampledSignal f2 = cfg.contains("signal2") ? make_signal(cfg["signal2"], g, seed + 1) : f;
    BilinearConfig bc;
    bc.root = root;
    if (cfg.contains("theta")) bc.theta = to_double(cfg["theta"]);
    const BilinearResult b = build_sparse_bilinear(f, f2, xi, x, orlicz_or(cfg, "orlicz2", x), TileCollection{}, bc);
    r.report = {{"mode", mode},
                {"form", number(b.form)},
                {"node_form_sum", number(b.node_form_sum)},
                {"sparse_value", number(b.sparse_value)},
                {"constant", number(b.constant)},
                {"max_node_constant", number(b.max_node_constant)},
                {"lambda_ratio", {number(b.lambda_ratio[0]), number(b.lambda_ratio[1])}},
                {"nested", b.nested},
                {"realized_eta", b.s.eta},
                {"collection", to_json(b.s)}};
    audit_sparse(r, b.s, std::min(eta, b.s.eta), "collection");
    if (!std::isfinite(b.constant)) r.audit_failures.push_back("form not dominated");
    r.tables.emplace_back("audit", audit_table(b.audit));
    return r;
  }
  RoughConfig rc;
  rc.root = root;
  if (cfg.contains("theta")) rc.theta = to_double(cfg["theta"]);
  if (cfg.contains("zygmund_star")) rc.zygmund_star = to_double(cfg["zygmund_star"]);
  rc.max_retries = cfg.value("max_retries", rc.max_retries);
  rc.recover_levels = cfg.value("recover_levels", rc.recover_levels);
  const RoughResult rr = build_sparse_rough(f, xi, x, rc);
  r.report = {{"mode", mode},
              {"theta", number(rr.theta)},
              {"retries", rr.retries},
              {"constant_tailed", number(rr.constant_tailed)},
              {"constant_sharp", number(rr.constant_sharp)},
              {"max_budget", number(rr.max_budget)},
              {"budget_limit", 1.0 / 16.0},
              {"realized_eta", rr.tailed.eta},
              {"collection", to_json(rr.tailed)},
              {"sharp_collection", to_json(rr.sharp)}};
  if (rr.max_budget > 1.0 / 16.0) r.audit_failures.push_back("node budget exceeds 1/16");
  for (const auto& row : rr.audit)
    if (row.budget > 1.0 / 16.0) r.audit_failures.push_back("budget violation at node " + row.node);
  audit_sparse(r, rr.tailed, std::min(eta, rr.tailed.eta), "collection");
  audit_sparse(r, rr.sharp, std::min(eta, rr.sharp.eta), "sharp_collection");
  if (!std::isfinite(rr.constant_tailed)) r.audit_failures.push_back("pointwise domination fails");
  r.tables.emplace_back("audit", audit_table(rr.audit));
  r.plots.push_back(decimated("lhs", f, rr.lhs, plot_points(cfg)));
  r.plots.push_back(decimated("rhs_tailed", f, rr.rhs_tailed, plot_points(cfg)));
  r.plots.push_back(decimated("rhs_sharp", f, rr.rhs_sharp, plot_points(cfg)));
  return r;
}

ExperimentResult cmd_carleson(const json& cfg, std::uint64_t seed) {
  ExperimentResult r;
  const Grid g = grid_from(cfg);
  const SingularSet xi = singular_set_from_json(cfg.at("singular_set"));
  const SampledSignal f = make_signal(cfg.at("signal"), g, seed);
  const OrliczSpace x = orlicz_or(cfg, "orlicz", YoungFunction::lp(2.0));
  std::optional<DyadicInterval> root;
  if (cfg.contains("root")) root = dyadic_from_json(cfg["root"]);
  const CarlesonSequence a = tile_carleson_sequence(f, xi, root);
  const CarlesonResult c = carleson_to_sparse(a, f, x);
  r.report = {{"carleson_norm", number(c.carleson_norm)},
              {"constant", number(c.constant)},
              {"constant_sharp", number(c.constant_sharp)},
              {"max_budget", number(c.max_budget)},
              {"budget_limit", 1.0 / 3.0},
              {"max_selection_budget", number(c.max_selection_budget)},
              {"sequence_size", a.size()},
              {"realized_eta", c.j.eta},
              {"collection", to_json(c.j)}};
  if (c.max_budget > 1.0 / 3.0) r.audit_failures.push_back("node budget exceeds |R|/3");
  audit_sparse(r, c.j, std::min(0.5, c.j.eta), "collection");
  if (!std::isfinite(c.constant)) r.audit_failures.push_back("balayage not dominated");
  r.tables.emplace_back("audit", audit_table(c.audit));
  CsvTable seq({"n", "k", "shift", "left", "right", "a"});
  for (const auto& [i, v] : a)
    seq.add({static_cast<double>(i.n), static_cast<double>(i.k), static_cast<double>(i.shift), i.left(), i.right(), v});
  r.tables.emplace_back("sequence", std::move(seq));
  r.plots.push_back(decimated("balayage", f, c.lhs, plot_points(cfg)));
  r.plots.push_back(decimated("sparse_bound", f, c.rhs, plot_points(cfg)));
  return r;
}

ExperimentResult cmd_weights(const json& cfg, std::uint64_t seed) {
  ExperimentResult r;
  const Grid g = grid_from(cfg);
  const std::string mode = cfg.at("mode").get<std::string>();
  if (mode == "characteristic") {
    const Weight w = make_weight(cfg, g);
    const double p = cfg.contains("p") ? to_double(cfg["p"]) : 2.0;
    std::vector<std::string> kinds = {"A_p", "A_1", "A_inf", "RH"};
    if (cfg.contains("kinds")) kinds = cfg["kinds"].get<std::vector<std::string>>();
    CsvTable t({"kind", "param", "value", "argmax_left", "argmax_right"});
    json vals = json::object();
    for (const auto& k : kinds) {
      CharKind ck;
      if (k == "A_p") ck = CharKind::Ap;
      else if (k == "A_1") ck = CharKind::A1;
      else if (k == "A_inf") ck = CharKind::Ainf;
      else if (k == "RH") ck = CharKind::RH;
      else throw config_error("unknown characteristic '" + k + "'");
      const CharacteristicResult c = characteristic(w, ck, p);
      t.add({k, p, c.value, c.argmax.a, c.argmax.b});
      vals[k] = number(c.value);
    }
    r.report = {{"mode", mode}, {"weight", w.label}, {"p", p}, {"characteristics", vals}};
    r.tables.emplace_back("characteristics", std::move(t));
    return r;
  }
  const Operator op = make_operator(cfg, g, seed);
  const std::vector<SampledSignal> corpus = weighted_corpus(g.n, g.a, g.b, seed, cfg.value("corpus_size", std::size_t{16}));
  double tau = 0.0;
  if (cfg.contains("tau")) {
    tau = to_double(cfg["tau"]);
  } else if (cfg.contains("singular_set")) {
    const SingularSet xi = singular_set_from_json(cfg["singular_set"]);
    tau = xi.lacunary() ? xi.lacunary()->tau : (xi.size() <= 1 ? 0.0 : 1.0);
  }
  ScanReport rep;
  if (mode == "exponent") {
    const double p = cfg.contains("p") ? to_double(cfg["p"]) : 2.0;
    const std::vector<double> ex = cfg.contains("exponents") ? doubles(cfg["exponents"], "exponents")
                                                             : std::vector<double>{-0.6, -0.3, 0.0, 0.3, 0.6};
    rep = exponent_scan(op, p, tau, ex, corpus, cfg.contains("x0") ? to_double(cfg["x0"]) : 0.0, cfg.value("weak", false));
    r.report = {{"mode", mode}, {"p", p}};
  } else if (mode == "blowup") {
    const std::vector<double> ps = cfg.contains("ps") ? doubles(cfg["ps"], "ps") : std::vector<double>{2.0, 1.5, 1.25, 1.125, 1.0625};
    rep = blowup_scan(op, tau, ps, corpus);
    r.report = {{"mode", mode}};
  } else {
    throw config_error("unknown weights-scan mode '" + mode + "'");
  }
  r.report["tau"] = tau;
  r.report["slope"] = number(rep.slope);
  r.report["intercept"] = number(rep.intercept);
  r.report["predicted_exponent"] = number(rep.predicted);
  PlotSeries s{"loglog", {}, {}};
  for (const auto& row : rep.rows) {
    s.x.push_back(std::log(row.characteristic));
    s.y.push_back(std::log(row.norm));
  }
  r.tables.emplace_back("scan", scan_table(rep));
  r.plots.push_back(std::move(s));
  return r;
}

ExperimentResult cmd_modular(const json& cfg, std::uint64_t seed) {
  ExperimentResult r;
  const Grid g = grid_from(cfg);
  const SampledSignal f = make_signal(cfg.at("signal"), g, seed);
  const Operator op = make_operator(cfg, g, seed);
  const OrliczSpace x = orlicz_or(cfg, "orlicz", YoungFunction::lp(1.0));
  const Weight w = make_weight(cfg, g);
  const std::vector<double> lambdas = doubles(cfg.at("lambdas"), "lambdas");
  const ModularReport rep = modular_check(op, f, lambdas, x, w);
  r.report = {{"max_ratio", number(rep.max_ratio)}, {"orlicz", to_json(x)}, {"weight", w.label}};
  if (cfg.contains("scale")) {
    const double c = to_double(cfg["scale"]);
    SampledSignal cf = f;
    for (auto& v : cf.samples()) v *= c;
    std::vector<double> cl = lambdas;
    for (double& l : cl) l *= c;
    const ModularReport scaled = modular_check(op, cf, cl, x, w);
    double dev = 0.0;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const double a = rep.rows[i].ratio, b = scaled.rows[i].ratio;
      if (std::isfinite(a) && std::isfinite(b)) dev = std::max(dev, std::abs(a - b) / std::max(1.0, std::abs(a)));
      else if (a != b) dev = kInf;
    }
    r.report["scaling_deviation"] = number(dev);
    if (dev > 1e-8) r.audit_failures.push_back("modular ratios not scale invariant");
  }
  CsvTable t({"lambda", "level_mass", "modular", "ratio"});
  PlotSeries s{"ratio", {}, {}};
  for (const auto& row : rep.rows) {
    t.add({row.lambda, row.level_mass, row.modular, row.ratio});
    s.x.push_back(row.lambda);
    s.y.push_back(row.ratio);
  }
  r.tables.emplace_back("modular", std::move(t));
  r.plots.push_back(std::move(s));
  return r;
}

ExperimentResult cmd_witness(const json& cfg) {
  ExperimentResult r;
  WitnessInput in;
  in.coeffs = coefficient_map(cfg.at("coeffs"));
  in.xi = singular_set_from_json(cfg.at("singular_set"));
  in.mu = to_double(cfg.at("mu"));
  if (cfg.contains("eps")) in.eps = to_double(cfg["eps"]);
  in.x = orlicz_or(cfg, "orlicz", in.x);
  if (cfg.contains("range")) in.range = to_double(cfg["range"]);
  in.per_unit = cfg.value("per_unit", std::size_t{0});
  const LowerBoundWitness w = lower_bound_witness(in);
  r.report = {{"frequencies", w.frequencies},
              {"s", number(w.s)},
              {"lambda", number(w.lambda)},
              {"c", number(w.c)},
              {"delta", number(w.delta)},
              {"core_min_ratio", number(w.core_min_ratio)},
              {"core_points", w.core_points},
              {"pf_excess", number(w.pf_excess)},
              {"level_set_measure", number(w.level_set_measure)},
              {"modular_q", number(w.modular_q)},
              {"modular_f", number(w.modular_f)},
              {"cure_ratio", number(w.cure_ratio)},
              {"witness_ratio", number(w.witness_ratio)}};
  if (w.core_min_ratio < 0.5) r.audit_failures.push_back("|T_m[Qf]| falls below lambda on the core set");
  if (w.pf_excess > 1e-12) r.audit_failures.push_back("|Pf| exceeds |f|");
  CsvTable t({"k", "re", "im", "in_lattice"});
  const std::set<std::int64_t> lat(w.frequencies.begin(), w.frequencies.end());
  for (const auto& [k, c] : in.coeffs) t.add({static_cast<double>(k), c.real(), c.imag(), lat.count(k) ? 1.0 : 0.0});
  r.tables.emplace_back("coefficients", std::move(t));
  r.plots.push_back({"tmqf", w.series.x, w.series.tmqf});
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, s] : schemas()) v.push_back(k);
    return v;
  }();
  return names;
}

std::vector<std::string> validate_config(const std::string& command, const json& config, bool seed_given) {
  std::vector<std::string> diag;
  auto it = schemas().find(command);
  if (it == schemas().end()) return {"unknown command '" + command + "'"};
  if (!config.is_object()) return {"config must be a JSON object"};
  const Schema& s = it->second;
  // the lacunary scaling probe builds its own set and spaces
  const bool probe = command == "zygmund-estimate" && config.value("mode", "") == "scaling";
  for (const auto& key : s.required)
    if (!probe && !config.contains(key)) diag.push_back("missing required key '" + key + "'");
  std::set<std::string> allowed(s.required.begin(), s.required.end());
  allowed.insert(s.optional.begin(), s.optional.end());
  for (const auto& [key, value] : config.items()) {
    if (!allowed.count(key)) {
      diag.push_back("unknown key '" + key + "'");
      continue;
    }
    const Kind k = key_kinds().at(key);
    if (!kind_ok(value, k)) diag.push_back("key '" + key + "' must be " + kind_name(k));
  }
  if (config.contains("mode") && config["mode"].is_string() && !s.modes.empty()) {
    const std::string m = config["mode"];
    if (std::find(s.modes.begin(), s.modes.end(), m) == s.modes.end()) diag.push_back("unknown mode '" + m + "'");
  }
  if (config.contains("grid") && config["grid"].is_object()) {
    const json& g = config["grid"];
    if (g.contains("n") && (!g["n"].is_number_unsigned() || !is_power_of_two(g["n"].get<std::uint64_t>())))
      diag.push_back("grid.n must be a power of two");
  }
  for (const char* key : {"signal", "signal2"})
    if (config.contains(key) && config[key].is_object() && !config[key].contains("kind"))
      diag.push_back(std::string(key) + ".kind is required");
  if (!seed_given && !config.contains("seed") && diag.empty() && needs_seed(command, config))
    diag.push_back("seed is required for this stochastic experiment (config 'seed' or --seed)");
  return diag;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

ExperimentResult run_experiment(const std::string& command, const json& config, const RunOptions& opt) {
  const std::vector<std::string> diag = validate_config(command, config, opt.seed.has_value());
  if (!diag.empty()) {
    std::string msg;
    for (const auto& d : diag) msg += (msg.empty() ? "" : "; ") + d;
    throw config_error(msg);
  }
  if (opt.threads) set_thread_count(opt.threads);
  const std::uint64_t seed = opt.seed ? *opt.seed : config.value("seed", std::uint64_t{0});
  log_info("running " + command);

  ExperimentResult r;
  try {
    if (command == "zygmund-estimate") r = cmd_zygmund(config, seed);
    else if (command == "multiplier-apply") r = cmd_multiplier(config, seed);
    else if (command == "square-function") r = cmd_square(config, seed);
    else if (command == "sparse-dominate") r = cmd_sparse(config, seed);
    else if (command == "carleson-sparse") r = cmd_carleson(config, seed);
    else if (command == "weights-scan") r = cmd_weights(config, seed);
    else if (command == "modular-check") r = cmd_modular(config, seed);
    else r = cmd_witness(config);
  } catch (const json::exception& e) {
    throw config_error(e.what());
  }

  json effective = config;
  effective["seed"] = seed;
  r.report["command"] = command;
  r.report["seed"] = seed;
  r.report["config_hash"] = config_hash(effective);
  r.report["version"] = version();
  r.report["audit"] = {{"passed", r.ok()}, {"failures", r.audit_failures}};
  return r;
}

void write_outputs(const ExperimentResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + (fs::path(dir) / name).string());
    out << body;
  };
  put("report.json", r.report.dump(2) + "\n");
  for (const auto& [stem, table] : r.tables) put(stem + ".csv", table.str());
  for (const auto& s : r.plots) {
    CsvTable t({"x", "y"});
    for (std::size_t i = 0; i < s.x.size(); ++i) t.add({s.x[i], s.y[i]});
    put("plot_" + s.name + ".csv", t.str());
  }
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt,
                const std::string& out_dir, std::string& diagnostics) {
  json config;
  {
    std::ifstream in(config_path);
    if (!in) {
      diagnostics = "cannot open config file '" + config_path + "'";
      return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos) {
      diagnostics = "config is empty";
      const auto d = validate_config(command, json::object(), opt.seed.has_value());
      for (const auto& line : d) diagnostics += "\n  " + line;
      return 1;
    }
    try {
      config = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      diagnostics = std::string("config is not valid JSON: ") + e.what();
      return 1;
    }
  }
  const auto diag = validate_config(command, config, opt.seed.has_value());
  if (!diag.empty()) {
    diagnostics = "config failed validation:";
    for (const auto& line : diag) diagnostics += "\n  " + line;
    return 1;
  }
  ExperimentResult r;
  try {
    r = run_experiment(command, config, opt);
  } catch (const Error& e) {
    diagnostics = e.what();
    switch (e.code()) {
      case ErrorCode::BudgetViolation:
      case ErrorCode::NotCarleson:
      case ErrorCode::AuditFailure:
        return 2;
      default:
        return 1;
    }
  }
  try {
    write_outputs(r, out_dir);
  } catch (const std::exception& e) {
    diagnostics = e.what();
    return 1;
  }
  if (!r.ok()) {
    diagnostics = "audit failed:";
    for (const auto& f : r.audit_failures) diagnostics += "\n  " + f;
    return 2;
  }
  return 0;
}

}  // namespace zlab
