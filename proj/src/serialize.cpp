#include "zlab/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace zlab {

namespace {

Error config_error(const std::string& what) { return Error(ErrorCode::ConfigError, what); }

json cplx_pair(const cplx& z) { return json::array({number(z.real()), number(z.imag())}); }

Interval interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw config_error("interval must be [a, b]");
  return {to_double(j[0]), to_double(j[1])};
}

}  // namespace

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  throw config_error("expected a number, got " + j.dump());
}

json to_json(const Interval& i) { return json::array({number(i.a), number(i.b)}); }

json to_json(const DyadicInterval& i) {
  return {{"n", i.n}, {"k", i.k}, {"shift", i.shift}, {"interval", to_json(i.as_interval())}};
}

DyadicInterval dyadic_from_json(const json& j) {
  if (!j.is_object()) throw config_error("dyadic interval must be an object {n, k, shift}");
  DyadicInterval d;
  d.n = j.value("n", 0);
  d.k = j.value("k", std::int64_t{0});
  d.shift = j.value("shift", 0);
  if (d.shift < 0 || d.shift > 2) throw config_error("shift must be 0, 1 or 2");
  return d;
}

json to_json(const SingularSet& xi) {
  static const char* names[] = {"explicit", "lacunary", "finite"};
  json out = {{"generator", names[static_cast<int>(xi.kind())]},
              {"points", json::array()},
              {"window", to_json(xi.window())}};
  for (double p : xi.points()) out["points"].push_back(number(p));
  if (xi.lacunary()) {
    const auto& l = *xi.lacunary();
    out["gamma"] = l.gamma;
    out["tau"] = l.tau;
    out["theta"] = l.theta;
    out["depth"] = l.depth;
  }
  return out;
}

SingularSet singular_set_from_json(const json& j) {
  if (!j.is_object()) throw config_error("singular_set must be an object");
  const std::string gen = j.value("generator", "explicit");
  const Interval window = j.contains("window") ? interval_from_json(j["window"]) : Interval{-kInf, kInf};
  if (gen == "lacunary") {
    return lacunary_set(j.value("gamma", 2.0), j.value("tau", 1), j.value("theta", 0.0), j.value("depth", 5),
                        window);
  }
  if (gen != "explicit" && gen != "finite") throw config_error("unknown singular_set generator '" + gen + "'");
  if (!j.contains("points") || !j["points"].is_array()) throw config_error("singular_set.points must be an array");
  std::vector<double> pts;
  for (const auto& p : j["points"]) pts.push_back(to_double(p));
  return SingularSet(pts, window, gen == "finite" ? GeneratorKind::Finite : GeneratorKind::Explicit);
}

json to_json(const YoungFunction& y) { return {{"family", "Y_ps"}, {"p", y.p}, {"s", y.s}}; }

YoungFunction young_from_json(const json& j) {
  if (!j.is_object()) throw config_error("orlicz must be an object {family, p, s}");
  const std::string fam = j.value("family", "Y_ps");
  if (fam != "Y_ps") throw config_error("unknown Young family '" + fam + "'");
  YoungFunction y{j.value("p", 1.0), j.value("s", 0.0)};
  if (!(y.p >= 1.0) || y.s < 0.0) throw config_error("Young function needs p >= 1 and s >= 0");
  return y;
}

json to_json(const ZygmundEstimate& e) {
  json out = {{"value", number(e.value)},
              {"frequencies", e.frequencies},
              {"certificate", json::array()},
              {"method", e.method},
              {"seed", e.seed},
              {"n_range", e.n_range}};
  for (const cplx& a : e.certificate) out["certificate"].push_back(cplx_pair(a));
  if (e.best_n) out["best_n"] = *e.best_n;
  if (!e.selection.empty()) {
    out["selection"] = e.selection;
    out["selection_label"] = e.selection_label;
  }
  return out;
}

json to_json(const StepSymbol& s) {
  json comps = json::array();
  for (const auto& c : s.components) {
    json pieces = json::array();
    for (std::size_t j = 0; j < c.pieces.size(); ++j)
      pieces.push_back({{"interval", to_json(c.pieces[j])}, {"height", number(c.heights[j])}});
    comps.push_back({{"omega", to_json(c.omega)}, {"pieces", pieces}});
  }
  return {{"components", comps}};
}

StepSymbol step_symbol_from_json(const json& j) {
  if (!j.is_object() || !j.contains("components") || !j["components"].is_array())
    throw config_error("step symbol must be {components: [...]}");
  StepSymbol s;
  for (const auto& c : j["components"]) {
    StepComponent comp;
    comp.omega = interval_from_json(c.at("omega"));
    for (const auto& p : c.at("pieces")) {
      comp.pieces.push_back(interval_from_json(p.at("interval")));
      comp.heights.push_back(to_double(p.at("height")));
    }
    s.components.push_back(std::move(comp));
  }
  return s;
}

json to_json(const Symbol& m) {
  static const char* cls[] = {"HM", "Mar", "Rpq"};
  json vals = json::array();
  for (const cplx& v : m.values) vals.push_back(cplx_pair(v));
  json out = {{"grid", {{"n", m.size()}, {"a", m.a}, {"b", m.b}}},
              {"values", vals},
              {"class", cls[static_cast<int>(m.cls)]},
              {"norm", number(m.norm)},
              {"singular_set", to_json(m.xi)}};
  if (m.cls == SymbolClass::HM) out["hm_order"] = m.hm_order;
  if (m.cls == SymbolClass::Rpq) {
    out["p"] = m.p;
    out["q"] = number(m.q);
  }
  if (m.steps) out["steps"] = to_json(*m.steps);
  return out;
}

json to_json(const TileCollection& q) {
  json tiles = json::array();
  for (std::size_t i = 0; i < q.tiles.size(); ++i) {
    json t = {{"time", to_json(q.tiles[i].time)}, {"freq", to_json(q.tiles[i].freq)}};
    if (i < q.component.size()) t["component"] = q.component[i];
    tiles.push_back(t);
  }
  return {{"tiles", tiles}, {"component_count", q.component_count}};
}

json to_json(const SparseCollection& s) {
  json items = json::array();
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    json w = json::array();
    if (i < s.witnesses.size())
      for (const Interval& seg : s.witnesses[i]) w.push_back(to_json(seg));
    json item = to_json(s.intervals[i]);
    item["witness"] = w;
    items.push_back(item);
  }
  return {{"eta", s.eta}, {"intervals", items}};
}

SparseCollection sparse_collection_from_json(const json& j) {
  SparseCollection s;
  s.eta = j.value("eta", 0.5);
  for (const auto& item : j.at("intervals")) {
    s.intervals.push_back(dyadic_from_json(item));
    std::vector<Interval> w;
    if (item.contains("witness"))
      for (const auto& seg : item["witness"]) w.push_back(interval_from_json(seg));
    s.witnesses.push_back(std::move(w));
  }
  return s;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void CsvTable::add(std::vector<Cell> row) {
  if (row.size() != header_.size()) throw Error(ErrorCode::InvalidArgument, "CSV row width mismatch");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + csv_quote(header_[i]);
  out += "\r\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const double* d = std::get_if<double>(&row[i]))
        out += format_double(*d);
      else
        out += csv_quote(std::get<std::string>(row[i]));
    }
    out += "\r\n";
  }
  return out;
}

CsvTable audit_table(const std::vector<AuditRow>& rows) {
  CsvTable t({"node", "budget", "constant"});
  for (const auto& r : rows) t.add({r.node, r.budget, r.constant});
  return t;
}

CsvTable scan_table(const ScanReport& r) {
  CsvTable t({"parameter", "characteristic", "empirical_norm", "predicted_exponent", "fitted_slope", "residual"});
  for (const auto& row : r.rows) t.add({row.parameter, row.characteristic, row.norm, row.predicted, row.fitted, row.residual});
  return t;
}

}  // namespace zlab
