#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zlab/grids.hpp"
#include "zlab/multipliers.hpp"
#include "zlab/orlicz.hpp"
#include "zlab/sparse.hpp"
#include "zlab/timefreq.hpp"
#include "zlab/weights.hpp"
#include "zlab/zygmund.hpp"

namespace zlab {

using json = nlohmann::json;

/// Finite doubles as numbers; ±inf and NaN as the strings "inf", "-inf", "nan".
json number(double v);
double to_double(const json& j);

json to_json(const Interval& i);
json to_json(const DyadicInterval& i);
DyadicInterval dyadic_from_json(const json& j);

/// {"generator": "explicit"|"lacunary"|"finite", "points": [...], "window": [a,b]} plus the
/// lacunary parameters when present.
json to_json(const SingularSet& xi);
SingularSet singular_set_from_json(const json& j);

/// {"family": "Y_ps", "p": ..., "s": ...}
json to_json(const YoungFunction& y);
YoungFunction young_from_json(const json& j);

json to_json(const ZygmundEstimate& e);
json to_json(const StepSymbol& s);
StepSymbol step_symbol_from_json(const json& j);
/// Grid, sampled values as [re, im] pairs, class tag and norm.
json to_json(const Symbol& m);
json to_json(const TileCollection& q);
json to_json(const SparseCollection& s);
SparseCollection sparse_collection_from_json(const json& j);

/// CSV table with RFC-4180 quoting; numbers printed with 17 significant digits.
class CsvTable {
 public:
  using Cell = std::variant<double, std::string>;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<Cell> row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double v);
std::string csv_quote(const std::string& s);

CsvTable audit_table(const std::vector<AuditRow>& rows);
CsvTable scan_table(const ScanReport& r);

}  // namespace zlab
