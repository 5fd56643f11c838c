#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zlab/common.hpp"

namespace zlab {

/// Interval [(k + (-1)^n t/3)·2^{-n}, (k + 1 + (-1)^n t/3)·2^{-n}) of the
/// shifted dyadic grid t ∈ {0,1,2}. t = 0 is the standard grid.
struct DyadicInterval {
  int n = 0;
  std::int64_t k = 0;
  int shift = 0;

  double length() const;
  double left() const;
  double right() const;
  double center() const { return 0.5 * (left() + right()); }
  Interval as_interval() const { return {left(), right()}; }

  DyadicInterval parent() const;
  DyadicInterval ancestor(int m) const;
  std::pair<DyadicInterval, DyadicInterval> children() const;
  DyadicInterval translate(std::int64_t j) const { return {n, k + j, shift}; }

  /// Exact inclusion for intervals of the same grid.
  bool contains(const DyadicInterval& other) const;
  /// Exact disjointness for intervals of the same grid.
  bool disjoint(const DyadicInterval& other) const;

  auto operator<=>(const DyadicInterval&) const = default;
};

/// Standard-grid interval containing x at generation n.
DyadicInterval dyadic_containing(double x, int n, int shift = 0);

enum class GeneratorKind { Explicit, Lacunary, Finite };

struct LacunaryParams {
  double gamma = 2.0;
  int tau = 1;
  double theta = 0.0;
  int depth = 5;
};

class SingularSet {
 public:
  SingularSet() = default;
  SingularSet(std::vector<double> points, Interval window,
              GeneratorKind kind = GeneratorKind::Explicit);

  const std::vector<double>& points() const { return points_; }
  const Interval& window() const { return window_; }
  GeneratorKind kind() const { return kind_; }
  const std::optional<LacunaryParams>& lacunary() const { return lacunary_; }
  void set_lacunary(const LacunaryParams& p) { lacunary_ = p; kind_ = GeneratorKind::Lacunary; }
  /// Smallest gap between stored points (infinity for fewer than two points).
  double resolution() const;
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<double> points_;
  Interval window_{-kInf, kInf};
  GeneratorKind kind_ = GeneratorKind::Explicit;
  std::optional<LacunaryParams> lacunary_;
};

/// Disjoint open intervals; endpoints may be ±∞.
struct OpenSetCover {
  std::vector<Interval> intervals;
};

/// ℝ∖Ξ as a union of open intervals, including the two unbounded rays.
OpenSetCover complement_cover(const SingularSet& xi);

struct WhitneyResult {
  std::vector<DyadicInterval> intervals;
  bool coverage_complete = true;
  std::string diagnostic;
};

/// Maximal I with 3ℓ_I ≤ dist(I, ℝ∖O) ≤ 5ℓ_I and ℓ_I = 2^s, s ∈ [s_min, s_max].
/// Coverage is judged on the optional window; an unbounded gap is reported
/// through coverage_complete rather than thrown.
WhitneyResult whitney_decompose(const OpenSetCover& o, int shift, int s_min, int s_max,
                                std::optional<Interval> window = std::nullopt);

/// Exact test of the Whitney inequality for a single interval.
bool whitney_admissible(const OpenSetCover& o, const DyadicInterval& i);

std::vector<Interval> complementary_intervals(const SingularSet& xi, Interval window);

SingularSet lacunary_set(double gamma, int tau, double theta, int depth, Interval window);

/// Recursive check of the γ-lacunary order-τ property about θ, allowing the
/// finite truncation to stop early.
bool check_lacunary(const std::vector<double>& points, double gamma, int tau, double theta);

std::vector<std::int64_t> rescale_floor(const SingularSet& xi, int n);
std::vector<std::int64_t> rescale_floor(const std::vector<double>& xi, int n);

/// {k ∈ ℤ : dist(A,k) < radius}.
std::vector<std::int64_t> neighborhood(const std::vector<double>& a, double radius = 9.0);

}  // namespace zlab
