#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "zlab/grids.hpp"
#include "zlab/orlicz.hpp"
#include "zlab/signal.hpp"

namespace zlab {

enum class WeightFamily { Power, Step, Custom };

/// Positive weight sampled on the grid (N, [a,b)).
struct Weight {
  std::vector<double> w;
  double a = 0.0;
  double b = 1.0;
  WeightFamily family = WeightFamily::Custom;
  std::string label;

  /// |x - x0|^alpha, evaluated at the sample midpoints so that the singularity is never hit.
  static Weight power(std::size_t n, double a, double b, double x0, double alpha);
  /// value lo left of the cut, hi right of it.
  static Weight step(std::size_t n, double a, double b, double cut, double lo, double hi);
  static Weight custom(std::vector<double> w, double a, double b);
  static Weight constant(std::size_t n, double a, double b, double c = 1.0);

  std::size_t size() const { return w.size(); }
  double h() const { return (b - a) / static_cast<double>(w.size()); }
  /// σ = w^{-1/(p-1)}.
  Weight dual(double p) const;
};

enum class CharKind { Ap, A1, Ainf, RH };

struct CharacteristicResult {
  double value = 0.0;
  Interval argmax;
};

/// Sup over the intervals of the listed shifted dyadic grids inside the window. param is p
/// for A_p and s for RH_s. A_∞ uses the dyadic maximal function of each grid.
CharacteristicResult characteristic(const Weight& w, CharKind kind, double param = 2.0,
                                    const std::vector<int>& shifts = {0, 1, 2});

/// Exhaustive scan over every run of consecutive samples; O(N^2) (O(N^3) for A_∞).
CharacteristicResult characteristic_bruteforce(const Weight& w, CharKind kind, double param = 2.0);

using Operator = std::function<SampledSignal(const SampledSignal&)>;

/// ‖g‖_{L^p(w)} and sup_λ λ w({|g| > λ})^{1/p} over 64 levels per decade.
double weighted_lp_norm(const std::vector<double>& absg, const Weight& w, double p);
double weighted_weak_norm(const std::vector<double>& absg, const Weight& w, double p);

struct NormEstimate {
  double value = 0.0;
  std::size_t argmax = 0;
};

/// max over the corpus of ‖op f‖ / ‖f‖_{L^p(w)}; weak selects the L^{p,∞}(w) numerator.
NormEstimate empirical_weighted_norm(const Operator& op, double p, const Weight& w,
                                     const std::vector<SampledSignal>& corpus, bool weak = false);

/// Seeded corpus: Gaussian noise, indicators, lacunary trains, smooth bumps.
std::vector<SampledSignal> weighted_corpus(std::size_t n, double a, double b, std::uint64_t seed,
                                           std::size_t count);

/// α(p,τ) = τ/(2(p-1)) + max{1/(p-1), 1};  β(p,τ) = τ/(2(p-1)) + 1.
double alpha_exponent(double p, double tau);
double beta_exponent(double p, double tau);

struct ScanRow {
  double parameter = 0.0;
  double characteristic = 0.0;
  double norm = 0.0;
  double predicted = 0.0;
  double fitted = 0.0;
  double residual = 0.0;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double predicted = 0.0;
};

/// Least-squares slope of log y against log x; residuals written back per row.
void fit_loglog(std::vector<ScanRow>& rows, const std::vector<double>& x, const std::vector<double>& y,
                double& slope, double& intercept);

/// Power weights |x - x0|^a over the exponents, empirical strong (or weak) norm against [w]_{A_p}.
ScanReport exponent_scan(const Operator& op, double p, double tau, const std::vector<double>& exponents,
                         const std::vector<SampledSignal>& corpus, double x0 = 0.0, bool weak = false);

/// Unweighted ‖op‖_{L^p} over p↓1: slope of log norm against log 1/(p-1), annotated with τ/2 + 1.
ScanReport blowup_scan(const Operator& op, double tau, const std::vector<double>& ps,
                       const std::vector<SampledSignal>& corpus);

struct ModularRow {
  double lambda = 0.0;
  double level_mass = 0.0;
  double modular = 0.0;
  double ratio = 0.0;
};

struct ModularReport {
  std::vector<ModularRow> rows;
  double max_ratio = 0.0;
};

/// w({|op f| > λ}) / ∫ Y_X(|f|/λ) w over the λ-grid.
ModularReport modular_check(const Operator& op, const SampledSignal& f, const std::vector<double>& lambdas,
                            const OrliczSpace& x, const Weight& w);

struct WitnessInput {
  std::map<std::int64_t, cplx> coeffs;  // f̂(k) of the trigonometric polynomial
  SingularSet xi;
  double mu = 1.0;  // power of two
  double eps = 1.0 / 64.0;
  OrliczSpace x = YoungFunction::lp(1.0);
  /// half-length R of the evaluation range [-R, R) and samples per unit length
  double range = 2048.0;
  std::size_t per_unit = 0;  // 0 picks a power of two ≥ 8·max|k|, at least 16
};

struct WitnessSeries {
  std::vector<double> x;
  std::vector<double> tmqf;
};

struct LowerBoundWitness {
  std::vector<std::int64_t> frequencies;  // ⌊μΞ⌋ ∩ supp f̂
  double s = 0.0;                         // (Σ_{k∈⌊μΞ⌋} |f̂(k)|^2)^{1/2}
  double lambda = 0.0;                    // s/2
  double c = 0.0;                         // calibrated: Φ(y) ≥ 3/4 for |y| ≤ c
  double delta = 0.0;                     // core half-width around the integers
  double core_min_ratio = 0.0;            // min |T_m[Qf]| / s on the core set
  std::size_t core_points = 0;
  double pf_excess = 0.0;                 // max(|Pf| - |f|) over the grid, relative to ‖f‖_∞
  double level_set_measure = 0.0;         // |{|T_m[Qf]| > λ}|
  double modular_q = 0.0;                 // ∫_ℝ Y(|Qf|/λ)
  double modular_f = 0.0;                 // ∫_[0,1] Y(|f|/λ)
  double cure_ratio = 0.0;                // modular_q / modular_f
  double witness_ratio = 0.0;             // level_set_measure / modular_q, a lower bound for [T_m]_X
  WitnessSeries series;                   // decimated |T_m[Qf]| for plotting
};

/// Builds Pf, Qf and m from a bump φ (∫φ = 1, supp ⊂ [-1,1]) and a plateau ψ
/// (𝟙_[-4,4] ≤ ψ ≤ 𝟙_[-6,6]); throws NoSingularFrequency.
LowerBoundWitness lower_bound_witness(const WitnessInput& in);

}  // namespace zlab
