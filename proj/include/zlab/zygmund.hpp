#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zlab/grids.hpp"
#include "zlab/orlicz.hpp"

namespace zlab {

struct OptimizerConfig {
  int random_restarts = 6;
  int max_iterations = 400;
  double tolerance = 1e-12;
  std::uint64_t seed = 1;
  /// Largest allowed max(𝕂) - min(𝕂).
  std::int64_t frequency_cap = 4096;
  int oversample = 8;
};

struct ZygmundEstimate {
  double value = 0.0;
  std::vector<std::int64_t> frequencies;
  std::vector<cplx> certificate;
  std::string method;
  std::uint64_t seed = 0;
  /// multiscale: the n range scanned and the maximizing n
  std::vector<int> n_range;
  std::optional<int> best_n;
  /// maximal multiscale: the winning selection and its label
  std::vector<double> selection;
  std::string selection_label;
};

/// ‖Σ a_k e^{2πik·}‖_{X'} on an oversampled grid; L^∞ uses grid max with a
/// Newton refinement.
double evaluate_certificate(const std::vector<std::int64_t>& k, const std::vector<cplx>& a,
                            const OrliczSpace& x, int oversample = 8);

/// Lower bound on 𝒵(X,𝕂) by conditional-gradient ascent on the unit sphere.
ZygmundEstimate zygmund_constant(const std::vector<std::int64_t>& k, const OrliczSpace& x,
                                 const OptimizerConfig& cfg = {});

/// n values for which ⌊2^n Ξ⌋ has at least two elements and span ≤ cap.
std::vector<int> default_n_range(const std::vector<double>& xi, std::int64_t cap);

ZygmundEstimate multiscale_constant(const std::vector<double>& xi, const OrliczSpace& x,
                                    std::optional<std::vector<int>> n_range = std::nullopt,
                                    const OptimizerConfig& cfg = {});

struct SelectionConfig {
  int random_selections = 4;
  std::uint64_t seed = 1;
};

ZygmundEstimate maximal_multiscale_constant(const SingularSet& xi, const OrliczSpace& x,
                                            const SelectionConfig& sel = {},
                                            const OptimizerConfig& cfg = {});

struct ScalingRow {
  double epsilon;
  double estimate;
  int best_n;
};

struct ScalingProbe {
  std::vector<ScalingRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
};

ScalingProbe lacunary_scaling_probe(double gamma, int tau, int depth,
                                    const std::vector<double>& epsilons,
                                    const OptimizerConfig& cfg = {});

/// Least-squares slope and intercept of y against x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace zlab
