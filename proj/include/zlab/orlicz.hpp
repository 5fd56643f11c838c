#pragma once

#include <vector>

#include "zlab/common.hpp"
#include "zlab/signal.hpp"

namespace zlab {

/// Y_{p,s}(t) = t^p · log^s(e + t). s = 0 gives L^p.
struct YoungFunction {
  double p = 1.0;
  double s = 0.0;

  static YoungFunction lp(double p) { return {p, 0.0}; }

  double operator()(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
  bool is_lp() const { return s == 0.0; }
  bool is_linear() const { return p == 1.0 && s == 0.0; }
  bool operator==(const YoungFunction&) const = default;
};

using OrliczSpace = YoungFunction;

/// max Y(ab)/(Y(a)Y(b)) over a log-spaced grid of a,b ∈ [10^-lo, 10^hi].
double submultiplicative_constant(const YoungFunction& y, double lo = 4.0, double hi = 4.0,
                                  int points = 81);

/// Σ_j w_j Y(v_j / t).
double modular(const std::vector<double>& values, const std::vector<double>& weights,
               const YoungFunction& y, double t);

/// inf{t > 0 : Σ_j w_j Y(v_j/t) ≤ 1} by bisection. Empty weights mean w_j = 1/n
/// (the unit interval sampled uniformly).
double luxemburg_norm(const std::vector<double>& values, const std::vector<double>& weights,
                      const YoungFunction& y);
double luxemburg_norm(const std::vector<double>& values, const YoungFunction& y);

/// Closed-form (Σ w_j v_j^p)^{1/p}.
double lp_norm(const std::vector<double>& values, const std::vector<double>& weights, double p);

/// Norm dispatch: closed form for L^p, bisection otherwise.
double orlicz_norm(const std::vector<double>& values, const std::vector<double>& weights,
                   const OrliczSpace& x);

enum class Tail { None, Plus, Minus };

/// χ(x) = 1/(1+x^2).
inline double chi(double x) { return 1.0 / (1.0 + x * x); }

/// ⟨f⟩_{X,I} (tail None) or ⟨f⟩_{X,I,±} with weight χ((x-c_I)/ℓ_I)^{±dec}.
double local_average(const SampledSignal& f, const Interval& i, const OrliczSpace& x,
                     Tail tail = Tail::None, int dec = kDec);
double local_average(const std::vector<double>& absf, double a, double b, const Interval& i,
                     const OrliczSpace& x, Tail tail = Tail::None, int dec = kDec);

/// Sample index range [first, last) of grid points x_j inside [i.a, i.b).
std::pair<std::size_t, std::size_t> sample_range(double a, double h, std::size_t n, const Interval& i);

/// Sup of ⟨f⟩_{X,I} over I ∋ x_j taken from the listed shifted dyadic grids.
std::vector<double> orlicz_maximal(const std::vector<double>& absf, double a, double b,
                                   const OrliczSpace& x, const std::vector<int>& shifts = {0, 1, 2});
std::vector<double> orlicz_maximal(const SampledSignal& f, const OrliczSpace& x,
                                   const std::vector<int>& shifts = {0, 1, 2});

/// B_p(X) = (∫_0^1 s^{p-1} Y(1/s) ds)^{1/p}; throws Divergent when p ≤ p_X.
double bp_constant(const OrliczSpace& x, double p);

/// Y*(u) = sup_t (ut - Y(t)), tabulated on t and refined by Newton.
class ComplementaryYoung {
 public:
  explicit ComplementaryYoung(const YoungFunction& y);
  double operator()(double u) const;
  /// The t with Y'(t) = u (0 when u ≤ Y'(0)).
  double argmax(double u) const;

 private:
  YoungFunction y_;
  double slope0_;
  std::vector<double> t_;
  std::vector<double> u_;
};

/// ‖f‖_{X'} for f sampled on [0,1): L^{p'} for X = L^p, and the Amemiya
/// (Orlicz) norm of Y* for X = Y_{1,s}.
double dual_norm(const std::vector<double>& absf, const OrliczSpace& x);
double dual_norm(const SampledSignal& f, const OrliczSpace& x);

/// Amemiya norm inf_k (1 + Σ w_j Y*(k v_j)) / k; the minimizing k is
/// written to kstar when given.
double amemiya_norm(const std::vector<double>& values, const std::vector<double>& weights,
                    const ComplementaryYoung& ystar, double* kstar = nullptr);

}  // namespace zlab
