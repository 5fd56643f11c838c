#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zlab/grids.hpp"
#include "zlab/signal.hpp"

namespace zlab {

/// m𝟙_ω = Σ_j heights[j]·𝟙_{pieces[j]} on one component ω of ℝ∖Ξ.
struct StepComponent {
  Interval omega;
  std::vector<Interval> pieces;
  std::vector<double> heights;
};

struct StepSymbol {
  std::vector<StepComponent> components;
  double operator()(double xi) const;
};

/// Validates disjoint pieces inside their component; throws NotStepFunction.
void validate_steps(const StepSymbol& s);

enum class SymbolClass { HM, Mar, Rpq };

struct Symbol {
  std::vector<cplx> values;  // m(ξ_q) on the DFT slots of the grid
  double a = 0.0;
  double b = 1.0;
  SingularSet xi;
  SymbolClass cls = SymbolClass::HM;
  int hm_order = 2;
  double p = 1.0;
  double q = 1.0;
  double norm = 0.0;
  std::function<cplx(double)> eval;  // optional analytic form used for refinement
  std::optional<StepSymbol> steps;

  std::size_t size() const { return values.size(); }
};

/// Samples fn at the DFT frequencies of the grid (N, [a,b)).
std::vector<cplx> sample_symbol(const std::function<cplx(double)>& fn, std::size_t n, double a, double b);

Symbol make_symbol(const std::function<cplx(double)>& fn, const SingularSet& xi, std::size_t n, double a,
                   double b, SymbolClass cls = SymbolClass::HM);
Symbol step_symbol(const StepSymbol& steps, const SingularSet& xi, std::size_t n, double a, double b,
                   SymbolClass cls = SymbolClass::Mar, double p = 1.0, double q = 1.0);

/// Random superposition of bumps in the coordinate log((ξ-l)/(r-ξ)) of each
/// component, scaled so that hm_norm = 1.
Symbol synth_hm_symbol(const SingularSet& xi, int order, std::uint64_t seed, std::size_t n, double a, double b);

struct HmReport {
  double value = 0.0;
  /// largest change between step ρ and ρ/2 across samples, relative
  double refinement_gap = 0.0;
  std::size_t samples = 0;
};

/// sup_{j ≤ order} sup_ξ dist(ξ,Ξ)^j |m^{(j)}(ξ)| over the band, with geometric
/// clustering toward singular points and a step-halving convergence check.
HmReport hm_norm_report(const Symbol& m, int order);
double hm_norm(const Symbol& m, int order);

/// sup_ω (max_ω |m| + Var_ω m) on grid samples (exact on step symbols).
double mar_norm(const Symbol& m);
double mar_norm(const StepSymbol& s);

/// Class-specific norm: HM, Mar, or the Lorentz coefficient norm of an R_{p,q} step atom.
double symbol_norm(const Symbol& m);

/// T_m f via raw DFT, pointwise product, inverse DFT.
SampledSignal apply_multiplier(const std::vector<cplx>& m, const SampledSignal& f);
SampledSignal apply_multiplier(const Symbol& m, const SampledSignal& f);

/// (Σ_{ω ∈ Ω_Ξ} |T_{m𝟙_ω} f|^2)^{1/2}; frequencies on Ξ belong to no ω.
SampledSignal rough_square_function(const SingularSet& xi, const std::vector<cplx>& m, const SampledSignal& f);

/// Lower approximation of G_Ξ f: per Whitney interval, the sup over a finite
/// dictionary of adapted profiles, then ℓ^2 over intervals.
SampledSignal smooth_square_function(const SingularSet& xi, const SampledSignal& f, int dict_size = 8);

/// ‖(2^n #{j : |a_j| ∈ [2^n, 2^{n+1})}^{1/p})_n‖_{ℓ^q}; q = ∞ allowed.
double lorentz_seq_norm(const std::vector<double>& a, double p, double q);

/// m𝟙_ω = J^{-1/p} Σ_j ε_{j,ω} 𝟙_{α(j,ω)}, |ε| ≤ 1, J_ω ≤ J.
struct RAtom {
  StepSymbol steps;  // heights hold J^{-1/p} ε_{j,ω}
  double p = 1.0;
  double q = 1.0;
  std::optional<int> j;
};

/// Definition check for an R_{p,1,J} atom; reason receives the first failure.
bool check_jatom(const RAtom& atom, std::string* reason = nullptr);

struct WeightedAtom {
  double weight = 0.0;
  RAtom atom;
};

struct AtomDecomposition {
  std::vector<WeightedAtom> atoms;
  /// Σ_J J^{1/p} A_J divided by sup_ω ‖a_{·,ω}‖_{ℓ^{p,1}}
  double comparability = 0.0;
};

AtomDecomposition atom_decompose(const StepSymbol& m, double p);

/// Σ weight·atom evaluated at ξ.
double evaluate_decomposition(const AtomDecomposition& d, double xi);

/// Endpoint sets Ξ_{m,j}: one per j for p = 1, their union for p = 2.
std::vector<SingularSet> lift_singular_set(const RAtom& atom, const SingularSet& xi);

}  // namespace zlab
