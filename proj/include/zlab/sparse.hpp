#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zlab/grids.hpp"
#include "zlab/orlicz.hpp"
#include "zlab/signal.hpp"
#include "zlab/timefreq.hpp"

namespace zlab {

struct SparseCollection {
  std::vector<DyadicInterval> intervals;
  /// pairwise disjoint major subsets, one list of segments per interval
  std::vector<std::vector<Interval>> witnesses;
  double eta = 0.5;
};

struct SparseCheck {
  bool sparse = false;
  /// max over tested roots of Σ_{S ⊆ I}|S| / |I|
  double packing = 0.0;
  DyadicInterval worst_root;
  std::vector<std::vector<Interval>> witnesses;
};

/// Packing test over members and their ancestors, then bottom-up witnesses:
/// each interval, shortest first, claims the leftmost η|S| of its free measure.
SparseCheck is_sparse(const std::vector<DyadicInterval>& s, double eta);

/// Witnesses pairwise disjoint, inside their interval, and of measure ≥ η|S|.
bool verify_witnesses(const SparseCollection& s, double tol = 1e-12);

/// (Σ_S ⟨f⟩_{X,S(,±)}^p 𝟙_S)^{1/p} at every grid point.
std::vector<double> sparse_operator_apply(const std::vector<DyadicInterval>& s, const SampledSignal& f,
                                          const OrliczSpace& x, double p = 1.0, Tail tail = Tail::None);

/// Σ_S |S| ⟨f1⟩_{X1,S(,±)} ⟨f2⟩_{X2,S(,±)}.
double sparse_form(const std::vector<DyadicInterval>& s, const SampledSignal& f1, const SampledSignal& f2,
                   const OrliczSpace& x1, const OrliczSpace& x2, Tail tail = Tail::None);

/// Stopping collection ℒ ⊂ 𝒟(3I) with its derived families.
struct StoppingCollection {
  DyadicInterval root;
  std::vector<DyadicInterval> l;

  /// ℒ': L^{+j} ∈ 𝒟(I), j ∈ {0,±1}; ℒ'' its maximal elements
  std::vector<DyadicInterval> l_prime() const;
  std::vector<DyadicInterval> l_second() const;
  /// G ∈ 𝒢 iff G ∈ 𝒟(I) and G ⊄ 3L for every L ∈ ℒ
  bool in_good(const DyadicInterval& g) const;
  bool disjoint() const;
};

/// ‖f𝟙_{3I∖B}‖_∞ + sup_{L∈ℒ} inf_L M_X f.
double stopping_lambda(const StoppingCollection& sc, const SampledSignal& f, const OrliczSpace& x);

struct AuditRow {
  std::string node;
  double budget = 0.0;
  double constant = 0.0;
};

std::string node_label(const DyadicInterval& i);

/// Tiles whose time interval lies inside the interval.
TileCollection restrict_tiles(const TileCollection& q, const Interval& region);

/// ℓ^2(ω ∈ Ω_Ξ) norm of T_{ℙ^ω} f at every grid point.
std::vector<double> vector_model_norm(const TileEngine& engine, const TileCollection& q, const SampledSignal& f);

struct RoughConfig {
  DyadicInterval root{0, 0, 0};
  /// Θ ≤ 0 requests calibration on {f}
  double theta = 0.0;
  /// stand-in for 𝒵⋆(X,Ξ)
  double zygmund_star = 1.0;
  int max_retries = 6;
  /// enlargements 3·2^k I, k < recover_levels, in the sharp re-cover
  int recover_levels = 2;
};

struct RoughResult {
  SparseCollection tailed;
  SparseCollection sharp;
  double theta = 0.0;
  int retries = 0;
  double constant_tailed = 0.0;
  double constant_sharp = 0.0;
  double max_budget = 0.0;
  std::vector<AuditRow> audit;
  std::vector<double> lhs;
  std::vector<double> rhs_tailed;
  std::vector<double> rhs_sharp;
};

/// Smallest Θ = 2^k with |{x ∈ I : ‖T_{ℙ^ω(I^{+j})} f‖ > Θ C ⟨f⟩_{X,I,+}}| ≤ 2^{-9}|I|
/// for I in the first generations below the root, |j| ≤ 1, every f of the corpus.
double calibrate_theta(const std::vector<SampledSignal>& corpus, const SingularSet& xi, const OrliczSpace& x,
                       const DyadicInterval& root, double zygmund_star, int generations = 2);

RoughResult build_sparse_rough(const SampledSignal& f, const SingularSet& xi, const OrliczSpace& x,
                               const RoughConfig& cfg = {});

struct BilinearConfig {
  DyadicInterval root{0, 0, 0};
  double theta = 16.0;
};

struct BilinearResult {
  SparseCollection s;
  std::vector<StoppingCollection> stopping;
  double form = 0.0;
  double node_form_sum = 0.0;
  double sparse_value = 0.0;
  double constant = 0.0;
  double max_node_constant = 0.0;
  double lambda_ratio[2] = {0.0, 0.0};
  bool nested = true;
  std::vector<AuditRow> audit;
};

/// Stopping-time construction for |⟨T_Q f1, f2⟩|; tiles of q are assigned to
/// the deepest node containing their time interval.
BilinearResult build_sparse_bilinear(const SampledSignal& f1, const SampledSignal& f2, const SingularSet& xi,
                                     const OrliczSpace& x1, const OrliczSpace& x2, const TileCollection& q,
                                     const BilinearConfig& cfg = {});

using CarlesonSequence = std::map<DyadicInterval, double>;

/// a_I = Σ_{P : I_P = I} |⟨f, φ_P⟩|^2 over ℙ^{O_Ξ}, restricted to I ∈ 𝒟(Q) when a root Q
/// is given; then supp f ⊂ (1+1/5)Q is required (SupportViolation).
CarlesonSequence tile_carleson_sequence(const SampledSignal& f, const SingularSet& xi,
                                        std::optional<DyadicInterval> root = std::nullopt);

struct CarlesonResult {
  SparseCollection j;
  SparseCollection sharp;
  double carleson_norm = 0.0;
  double constant = 0.0;
  double constant_sharp = 0.0;
  double max_budget = 0.0;
  double max_selection_budget = 0.0;
  std::vector<AuditRow> audit;
  std::vector<double> lhs;
  std::vector<double> rhs;
};

/// Generalized Carleson norm with major collections chosen greedily (heaviest
/// subtrees dropped first under the |I|/4 budget); throws NotCarleson.
double generalized_carleson_norm(const CarlesonSequence& a, const SampledSignal& f, const OrliczSpace& x);

CarlesonResult carleson_to_sparse(const CarlesonSequence& a, const SampledSignal& f, const OrliczSpace& x);

/// Adds the smallest shifted-grid interval containing 3·2^k I for k < levels.
std::vector<DyadicInterval> sharp_recover(const std::vector<DyadicInterval>& s, int levels);

}  // namespace zlab
