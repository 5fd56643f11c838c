#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "zlab/grids.hpp"
#include "zlab/orlicz.hpp"
#include "zlab/signal.hpp"

namespace zlab {

/// exp(-σ/(t(1-t))) on (0,1), zero elsewhere.
double smooth_bump(double t, double sigma = 1.0);

/// η̂(ξ) = b(ξ) / sqrt(Σ_k b(ξ - k/2)^2).
class GaborWindow {
 public:
  explicit GaborWindow(double smoothness = 1.0) : sigma_(smoothness) {}
  double hat(double xi) const;
  double smoothness() const { return sigma_; }
  /// η sampled on the grid (N, [a,b)).
  SampledSignal sample(std::size_t n, double a, double b) const;
  /// max over the grid frequencies of |Σ_k η̂(ξ - k/2)^2 - 1|.
  double partition_error(const SampledSignal& grid) const;

 private:
  double sigma_;
};

/// ⟨f, η_{I,k}⟩ for I ∈ 𝒟_m inside the window and every k reaching the band.
struct GaborCoefficients {
  int m = 0;
  std::int64_t k_min = 0;
  std::size_t intervals = 0;
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 0;
  /// coeffs[k - k_min][j] for interval [a + jℓ, a + (j+1)ℓ); empty rows are skipped modulations
  std::vector<std::vector<cplx>> coeffs;
  double interval_length() const { return std::ldexp(1.0, -m); }
};

GaborCoefficients gabor_analyze(const SampledSignal& f, int m, const GaborWindow& window = GaborWindow{},
                                const std::vector<std::int64_t>* keep = nullptr);
SampledSignal gabor_synthesize(const GaborCoefficients& c, const GaborWindow& window = GaborWindow{});
/// Σ |I| |⟨f,η_{I,k}⟩|^2.
double gabor_energy(const GaborCoefficients& c);

struct Tile {
  DyadicInterval time;
  DyadicInterval freq;
  double scale() const { return time.length(); }
  auto operator<=>(const Tile&) const = default;
};

struct TileCollection {
  std::vector<Tile> tiles;
  /// component index (into complement_cover(Ξ)) of each tile's frequency interval
  std::vector<int> component;
  int component_count = 0;
  std::size_t size() const { return tiles.size(); }
  bool empty() const { return tiles.empty(); }
};

/// Frequency scales 2^s resolvable on the grid: ℓ_ω ≥ 2/L and ℓ_ω ≤ band/8.
std::pair<int, int> resolvable_frequency_scales(const SampledSignal& grid);

/// ℙ^{O_Ξ}: Whitney intervals of ℝ∖Ξ in the one-third-shifted frequency grid,
/// kept when fully inside the band, paired with every time interval of the
/// dual length inside the window.
TileCollection tiles_for_set(const SingularSet& xi, const SampledSignal& grid,
                             std::optional<std::pair<int, int>> scale_range = std::nullopt,
                             int freq_shift = 1);

/// Exhaustive almost-orthogonality check: frequency intervals equal or disjoint.
bool almost_orthogonal(const TileCollection& q);

/// Spectral profile of a wave packet prototype, supported in (0,1) with ∫ = 1.
struct PacketPrototype {
  std::function<double(double)> profile;
  static PacketPrototype bump(double sigma = 1.0);
};

/// Tile-based operators on a fixed grid. Packets have spectrum
/// profile((ξ - left_ω)/ℓ_ω)·e^{-2πi c_I ξ}, so ℓ_I‖φ_P‖_∞ = 1.
class TileEngine {
 public:
  TileEngine(const SampledSignal& grid, PacketPrototype phi = PacketPrototype::bump(),
             PacketPrototype psi = PacketPrototype::bump());

  /// ⟨f, φ_{I,ω}⟩ for every time interval I of length 1/ℓ_ω in the window, ordered by position.
  std::vector<cplx> coefficients(const std::vector<cplx>& fhat, const DyadicInterval& omega) const;
  /// Adds Σ_j |I_j| c_j ψ̂_{I_j,ω} to the spectrum out.
  void synthesize_into(const std::vector<cplx>& c, const DyadicInterval& omega, std::vector<cplx>& out) const;

  /// T_Q f = Σ_P |I_P| ⟨f,φ_P⟩ ψ_P.
  SampledSignal apply(const TileCollection& q, const SampledSignal& f) const;
  /// T_{Q ∩ group g} f for each group, groups given per tile.
  std::vector<SampledSignal> apply_grouped(const TileCollection& q, const std::vector<int>& group,
                                           int group_count, const SampledSignal& f) const;
  /// ⟨f, φ_P⟩ for each tile of q.
  std::vector<cplx> tile_coefficients(const TileCollection& q, const SampledSignal& f) const;
  /// Sampled packet φ_P (or ψ_P).
  SampledSignal packet(const Tile& p, bool analysis = true) const;
  /// ℓ_I^{1+j} ‖(e^{-2πi c_ω x} φ_P)^{(j)} χ_I^{-D}‖_∞ for j = 0..4.
  std::vector<double> wavsupp_profile(const Tile& p, int d = 0) const;

  std::size_t position_index(const DyadicInterval& time) const;
  const SampledSignal& grid() const { return grid_; }

 private:
  void band(const DyadicInterval& omega, long long& q0, long long& q1) const;
  SampledSignal grid_;
  PacketPrototype phi_;
  PacketPrototype psi_;
};

struct ProjectionResult {
  SampledSignal g;
  std::vector<std::int64_t> retained;
  double truncation_error = 0.0;
};

/// g = Σ_m Σ_{k ∈ K} |L| ⟨f, η_{L^{+m},k}⟩ η_{L^{+m},k}, K = {k : dist(2ℓ_L Ξ, k) < 18}.
ProjectionResult project(const SampledSignal& f, const DyadicInterval& l, const SingularSet& xi,
                         const GaborWindow& window = GaborWindow{});

/// max over tiles P of ℙ^{O_Ξ} with ℓ_P ≥ ℓ_L of |⟨f - g, φ_P⟩|.
double projection_defect(const SampledSignal& f, const SampledSignal& g, const DyadicInterval& l,
                         const SingularSet& xi);

/// ⟨g⟩_{2,L,-} / ⟨f⟩_{X,L}.
double projection_ratio(const SampledSignal& f, const SampledSignal& g, const DyadicInterval& l,
                        const OrliczSpace& x);

/// Σ_ω profile((ξ - left_ω)/ℓ_ω)^2: the symbol of T_ℙ for a full tile family.
std::vector<double> tile_family_symbol(const TileCollection& q, const SampledSignal& grid,
                                       const PacketPrototype& proto = PacketPrototype::bump());

struct ThreeGridFit {
  double c[3] = {0.0, 0.0, 0.0};
  double relative_residual = 0.0;
};

/// Least-squares fit of m by Σ_j c_j T_{ℙ_j}, ℙ_j built on the three shifted frequency grids.
ThreeGridFit three_grid_fit(const std::vector<cplx>& m, const SingularSet& xi, const SampledSignal& grid);

struct DecayRow {
  double separation;
  double value;
};

/// ‖𝟙_S T_{ℙ(R)} f‖_2 / (|R|^{1/2}⟨f⟩_{2,R,+}) against dist(R,S)/ℓ for equal-length R, S.
std::vector<DecayRow> single_scale_decay(const SingularSet& xi, const SampledSignal& f, int generation,
                                         int max_separation);

}  // namespace zlab
