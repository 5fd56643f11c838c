#include "zlab/timefreq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace zlab {

namespace {

bool near_integer(double v, double tol = 1e-9) { return std::abs(v - std::round(v)) <= tol * std::max(1.0, std::abs(v)); }

std::int64_t floor_mod(std::int64_t q, std::int64_t m) {
  const std::int64_t r = q % m;
  return r < 0 ? r + m : r;
}

std::size_t slot_of(std::int64_t q, std::size_t n) {
  return static_cast<std::size_t>(floor_mod(q, static_cast<std::int64_t>(n)));
}

// Number of length-ℓ intervals tiling the window, checking the lattice fits.
std::size_t lattice_count(double a, double len, double ell) {
  const double m = len / ell;
  if (!near_integer(m) || std::round(m) < 1.0 || !near_integer(a / ell))
    throw Error(ErrorCode::ScaleUnresolvable, "intervals of length " + std::to_string(ell) +
                                                  " do not tile the window");
  return static_cast<std::size_t>(std::llround(m));
}

double bump_integral(double sigma) {
  // ∫_0^1 b, midpoint rule on a fine grid; b is flat at both ends
  const int n = 4096;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += smooth_bump((i + 0.5) / n, sigma);
  return acc / n;
}

}  // namespace

double smooth_bump(double t, double sigma) {
  if (!(t > 0.0 && t < 1.0)) return 0.0;
  return std::exp(-sigma / (t * (1.0 - t)));
}

double GaborWindow::hat(double xi) const {
  const double b0 = smooth_bump(xi, sigma_);
  if (b0 == 0.0) return 0.0;
  const auto base = static_cast<long long>(std::floor(2.0 * xi));
  double acc = 0.0;
  for (long long k = base - 2; k <= base + 1; ++k) {
    const double v = smooth_bump(xi - 0.5 * static_cast<double>(k), sigma_);
    acc += v * v;
  }
  return b0 / std::sqrt(acc);
}

SampledSignal GaborWindow::sample(std::size_t n, double a, double b) const {
  SampledSignal grid = SampledSignal::zeros(n, a, b);
  std::vector<cplx> spec(n);
  for (std::size_t q = 0; q < n; ++q) spec[q] = hat(grid.xi(q));
  return SampledSignal::from_spectrum(spec, a, b);
}

double GaborWindow::partition_error(const SampledSignal& grid) const {
  double worst = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const double xi = grid.xi(q);
    const auto base = static_cast<long long>(std::floor(2.0 * xi));
    double acc = 0.0;
    for (long long k = base - 3; k <= base + 2; ++k) {
      const double v = hat(xi - 0.5 * static_cast<double>(k));
      acc += v * v;
    }
    worst = std::max(worst, std::abs(acc - 1.0));
  }
  return worst;
}

GaborCoefficients gabor_analyze(const SampledSignal& f, int m, const GaborWindow& window,
                                const std::vector<std::int64_t>* keep) {
  const double ell = std::ldexp(1.0, -m);
  if (ell < 2.0 * f.h())
    throw Error(ErrorCode::ScaleUnresolvable, "interval length below two samples");
  const std::size_t mm = lattice_count(f.a(), f.length(), ell);
  const std::size_t n = f.size();
  const double len = f.length();
  const std::vector<cplx> fhat = f.spectrum();

  std::set<std::int64_t> wanted;
  if (keep) wanted.insert(keep->begin(), keep->end());

  GaborCoefficients out;
  out.m = m;
  out.intervals = mm;
  out.a = f.a();
  out.b = f.b();
  out.n = n;

  const double umin = -static_cast<double>(n / 2) / static_cast<double>(mm);
  const double umax = (static_cast<double>(n / 2) - 1.0) / static_cast<double>(mm);
  const auto kmin = static_cast<std::int64_t>(std::floor(2.0 * umin)) - 2;
  const auto kmax = static_cast<std::int64_t>(std::ceil(2.0 * umax)) + 1;
  out.k_min = kmin;
  out.coeffs.assign(static_cast<std::size_t>(kmax - kmin + 1), {});

  const double shift = f.a() + 0.5 * ell;
  parallel_for(out.coeffs.size(), [&](std::size_t r) {
    const std::int64_t k = kmin + static_cast<std::int64_t>(r);
    if (keep && !wanted.count(k)) return;
    // u_q = q/M ∈ (k/2, k/2 + 1)
    const auto q0 = static_cast<std::int64_t>(std::floor(0.5 * k * static_cast<double>(mm)));
    const std::int64_t q1 = q0 + static_cast<std::int64_t>(mm) + 1;
    std::vector<cplx> buf(mm, cplx(0.0));
    bool any = false;
    for (std::int64_t q = q0; q <= q1; ++q) {
      if (q < -static_cast<std::int64_t>(n / 2) || q >= static_cast<std::int64_t>(n / 2)) continue;
      const double u = static_cast<double>(q) / static_cast<double>(mm);
      const double w = window.hat(u - 0.5 * static_cast<double>(k));
      if (w == 0.0) continue;
      const double xi = static_cast<double>(q) / len;
      buf[slot_of(q, mm)] += fhat[slot_of(q, n)] * w * std::polar(1.0, 2.0 * kPi * shift * xi) / len;
      any = true;
    }
    if (!any) return;
    fft_backward(buf);
    out.coeffs[r] = std::move(buf);
  });
  return out;
}

SampledSignal gabor_synthesize(const GaborCoefficients& c, const GaborWindow& window) {
  const double ell = c.interval_length();
  const std::size_t mm = c.intervals;
  const std::size_t n = c.n;
  const double len = c.b - c.a;
  const double shift = c.a + 0.5 * ell;
  std::vector<cplx> spec(n, cplx(0.0));
  for (std::size_t r = 0; r < c.coeffs.size(); ++r) {
    if (c.coeffs[r].empty()) continue;
    const std::int64_t k = c.k_min + static_cast<std::int64_t>(r);
    std::vector<cplx> buf = c.coeffs[r];
    fft_forward(buf);
    const auto q0 = static_cast<std::int64_t>(std::floor(0.5 * k * static_cast<double>(mm)));
    const std::int64_t q1 = q0 + static_cast<std::int64_t>(mm) + 1;
    for (std::int64_t q = q0; q <= q1; ++q) {
      if (q < -static_cast<std::int64_t>(n / 2) || q >= static_cast<std::int64_t>(n / 2)) continue;
      const double w = window.hat(static_cast<double>(q) / static_cast<double>(mm) - 0.5 * static_cast<double>(k));
      if (w == 0.0) continue;
      const double xi = static_cast<double>(q) / len;
      spec[slot_of(q, n)] += w * std::polar(1.0, -2.0 * kPi * shift * xi) * ell * buf[slot_of(q, mm)];
    }
  }
  return SampledSignal::from_spectrum(spec, c.a, c.b);
}

double gabor_energy(const GaborCoefficients& c) {
  double acc = 0.0;
  for (const auto& row : c.coeffs)
    for (const cplx& v : row) acc += std::norm(v);
  return acc * c.interval_length();
}

std::pair<int, int> resolvable_frequency_scales(const SampledSignal& grid) {
  const double len = grid.length();
  const double band = static_cast<double>(grid.size()) / len;
  const int s_min = static_cast<int>(std::ceil(std::log2(2.0 / len) - 1e-9));
  const int s_max = static_cast<int>(std::floor(std::log2(band / 8.0) + 1e-9));
  if (s_min > s_max)
    throw Error(ErrorCode::ScaleRangeTooNarrow, "grid resolves no frequency scale");
  return {s_min, s_max};
}

TileCollection tiles_for_set(const SingularSet& xi, const SampledSignal& grid,
                             std::optional<std::pair<int, int>> scale_range, int freq_shift) {
  const auto [s_min, s_max] = scale_range ? *scale_range : resolvable_frequency_scales(grid);
  const double len = grid.length();
  const double half_band = static_cast<double>(grid.size() / 2) / len;
  const Interval band{-half_band, half_band};
  const OpenSetCover cover = complement_cover(xi);
  const WhitneyResult w = whitney_decompose(cover, freq_shift, s_min, s_max, band);

  TileCollection out;
  out.component_count = static_cast<int>(cover.intervals.size());
  for (const DyadicInterval& omega : w.intervals) {
    if (omega.left() < band.a - 1e-12 || omega.right() > band.b + 1e-12) continue;
    const double ell_i = 1.0 / omega.length();
    if (ell_i < 2.0 * grid.h()) continue;
    const std::size_t count = lattice_count(grid.a(), len, ell_i);
    const auto k0 = static_cast<std::int64_t>(std::llround(grid.a() / ell_i));
    int comp = -1;
    for (std::size_t c = 0; c < cover.intervals.size(); ++c)
      if (cover.intervals[c].a <= omega.left() && omega.right() <= cover.intervals[c].b) {
        comp = static_cast<int>(c);
        break;
      }
    for (std::size_t j = 0; j < count; ++j) {
      out.tiles.push_back({DyadicInterval{-omega.n, k0 + static_cast<std::int64_t>(j), 0}, omega});
      out.component.push_back(comp);
    }
  }
  return out;
}

bool almost_orthogonal(const TileCollection& q) {
  std::set<DyadicInterval> freqs;
  for (const Tile& t : q.tiles) freqs.insert(t.freq);
  const std::vector<DyadicInterval> f(freqs.begin(), freqs.end());
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      if (!f[i].disjoint(f[j])) return false;
    }
  return true;
}

PacketPrototype PacketPrototype::bump(double sigma) {
  const double mass = bump_integral(sigma);
  return {[sigma, mass](double t) { return smooth_bump(t, sigma) / mass; }};
}

TileEngine::TileEngine(const SampledSignal& grid, PacketPrototype phi, PacketPrototype psi)
    : grid_(SampledSignal::zeros(grid.size(), grid.a(), grid.b())), phi_(std::move(phi)), psi_(std::move(psi)) {}

void TileEngine::band(const DyadicInterval& omega, long long& q0, long long& q1) const {
  const double len = grid_.length();
  const long long half = static_cast<long long>(grid_.size() / 2);
  q0 = std::max(-half, static_cast<long long>(std::ceil(omega.left() * len - 1e-9)));
  q1 = std::min(half - 1, static_cast<long long>(std::floor(omega.right() * len + 1e-9)));
}

std::size_t TileEngine::position_index(const DyadicInterval& time) const {
  return static_cast<std::size_t>(std::llround((time.left() - grid_.a()) / time.length()));
}

std::vector<cplx> TileEngine::coefficients(const std::vector<cplx>& fhat, const DyadicInterval& omega) const {
  const double len = grid_.length();
  const double ell_w = omega.length();
  const double ell_i = 1.0 / ell_w;
  const std::size_t mm = lattice_count(grid_.a(), len, ell_i);
  const double shift = grid_.a() + 0.5 * ell_i;
  long long q0, q1;
  band(omega, q0, q1);
  std::vector<cplx> buf(mm, cplx(0.0));
  for (long long q = q0; q <= q1; ++q) {
    const double xi = static_cast<double>(q) / len;
    const double w = phi_.profile((xi - omega.left()) / ell_w);
    if (w == 0.0) continue;
    buf[slot_of(q, mm)] += fhat[slot_of(q, grid_.size())] * w * std::polar(1.0, 2.0 * kPi * shift * xi) / len;
  }
  fft_backward(buf);
  return buf;
}

void TileEngine::synthesize_into(const std::vector<cplx>& c, const DyadicInterval& omega,
                                 std::vector<cplx>& out) const {
  const double len = grid_.length();
  const double ell_w = omega.length();
  const double ell_i = 1.0 / ell_w;
  const std::size_t mm = c.size();
  const double shift = grid_.a() + 0.5 * ell_i;
  std::vector<cplx> buf = c;
  fft_forward(buf);
  long long q0, q1;
  band(omega, q0, q1);
  for (long long q = q0; q <= q1; ++q) {
    const double xi = static_cast<double>(q) / len;
    const double w = psi_.profile((xi - omega.left()) / ell_w);
    if (w == 0.0) continue;
    out[slot_of(q, grid_.size())] += w * std::polar(1.0, -2.0 * kPi * shift * xi) * ell_i * buf[slot_of(q, mm)];
  }
}

namespace {

std::map<DyadicInterval, std::vector<std::size_t>> group_by_frequency(const TileCollection& q) {
  std::map<DyadicInterval, std::vector<std::size_t>> g;
  for (std::size_t i = 0; i < q.tiles.size(); ++i) g[q.tiles[i].freq].push_back(i);
  return g;
}

}  // namespace

std::vector<SampledSignal> TileEngine::apply_grouped(const TileCollection& q, const std::vector<int>& group,
                                                     int group_count, const SampledSignal& f) const {
  if (!f.same_grid(grid_)) throw Error(ErrorCode::GridMismatch, "signal is not on the engine grid");
  const std::vector<cplx> fhat = f.spectrum();
  const auto groups = group_by_frequency(q);
  std::vector<std::pair<DyadicInterval, std::vector<std::size_t>>> items(groups.begin(), groups.end());

  // each frequency interval contributes to a disjoint band of slots per output group
  std::vector<std::vector<std::pair<int, std::vector<cplx>>>> partial(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    const DyadicInterval& omega = items[i].first;
    const std::vector<cplx> c = coefficients(fhat, omega);
    std::map<int, std::vector<cplx>> masked;
    for (std::size_t t : items[i].second) {
      auto& m = masked[group[t]];
      if (m.empty()) m.assign(c.size(), cplx(0.0));
      const std::size_t j = position_index(q.tiles[t].time);
      m[j] = c[j];
    }
    for (auto& [gid, m] : masked) {
      std::vector<cplx> spec(grid_.size(), cplx(0.0));
      synthesize_into(m, omega, spec);
      partial[i].emplace_back(gid, std::move(spec));
    }
  });

  std::vector<std::vector<cplx>> specs(static_cast<std::size_t>(group_count),
                                       std::vector<cplx>(grid_.size(), cplx(0.0)));
  for (const auto& p : partial)
    for (const auto& [gid, spec] : p)
      for (std::size_t s = 0; s < spec.size(); ++s) specs[static_cast<std::size_t>(gid)][s] += spec[s];
  std::vector<SampledSignal> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(SampledSignal::from_spectrum(s, grid_.a(), grid_.b()));
  return out;
}

SampledSignal TileEngine::apply(const TileCollection& q, const SampledSignal& f) const {
  const std::vector<int> group(q.size(), 0);
  return apply_grouped(q, group, 1, f)[0];
}

std::vector<cplx> TileEngine::tile_coefficients(const TileCollection& q, const SampledSignal& f) const {
  if (!f.same_grid(grid_)) throw Error(ErrorCode::GridMismatch, "signal is not on the engine grid");
  const std::vector<cplx> fhat = f.spectrum();
  const auto groups = group_by_frequency(q);
  std::vector<std::pair<DyadicInterval, std::vector<std::size_t>>> items(groups.begin(), groups.end());
  std::vector<cplx> out(q.size());
  parallel_for(items.size(), [&](std::size_t i) {
    const std::vector<cplx> c = coefficients(fhat, items[i].first);
    for (std::size_t t : items[i].second) out[t] = c[position_index(q.tiles[t].time)];
  });
  return out;
}

SampledSignal TileEngine::packet(const Tile& p, bool analysis) const {
  const PacketPrototype& proto = analysis ? phi_ : psi_;
  const double len = grid_.length();
  const double ci = p.time.center();
  std::vector<cplx> spec(grid_.size(), cplx(0.0));
  long long q0, q1;
  band(p.freq, q0, q1);
  for (long long q = q0; q <= q1; ++q) {
    const double xi = static_cast<double>(q) / len;
    spec[slot_of(q, grid_.size())] =
        proto.profile((xi - p.freq.left()) / p.freq.length()) * std::polar(1.0, -2.0 * kPi * ci * xi);
  }
  return SampledSignal::from_spectrum(spec, grid_.a(), grid_.b());
}

std::vector<double> TileEngine::wavsupp_profile(const Tile& p, int d) const {
  const double len = grid_.length();
  const double ci = p.time.center();
  const double cw = p.freq.center();
  const double ell = p.time.length();
  long long q0, q1;
  band(p.freq, q0, q1);
  std::vector<double> out;
  for (int j = 0; j <= 4; ++j) {
    std::vector<cplx> spec(grid_.size(), cplx(0.0));
    for (long long q = q0; q <= q1; ++q) {
      const double xi = static_cast<double>(q) / len;
      const cplx deriv = std::pow(cplx(0.0, 2.0 * kPi * (xi - cw)), j);
      spec[slot_of(q, grid_.size())] =
          phi_.profile((xi - p.freq.left()) / p.freq.length()) * std::polar(1.0, -2.0 * kPi * ci * xi) * deriv;
    }
    const SampledSignal g = SampledSignal::from_spectrum(spec, grid_.a(), grid_.b());
    double worst = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) {
      const double u = periodic_difference(g.x(s), ci, len) / ell;
      worst = std::max(worst, std::abs(g[s]) * std::pow(chi(u), -d));
    }
    out.push_back(worst * std::pow(ell, 1.0 + j));
  }
  return out;
}

ProjectionResult project(const SampledSignal& f, const DyadicInterval& l, const SingularSet& xi,
                         const GaborWindow& window) {
  if (l.shift != 0) throw Error(ErrorCode::InvalidArgument, "projection interval must be standard dyadic");
  if (xi.empty()) throw Error(ErrorCode::EmptySet, "projection needs a nonempty singular set");
  const Interval li = l.as_interval();
  double peak = 0.0, outside = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    peak = std::max(peak, std::abs(f[j]));
    if (!li.contains_halfopen(f.x(j))) outside = std::max(outside, std::abs(f[j]));
  }
  if (outside > 1e-12 * peak)
    throw Error(ErrorCode::SupportViolation, "signal is not supported in the projection interval");

  const double ell = l.length();
  std::vector<double> scaled;
  scaled.reserve(xi.size());
  for (double p : xi.points()) scaled.push_back(2.0 * ell * p);
  ProjectionResult res;
  res.retained = neighborhood(scaled, 18.0);
  const GaborCoefficients c = gabor_analyze(f, l.n, window, &res.retained);
  res.g = gabor_synthesize(c, window);
  double diff = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) diff += std::norm(f[j] - res.g[j]);
  const double fn = f.norm2();
  res.truncation_error = fn > 0.0 ? std::sqrt(diff * f.h()) / fn : 0.0;
  return res;
}

double projection_defect(const SampledSignal& f, const SampledSignal& g, const DyadicInterval& l,
                         const SingularSet& xi) {
  if (!f.same_grid(g)) throw Error(ErrorCode::GridMismatch, "f and its projection differ in grid");
  TileCollection all = tiles_for_set(xi, f);
  TileCollection kept;
  kept.component_count = all.component_count;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all.tiles[i].time.length() >= l.length()) {
      kept.tiles.push_back(all.tiles[i]);
      kept.component.push_back(all.component[i]);
    }
  if (kept.empty()) return 0.0;
  SampledSignal diff = f;
  for (std::size_t j = 0; j < f.size(); ++j) diff[j] -= g[j];
  const TileEngine engine(f);
  double worst = 0.0;
  for (const cplx& v : engine.tile_coefficients(kept, diff)) worst = std::max(worst, std::abs(v));
  return worst;
}

double projection_ratio(const SampledSignal& f, const SampledSignal& g, const DyadicInterval& l,
                        const OrliczSpace& x) {
  const double num = local_average(g, l.as_interval(), YoungFunction::lp(2.0), Tail::Minus);
  const double den = local_average(f, l.as_interval(), x, Tail::None);
  if (den == 0.0) return 0.0;
  return num / den;
}

std::vector<double> tile_family_symbol(const TileCollection& q, const SampledSignal& grid,
                                       const PacketPrototype& proto) {
  std::set<DyadicInterval> freqs;
  for (const Tile& t : q.tiles) freqs.insert(t.freq);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const double xi = grid.xi(s);
    for (const DyadicInterval& w : freqs) {
      if (xi <= w.left() || xi >= w.right()) continue;
      const double v = proto.profile((xi - w.left()) / w.length());
      out[s] += v * v;
    }
  }
  return out;
}

ThreeGridFit three_grid_fit(const std::vector<cplx>& m, const SingularSet& xi, const SampledSignal& grid) {
  if (m.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "symbol length differs from grid");
  std::vector<double> mu[3];
  for (int j = 0; j < 3; ++j) mu[j] = tile_family_symbol(tiles_for_set(xi, grid, std::nullopt, j), grid);
  double a[3][4] = {};
  for (std::size_t s = 0; s < m.size(); ++s)
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] += mu[i][s] * mu[j][s];
      a[i][3] += mu[i][s] * m[s].real();
    }
  // Gaussian elimination with partial pivoting; singular directions get zero weight
  for (int c = 0; c < 3; ++c) {
    int best = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[best][c])) best = r;
    for (int k = 0; k < 4; ++k) std::swap(a[c][k], a[best][k]);
    if (std::abs(a[c][c]) < 1e-14) continue;
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double fct = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= fct * a[c][k];
    }
  }
  ThreeGridFit fit;
  for (int c = 0; c < 3; ++c) fit.c[c] = std::abs(a[c][c]) < 1e-14 ? 0.0 : a[c][3] / a[c][c];
  double res = 0.0, total = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s) {
    const double model = fit.c[0] * mu[0][s] + fit.c[1] * mu[1][s] + fit.c[2] * mu[2][s];
    res += std::norm(m[s] - model);
    total += std::norm(m[s]);
  }
  fit.relative_residual = total > 0.0 ? std::sqrt(res / total) : 0.0;
  return fit;
}

std::vector<DecayRow> single_scale_decay(const SingularSet& xi, const SampledSignal& f, int generation,
                                         int max_separation) {
  const double ell = std::ldexp(1.0, -generation);
  const DyadicInterval r = dyadic_containing(f.a() + 0.5 * f.length(), generation);
  const TileCollection all = tiles_for_set(xi, f);
  TileCollection local;
  local.component_count = all.component_count;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (r.contains(all.tiles[i].time)) {
      local.tiles.push_back(all.tiles[i]);
      local.component.push_back(all.component[i]);
    }
  const TileEngine engine(f);
  const SampledSignal tf = engine.apply(local, f);
  const double den = std::sqrt(ell) * local_average(f, r.as_interval(), YoungFunction::lp(2.0), Tail::Plus);
  std::vector<DecayRow> out;
  for (int d = 0; d <= max_separation; ++d) {
    const Interval s = r.translate(d).as_interval();
    if (s.b > f.b() + 1e-12) break;
    double acc = 0.0;
    for (std::size_t j = 0; j < tf.size(); ++j)
      if (s.contains_halfopen(tf.x(j))) acc += std::norm(tf[j]);
    out.push_back({static_cast<double>(d), den > 0.0 ? std::sqrt(acc * tf.h()) / den : 0.0});
  }
  return out;
}

}  // namespace zlab
