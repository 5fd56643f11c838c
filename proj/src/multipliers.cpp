#include "zlab/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "zlab/timefreq.hpp"

namespace zlab {

double StepSymbol::operator()(double xi) const {
  for (const StepComponent& c : components) {
    if (!(c.omega.a < xi && xi < c.omega.b)) continue;
    for (std::size_t j = 0; j < c.pieces.size(); ++j)
      if (c.pieces[j].a <= xi && xi < c.pieces[j].b) return c.heights[j];
    return 0.0;
  }
  return 0.0;
}

void validate_steps(const StepSymbol& s) {
  std::vector<Interval> comps;
  for (const StepComponent& c : s.components) {
    if (c.pieces.size() != c.heights.size())
      throw Error(ErrorCode::NotStepFunction, "pieces and heights differ in length");
    if (!(c.omega.a < c.omega.b)) throw Error(ErrorCode::NotStepFunction, "empty component");
    comps.push_back(c.omega);
    std::vector<Interval> p = c.pieces;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!std::isfinite(c.heights[j])) throw Error(ErrorCode::NotStepFunction, "non-finite height");
      if (!(p[j].a < p[j].b)) throw Error(ErrorCode::NotStepFunction, "empty piece");
      if (p[j].a < c.omega.a || p[j].b > c.omega.b)
        throw Error(ErrorCode::NotStepFunction, "piece leaves its component");
    }
    std::sort(p.begin(), p.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    for (std::size_t j = 1; j < p.size(); ++j)
      if (p[j].a < p[j - 1].b) throw Error(ErrorCode::NotStepFunction, "overlapping pieces");
  }
  std::sort(comps.begin(), comps.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  for (std::size_t j = 1; j < comps.size(); ++j)
    if (comps[j].a < comps[j - 1].b) throw Error(ErrorCode::NotStepFunction, "overlapping components");
}

std::vector<cplx> sample_symbol(const std::function<cplx(double)>& fn, std::size_t n, double a, double b) {
  const SampledSignal grid = SampledSignal::zeros(n, a, b);
  std::vector<cplx> out(n);
  for (std::size_t q = 0; q < n; ++q) out[q] = fn(grid.xi(q));
  return out;
}

Symbol make_symbol(const std::function<cplx(double)>& fn, const SingularSet& xi, std::size_t n, double a,
                   double b, SymbolClass cls) {
  Symbol s;
  s.values = sample_symbol(fn, n, a, b);
  s.a = a;
  s.b = b;
  s.xi = xi;
  s.cls = cls;
  s.eval = fn;
  s.norm = symbol_norm(s);
  return s;
}

Symbol step_symbol(const StepSymbol& steps, const SingularSet& xi, std::size_t n, double a, double b,
                   SymbolClass cls, double p, double q) {
  validate_steps(steps);
  Symbol s;
  s.steps = steps;
  s.eval = [steps](double x) { return cplx(steps(x)); };
  s.values = sample_symbol(s.eval, n, a, b);
  s.a = a;
  s.b = b;
  s.xi = xi;
  s.cls = cls;
  s.p = p;
  s.q = q;
  s.norm = symbol_norm(s);
  return s;
}

namespace {

struct Bump {
  double center, width;
  cplx coeff;
};

struct ComponentBumps {
  Interval omega;
  std::vector<Bump> bumps;
};

double component_coordinate(const Interval& w, double x) {
  if (std::isinf(w.a)) return -std::log(w.b - x);
  if (std::isinf(w.b)) return std::log(x - w.a);
  return std::log((x - w.a) / (w.b - x));
}

double distance_to_set(const std::vector<double>& pts, double x) {
  auto it = std::lower_bound(pts.begin(), pts.end(), x);
  double d = kInf;
  if (it != pts.end()) d = std::min(d, *it - x);
  if (it != pts.begin()) d = std::min(d, x - *std::prev(it));
  return d;
}

Interval band_of(const Symbol& m) {
  const double len = m.b - m.a;
  const double half = static_cast<double>(m.values.size() / 2) / len;
  return {-half, half};
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// j-th central difference of fn at x with step d
cplx central_difference(const std::function<cplx(double)>& fn, double x, int j, double d) {
  if (j == 0) return fn(x);
  cplx acc(0.0);
  for (int i = 0; i <= j; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binom(j, i) * fn(x + (0.5 * j - i) * d);
  }
  return acc / std::pow(d, j);
}

}  // namespace

Symbol synth_hm_symbol(const SingularSet& xi, int order, std::uint64_t seed, std::size_t n, double a, double b) {
  if (xi.empty()) throw Error(ErrorCode::EmptySet, "HM synthesis needs a nonempty singular set");
  if (order < 0 || order > 4) throw Error(ErrorCode::InvalidArgument, "HM order must lie in [0,4]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-4.0, 4.0), width(0.6, 1.5), unit(-1.0, 1.0);
  std::vector<ComponentBumps> parts;
  for (const Interval& w : complement_cover(xi).intervals) {
    ComponentBumps cb{w, {}};
    for (int i = 0; i < 4; ++i) {
      const double c = centre(rng), wd = width(rng);
      const double re = unit(rng), im = unit(rng);
      cb.bumps.push_back({c, wd, cplx(re, im)});
    }
    parts.push_back(std::move(cb));
  }
  auto raw = [parts](double x) -> cplx {
    for (const ComponentBumps& cb : parts) {
      if (!(cb.omega.a < x && x < cb.omega.b)) continue;
      const double u = component_coordinate(cb.omega, x);
      cplx acc(0.0);
      for (const Bump& bp : cb.bumps) {
        const double t = (u - bp.center) / bp.width;
        acc += bp.coeff * std::exp(-t * t);
      }
      return acc;
    }
    return cplx(0.0);
  };
  Symbol probe;
  probe.values = sample_symbol(raw, n, a, b);
  probe.a = a;
  probe.b = b;
  probe.xi = xi;
  probe.eval = raw;
  const double scale = hm_norm(probe, order);
  auto fn = [raw, scale](double x) { return raw(x) / scale; };
  Symbol s;
  s.values = sample_symbol(fn, n, a, b);
  s.a = a;
  s.b = b;
  s.xi = xi;
  s.cls = SymbolClass::HM;
  s.hm_order = order;
  s.eval = fn;
  s.norm = hm_norm(s, order);
  return s;
}

HmReport hm_norm_report(const Symbol& m, int order) {
  if (!m.eval) throw Error(ErrorCode::UnsupportedSpace, "HM norm needs an evaluable symbol");
  const std::vector<double>& pts = m.xi.points();
  const Interval band = band_of(m);
  const double spacing = 1.0 / (m.b - m.a);

  std::vector<double> xs;
  for (std::size_t q = 0; q < m.values.size(); ++q) {
    const double x = static_cast<double>(signed_index(q, m.values.size())) * spacing;
    xs.push_back(x);
  }
  // geometric clustering toward each singular point, three octaves below the grid
  const double floor_d = spacing / 8.0;
  for (const Interval& w : complement_cover(m.xi).intervals) {
    const double lo = std::max(w.a, band.a), hi = std::min(w.b, band.b);
    if (!(lo < hi)) continue;
    const double top = 0.5 * (hi - lo);
    for (double d = top; d >= floor_d; d *= std::pow(2.0, -1.0 / 8.0)) {
      if (!std::isinf(w.a) && w.a >= band.a) xs.push_back(w.a + d);
      if (!std::isinf(w.b) && w.b <= band.b) xs.push_back(w.b - d);
    }
  }

  const double rho = 1.0 / 256.0;
  std::vector<double> best(xs.size(), 0.0), gap(xs.size(), 0.0);
  parallel_for(xs.size(), [&](std::size_t i) {
    const double x = xs[i];
    const double dist = pts.empty() ? 1.0 : distance_to_set(pts, x);
    if (!(dist > 0.0)) return;
    for (int j = 0; j <= order; ++j) {
      const double scale = std::pow(dist, j);
      const double v1 = scale * std::abs(central_difference(m.eval, x, j, rho * dist));
      double v = v1;
      if (j > 0) {
        const double v2 = scale * std::abs(central_difference(m.eval, x, j, 0.5 * rho * dist));
        gap[i] = std::max(gap[i], std::abs(v1 - v2) / std::max(1.0, std::abs(v2)));
        v = v2;
      }
      best[i] = std::max(best[i], v);
    }
  });

  HmReport r;
  r.samples = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r.value = std::max(r.value, best[i]);
    r.refinement_gap = std::max(r.refinement_gap, gap[i]);
  }
  if (r.refinement_gap > 1e-2)
    throw Error(ErrorCode::UnresolvedSingularity,
                "finite differences did not converge (gap " + std::to_string(r.refinement_gap) + ")");
  return r;
}

double hm_norm(const Symbol& m, int order) { return hm_norm_report(m, order).value; }

double mar_norm(const StepSymbol& s) {
  validate_steps(s);
  double out = 0.0;
  for (const StepComponent& c : s.components) {
    std::vector<std::size_t> idx(c.pieces.size());
    for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return c.pieces[x].a < c.pieces[y].a; });
    double peak = 0.0, tv = 0.0;
    double prev_right = c.omega.a, prev_height = 0.0;
    for (std::size_t j : idx) {
      const double h = c.heights[j];
      peak = std::max(peak, std::abs(h));
      if (c.pieces[j].a > prev_right) {
        tv += std::abs(prev_height) + std::abs(h);  // through a zero gap
      } else if (c.pieces[j].a > c.omega.a) {
        tv += std::abs(h - prev_height);
      }
      prev_right = c.pieces[j].b;
      prev_height = h;
    }
    if (prev_right < c.omega.b) tv += std::abs(prev_height);
    out = std::max(out, peak + tv);
  }
  return out;
}

double mar_norm(const Symbol& m) {
  if (m.steps) return mar_norm(*m.steps);
  const std::size_t n = m.values.size();
  const double len = m.b - m.a;
  double out = 0.0;
  for (const Interval& w : complement_cover(m.xi).intervals) {
    double peak = 0.0, tv = 0.0;
    bool have = false;
    cplx prev(0.0);
    // ascending frequencies: signed index r - n/2 lives in slot (r + n/2) mod n
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t q = (r + n / 2) % n;
      const double x = static_cast<double>(signed_index(q, n)) / len;
      if (!(w.a < x && x < w.b)) continue;
      peak = std::max(peak, std::abs(m.values[q]));
      if (have) tv += std::abs(m.values[q] - prev);
      prev = m.values[q];
      have = true;
    }
    if (have) out = std::max(out, peak + tv);
  }
  return out;
}

double symbol_norm(const Symbol& m) {
  switch (m.cls) {
    case SymbolClass::HM: return hm_norm(m, m.hm_order);
    case SymbolClass::Mar: return mar_norm(m);
    case SymbolClass::Rpq: {
      if (!m.steps) throw Error(ErrorCode::UnsupportedSpace, "R_{p,q} norm needs a step presentation");
      double out = 0.0;
      for (const StepComponent& c : m.steps->components)
        out = std::max(out, lorentz_seq_norm(c.heights, m.p, m.q));
      return out;
    }
  }
  return 0.0;
}

SampledSignal apply_multiplier(const std::vector<cplx>& m, const SampledSignal& f) {
  if (m.size() != f.size()) throw Error(ErrorCode::GridMismatch, "symbol and signal differ in length");
  std::vector<cplx> buf = f.samples();
  fft_forward(buf);
  for (std::size_t q = 0; q < buf.size(); ++q) buf[q] *= m[q];
  fft_backward(buf);
  const double inv = 1.0 / static_cast<double>(buf.size());
  for (cplx& v : buf) v *= inv;
  return SampledSignal(std::move(buf), f.a(), f.b());
}

SampledSignal apply_multiplier(const Symbol& m, const SampledSignal& f) {
  if (m.values.size() != f.size() || std::abs(m.a - f.a()) > 1e-12 || std::abs(m.b - f.b()) > 1e-12)
    throw Error(ErrorCode::GridMismatch, "symbol grid differs from signal grid");
  return apply_multiplier(m.values, f);
}

SampledSignal rough_square_function(const SingularSet& xi, const std::vector<cplx>& m, const SampledSignal& f) {
  if (m.size() != f.size()) throw Error(ErrorCode::GridMismatch, "symbol and signal differ in length");
  const std::size_t n = f.size();
  std::vector<cplx> fhat = f.samples();
  fft_forward(fhat);
  const std::vector<Interval> comps = complement_cover(xi).intervals;
  std::vector<std::vector<double>> parts(comps.size());
  parallel_for(comps.size(), [&](std::size_t c) {
    std::vector<cplx> buf(n, cplx(0.0));
    bool any = false;
    for (std::size_t q = 0; q < n; ++q) {
      const double x = f.xi(q);
      if (comps[c].a < x && x < comps[c].b) {
        buf[q] = fhat[q] * m[q];
        any = true;
      }
    }
    if (!any) return;
    fft_backward(buf);
    parts[c].resize(n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) parts[c][j] = std::norm(buf[j] * inv);
  });
  std::vector<cplx> out(n, cplx(0.0));
  std::vector<double> acc(n, 0.0);
  for (const auto& p : parts)
    for (std::size_t j = 0; j < p.size(); ++j) acc[j] += p[j];
  for (std::size_t j = 0; j < n; ++j) out[j] = std::sqrt(acc[j]);
  return SampledSignal(std::move(out), f.a(), f.b());
}

namespace {

// Spectral profile of dictionary element d on ω, evaluated at ξ; sup-normalized.
cplx dictionary_profile(int d, const DyadicInterval& w, double x) {
  const double ell = w.length();
  const double t = (x - w.left()) / ell;
  const double peak = smooth_bump(0.5);
  auto shifted = [&](double s) { return smooth_bump(t) / peak * std::polar(1.0, -2.0 * kPi * x * s / ell); };
  switch (d) {
    case 0: return smooth_bump(t) / peak;
    case 1: return shifted(0.5);
    case 2: return shifted(-0.5);
    case 3: return smooth_bump(2.0 * t) / peak;
    case 4: return smooth_bump(2.0 * t - 1.0) / peak;
    case 5: return shifted(1.0);
    case 6: return shifted(-1.0);
    case 7: return smooth_bump(2.0 * t - 0.5) / peak;
    default: {
      const int k = (d - 8) / 2 + 3;
      return shifted((d % 2 == 0 ? 0.5 : -0.5) * k);
    }
  }
}

}  // namespace

SampledSignal smooth_square_function(const SingularSet& xi, const SampledSignal& f, int dict_size) {
  if (dict_size < 1) throw Error(ErrorCode::InvalidArgument, "dictionary must hold at least one profile");
  const std::size_t n = f.size();
  const auto [s_min, s_max] = resolvable_frequency_scales(f);
  const double half = static_cast<double>(n / 2) / f.length();
  const Interval band{-half, half};
  const WhitneyResult wr = whitney_decompose(complement_cover(xi), 0, s_min, s_max, band);
  std::vector<DyadicInterval> ws;
  for (const DyadicInterval& w : wr.intervals)
    if (w.left() >= band.a && w.right() <= band.b) ws.push_back(w);

  std::vector<cplx> fhat = f.samples();
  fft_forward(fhat);
  std::vector<std::vector<double>> parts(ws.size());
  parallel_for(ws.size(), [&](std::size_t i) {
    std::vector<double> sup(n, 0.0);
    for (int d = 0; d < dict_size; ++d) {
      std::vector<cplx> buf(n, cplx(0.0));
      for (std::size_t q = 0; q < n; ++q) {
        const double x = f.xi(q);
        if (x <= ws[i].left() || x >= ws[i].right()) continue;
        buf[q] = fhat[q] * dictionary_profile(d, ws[i], x);
      }
      fft_backward(buf);
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) sup[j] = std::max(sup[j], std::abs(buf[j]) * inv);
    }
    parts[i] = std::move(sup);
  });
  std::vector<double> acc(n, 0.0);
  for (const auto& p : parts)
    for (std::size_t j = 0; j < n; ++j) acc[j] += p[j] * p[j];
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = std::sqrt(acc[j]);
  return SampledSignal(std::move(out), f.a(), f.b());
}

double lorentz_seq_norm(const std::vector<double>& a, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw Error(ErrorCode::InvalidArgument, "Lorentz exponents must be positive");
  std::map<int, std::size_t> bins;
  for (double v : a) {
    const double m = std::abs(v);
    if (m == 0.0) continue;
    int e = 0;
    std::frexp(m, &e);  // m = f·2^e, f ∈ [1/2,1), so m ∈ [2^{e-1}, 2^e)
    ++bins[e - 1];
  }
  if (std::isinf(q)) {
    double out = 0.0;
    for (const auto& [n, c] : bins) out = std::max(out, std::ldexp(1.0, n) * std::pow(static_cast<double>(c), 1.0 / p));
    return out;
  }
  double acc = 0.0;
  for (const auto& [n, c] : bins) acc += std::pow(std::ldexp(1.0, n) * std::pow(static_cast<double>(c), 1.0 / p), q);
  return std::pow(acc, 1.0 / q);
}

bool check_jatom(const RAtom& atom, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  try {
    validate_steps(atom.steps);
  } catch (const Error& e) {
    return fail(e.what());
  }
  if (!atom.j || *atom.j < 1) return fail("atom has no J");
  const double cap = std::pow(static_cast<double>(*atom.j), -1.0 / atom.p) * (1.0 + 1e-12);
  for (const StepComponent& c : atom.steps.components) {
    if (c.pieces.size() > static_cast<std::size_t>(*atom.j)) return fail("component holds more than J pieces");
    for (double h : c.heights)
      if (std::abs(h) > cap) return fail("coefficient exceeds J^{-1/p}");
  }
  return true;
}

AtomDecomposition atom_decompose(const StepSymbol& m, double p) {
  validate_steps(m);
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "atom decomposition needs p ≥ 1");
  // a*_x per component: the (⌊x⌋+1)-th largest modulus, zero past the end
  std::vector<std::vector<double>> sorted;
  for (const StepComponent& c : m.components) {
    std::vector<double> s;
    for (double h : c.heights)
      if (h != 0.0) s.push_back(std::abs(h));
    std::sort(s.begin(), s.end(), std::greater<>());
    sorted.push_back(std::move(s));
  }
  auto star = [&](std::size_t w, double x) {
    const auto idx = static_cast<std::size_t>(std::floor(x));
    return idx < sorted[w].size() ? sorted[w][idx] : 0.0;
  };

  AtomDecomposition out;
  double total = 0.0;
  for (int jj = 1;; jj *= 2) {
    double big = 0.0;
    for (std::size_t w = 0; w < sorted.size(); ++w) big = std::max(big, star(w, 0.5 * jj));
    if (big == 0.0) break;
    // a power of two keeps h / big exact, so dyadic symbols reconstruct without residual
    int e = 0;
    std::frexp(big, &e);
    if (std::ldexp(1.0, e - 1) != big) big = std::ldexp(1.0, e);
    RAtom atom;
    atom.p = p;
    atom.q = 1.0;
    atom.j = jj;
    const double root = std::pow(static_cast<double>(jj), 1.0 / p);
    for (std::size_t w = 0; w < m.components.size(); ++w) {
      const StepComponent& c = m.components[w];
      const double hi = star(w, 0.5 * jj), lo = star(w, jj);
      StepComponent part{c.omega, {}, {}};
      for (std::size_t j = 0; j < c.pieces.size(); ++j) {
        const double v = std::abs(c.heights[j]);
        if (v > lo && v <= hi) {
          part.pieces.push_back(c.pieces[j]);
          part.heights.push_back(c.heights[j] / big / root);
        }
      }
      atom.steps.components.push_back(std::move(part));
    }
    out.atoms.push_back({root * big, std::move(atom)});
    total += root * big;
    if (jj > (1 << 30)) break;
  }
  double lor = 0.0;
  for (const StepComponent& c : m.components) lor = std::max(lor, lorentz_seq_norm(c.heights, p, 1.0));
  out.comparability = lor > 0.0 ? total / lor : 0.0;
  return out;
}

double evaluate_decomposition(const AtomDecomposition& d, double xi) {
  double acc = 0.0;
  for (const WeightedAtom& w : d.atoms) acc += w.weight * w.atom.steps(xi);
  return acc;
}

std::vector<SingularSet> lift_singular_set(const RAtom& atom, const SingularSet& xi) {
  std::vector<std::vector<double>> per_j;
  for (const StepComponent& c : atom.steps.components) {
    std::vector<Interval> p = c.pieces;
    std::sort(p.begin(), p.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    if (per_j.size() < p.size()) per_j.resize(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (std::isfinite(p[j].a)) per_j[j].push_back(p[j].a);
      if (std::isfinite(p[j].b)) per_j[j].push_back(p[j].b);
    }
  }
  std::vector<SingularSet> out;
  if (atom.p < 1.5) {
    for (auto& pts : per_j) out.emplace_back(std::move(pts), xi.window());
  } else {
    std::vector<double> all;
    for (const auto& pts : per_j) all.insert(all.end(), pts.begin(), pts.end());
    out.emplace_back(std::move(all), xi.window());
  }
  return out;
}

}  // namespace zlab
