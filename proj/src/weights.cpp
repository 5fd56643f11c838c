#include "zlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace zlab {

namespace {

/// C^∞ bump supported on (-1,1) with value 1 at 0.
double smooth_window(double t) { return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

std::vector<double> midpoints(std::size_t n, double a, double b) {
  std::vector<double> x(n);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = a + (static_cast<double>(j) + 0.5) * h;
  return x;
}

std::vector<double> prefix_of(const std::vector<double>& v) {
  std::vector<double> p(v.size() + 1, 0.0);
  for (std::size_t j = 0; j < v.size(); ++j) p[j + 1] = p[j] + v[j];
  return p;
}

/// Range minimum by sparse table.
class RangeMin {
 public:
  explicit RangeMin(const std::vector<double>& v) {
    table_.push_back(v);
    for (std::size_t len = 2; len <= v.size(); len *= 2) {
      const auto& prev = table_.back();
      std::vector<double> next(v.size() - len + 1);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::min(prev[i], prev[i + len / 2]);
      table_.push_back(std::move(next));
    }
  }
  double operator()(std::size_t first, std::size_t last) const {
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= last - first) ++level;
    const std::size_t len = std::size_t{1} << level;
    return std::min(table_[level][first], table_[level][last - len]);
  }

 private:
  std::vector<std::vector<double>> table_;
};

struct CharContext {
  const Weight& w;
  CharKind kind;
  double param;
  std::vector<double> pw, pdual;
  std::unique_ptr<RangeMin> rmin;

  CharContext(const Weight& weight, CharKind k, double p) : w(weight), kind(k), param(p) {
    pw = prefix_of(w.w);
    if (kind == CharKind::Ap) {
      if (param <= 1.0) throw Error(ErrorCode::InvalidArgument, "A_p needs p > 1");
      pdual = prefix_of(w.dual(param).w);
    } else if (kind == CharKind::RH) {
      if (param <= 1.0) throw Error(ErrorCode::InvalidArgument, "RH_s needs s > 1");
      std::vector<double> ws(w.size());
      for (std::size_t j = 0; j < ws.size(); ++j) ws[j] = std::pow(w.w[j], param);
      pdual = prefix_of(ws);
    } else if (kind == CharKind::A1) {
      rmin = std::make_unique<RangeMin>(w.w);
    }
  }

  double mean(const std::vector<double>& p, std::size_t first, std::size_t last) const {
    return (p[last] - p[first]) / static_cast<double>(last - first);
  }

  /// Characteristic quotient on the sample run [first, last); A_∞ is handled separately.
  double value(std::size_t first, std::size_t last) const {
    const double avg = mean(pw, first, last);
    switch (kind) {
      case CharKind::Ap:
        return avg * std::pow(mean(pdual, first, last), param - 1.0);
      case CharKind::A1:
        return avg / (*rmin)(first, last);
      case CharKind::RH:
        return std::pow(mean(pdual, first, last), 1.0 / param) / avg;
      case CharKind::Ainf:
        break;
    }
    return 0.0;
  }
};

/// ∫_I M(w𝟙_I) over the dyadic subintervals of I in its own grid.
double dyadic_max_integral(const Weight& w, const std::vector<double>& pw, const DyadicInterval& j, double cur) {
  const double h = w.h();
  auto [first, last] = sample_range(w.a, h, w.size(), j.as_interval());
  if (last == first) return 0.0;
  const double avg = (pw[last] - pw[first]) / static_cast<double>(last - first);
  cur = std::max(cur, avg);
  if (last - first == 1 || j.length() < 2.0 * h) return cur * static_cast<double>(last - first) * h;
  auto [c0, c1] = j.children();
  return dyadic_max_integral(w, pw, c0, cur) + dyadic_max_integral(w, pw, c1, cur);
}

}  // namespace

Weight Weight::power(std::size_t n, double a, double b, double x0, double alpha) {
  Weight out;
  out.a = a;
  out.b = b;
  out.family = WeightFamily::Power;
  out.label = "power";
  const std::vector<double> x = midpoints(n, a, b);
  out.w.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.w[j] = std::pow(std::abs(x[j] - x0), alpha);
  return out;
}

Weight Weight::step(std::size_t n, double a, double b, double cut, double lo, double hi) {
  if (lo <= 0.0 || hi <= 0.0) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
  Weight out;
  out.a = a;
  out.b = b;
  out.family = WeightFamily::Step;
  out.label = "step";
  const std::vector<double> x = midpoints(n, a, b);
  out.w.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.w[j] = x[j] < cut ? lo : hi;
  return out;
}

Weight Weight::custom(std::vector<double> w, double a, double b) {
  for (double v : w)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "weights must be positive and finite");
  Weight out;
  out.w = std::move(w);
  out.a = a;
  out.b = b;
  out.label = "custom";
  return out;
}

Weight Weight::constant(std::size_t n, double a, double b, double c) {
  Weight out = custom(std::vector<double>(n, c), a, b);
  out.label = "constant";
  return out;
}

Weight Weight::dual(double p) const {
  Weight out = *this;
  out.family = WeightFamily::Custom;
  out.label = "dual";
  const double e = -1.0 / (p - 1.0);
  for (double& v : out.w) v = std::pow(v, e);
  return out;
}

CharacteristicResult characteristic(const Weight& w, CharKind kind, double param, const std::vector<int>& shifts) {
  const CharContext ctx(w, kind, param);
  const std::size_t n = w.size();
  const double h = w.h();
  const int n_coarse = -static_cast<int>(std::floor(std::log2(w.b - w.a) + 1e-12));
  const int n_fine = static_cast<int>(std::ceil(std::log2(1.0 / h) - 1e-12));

  std::vector<DyadicInterval> family;
  for (int t : shifts)
    for (int gen = n_coarse; gen <= n_fine; ++gen) {
      const double len = std::ldexp(1.0, -gen);
      const double off = ((gen % 2 == 0) ? 1.0 : -1.0) * t / 3.0;
      const auto k0 = static_cast<long long>(std::ceil(w.a / len - off - 1e-12));
      const auto k1 = static_cast<long long>(std::floor(w.b / len - off + 1e-12)) - 1;
      for (long long k = k0; k <= k1; ++k) family.push_back({gen, k, t});
    }

  std::vector<double> vals(family.size(), 0.0);
  parallel_for(family.size(), [&](std::size_t i) {
    auto [first, last] = sample_range(w.a, h, n, family[i].as_interval());
    if (last == first) return;
    if (kind == CharKind::Ainf) {
      const double mass = (ctx.pw[last] - ctx.pw[first]) * h;
      vals[i] = dyadic_max_integral(w, ctx.pw, family[i], 0.0) / mass;
    } else {
      vals[i] = ctx.value(first, last);
    }
  });
  CharacteristicResult out;
  for (std::size_t i = 0; i < family.size(); ++i)
    if (vals[i] > out.value) {
      out.value = vals[i];
      out.argmax = family[i].as_interval();
    }
  return out;
}

CharacteristicResult characteristic_bruteforce(const Weight& w, CharKind kind, double param) {
  const CharContext ctx(w, kind, param);
  const std::size_t n = w.size();
  const double h = w.h();
  CharacteristicResult out;
  auto interval_of = [&](std::size_t first, std::size_t last) {
    return Interval{w.a + static_cast<double>(first) * h, w.a + static_cast<double>(last) * h};
  };
  for (std::size_t first = 0; first < n; ++first) {
    for (std::size_t last = first + 1; last <= n; ++last) {
      double v;
      if (kind == CharKind::Ainf) {
        // M(w𝟙_I) at each sample of I via every subrun containing it
        std::vector<double> m(last - first, 0.0);
        for (std::size_t l = first; l < last; ++l)
          for (std::size_t r = l + 1; r <= last; ++r) {
            const double avg = ctx.mean(ctx.pw, l, r);
            for (std::size_t x = l; x < r; ++x) m[x - first] = std::max(m[x - first], avg);
          }
        double acc = 0.0;
        for (double mv : m) acc += mv;
        v = acc / (ctx.pw[last] - ctx.pw[first]);
      } else {
        v = ctx.value(first, last);
      }
      if (v > out.value) {
        out.value = v;
        out.argmax = interval_of(first, last);
      }
    }
  }
  return out;
}

double weighted_lp_norm(const std::vector<double>& absg, const Weight& w, double p) {
  const double h = w.h();
  double acc = 0.0;
  for (std::size_t j = 0; j < absg.size(); ++j) acc += std::pow(absg[j], p) * w.w[j] * h;
  return std::pow(acc, 1.0 / p);
}

double weighted_weak_norm(const std::vector<double>& absg, const Weight& w, double p) {
  const double h = w.h();
  double gmax = 0.0, gmin = kInf;
  for (double v : absg) {
    gmax = std::max(gmax, v);
    if (v > 0.0) gmin = std::min(gmin, v);
  }
  if (gmax == 0.0) return 0.0;
  // sorted values with cumulative weight above each level
  std::vector<std::size_t> order(absg.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return absg[x] > absg[y]; });
  double best = 0.0, mass = 0.0;
  std::size_t pos = 0;
  for (int k = 1;; ++k) {
    const double lambda = gmax * std::pow(10.0, -static_cast<double>(k) / 64.0);
    while (pos < order.size() && absg[order[pos]] > lambda) mass += w.w[order[pos++]] * h;
    best = std::max(best, lambda * std::pow(mass, 1.0 / p));
    if (lambda < gmin || k > 64 * 16) break;
  }
  return best;
}

NormEstimate empirical_weighted_norm(const Operator& op, double p, const Weight& w,
                                     const std::vector<SampledSignal>& corpus, bool weak) {
  std::vector<double> ratio(corpus.size(), 0.0);
  parallel_for(corpus.size(), [&](std::size_t i) {
    const SampledSignal& f = corpus[i];
    if (f.size() != w.size()) throw Error(ErrorCode::GridMismatch, "weight and signal sizes differ");
    const double den = weighted_lp_norm(f.abs(), w, p);
    if (den == 0.0) return;
    const std::vector<double> g = op(f).abs();
    ratio[i] = (weak ? weighted_weak_norm(g, w, p) : weighted_lp_norm(g, w, p)) / den;
  });
  NormEstimate out;
  for (std::size_t i = 0; i < ratio.size(); ++i)
    if (ratio[i] > out.value) {
      out.value = ratio[i];
      out.argmax = i;
    }
  return out;
}

std::vector<SampledSignal> weighted_corpus(std::size_t n, double a, double b, std::uint64_t seed,
                                           std::size_t count) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double len = b - a;
  std::vector<SampledSignal> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double c = a + len * (0.25 + 0.5 * unif(rng));
    const double r = len * (0.01 + 0.1 * unif(rng));
    switch (i % 4) {
      case 0: {
        std::vector<cplx> v(n);
        for (auto& s : v) s = cplx(gauss(rng), gauss(rng));
        out.emplace_back(std::move(v), a, b);
        break;
      }
      case 1:
        out.push_back(SampledSignal::from_function(n, a, b, [=](double x) { return cplx(std::abs(x - c) < r ? 1.0 : 0.0); }));
        break;
      case 2: {
        const int top = static_cast<int>(std::floor(std::log2(static_cast<double>(n) / len / 4.0)));
        std::vector<double> phase(static_cast<std::size_t>(std::max(top + 1, 1)));
        for (auto& p : phase) p = 2.0 * kPi * unif(rng);
        out.push_back(SampledSignal::from_function(n, a, b, [=](double x) {
          cplx acc(0.0);
          for (int k = 0; k <= top; ++k)
            acc += std::polar(1.0, 2.0 * kPi * std::ldexp(1.0, k) * x + phase[static_cast<std::size_t>(k)]);
          return acc * smooth_window((x - c) / (4.0 * r));
        }));
        break;
      }
      default: {
        const double freq = (unif(rng) - 0.5) * static_cast<double>(n) / len / 4.0;
        out.push_back(SampledSignal::from_function(n, a, b, [=](double x) {
          return std::polar(smooth_window((x - c) / r), 2.0 * kPi * freq * x);
        }));
        break;
      }
    }
  }
  return out;
}

double alpha_exponent(double p, double tau) {
  return tau / (2.0 * (p - 1.0)) + std::max(1.0 / (p - 1.0), 1.0);
}

double beta_exponent(double p, double tau) { return tau / (2.0 * (p - 1.0)) + 1.0; }

void fit_loglog(std::vector<ScanRow>& rows, const std::vector<double>& x, const std::vector<double>& y,
                double& slope, double& intercept) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = static_cast<double>(n) * sxx - sx * sx;
  slope = std::abs(den) > 1e-14 * std::max(1.0, sxx) ? (static_cast<double>(n) * sxy - sx * sy) / den : 0.0;
  intercept = (sy - slope * sx) / static_cast<double>(n);
  for (std::size_t i = 0; i < n && i < rows.size(); ++i) {
    rows[i].fitted = slope;
    rows[i].residual = std::log(y[i]) - (intercept + slope * std::log(x[i]));
  }
}

ScanReport exponent_scan(const Operator& op, double p, double tau, const std::vector<double>& exponents,
                         const std::vector<SampledSignal>& corpus, double x0, bool weak) {
  if (corpus.empty()) throw Error(ErrorCode::InvalidArgument, "empty corpus");
  ScanReport rep;
  rep.predicted = weak ? beta_exponent(p, tau) : alpha_exponent(p, tau);
  const SampledSignal& g = corpus.front();
  std::vector<double> xs, ys;
  for (double e : exponents) {
    const Weight w = Weight::power(g.size(), g.a(), g.b(), x0, e);
    ScanRow row;
    row.parameter = e;
    row.characteristic = characteristic(w, CharKind::Ap, p).value;
    row.norm = empirical_weighted_norm(op, p, w, corpus, weak).value;
    row.predicted = rep.predicted;
    rep.rows.push_back(row);
    xs.push_back(row.characteristic);
    ys.push_back(row.norm);
  }
  fit_loglog(rep.rows, xs, ys, rep.slope, rep.intercept);
  return rep;
}

ScanReport blowup_scan(const Operator& op, double tau, const std::vector<double>& ps,
                       const std::vector<SampledSignal>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::InvalidArgument, "empty corpus");
  ScanReport rep;
  rep.predicted = tau / 2.0 + 1.0;
  const SampledSignal& g = corpus.front();
  const Weight one = Weight::constant(g.size(), g.a(), g.b());
  std::vector<double> xs, ys;
  for (double p : ps) {
    if (p <= 1.0) throw Error(ErrorCode::InvalidArgument, "blow-up scan needs p > 1");
    ScanRow row;
    row.parameter = p;
    row.characteristic = 1.0 / (p - 1.0);
    row.norm = empirical_weighted_norm(op, p, one, corpus).value;
    row.predicted = rep.predicted;
    rep.rows.push_back(row);
    xs.push_back(row.characteristic);
    ys.push_back(row.norm);
  }
  fit_loglog(rep.rows, xs, ys, rep.slope, rep.intercept);
  return rep;
}

ModularReport modular_check(const Operator& op, const SampledSignal& f, const std::vector<double>& lambdas,
                            const OrliczSpace& x, const Weight& w) {
  if (f.size() != w.size()) throw Error(ErrorCode::GridMismatch, "weight and signal sizes differ");
  const std::vector<double> g = op(f).abs();
  const std::vector<double> absf = f.abs();
  const double h = w.h();
  ModularReport rep;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "levels must be positive");
    ModularRow row;
    row.lambda = lambda;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j] > lambda) row.level_mass += w.w[j] * h;
      row.modular += x(absf[j] / lambda) * w.w[j] * h;
    }
    row.ratio = row.modular > 0.0 ? row.level_mass / row.modular : (row.level_mass > 0.0 ? kInf : 0.0);
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

double bump_phi(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

/// Smooth plateau: 1 on [-4,4], 0 outside (-6,6).
double plateau_psi(double u) {
  const double a = std::abs(u);
  if (a <= 4.0) return 1.0;
  if (a >= 6.0) return 0.0;
  const double t = (6.0 - a) / 2.0;
  const double e0 = std::exp(-1.0 / t), e1 = std::exp(-1.0 / (1.0 - t));
  return e0 / (e0 + e1);
}

/// ∫ g(u) e^{2πiuy} du at y_j = j·dy for j = 0..count-1 (g even, so the result is real).
std::vector<double> even_transform(const std::vector<double>& g_pos, double du, std::size_t nfft, std::size_t count) {
  std::vector<cplx> buf(nfft, cplx(0.0));
  for (std::size_t i = 0; i < g_pos.size(); ++i) {
    buf[i] += g_pos[i] * du;
    if (i > 0) buf[nfft - i] += g_pos[i] * du;
  }
  fft_backward(buf);
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = buf[j].real();
  return out;
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p *= 2;
  return p;
}

}  // namespace

LowerBoundWitness lower_bound_witness(const WitnessInput& in) {
  int e2 = 0;
  if (!(in.mu > 0.0) || std::frexp(in.mu, &e2) != 0.5)
    throw Error(ErrorCode::InvalidArgument, "mu must be a power of two");
  if (!(in.eps > 0.0) || in.eps > 0.125) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1/8]");
  LowerBoundWitness out;

  const std::vector<std::int64_t> lattice = rescale_floor(in.xi, e2 - 1);
  double s2 = 0.0;
  for (std::int64_t k : lattice) {
    auto it = in.coeffs.find(k);
    if (it == in.coeffs.end() || std::abs(it->second) == 0.0) continue;
    out.frequencies.push_back(k);
    s2 += std::norm(it->second);
  }
  if (s2 == 0.0) throw Error(ErrorCode::NoSingularFrequency, "f has no frequency in floor(mu Xi)");
  out.s = std::sqrt(s2);
  out.lambda = 0.5 * out.s;

  std::int64_t kmax_all = 0, kmax_core = 0;
  for (const auto& [k, v] : in.coeffs) kmax_all = std::max<std::int64_t>(kmax_all, std::llabs(k));
  for (std::int64_t k : out.frequencies) kmax_core = std::max<std::int64_t>(kmax_core, std::llabs(k));
  const std::size_t m = in.per_unit ? in.per_unit : std::max<std::size_t>(16, next_pow2(8 * static_cast<std::size_t>(kmax_all) + 1));
  const auto half = static_cast<std::size_t>(std::llround(in.range * static_cast<double>(m)));

  // transforms of φ and ψ·(φ*φ) at y_j = ε j / m
  const double dy = in.eps / static_cast<double>(m);
  const std::size_t nfft = next_pow2(std::max<std::size_t>(2 * half + 2, static_cast<std::size_t>(std::ceil(128.0 / dy))));
  const double du = 1.0 / (static_cast<double>(nfft) * dy);
  const auto support = static_cast<std::size_t>(std::ceil(1.0 / du));
  std::vector<double> phi(support + 1);
  double mass = 0.0;
  for (std::size_t i = 0; i <= support; ++i) {
    phi[i] = bump_phi(static_cast<double>(i) * du);
    mass += (i == 0 ? 1.0 : 2.0) * phi[i] * du;
  }
  for (double& v : phi) v /= mass;
  auto phi_at = [&](long long i) { return static_cast<std::size_t>(std::llabs(i)) <= support ? phi[static_cast<std::size_t>(std::llabs(i))] : 0.0; };
  std::vector<double> conv(2 * support + 1);
  for (std::size_t i = 0; i < conv.size(); ++i) {
    double acc = 0.0;
    const auto ii = static_cast<long long>(i);
    for (long long l = -static_cast<long long>(support); l <= static_cast<long long>(support); ++l) acc += phi_at(l) * phi_at(ii - l);
    conv[i] = acc * du * plateau_psi(static_cast<double>(i) * du);
  }
  const std::vector<double> phi_hat = even_transform(phi, du, nfft, half + 1);
  const std::vector<double> big_phi = even_transform(conv, du, nfft, half + 1);

  std::size_t jc = 0;
  while (jc + 1 <= half && big_phi[jc + 1] >= 0.75) ++jc;
  out.c = static_cast<double>(jc) * dy;
  out.delta = kmax_core > 0 ? 1.0 / (8.0 * static_cast<double>(kmax_core)) : 0.5;

  // one period of f and of Σ_k η_k f̂(k) e^{2πikx}
  std::vector<cplx> f_per(m, cplx(0.0)), g_per(m, cplx(0.0));
  for (std::size_t j = 0; j < m; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(m);
    for (const auto& [k, v] : in.coeffs) f_per[j] += v * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) * x);
    for (std::int64_t k : out.frequencies) {
      const cplx fk = in.coeffs.at(k);
      g_per[j] += (std::norm(fk) / out.s) * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) * x);
    }
  }
  double fmax = 0.0;
  for (const cplx& v : f_per) fmax = std::max(fmax, std::abs(v));

  const double inv_m = 1.0 / static_cast<double>(m);
  double core_min = kInf, level = 0.0, mod_q = 0.0, excess = -kInf;
  std::size_t core_count = 0;
  const double core_x = out.c / in.eps;
  const double plot_x = 4.0 * core_x;
  const auto plot_half = static_cast<long long>(std::min<double>(static_cast<double>(half), plot_x * static_cast<double>(m)));
  const long long stride = std::max<long long>(1, plot_half / 1024);
  for (long long j = -static_cast<long long>(half); j < static_cast<long long>(half); ++j) {
    const auto aj = static_cast<std::size_t>(std::llabs(j));
    const std::size_t r = static_cast<std::size_t>(((j % static_cast<long long>(m)) + static_cast<long long>(m)) % static_cast<long long>(m));
    const double x = static_cast<double>(j) * inv_m;
    const double fabs_v = std::abs(f_per[r]);
    const double pf = fabs_v * std::abs(phi_hat[aj]);
    const double qf = pf * std::abs(phi_hat[aj]);
    const double tm = std::abs(big_phi[aj] * g_per[r]);
    excess = std::max(excess, (pf - fabs_v) / fmax);
    if (tm > out.lambda) level += inv_m;
    mod_q += in.x(qf / out.lambda) * inv_m;
    const double frac = std::abs(x - std::round(x));
    if (std::abs(x) <= core_x && frac <= out.delta + 1e-12) {
      core_min = std::min(core_min, tm / out.s);
      ++core_count;
    }
    if (std::llabs(j) <= plot_half && j % stride == 0) {
      out.series.x.push_back(x);
      out.series.tmqf.push_back(tm);
    }
  }
  double mod_f = 0.0;
  for (const cplx& v : f_per) mod_f += in.x(std::abs(v) / out.lambda) * inv_m;

  out.core_min_ratio = core_min;
  out.core_points = core_count;
  out.pf_excess = excess;
  out.level_set_measure = level;
  out.modular_q = mod_q;
  out.modular_f = mod_f;
  out.cure_ratio = mod_f > 0.0 ? mod_q / mod_f : kInf;
  out.witness_ratio = mod_q > 0.0 ? level / mod_q : 0.0;
  return out;
}

}  // namespace zlab
