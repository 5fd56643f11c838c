#include "zlab/zygmund.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "zlab/signal.hpp"

namespace zlab {

namespace {

// Trigonometric polynomial Σ a_k e^{2πi(k-kmin)x} on M = 2^m ≥ oversample·(span+1)
// equispaced points of [0,1). The modulation by kmin does not change |f|.
class TrigProblem {
 public:
  TrigProblem(const std::vector<std::int64_t>& k, const OrliczSpace& x, int oversample)
      : k_(k), x_(x) {
    kmin_ = *std::min_element(k.begin(), k.end());
    const std::int64_t span = *std::max_element(k.begin(), k.end()) - kmin_;
    m_ = 1;
    while (m_ < static_cast<std::size_t>(oversample) * static_cast<std::size_t>(span + 1)) m_ <<= 1;
    m_ = std::max<std::size_t>(m_, 16);
    if (x.is_lp()) {
      r_ = x.p == 1.0 ? kInf : x.p / (x.p - 1.0);
    } else {
      if (x.p != 1.0) throw Error(ErrorCode::UnsupportedSpace, "dual norms need L^p or Y_{1,s}");
      ystar_ = std::make_unique<ComplementaryYoung>(x);
    }
  }

  std::size_t size() const { return k_.size(); }
  bool amemiya() const { return static_cast<bool>(ystar_); }

  std::vector<cplx> synth(const std::vector<cplx>& a) const {
    std::vector<cplx> buf(m_);
    for (std::size_t i = 0; i < k_.size(); ++i) buf[static_cast<std::size_t>(k_[i] - kmin_)] += a[i];
    fft_backward(buf);
    return buf;
  }

  cplx eval_at(const std::vector<cplx>& a, double x, int derivative) const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < k_.size(); ++i) {
      const double w = 2.0 * kPi * static_cast<double>(k_[i] - kmin_);
      cplx term = a[i] * std::polar(1.0, w * x);
      for (int d = 0; d < derivative; ++d) term *= cplx(0.0, w);
      acc += term;
    }
    return acc;
  }

  // sup |f| with Newton refinement of the top grid maxima; argmax in *where
  double sup_norm(const std::vector<cplx>& a, const std::vector<cplx>& f, double* where) const {
    std::vector<std::size_t> idx(m_);
    for (std::size_t j = 0; j < m_; ++j) idx[j] = j;
    const std::size_t top = std::min<std::size_t>(3, m_);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(top), idx.end(),
                      [&](std::size_t u, std::size_t v) {
                        const double nu = std::norm(f[u]), nv = std::norm(f[v]);
                        return nu != nv ? nu > nv : u < v;
                      });
    double best = std::abs(f[idx[0]]);
    double best_x = static_cast<double>(idx[0]) / static_cast<double>(m_);
    for (std::size_t c = 0; c < top; ++c) {
      double x = static_cast<double>(idx[c]) / static_cast<double>(m_);
      for (int it = 0; it < 30; ++it) {
        const cplx f0 = eval_at(a, x, 0), f1 = eval_at(a, x, 1), f2 = eval_at(a, x, 2);
        const double g1 = 2.0 * std::real(f1 * std::conj(f0));
        const double g2 = 2.0 * (std::norm(f1) + std::real(f2 * std::conj(f0)));
        if (g2 >= 0.0) break;
        const double step = g1 / g2;
        x -= step;
        if (std::abs(step) < 1e-15) break;
      }
      const double v = std::abs(eval_at(a, x, 0));
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    if (where) *where = best_x;
    return best;
  }

  double value(const std::vector<cplx>& a, double* aux = nullptr) const {
    const std::vector<cplx> f = synth(a);
    if (ystar_) {
      std::vector<double> absf(m_);
      for (std::size_t j = 0; j < m_; ++j) absf[j] = std::abs(f[j]);
      return amemiya_norm(absf, {}, *ystar_, aux);
    }
    if (std::isinf(r_)) return sup_norm(a, f, aux);
    double fmax = 0.0;
    for (const cplx& v : f) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) return 0.0;
    double acc = 0.0;
    for (const cplx& v : f) acc += std::pow(std::abs(v) / fmax, r_);
    return fmax * std::pow(acc / static_cast<double>(m_), 1.0 / r_);
  }

  // Ascent direction: a gradient (or subgradient) of the dual norm at a.
  std::vector<cplx> direction(const std::vector<cplx>& a) const {
    std::vector<cplx> g(k_.size());
    if (ystar_) {
      double kstar = 1.0;
      value(a, &kstar);
      // envelope theorem: differentiate (1 + mean Y*(k*|f|))/k* at fixed k*
      const std::vector<cplx> f = synth(a);
      auto objective = [&](const std::vector<cplx>& ff) {
        double acc = 0.0;
        for (const cplx& v : ff) acc += (*ystar_)(kstar * std::abs(v));
        return (1.0 + acc / static_cast<double>(m_)) / kstar;
      };
      const double step = 1e-6;
      std::vector<cplx> fp(f), fm(f);
      for (std::size_t i = 0; i < k_.size(); ++i) {
        const double freq = 2.0 * kPi * static_cast<double>(k_[i] - kmin_);
        for (int part = 0; part < 2; ++part) {
          const cplx delta = part == 0 ? cplx(step, 0.0) : cplx(0.0, step);
          for (std::size_t j = 0; j < m_; ++j) {
            const cplx e = delta * std::polar(1.0, freq * static_cast<double>(j) / static_cast<double>(m_));
            fp[j] = f[j] + e;
            fm[j] = f[j] - e;
          }
          const double d = (objective(fp) - objective(fm)) / (2.0 * step);
          g[i] += part == 0 ? cplx(d, 0.0) : cplx(0.0, d);
        }
      }
      return g;
    }
    const std::vector<cplx> f = synth(a);
    if (std::isinf(r_)) {
      double x = 0.0;
      sup_norm(a, f, &x);
      const cplx fx = eval_at(a, x, 0);
      const cplx phase = std::abs(fx) > 0.0 ? fx / std::abs(fx) : cplx(1.0, 0.0);
      for (std::size_t i = 0; i < k_.size(); ++i)
        g[i] = phase * std::polar(1.0, -2.0 * kPi * static_cast<double>(k_[i] - kmin_) * x);
      return g;
    }
    double fmax = 0.0;
    for (const cplx& v : f) fmax = std::max(fmax, std::abs(v));
    std::vector<cplx> w(m_);
    for (std::size_t j = 0; j < m_; ++j) {
      const double mag = std::abs(f[j]) / fmax;
      w[j] = mag > 0.0 ? std::pow(mag, r_ - 2.0) * f[j] / fmax : cplx(0.0, 0.0);
    }
    fft_forward(w);
    for (std::size_t i = 0; i < k_.size(); ++i) g[i] = w[static_cast<std::size_t>(k_[i] - kmin_)];
    return g;
  }

 private:
  std::vector<std::int64_t> k_;
  OrliczSpace x_;
  std::int64_t kmin_ = 0;
  std::size_t m_ = 16;
  double r_ = 2.0;
  std::unique_ptr<ComplementaryYoung> ystar_;
};

void normalize(std::vector<cplx>& a) {
  double n = 0.0;
  for (const cplx& v : a) n += std::norm(v);
  n = std::sqrt(n);
  if (n > 0.0)
    for (cplx& v : a) v /= n;
}

struct AscentResult {
  double value;
  std::vector<cplx> a;
};

AscentResult ascend(const TrigProblem& prob, std::vector<cplx> a, const OptimizerConfig& cfg) {
  normalize(a);
  double val = prob.value(a);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    std::vector<cplx> next = prob.direction(a);
    normalize(next);
    const double nv = prob.value(next);
    if (!(nv > val * (1.0 + cfg.tolerance))) {
      if (nv > val) {
        val = nv;
        a = std::move(next);
      }
      break;
    }
    val = nv;
    a = std::move(next);
  }
  return {val, a};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double evaluate_certificate(const std::vector<std::int64_t>& k, const std::vector<cplx>& a,
                            const OrliczSpace& x, int oversample) {
  if (x.is_lp() && x.p == 2.0) {
    double n = 0.0;
    for (const cplx& v : a) n += std::norm(v);
    return std::sqrt(n);
  }
  TrigProblem prob(k, x, oversample);
  return prob.value(a);
}

ZygmundEstimate zygmund_constant(const std::vector<std::int64_t>& kin, const OrliczSpace& x,
                                 const OptimizerConfig& cfg) {
  if (kin.empty()) throw Error(ErrorCode::InvalidArgument, "frequency set is empty");
  std::vector<std::int64_t> k = kin;
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  if (k.back() - k.front() > cfg.frequency_cap)
    throw Error(ErrorCode::InvalidArgument, "frequency span exceeds the configured cap");

  ZygmundEstimate est;
  est.frequencies = k;
  est.seed = cfg.seed;
  const std::size_t j = k.size();
  const double u = 1.0 / std::sqrt(static_cast<double>(j));
  if (x.is_lp() && x.p == 2.0) {
    est.value = 1.0;
    est.certificate.assign(j, cplx(u, 0.0));
    est.method = "parseval";
    return est;
  }

  TrigProblem prob(k, x, cfg.oversample);
  std::vector<std::vector<cplx>> starts;
  starts.emplace_back(j, cplx(u, 0.0));
  {
    std::vector<cplx> spike(j, 0.0);
    spike[0] = 1.0;
    starts.push_back(spike);
    std::vector<cplx> alt(j);
    for (std::size_t i = 0; i < j; ++i) alt[i] = (i % 2 == 0) ? u : -u;
    starts.push_back(alt);
  }
  for (int r = 0; r < cfg.random_restarts; ++r) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> a(j);
    for (auto& v : a) {
      const double re = g(rng);
      const double im = g(rng);
      v = cplx(re, im);
    }
    starts.push_back(a);
  }

  std::vector<AscentResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { results[i] = ascend(prob, starts[i], cfg); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].value > results[best].value) best = i;
  est.certificate = results[best].a;
  normalize(est.certificate);
  est.value = prob.value(est.certificate);
  est.method = prob.amemiya() ? "conditional-gradient/finite-difference" : "conditional-gradient";
  return est;
}

std::vector<int> default_n_range(const std::vector<double>& xi, std::int64_t cap) {
  std::vector<int> out;
  double lo = kInf, hi = -kInf;
  for (double x : xi) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  for (int n = -64; n <= 64; ++n) {
    // skip scales whose floors overflow or cannot fit under the cap
    if (std::ldexp(std::max(std::abs(lo), std::abs(hi)), n) > 0x1p52) break;
    if (std::ldexp(hi - lo, n) > static_cast<double>(cap) + 1.0) break;
    const auto f = rescale_floor(xi, n);
    if (f.size() >= 2 && f.back() - f.front() <= cap) out.push_back(n);
  }
  return out;
}

ZygmundEstimate multiscale_constant(const std::vector<double>& xi, const OrliczSpace& x,
                                    std::optional<std::vector<int>> n_range,
                                    const OptimizerConfig& cfg) {
  if (xi.empty()) throw Error(ErrorCode::EmptySet, "singular set is empty");
  std::vector<int> ns = n_range ? *n_range : default_n_range(xi, cfg.frequency_cap);
  const bool fallback = ns.empty();
  if (fallback) ns.push_back(0);
  std::vector<ZygmundEstimate> per(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) {
    OptimizerConfig c = cfg;
    c.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(ns[i] + 1000));
    per[i] = zygmund_constant(rescale_floor(xi, ns[i]), x, c);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < per.size(); ++i) {
    const bool larger = per[i].value > per[best].value;
    const bool tie_closer = per[i].value == per[best].value && std::abs(ns[i]) < std::abs(ns[best]);
    if (larger || tie_closer) best = i;
  }
  ZygmundEstimate est = per[best];
  est.seed = cfg.seed;
  est.n_range = fallback ? std::vector<int>{} : ns;
  est.best_n = ns[best];
  if (fallback) est.method += "+singleton-floors";
  return est;
}

ZygmundEstimate maximal_multiscale_constant(const SingularSet& xi, const OrliczSpace& x,
                                            const SelectionConfig& sel, const OptimizerConfig& cfg) {
  const auto omega = complementary_intervals(xi, xi.window());
  for (const Interval& w : omega)
    if (std::isinf(w.a) || std::isinf(w.b))
      throw Error(ErrorCode::InvalidArgument, "selections need a bounded window");
  std::vector<std::pair<std::string, std::vector<double>>> selections;
  std::vector<double> left, right, mid;
  for (const Interval& w : omega) {
    left.push_back(w.a);
    right.push_back(w.b);
    mid.push_back(w.center());
  }
  selections.emplace_back("left", left);
  selections.emplace_back("right", right);
  selections.emplace_back("midpoint", mid);
  for (int r = 0; r < sel.random_selections; ++r) {
    std::mt19937_64 rng(mix_seed(sel.seed, 7000 + static_cast<std::uint64_t>(r)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> pts;
    for (const Interval& w : omega) pts.push_back(w.a + unif(rng) * w.length());
    selections.emplace_back("random-" + std::to_string(r), pts);
  }
  std::vector<ZygmundEstimate> per(selections.size());
  for (std::size_t i = 0; i < selections.size(); ++i) {
    std::vector<double> pts = selections[i].second;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    per[i] = multiscale_constant(pts, x, std::nullopt, cfg);
    per[i].selection = pts;
    per[i].selection_label = selections[i].first;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < per.size(); ++i)
    if (per[i].value > per[best].value) best = i;
  return per[best];
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return {0.0, n > 0 ? sy / n : 0.0};
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

ScalingProbe lacunary_scaling_probe(double gamma, int tau, int depth,
                                    const std::vector<double>& epsilons, const OptimizerConfig& cfg) {
  const double top = std::pow(gamma, depth);
  const SingularSet xi = lacunary_set(gamma, tau, 0.0, depth, {0.0, top});
  ScalingProbe probe;
  std::vector<double> lx, ly;
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0,1]");
    const ZygmundEstimate e = multiscale_constant(xi.points(), YoungFunction::lp(1.0 + eps), std::nullopt, cfg);
    probe.rows.push_back({eps, e.value, e.best_n.value_or(0)});
    lx.push_back(std::log(1.0 / eps));
    ly.push_back(std::log(e.value));
  }
  std::tie(probe.slope, probe.intercept) = fit_line(lx, ly);
  return probe;
}

}  // namespace zlab
