#include "zlab/orlicz.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace zlab {

namespace {
constexpr double kE = 2.71828182845904523536;
}

double YoungFunction::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  const double base = (p == 1.0) ? t : std::pow(t, p);
  if (s == 0.0) return base;
  return base * std::pow(std::log(kE + t), s);
}

double YoungFunction::derivative(double t) const {
  if (t < 0.0) t = 0.0;
  const double tp1 = (p == 1.0) ? 1.0 : p * std::pow(t, p - 1.0);
  if (s == 0.0) return tp1;
  const double l = std::log(kE + t);
  const double dl = 1.0 / (kE + t);
  return tp1 * std::pow(l, s) + s * std::pow(t, p) * std::pow(l, s - 1.0) * dl;
}

double YoungFunction::second_derivative(double t) const {
  if (t < 0.0) t = 0.0;
  const double a2 = (p == 1.0) ? 0.0 : p * (p - 1.0) * std::pow(t, p - 2.0);
  if (s == 0.0) return a2;
  const double a1 = (p == 1.0) ? 1.0 : p * std::pow(t, p - 1.0);
  const double a0 = std::pow(t, p);
  const double l = std::log(kE + t);
  const double dl = 1.0 / (kE + t);
  const double ddl = -dl * dl;
  const double ls = std::pow(l, s);
  const double ls1 = s * std::pow(l, s - 1.0);
  const double ls2 = s * (s - 1.0) * std::pow(l, s - 2.0);
  return a2 * ls + 2.0 * a1 * ls1 * dl + a0 * (ls2 * dl * dl + ls1 * ddl);
}

double submultiplicative_constant(const YoungFunction& y, double lo, double hi, int points) {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double a = std::pow(10.0, -lo + (lo + hi) * i / (points - 1));
    for (int j = 0; j < points; ++j) {
      const double b = std::pow(10.0, -lo + (lo + hi) * j / (points - 1));
      worst = std::max(worst, y(a * b) / (y(a) * y(b)));
    }
  }
  return worst;
}

double modular(const std::vector<double>& values, const std::vector<double>& weights,
               const YoungFunction& y, double t) {
  const double uniform = values.empty() ? 0.0 : 1.0 / static_cast<double>(values.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double w = weights.empty() ? uniform : weights[j];
    if (values[j] != 0.0 && w != 0.0) acc += w * y(values[j] / t);
  }
  return acc;
}

double luxemburg_norm(const std::vector<double>& values, const std::vector<double>& weights,
                      const YoungFunction& y) {
  double vmax = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j)
    if (weights.empty() || weights[j] > 0.0) vmax = std::max(vmax, values[j]);
  if (vmax == 0.0) return 0.0;
  double lo = vmax, hi = vmax;
  while (modular(values, weights, y, lo) <= 1.0) lo *= 0.5;
  while (modular(values, weights, y, hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (modular(values, weights, y, mid) > 1.0) lo = mid;
    else hi = mid;
  }
  return hi;
}

double luxemburg_norm(const std::vector<double>& values, const YoungFunction& y) {
  return luxemburg_norm(values, {}, y);
}

double lp_norm(const std::vector<double>& values, const std::vector<double>& weights, double p) {
  const double uniform = values.empty() ? 0.0 : 1.0 / static_cast<double>(values.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double w = weights.empty() ? uniform : weights[j];
    if (values[j] != 0.0) acc += w * (p == 1.0 ? values[j] : std::pow(values[j], p));
  }
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double orlicz_norm(const std::vector<double>& values, const std::vector<double>& weights,
                   const OrliczSpace& x) {
  if (x.is_lp()) return lp_norm(values, weights, x.p);
  return luxemburg_norm(values, weights, x);
}

std::pair<std::size_t, std::size_t> sample_range(double a, double h, std::size_t n, const Interval& i) {
  auto index = [&](double x) {
    const double r = (x - a) / h;
    const double c = std::ceil(r - 1e-9);
    return static_cast<long long>(c);
  };
  long long first = std::max<long long>(0, index(i.a));
  long long last = std::min<long long>(static_cast<long long>(n), index(i.b));
  if (last < first) last = first;
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

double local_average(const std::vector<double>& absf, double a, double b, const Interval& i,
                     const OrliczSpace& x, Tail tail, int dec) {
  const std::size_t n = absf.size();
  const double h = (b - a) / static_cast<double>(n);
  if (tail == Tail::None) {
    auto [first, last] = sample_range(a, h, n, i);
    if (last == first) return 0.0;
    std::vector<double> vals(absf.begin() + static_cast<long>(first), absf.begin() + static_cast<long>(last));
    return orlicz_norm(vals, {}, x);
  }
  const double len = i.length();
  const double c = i.center();
  const double period = b - a;
  std::vector<double> vals(n), weights(n, h / len);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = periodic_difference(a + static_cast<double>(j) * h, c, period) / len;
    const double wgt = std::pow(chi(d), tail == Tail::Plus ? dec : -dec);
    vals[j] = absf[j] * wgt;
  }
  return orlicz_norm(vals, weights, x);
}

double local_average(const SampledSignal& f, const Interval& i, const OrliczSpace& x, Tail tail,
                     int dec) {
  return local_average(f.abs(), f.a(), f.b(), i, x, tail, dec);
}

std::vector<double> orlicz_maximal(const std::vector<double>& absf, double a, double b,
                                   const OrliczSpace& x, const std::vector<int>& shifts) {
  const std::size_t n = absf.size();
  const double h = (b - a) / static_cast<double>(n);
  std::vector<double> out(n, 0.0);
  std::vector<double> prefix;
  if (x.is_lp()) {
    prefix.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      prefix[j + 1] = prefix[j] + (x.p == 1.0 ? absf[j] : std::pow(absf[j], x.p));
  }
  const int n_coarse = -static_cast<int>(std::floor(std::log2(b - a) + 1e-12));
  const int n_fine = static_cast<int>(std::ceil(std::log2(1.0 / h) - 1e-12));
  for (int t : shifts) {
    for (int gen = n_coarse; gen <= n_fine; ++gen) {
      const double len = std::ldexp(1.0, -gen);
      const double off = ((gen % 2 == 0) ? 1.0 : -1.0) * t / 3.0;
      const auto k0 = static_cast<long long>(std::ceil(a / len - off - 1e-12));
      const auto k1 = static_cast<long long>(std::floor(b / len - off + 1e-12)) - 1;
      for (long long k = k0; k <= k1; ++k) {
        const double left = (static_cast<double>(k) + off) * len;
        auto [first, last] = sample_range(a, h, n, {left, left + len});
        if (last == first) continue;
        double avg;
        if (x.is_lp()) {
          const double mean = (prefix[last] - prefix[first]) / static_cast<double>(last - first);
          avg = x.p == 1.0 ? mean : std::pow(mean, 1.0 / x.p);
        } else {
          std::vector<double> vals(absf.begin() + static_cast<long>(first), absf.begin() + static_cast<long>(last));
          avg = luxemburg_norm(vals, x);
        }
        for (std::size_t j = first; j < last; ++j) out[j] = std::max(out[j], avg);
      }
    }
  }
  return out;
}

std::vector<double> orlicz_maximal(const SampledSignal& f, const OrliczSpace& x,
                                   const std::vector<int>& shifts) {
  return orlicz_maximal(f.abs(), f.a(), f.b(), x, shifts);
}

double bp_constant(const OrliczSpace& x, double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "B_p needs p > 1");
  if (p <= x.p) throw Error(ErrorCode::Divergent, "s^{p-1} Y(1/s) is not integrable at 0 for p <= p_X");
  // s = e^{-u}: ∫_0^∞ e^{-u(p-p_X)} log^s(e + e^u) du
  auto integrand = [&](double u) {
    const double decay = std::exp(-u * (p - x.p));
    if (x.s == 0.0) return decay;
    const double l = u > 1.0 ? u + std::log1p(std::exp(1.0 - u)) : std::log(kE + std::exp(u));
    return decay * std::pow(l, x.s);
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13, &err);
  return std::pow(value, 1.0 / p);
}

ComplementaryYoung::ComplementaryYoung(const YoungFunction& y) : y_(y) {
  slope0_ = y.derivative(0.0);
  if (y.is_linear()) return;
  const int count = 2401;
  for (int i = 0; i < count; ++i) {
    const double t = std::pow(10.0, -12.0 + 24.0 * i / (count - 1));
    t_.push_back(t);
    u_.push_back(y.derivative(t));
  }
}

double ComplementaryYoung::argmax(double u) const {
  if (u <= slope0_) return 0.0;
  if (y_.is_linear()) return kInf;
  double t;
  auto it = std::lower_bound(u_.begin(), u_.end(), u);
  if (it == u_.begin()) {
    t = t_.front();
  } else if (it == u_.end()) {
    t = t_.back();
    while (y_.derivative(t) < u) t *= 2.0;
  } else {
    const std::size_t i = static_cast<std::size_t>(it - u_.begin());
    const double w = (u - u_[i - 1]) / (u_[i] - u_[i - 1]);
    t = t_[i - 1] + w * (t_[i] - t_[i - 1]);
  }
  for (int it2 = 0; it2 < 6; ++it2) {
    const double g = y_.derivative(t) - u;
    const double d2 = y_.second_derivative(t);
    if (d2 <= 0.0) break;
    const double next = t - g / d2;
    t = next > 0.0 ? next : 0.5 * t;
  }
  return t;
}

double ComplementaryYoung::operator()(double u) const {
  if (u <= slope0_) return 0.0;
  if (y_.is_linear()) return kInf;
  const double t = argmax(u);
  return std::max(0.0, u * t - y_(t));
}

double amemiya_norm(const std::vector<double>& values, const std::vector<double>& weights,
                    const ComplementaryYoung& ystar, double* kstar) {
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, v);
  if (vmax == 0.0) {
    if (kstar) *kstar = 1.0;
    return 0.0;
  }
  const double uniform = 1.0 / static_cast<double>(values.size());
  auto objective = [&](double logk) {
    const double k = std::exp(logk);
    double acc = 1.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double w = weights.empty() ? uniform : weights[j];
      acc += w * ystar(k * values[j]);
    }
    return acc / k;
  };
  // for k ≤ 1/max|f| the objective is 1/k, so the minimizer lies beyond
  double lo = std::log(1.0 / vmax);
  double hi = lo + 1.0;
  while (objective(hi) < objective(hi - 0.5)) hi += 1.0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 120 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - phi * (hi - lo); f1 = objective(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + phi * (hi - lo); f2 = objective(x2);
    }
  }
  if (kstar) *kstar = std::exp(f1 < f2 ? x1 : x2);
  return std::min(f1, f2);
}

double dual_norm(const std::vector<double>& absf, const OrliczSpace& x) {
  if (x.is_lp()) {
    if (x.p == 1.0) return *std::max_element(absf.begin(), absf.end());
    return lp_norm(absf, {}, x.p / (x.p - 1.0));
  }
  if (x.p == 1.0) {
    const ComplementaryYoung ystar(x);
    return amemiya_norm(absf, {}, ystar);
  }
  throw Error(ErrorCode::UnsupportedSpace, "dual norms are available for L^p and Y_{1,s}");
}

double dual_norm(const SampledSignal& f, const OrliczSpace& x) { return dual_norm(f.abs(), x); }

}  // namespace zlab
