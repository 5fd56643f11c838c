#include "zlab/grids.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace zlab {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

// floor division for signed integers
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Rational pow2(int e) {
  BigInt one = 1;
  if (e >= 0) return Rational(BigInt(one << e));
  return Rational(BigInt(1), BigInt(one << (-e)));
}

// Left endpoint (k + s·t/3)·2^{-n}, exactly.
Rational exact_left(const DyadicInterval& i) {
  BigInt num = BigInt(3) * i.k + parity_sign(i.n) * i.shift;
  return Rational(num, 3) * pow2(-i.n);
}

Rational exact_length(const DyadicInterval& i) { return pow2(-i.n); }

struct Endpoint {
  bool infinite;
  Rational value;
};

Endpoint to_endpoint(double v) {
  if (std::isinf(v)) return {true, Rational(0)};
  return {false, Rational(v)};
}

}  // namespace

double DyadicInterval::length() const { return std::ldexp(1.0, -n); }

double DyadicInterval::left() const {
  return std::ldexp(static_cast<double>(k) + parity_sign(n) * shift / 3.0, -n);
}

double DyadicInterval::right() const {
  return std::ldexp(static_cast<double>(k + 1) + parity_sign(n) * shift / 3.0, -n);
}

DyadicInterval DyadicInterval::parent() const {
  const std::int64_t kk = floor_div(k + parity_sign(n) * shift, 2);
  return {n - 1, kk, shift};
}

DyadicInterval DyadicInterval::ancestor(int m) const {
  DyadicInterval out = *this;
  for (int i = 0; i < m; ++i) out = out.parent();
  return out;
}

std::pair<DyadicInterval, DyadicInterval> DyadicInterval::children() const {
  const int s = parity_sign(n + 1) * shift;
  return {{n + 1, 2 * k - s, shift}, {n + 1, 2 * k + 1 - s, shift}};
}

bool DyadicInterval::contains(const DyadicInterval& other) const {
  if (shift == other.shift) {
    if (other.n < n) return false;
    return other.ancestor(other.n - n) == *this;
  }
  const Rational l0 = exact_left(*this), l1 = exact_left(other);
  return l0 <= l1 && l1 + exact_length(other) <= l0 + exact_length(*this);
}

bool DyadicInterval::disjoint(const DyadicInterval& other) const {
  if (shift == other.shift) return !contains(other) && !other.contains(*this);
  const Rational l0 = exact_left(*this), l1 = exact_left(other);
  return l0 + exact_length(*this) <= l1 || l1 + exact_length(other) <= l0;
}

DyadicInterval dyadic_containing(double x, int n, int shift) {
  const double scaled = std::ldexp(x, n) - parity_sign(n) * shift / 3.0;
  DyadicInterval i{n, static_cast<std::int64_t>(std::floor(scaled)), shift};
  // guard against rounding in the shifted grids
  while (i.left() > x) --i.k;
  while (i.right() <= x) ++i.k;
  return i;
}

SingularSet::SingularSet(std::vector<double> points, Interval window, GeneratorKind kind)
    : points_(std::move(points)), window_(window), kind_(kind) {
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

double SingularSet::resolution() const {
  double r = kInf;
  for (std::size_t i = 1; i < points_.size(); ++i) r = std::min(r, points_[i] - points_[i - 1]);
  return r;
}

OpenSetCover complement_cover(const SingularSet& xi) {
  OpenSetCover o;
  const auto& p = xi.points();
  if (p.empty()) {
    o.intervals.push_back({-kInf, kInf});
    return o;
  }
  o.intervals.push_back({-kInf, p.front()});
  for (std::size_t i = 1; i < p.size(); ++i) o.intervals.push_back({p[i - 1], p[i]});
  o.intervals.push_back({p.back(), kInf});
  return o;
}

bool whitney_admissible(const OpenSetCover& o, const DyadicInterval& i) {
  const Rational l = exact_left(i);
  const Rational len = exact_length(i);
  const Rational r = l + len;
  for (const Interval& c : o.intervals) {
    const Endpoint a = to_endpoint(c.a), b = to_endpoint(c.b);
    if (!a.infinite && l < a.value) continue;
    if (!b.infinite && r > b.value) continue;
    // I lies inside this component
    if (a.infinite && b.infinite) return false;
    Rational dist;
    if (a.infinite) dist = b.value - r;
    else if (b.infinite) dist = l - a.value;
    else dist = std::min<Rational>(l - a.value, b.value - r);
    return 3 * len <= dist && dist <= 5 * len;
  }
  return false;
}

WhitneyResult whitney_decompose(const OpenSetCover& o, int shift, int s_min, int s_max,
                                std::optional<Interval> window) {
  if (o.intervals.empty()) throw Error(ErrorCode::EmptyOrFullSet, "open set is empty");
  for (const Interval& c : o.intervals)
    if (std::isinf(c.a) && std::isinf(c.b))
      throw Error(ErrorCode::EmptyOrFullSet, "open set is all of R");
  if (s_min > s_max) return {{}, true, ""};

  std::set<DyadicInterval> found;
  for (int s = s_min; s <= s_max; ++s) {
    const int n = -s;
    const double len = std::ldexp(1.0, s);
    const double off = parity_sign(n) * shift / 3.0;
    auto scan = [&](double lo, double hi) {
      const auto k0 = static_cast<std::int64_t>(std::floor(lo / len - off)) - 2;
      const auto k1 = static_cast<std::int64_t>(std::ceil(hi / len - off)) + 2;
      for (std::int64_t k = k0; k <= k1; ++k) {
        DyadicInterval cand{n, k, shift};
        if (!whitney_admissible(o, cand)) continue;
        // An admissible I has dist(I) ≤ 5ℓ < 3·(2ℓ), so no ancestor is admissible:
        // admissible intervals are automatically maximal and pairwise disjoint.
        found.insert(cand);
      }
    };
    for (const Interval& c : o.intervals) {
      if (!std::isinf(c.a)) scan(c.a + 3 * len, c.a + 5 * len);
      if (!std::isinf(c.b)) scan(c.b - 6 * len, c.b - 4 * len);
    }
  }

  WhitneyResult res;
  res.intervals.assign(found.begin(), found.end());
  std::sort(res.intervals.begin(), res.intervals.end(),
            [](const DyadicInterval& x, const DyadicInterval& y) {
              if (x.left() != y.left()) return x.left() < y.left();
              return x.n < y.n;
            });

  const double top = 3.0 * std::ldexp(1.0, s_max);
  double worst = 0.0;
  for (const Interval& c : o.intervals) {
    double lo = c.a, hi = c.b;
    if (window) {
      lo = std::max(lo, window->a);
      hi = std::min(hi, window->b);
      if (!(lo < hi)) continue;
    }
    double d;
    if (std::isinf(lo) || std::isinf(hi)) {
      d = kInf;
    } else {
      const double mid = std::clamp(0.5 * (c.a + c.b), lo, hi);
      double cand = std::isinf(c.a) ? c.b - lo : (std::isinf(c.b) ? hi - c.a : 0.0);
      if (!std::isinf(c.a) && !std::isinf(c.b)) cand = std::min(mid - c.a, c.b - mid);
      d = cand;
    }
    worst = std::max(worst, d);
  }
  if (worst > top) {
    res.coverage_complete = false;
    std::ostringstream os;
    os << error_name(ErrorCode::ScaleRangeTooNarrow) << ": points at distance " << worst
       << " from the complement need scales above 2^" << s_max;
    res.diagnostic = os.str();
  }
  return res;
}

std::vector<Interval> complementary_intervals(const SingularSet& xi, Interval window) {
  std::vector<double> inside;
  for (double p : xi.points())
    if (p >= window.a && p <= window.b) inside.push_back(p);
  if (inside.empty()) throw Error(ErrorCode::EmptySet, "no singular point inside the window");
  std::vector<Interval> out;
  double prev = window.a;
  for (double p : inside) {
    if (p > prev) out.push_back({prev, p});
    prev = p;
  }
  if (window.b > prev) out.push_back({prev, window.b});
  return out;
}

namespace {

void build_lacunary(int tau, double gamma, int depth, double center, double top,
                    std::vector<double>& out) {
  if (tau == 0) {
    out.push_back(top);
    return;
  }
  double theta_k = top;
  for (int k = 0; k <= depth; ++k) {
    const double theta_next = center + (theta_k - center) / gamma;
    build_lacunary(tau - 1, gamma, depth, theta_next, theta_k, out);
    theta_k = theta_next;
  }
}

}  // namespace

SingularSet lacunary_set(double gamma, int tau, double theta, int depth, Interval window) {
  if (!(gamma > 1.0)) throw Error(ErrorCode::InvalidRatio, "lacunary ratio must exceed 1");
  if (tau < 0 || depth < 1) throw Error(ErrorCode::InvalidArgument, "tau >= 0 and depth >= 1 required");
  std::vector<double> pts;
  if (tau == 0) {
    pts.push_back(theta);
  } else {
    const double top = window.b > theta ? window.b : theta + 1.0;
    build_lacunary(tau, gamma, depth, theta, top, pts);
  }
  SingularSet s(std::move(pts), window, GeneratorKind::Lacunary);
  s.set_lacunary({gamma, tau, theta, depth});
  return s;
}

namespace {

constexpr double kLacTol = 1e-12;

bool check_rec(std::vector<double> desc, double gamma, int tau, double theta) {
  if (tau == 0) return desc.size() == 1;
  if (desc.empty()) return true;
  std::size_t i = 0;
  double theta_k = desc.front();
  while (i < desc.size()) {
    const double bound = theta + (theta_k - theta) / gamma;
    // θ_{k+1}: the largest stored point not exceeding θ + (θ_k-θ)/γ
    std::size_t j = i;
    while (j < desc.size() && desc[j] > bound * (1 + kLacTol) + kLacTol) ++j;
    std::vector<double> gap(desc.begin() + static_cast<long>(i), desc.begin() + static_cast<long>(j));
    // past the last stored level, θ_{k+1} is the extremal admissible value
    const double theta_next = j < desc.size() ? desc[j] : bound;
    if (j < desc.size() && gamma * (theta_next - theta) > (theta_k - theta) * (1 + kLacTol) + kLacTol)
      return false;
    if (!gap.empty() && !check_rec(gap, gamma, tau - 1, theta_next)) return false;
    if (j >= desc.size()) break;
    i = j;
    theta_k = theta_next;
  }
  return true;
}

}  // namespace

bool check_lacunary(const std::vector<double>& points, double gamma, int tau, double theta) {
  if (tau == 0) return points.size() == 1;
  std::vector<double> desc;
  for (double p : points) {
    if (p <= theta) return false;
    desc.push_back(p);
  }
  std::sort(desc.rbegin(), desc.rend());
  return check_rec(desc, gamma, tau, theta);
}

std::vector<std::int64_t> rescale_floor(const std::vector<double>& xi, int n) {
  std::vector<std::int64_t> out;
  out.reserve(xi.size());
  for (double x : xi) {
    const double v = std::floor(std::ldexp(x, n));
    if (!(std::abs(v) < 0x1p62)) throw Error(ErrorCode::InvalidArgument, "rescaled frequency overflows");
    out.push_back(static_cast<std::int64_t>(v));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::int64_t> rescale_floor(const SingularSet& xi, int n) {
  return rescale_floor(xi.points(), n);
}

std::vector<std::int64_t> neighborhood(const std::vector<double>& a, double radius) {
  std::set<std::int64_t> out;
  for (double x : a) {
    const auto lo = static_cast<std::int64_t>(std::floor(x - radius));
    const auto hi = static_cast<std::int64_t>(std::ceil(x + radius));
    for (std::int64_t k = lo; k <= hi; ++k)
      if (std::abs(static_cast<double>(k) - x) < radius) out.insert(k);
  }
  return {out.begin(), out.end()};
}

}  // namespace zlab
