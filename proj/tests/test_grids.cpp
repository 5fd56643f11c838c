#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "zlab/grids.hpp"

using namespace zlab;

namespace {

// distance from [l, r) to the complement of O, or -1 when [l, r) is not inside one component
double brute_dist(const OpenSetCover& o, double l, double r) {
  for (const Interval& c : o.intervals) {
    if (l < c.a || r > c.b) continue;
    return std::min(l - c.a, c.b - r);
  }
  return -1.0;
}

std::set<DyadicInterval> brute_whitney(const OpenSetCover& o, int s_min, int s_max, double lo, double hi) {
  std::set<DyadicInterval> adm;
  for (int s = s_min; s <= s_max; ++s) {
    const double len = std::ldexp(1.0, s);
    for (auto k = static_cast<std::int64_t>(std::floor(lo / len)) - 1; k * len < hi + len; ++k) {
      const double l = static_cast<double>(k) * len;
      const double d = brute_dist(o, l, l + len);
      if (d >= 3 * len && d <= 5 * len) adm.insert({-s, k, 0});
    }
  }
  std::set<DyadicInterval> out;
  for (const auto& i : adm) {
    bool maximal = true;
    for (const auto& j : adm)
      if (j.n < i.n && j.left() <= i.left() && i.right() <= j.right()) maximal = false;
    if (maximal) out.insert(i);
  }
  return out;
}

}  // namespace

TEST_SUITE("grids") {
  TEST_CASE("dyadic interval arithmetic") {
    const DyadicInterval i{3, 5, 0};
    CHECK(i.length() == 0.125);
    CHECK(i.left() == 0.625);
    CHECK(i.parent() == DyadicInterval{2, 2, 0});
    CHECK(i.ancestor(3) == DyadicInterval{0, 0, 0});
    auto [c0, c1] = i.children();
    CHECK(c0.left() == i.left());
    CHECK(c1.right() == i.right());
    CHECK(i.contains(c1));
    CHECK(c0.disjoint(c1));
    CHECK(i.translate(2).left() == 0.875);
    CHECK(dyadic_containing(0.7, 3) == i);
  }

  TEST_CASE("shifted grids are nested") {
    for (int t = 1; t <= 2; ++t)
      for (int n = -2; n <= 4; ++n)
        for (std::int64_t k = -3; k <= 3; ++k) {
          const DyadicInterval i{n, k, t};
          auto [c0, c1] = i.children();
          CHECK(c0.left() == doctest::Approx(i.left()).epsilon(1e-14));
          CHECK(c1.right() == doctest::Approx(i.right()).epsilon(1e-14));
          CHECK(c0.parent() == i);
          CHECK(c1.parent() == i);
        }
  }

  TEST_CASE("whitney on a half line") {
    const OpenSetCover o{{{0.0, kInf}}};
    const WhitneyResult w = whitney_decompose(o, 0, -3, 3, Interval{0.0, 64.0});
    CHECK(w.intervals.size() == 21);
    for (const auto& i : w.intervals) {
      const double k = i.left() / i.length();
      CHECK((k == 3.0 || k == 4.0 || k == 5.0));
    }
    double lo = kInf, hi = -kInf, total = 0.0;
    for (const auto& i : w.intervals) {
      lo = std::min(lo, i.left());
      hi = std::max(hi, i.right());
      total += i.length();
    }
    CHECK(lo == 3.0 / 8.0);
    CHECK(hi == 48.0);
    CHECK(total == doctest::Approx(hi - lo));
  }

  TEST_CASE("whitney rejects trivial sets") {
    CHECK_THROWS_AS(whitney_decompose(OpenSetCover{{{-kInf, kInf}}}, 0, -2, 2), Error);
    CHECK_THROWS_AS(whitney_decompose(OpenSetCover{}, 0, -2, 2), Error);
  }

  TEST_CASE("whitney matches the brute-force filter on random open sets") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> cut(-64, 64), count(1, 5);
    for (int trial = 0; trial < 40; ++trial) {
      std::set<int> ends;
      const int m = count(rng);
      while (static_cast<int>(ends.size()) < 2 * m) ends.insert(cut(rng));
      std::vector<int> e(ends.begin(), ends.end());
      OpenSetCover o;
      for (int j = 0; j < m; ++j) o.intervals.push_back({e[2 * j] / 8.0, e[2 * j + 1] / 8.0});
      const WhitneyResult w = whitney_decompose(o, 0, -6, 2);
      const std::set<DyadicInterval> got(w.intervals.begin(), w.intervals.end());
      CHECK(got == brute_whitney(o, -6, 2, -9.0, 9.0));
      for (std::size_t a = 0; a < w.intervals.size(); ++a)
        for (std::size_t b = a + 1; b < w.intervals.size(); ++b)
          CHECK((w.intervals[a].right() <= w.intervals[b].left() || w.intervals[b].right() <= w.intervals[a].left()));
    }
  }

  TEST_CASE("whitney on (-1,1) is symmetric") {
    const WhitneyResult w = whitney_decompose(OpenSetCover{{{-1.0, 1.0}}}, 0, -8, -1);
    std::multiset<double> l, r;
    for (const auto& i : w.intervals) {
      l.insert(i.left());
      r.insert(-i.right());
      const double d = std::min(i.left() + 1.0, 1.0 - i.right());
      CHECK(d >= 3 * i.length());
      CHECK(d <= 5 * i.length());
    }
    CHECK(l == r);
  }

  TEST_CASE("complementary intervals") {
    const auto c = complementary_intervals(SingularSet({0.0}, {-2.0, 2.0}), {-2.0, 2.0});
    REQUIRE(c.size() == 2);
    CHECK(c[0] == Interval{-2.0, 0.0});
    CHECK(c[1] == Interval{0.0, 2.0});
    const auto d = complementary_intervals(SingularSet({1.0, 2.0, 4.0, 8.0}, {0.0, 16.0}), {0.0, 16.0});
    REQUIRE(d.size() == 5);
    CHECK(d[2] == Interval{2.0, 4.0});
    CHECK(d[4] == Interval{8.0, 16.0});
    CHECK_THROWS_AS(complementary_intervals(SingularSet({5.0}, {-kInf, kInf}), {0.0, 1.0}), Error);
  }

  TEST_CASE("lacunary sets") {
    const SingularSet s = lacunary_set(2.0, 1, 0.0, 5, {0.0, 32.0});
    for (std::size_t i = 1; i < s.points().size(); ++i) CHECK(2.0 * s.points()[i - 1] <= s.points()[i] * (1 + 1e-12));
    CHECK(check_lacunary(s.points(), 2.0, 1, 0.0));
    const SingularSet z = lacunary_set(2.0, 0, 0.25, 5, {-1.0, 1.0});
    CHECK(z.points() == std::vector<double>{0.25});
    const SingularSet t = lacunary_set(3.0, 2, 0.0, 4, {0.0, 81.0});
    CHECK(check_lacunary(t.points(), 3.0, 2, 0.0));
    CHECK_THROWS_AS(lacunary_set(1.0, 1, 0.0, 3, {0.0, 1.0}), Error);
    // every gap endpoint of the complement is a stored point
    const auto gaps = complementary_intervals(t, {0.0, 81.0});
    const std::set<double> pts(t.points().begin(), t.points().end());
    for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(pts.count(gaps[i].a) == 1);
  }

  TEST_CASE("rescaled floors and neighborhoods") {
    CHECK(rescale_floor(std::vector<double>{1.5, 2.25}, 1) == std::vector<std::int64_t>{3, 4});
    CHECK(rescale_floor(std::vector<double>{0.0}, 7) == std::vector<std::int64_t>{0});
    CHECK(rescale_floor(std::vector<double>{-0.3}, 2) == std::vector<std::int64_t>{-2});
    const std::vector<double> lam = {1.0, 2.0, 4.0, 8.0};
    const auto f = rescale_floor(lam, -1);
    CHECK(f == std::vector<std::int64_t>{0, 1, 2, 4});
    CHECK(f.size() <= lam.size());
    const auto nb = neighborhood({0.0});
    CHECK(nb.size() == 17);
    CHECK(nb.front() == -8);
    CHECK(nb.back() == 8);
    // monotone under inclusion
    const auto small = rescale_floor(std::vector<double>{1.0, 4.0}, 3);
    const auto big = rescale_floor(lam, 3);
    for (auto k : small) CHECK(std::find(big.begin(), big.end(), k) != big.end());
  }
}
