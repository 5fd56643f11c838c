#include <doctest.h>

#include <cmath>
#include <random>

#include "zlab/grids.hpp"
#include "zlab/orlicz.hpp"

using namespace zlab;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = e(rng);
  return v;
}

}  // namespace

TEST_SUITE("orlicz") {
  TEST_CASE("young function values") {
    const YoungFunction y{1.0, 0.5};
    CHECK(y(0.0) == 0.0);
    CHECK(y(2.0) == doctest::Approx(2.0 * std::sqrt(std::log(std::exp(1.0) + 2.0))));
    CHECK(YoungFunction::lp(2.0).is_lp());
    CHECK(YoungFunction::lp(1.0).is_linear());
    // convexity on a grid
    for (double t = 0.1; t < 50.0; t *= 1.3) CHECK(y(t) <= 0.5 * (y(0.9 * t) + y(1.1 * t)) + 1e-12);
  }

  TEST_CASE("luxemburg norms with closed forms") {
    CHECK(luxemburg_norm(std::vector<double>(64, 3.0), YoungFunction::lp(1.0)) == doctest::Approx(3.0).epsilon(1e-10));
    std::vector<double> q(64, 0.0);
    for (int j = 0; j < 16; ++j) q[j] = 1.0;
    CHECK(luxemburg_norm(q, YoungFunction::lp(2.0)) == doctest::Approx(0.5).epsilon(1e-10));
  }

  TEST_CASE("luxemburg norm of 1 in Y_{1,1/2} against a root scan") {
    // u = 1/t solves u·sqrt(log(e+u)) = 1; scan u on a fine grid
    double best_u = 0.0, best_gap = kInf;
    for (int i = 1; i <= 2000000; ++i) {
      const double u = i * 1e-6;
      const double gap = std::abs(u * std::sqrt(std::log(std::exp(1.0) + u)) - 1.0);
      if (gap < best_gap) {
        best_gap = gap;
        best_u = u;
      }
    }
    const double t = luxemburg_norm(std::vector<double>(32, 1.0), YoungFunction{1.0, 0.5});
    CHECK(t == doctest::Approx(1.0 / best_u).epsilon(1e-5));
  }

  TEST_CASE("luxemburg modular, homogeneity and monotonicity") {
    const YoungFunction y{1.5, 1.0};
    const auto v = random_values(256, 3);
    const double t = luxemburg_norm(v, y);
    const std::vector<double> w(v.size(), 1.0 / static_cast<double>(v.size()));
    CHECK(modular(v, w, y, t) == doctest::Approx(1.0).epsilon(1e-6));
    std::vector<double> cv = v, bigger = v;
    for (auto& x : cv) x *= 7.0;
    for (auto& x : bigger) x *= 1.2;
    CHECK(luxemburg_norm(cv, y) == doctest::Approx(7.0 * t).epsilon(1e-8));
    CHECK(luxemburg_norm(bigger, y) >= t);
    for (double p : {1.0, 1.5, 2.0}) {
      double acc = 0.0;
      for (double x : v) acc += std::pow(x, p) / static_cast<double>(v.size());
      CHECK(luxemburg_norm(v, YoungFunction::lp(p)) == doctest::Approx(std::pow(acc, 1.0 / p)).epsilon(1e-8));
    }
  }

  TEST_CASE("local averages") {
    const auto one = SampledSignal::from_function(1024, -4.0, 4.0, [](double) { return cplx(1.0); });
    CHECK(local_average(one, {0.5, 1.5}, YoungFunction::lp(1.5)) == doctest::Approx(1.0).epsilon(1e-12));
    const auto ind = SampledSignal::from_function(1024, -4.0, 4.0, [](double x) { return cplx(x >= 0 && x < 1 ? 1.0 : 0.0); });
    CHECK(local_average(ind, {0.0, 1.0}, YoungFunction::lp(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
    const double plus = local_average(ind, {0.0, 1.0}, YoungFunction::lp(2.0), Tail::Plus);
    // (∫_{-1/2}^{1/2} χ(t)^16 dt)^{1/2} by composite Simpson on a fine mesh
    double simpson = 0.0;
    const int m = 2000;
    for (int i = 0; i <= m; ++i) {
      const double t = -0.5 + static_cast<double>(i) / m;
      const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      simpson += w * std::pow(1.0 / (1.0 + t * t), 16);
    }
    CHECK(plus == doctest::Approx(std::sqrt(simpson / (3.0 * m))).epsilon(1e-4));
    CHECK(local_average(ind, {0.0, 1.0}, YoungFunction::lp(2.0), Tail::Minus) >= 1.0);
    // scaling invariance
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::vector<cplx> s(512);
    for (auto& z : s) z = cplx(nd(rng), nd(rng));
    const SampledSignal f(s, -4.0, 4.0), g(s, -2.0, 2.0);
    CHECK(local_average(f, {0.5, 1.5}, YoungFunction::lp(1.5)) ==
          doctest::Approx(local_average(g, {0.25, 0.75}, YoungFunction::lp(1.5))).epsilon(1e-12));
  }

  TEST_CASE("orlicz maximal function") {
    const auto one = SampledSignal::from_function(512, -4.0, 4.0, [](double) { return cplx(1.0); });
    for (double m : orlicz_maximal(one, YoungFunction::lp(1.0))) CHECK(m == doctest::Approx(1.0));
    const auto ind = SampledSignal::from_function(512, -4.0, 4.0, [](double x) { return cplx(x >= 0 && x < 1 ? 1.0 : 0.0); });
    const auto m = orlicz_maximal(ind, YoungFunction::lp(1.0));
    const std::size_t j = 384;  // x = 2
    CHECK(ind.x(j) == 2.0);
    CHECK(m[j] <= 0.5 + 1e-12);
    CHECK(m[j] >= 0.5 / 3.0);
    // M f ≥ ⟨f⟩_I on I for dyadic I
    const DyadicInterval i{1, 1, 0};
    const double avg = local_average(ind, i.as_interval(), YoungFunction::lp(1.0));
    for (std::size_t q = 0; q < ind.size(); ++q)
      if (ind.x(q) >= i.left() && ind.x(q) < i.right()) CHECK(m[q] >= avg - 1e-12);
  }

  TEST_CASE("B_p constants") {
    CHECK(bp_constant(YoungFunction::lp(1.0), 2.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bp_constant(YoungFunction::lp(2.0), 3.0) == doctest::Approx(1.0).epsilon(1e-9));
    for (double q : {1.0, 1.25, 1.5}) {
      const double p = q + 0.7;
      CHECK(bp_constant(YoungFunction::lp(q), p) == doctest::Approx(std::pow(p - q, -1.0 / p)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(bp_constant(YoungFunction::lp(2.0), 2.0), Error);
    CHECK_THROWS_AS(bp_constant(YoungFunction::lp(1.0), 1.0), Error);
  }

  TEST_CASE("dual norms") {
    CHECK(dual_norm(std::vector<double>(256, 1.0), YoungFunction::lp(4.0 / 3.0)) == doctest::Approx(1.0).epsilon(1e-10));
    std::vector<double> absf(4096);
    for (std::size_t j = 0; j < absf.size(); ++j) absf[j] = std::abs(1.0 + std::polar(1.0, 2.0 * kPi * j / 4096.0));
    CHECK(dual_norm(absf, YoungFunction::lp(4.0 / 3.0)) == doctest::Approx(std::pow(6.0, 0.25)).epsilon(1e-10));
    CHECK(dual_norm(std::vector<double>(64, 1.0), YoungFunction::lp(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
    // Y_{1,s}: the dual of a constant is 1/‖𝟙‖_X
    const YoungFunction y{1.0, 1.0};
    const double lux = luxemburg_norm(std::vector<double>(64, 1.0), y);
    CHECK(dual_norm(std::vector<double>(64, 1.0), y) == doctest::Approx(1.0 / lux).epsilon(1e-4));
  }

  TEST_CASE("complementary young function") {
    const YoungFunction y{1.0, 1.0};
    const ComplementaryYoung ys(y);
    for (double u : {1.5, 3.0, 8.0}) {
      double best = 0.0;
      for (double t = 0.0; t < 1e4; t += 1e-2 * (1.0 + t)) best = std::max(best, u * t - y(t));
      CHECK(ys(u) == doctest::Approx(best).epsilon(1e-4));
    }
  }
}
