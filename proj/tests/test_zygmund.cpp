#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "zlab/zygmund.hpp"

using namespace zlab;

namespace {

double sphere_norm(const std::vector<cplx>& a) {
  double s = 0.0;
  for (const cplx& z : a) s += std::norm(z);
  return std::sqrt(s);
}

// max over |a0|^2 = c of ((1)^2 + 2c(1-c))^{1/4}, the L^4 norm of a0 + a1 e^{2πix}
double two_point_oracle() {
  double best = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double c = i / 100000.0;
    best = std::max(best, std::pow(1.0 + 2.0 * c * (1.0 - c), 0.25));
  }
  return best;
}

}  // namespace

TEST_SUITE("zygmund") {
  TEST_CASE("parseval and singletons") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> k(-40, 40);
    for (int t = 0; t < 5; ++t) {
      std::set<std::int64_t> s;
      while (s.size() < 6) s.insert(k(rng));
      const auto e = zygmund_constant({s.begin(), s.end()}, YoungFunction::lp(2.0));
      CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(zygmund_constant({5}, YoungFunction::lp(1.5)).value == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("two frequencies in L^{4/3}") {
    const auto e = zygmund_constant({0, 1}, YoungFunction::lp(4.0 / 3.0));
    CHECK(two_point_oracle() == doctest::Approx(std::pow(1.5, 0.25)).epsilon(1e-9));
    CHECK(e.value == doctest::Approx(std::pow(1.5, 0.25)).epsilon(1e-3));
    CHECK(std::norm(e.certificate[0]) == doctest::Approx(0.5).epsilon(1e-2));
  }

  TEST_CASE("arithmetic progressions in L^1") {
    for (int j : {2, 4, 8}) {
      std::vector<std::int64_t> k;
      for (int i = 1; i <= j; ++i) k.push_back(i);
      const auto e = zygmund_constant(k, YoungFunction::lp(1.0));
      CHECK(e.value <= std::sqrt(j) * (1.0 + 1e-9));
      CHECK(e.value >= std::sqrt(j) * (1.0 - 1e-3));
    }
  }

  TEST_CASE("certificates reproduce the value") {
    for (const YoungFunction& x : {YoungFunction::lp(1.25), YoungFunction{1.0, 0.5}}) {
      const std::vector<std::int64_t> k = {0, 1, 3, 7};
      const auto e = zygmund_constant(k, x);
      CHECK(sphere_norm(e.certificate) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(evaluate_certificate(k, e.certificate, x) == doctest::Approx(e.value).epsilon(1e-6));
    }
  }

  TEST_CASE("translation invariance and subset monotonicity") {
    const YoungFunction x = YoungFunction::lp(1.25);
    const double base = zygmund_constant({0, 1, 3}, x).value;
    CHECK(zygmund_constant({10, 11, 13}, x).value == doctest::Approx(base).epsilon(1e-4));
    CHECK(zygmund_constant({0, 1, 3, 9}, x).value >= base - 1e-4);
  }

  TEST_CASE("seed reproducibility") {
    OptimizerConfig cfg;
    cfg.seed = 9;
    const auto a = zygmund_constant({0, 2, 3, 8}, YoungFunction::lp(1.1), cfg);
    const auto b = zygmund_constant({0, 2, 3, 8}, YoungFunction::lp(1.1), cfg);
    CHECK(a.value == b.value);
    CHECK(a.certificate == b.certificate);
  }

  TEST_CASE("multiscale constants") {
    const auto s = multiscale_constant({0.0}, YoungFunction::lp(1.5), std::vector<int>{-2, 0, 3});
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-10));
    const std::vector<double> pts = {0.1, 0.35, 0.8};
    const auto m = multiscale_constant(pts, YoungFunction::lp(1.0));
    CHECK(m.value <= std::sqrt(3.0) * (1.0 + 1e-9));
    CHECK(m.value >= std::sqrt(3.0) * (1.0 - 1e-3));
    REQUIRE(m.best_n.has_value());
    const auto sub = multiscale_constant({0.1, 0.8}, YoungFunction::lp(1.0));
    CHECK(sub.value <= m.value + 1e-4);
  }

  TEST_CASE("lacunary truncations grow") {
    const YoungFunction x = YoungFunction::lp(4.0 / 3.0);
    double prev = 1.0;
    for (int depth : {2, 4, 6}) {
      std::vector<double> pts;
      for (int k = 0; k <= depth; ++k) pts.push_back(std::ldexp(1.0, k));
      const double v = multiscale_constant(pts, x).value;
      CHECK(v >= 1.0 - 1e-9);
      CHECK(v >= prev - 1e-4);
      prev = v;
    }
  }

  TEST_CASE("maximal multiscale constant") {
    const SingularSet xi({0.0}, {-4.0, 4.0});
    const auto e = maximal_multiscale_constant(xi, YoungFunction::lp(1.0));
    CHECK(e.value <= std::sqrt(2.0) * (1.0 + 1e-9));
    CHECK(e.value >= 1.0);
    std::vector<double> lam;
    for (int k = 0; k <= 4; ++k) lam.push_back(std::ldexp(1.0, k));
    const SingularSet l(lam, {0.5, 32.0});
    const YoungFunction x = YoungFunction::lp(4.0 / 3.0);
    const double star = multiscale_constant(lam, x).value;
    const auto mx = maximal_multiscale_constant(l, x);
    CHECK(mx.value >= star - 1e-4);
    // union bound across two halves
    const std::vector<double> a = {1.0, 4.0, 16.0}, b = {2.0, 8.0};
    const double ua = multiscale_constant(a, x).value, ub = multiscale_constant(b, x).value;
    CHECK(star <= std::sqrt(2.0) * std::max(ua, ub) + 1e-4);
  }

  TEST_CASE("scaling probe") {
    const auto p0 = lacunary_scaling_probe(2.0, 0, 4, {0.5, 0.25});
    for (const auto& r : p0.rows) CHECK(r.estimate == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(p0.slope) < 1e-9);
    const auto p2 = lacunary_scaling_probe(2.0, 1, 4, {1.0});
    CHECK(p2.rows[0].estimate == doctest::Approx(1.0).epsilon(1e-9));
  }
}
