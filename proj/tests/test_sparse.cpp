#include <doctest.h>

#include <cmath>
#include <random>

#include "zlab/sparse.hpp"

using namespace zlab;

namespace {

const SingularSet kZero({0.0}, {-kInf, kInf});

SampledSignal indicator01(std::size_t n = 4096) {
  return SampledSignal::from_function(n, -8.0, 8.0, [](double x) { return cplx(x >= 0.0 && x < 1.0 ? 1.0 : 0.0); });
}

SampledSignal spiky(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<std::pair<double, double>> spikes;
  for (int i = 0; i < 5; ++i) spikes.push_back({0.95 * ud(rng), 20.0 * ud(rng)});
  return SampledSignal::from_function(4096, -8.0, 8.0, [&](double x) {
    if (!(x >= 0.0 && x < 1.0)) return cplx(0.0);
    double v = 0.3 * nd(rng);
    for (auto [p, h] : spikes)
      if (x >= p && x < p + 0.02) v += h;
    return cplx(v);
  });
}

bool dominated(const std::vector<double>& lhs, const std::vector<double>& rhs, double c) {
  for (std::size_t j = 0; j < lhs.size(); ++j)
    if (lhs[j] > c * rhs[j] * (1.0 + 1e-9) + 1e-12) return false;
  return true;
}

}  // namespace

TEST_SUITE("sparse") {
  TEST_CASE("sparseness of simple families") {
    std::vector<DyadicInterval> gen;
    for (int k = 0; k < 8; ++k) gen.push_back({3, k, 0});
    CHECK(is_sparse(gen, 1.0).sparse);

    // nested tower: each interval keeps the half left by its child
    std::vector<DyadicInterval> tower;
    for (int n = 0; n <= 10; ++n) tower.push_back({n, 0, 0});
    const auto c = is_sparse(tower, 0.5);
    REQUIRE(c.sparse);
    CHECK(c.packing == doctest::Approx(2.0 - std::ldexp(1.0, -10)));
    CHECK(verify_witnesses({tower, c.witnesses, 0.5}));

    // the full tree of depth d packs d+1 and is exactly 1/(d+1)-sparse
    std::vector<DyadicInterval> full;
    for (int n = 0; n <= 3; ++n)
      for (int k = 0; k < (1 << n); ++k) full.push_back({n, k, 0});
    CHECK(is_sparse(full, 0.25).sparse);
    CHECK_FALSE(is_sparse(full, 0.3).sparse);
    CHECK(is_sparse(full, 0.25).packing == doctest::Approx(4.0));
  }

  TEST_CASE("witness verification rejects overlaps") {
    SparseCollection s{{{1, 0, 0}, {1, 1, 0}}, {{{0.0, 0.3}}, {{0.2, 0.5}}}, 0.5};
    CHECK_FALSE(verify_witnesses(s));
    s.witnesses[1] = {{0.5, 0.75}};
    CHECK(verify_witnesses(s));
    s.witnesses[1] = {{0.5, 0.7}};
    CHECK_FALSE(verify_witnesses(s));
  }

  TEST_CASE("sparse operator and form agree by Fubini") {
    const auto f = spiky(1);
    const auto one = SampledSignal::from_function(4096, -8.0, 8.0, [](double) { return cplx(1.0); });
    std::vector<DyadicInterval> s = {{0, 0, 0}, {1, 1, 0}, {3, 2, 0}, {2, 5, 0}};
    const auto op = sparse_operator_apply(s, f, YoungFunction::lp(1.0));
    double integral = 0.0;
    for (double v : op) integral += v * f.h();
    CHECK(sparse_form(s, f, one, YoungFunction::lp(1.0), YoungFunction::lp(1.0)) ==
          doctest::Approx(integral).epsilon(1e-12));
    // single interval: the operator is the average on it and zero elsewhere
    const auto single = sparse_operator_apply({{0, 0, 0}}, indicator01(), YoungFunction::lp(2.0));
    for (std::size_t j = 0; j < single.size(); ++j) {
      const double x = f.x(j);
      CHECK(single[j] == doctest::Approx(x >= 0.0 && x < 1.0 ? 1.0 : 0.0));
    }
  }

  TEST_CASE("stopping collections") {
    StoppingCollection sc{{0, 0, 0}, {{2, 1, 0}}};
    CHECK(sc.l_prime().size() == 3);
    CHECK(sc.l_second().size() == 3);
    CHECK(sc.disjoint());
    CHECK(sc.in_good({1, 1, 0}));
    CHECK_FALSE(sc.in_good({2, 0, 0}));
    StoppingCollection nested{{0, 0, 0}, {{1, 0, 0}, {2, 0, 0}}};
    CHECK_FALSE(nested.disjoint());
  }

  TEST_CASE("sharp re-cover") {
    const DyadicInterval i{4, 5, 0};
    const auto s = sharp_recover({i}, 2);
    for (int k = 0; k < 2; ++k) {
      const double half = 1.5 * std::ldexp(i.length(), k);
      bool covered = false;
      for (const auto& j : s)
        covered = covered || (j.left() <= i.center() - half + 1e-12 && j.right() >= i.center() + half - 1e-12 &&
                              j.length() <= 16.0 * std::ldexp(i.length(), k));
      CHECK(covered);
    }
  }

  TEST_CASE("rough sparse domination of the indicator") {
    const auto f = indicator01();
    const auto r = build_sparse_rough(f, kZero, YoungFunction::lp(1.0));
    CHECK(r.max_budget <= 1.0 / 16.0);
    CHECK(verify_witnesses(r.tailed));
    CHECK(is_sparse(r.tailed.intervals, r.tailed.eta).sparse);
    CHECK(std::isfinite(r.constant_tailed));
    CHECK(dominated(r.lhs, r.rhs_tailed, r.constant_tailed));
    CHECK(dominated(r.lhs, r.rhs_sharp, r.constant_sharp));
    for (const auto& row : r.audit) CHECK(row.budget <= 1.0 / 16.0);
  }

  TEST_CASE("rough sparse on rougher inputs") {
    for (std::uint64_t seed : {2u, 3u}) {
      const auto f = spiky(seed);
      RoughConfig cfg;
      cfg.theta = 1.0;
      const auto r = build_sparse_rough(f, kZero, YoungFunction::lp(1.0), cfg);
      CHECK(r.theta >= 1.0);
      CHECK(r.retries <= cfg.max_retries);
      CHECK(r.max_budget <= 1.0 / 16.0);
      CHECK(verify_witnesses(r.tailed));
      CHECK(dominated(r.lhs, r.rhs_tailed, r.constant_tailed));
    }
  }

  TEST_CASE("bilinear stopping construction") {
    const auto f = spiky(4);
    BilinearConfig bc;
    bc.theta = 4.0;
    const auto b = build_sparse_bilinear(f, f, kZero, YoungFunction::lp(1.0), YoungFunction::lp(1.0), TileCollection{}, bc);
    CHECK(b.nested);
    CHECK(b.form <= b.constant * b.sparse_value * (1.0 + 1e-12));
    CHECK(verify_witnesses(b.s));
    for (const auto& st : b.stopping) CHECK(st.disjoint());
  }

  TEST_CASE("carleson sequences to sparse forms") {
    const auto f = spiky(5);
    const auto a = tile_carleson_sequence(f, kZero, DyadicInterval{0, 0, 0});
    REQUIRE_FALSE(a.empty());
    for (const auto& [i, v] : a) {
      CHECK(DyadicInterval{0, 0, 0}.contains(i));
      CHECK(v >= 0.0);
    }
    const auto r = carleson_to_sparse(a, f, YoungFunction::lp(2.0));
    CHECK(std::isfinite(r.carleson_norm));
    CHECK(r.max_budget <= 1.0 / 3.0);
    CHECK(verify_witnesses(r.j));
    CHECK(dominated(r.lhs, r.rhs, r.constant));

    const auto wide = SampledSignal::from_function(4096, -8.0, 8.0, [](double x) { return cplx(std::abs(x) < 3.0 ? 1.0 : 0.0); });
    CHECK_THROWS_AS(tile_carleson_sequence(wide, kZero, DyadicInterval{0, 0, 0}), Error);
  }
}
