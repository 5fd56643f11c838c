#include <doctest.h>

#include <cmath>
#include <random>

#include "zlab/multipliers.hpp"
#include "zlab/weights.hpp"

using namespace zlab;

namespace {

const Operator kIdentity = [](const SampledSignal& f) { return f; };

}  // namespace

TEST_SUITE("weights") {
  TEST_CASE("constant weights have characteristic one") {
    const auto one = Weight::constant(64, 0.0, 1.0);
    for (auto k : {CharKind::Ap, CharKind::A1, CharKind::Ainf, CharKind::RH}) {
      CHECK(characteristic(one, k, 2.0).value == 1.0);
      CHECK(characteristic_bruteforce(one, k, 2.0).value == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(characteristic(Weight::constant(64, 0.0, 1.0, 7.5), CharKind::Ap, 3.0).value == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("step weight oracle") {
    // A_2 of a two-level weight: sup_t (t·lo + (1-t)·hi)(t/lo + (1-t)/hi) at t = 1/2
    const double lo = 1.0, hi = 4.0;
    const auto w = Weight::step(256, -1.0, 1.0, 0.0, lo, hi);
    const double exact = (lo + hi) * (lo + hi) / (4.0 * lo * hi);
    CHECK(characteristic_bruteforce(w, CharKind::Ap, 2.0).value == doctest::Approx(exact).epsilon(1e-12));
    const double grid = characteristic(w, CharKind::Ap, 2.0).value;
    CHECK(grid <= exact + 1e-12);
    CHECK(grid >= (lo / 3.0 + 2.0 * hi / 3.0) * (1.0 / (3.0 * lo) + 2.0 / (3.0 * hi)) - 1e-12);
    // A_1: avg / ess inf is largest on the interval of mostly-hi mass that touches lo
    CHECK(characteristic_bruteforce(w, CharKind::A1, 0.0).value <= hi / lo + 1e-12);
  }

  TEST_CASE("power weights: grid bounded by exhaustive scan") {
    const auto w = Weight::power(32, 0.0, 1.0, 0.3, -0.5);
    for (auto k : {CharKind::Ap, CharKind::A1, CharKind::Ainf, CharKind::RH}) {
      const double g = characteristic(w, k, 2.0).value;
      const double b = characteristic_bruteforce(w, k, 2.0).value;
      CHECK(g >= 1.0 - 1e-12);
      CHECK(g <= b + 1e-12);
    }
  }

  TEST_CASE("duality of A_p") {
    std::mt19937_64 rng(11);
    std::lognormal_distribution<double> ln(0.0, 0.8);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> v(64);
      for (double& x : v) x = ln(rng);
      const auto w = Weight::custom(v, 0.0, 1.0);
      for (double p : {1.5, 2.0, 3.0}) {
        const double a = characteristic(w, CharKind::Ap, p).value;
        const double b = characteristic(w.dual(p), CharKind::Ap, p / (p - 1.0)).value;
        CHECK(std::pow(a, 1.0 / (p - 1.0)) == doctest::Approx(b).epsilon(1e-9));
      }
    }
    CHECK_THROWS_AS(Weight::custom({1.0, -1.0}, 0.0, 1.0), Error);
  }

  TEST_CASE("weighted norms") {
    const auto w = Weight::constant(128, 0.0, 2.0, 3.0);
    const std::vector<double> g(128, 0.5);
    CHECK(weighted_lp_norm(g, w, 2.0) == doctest::Approx(0.5 * std::sqrt(6.0)));
    const double weak = weighted_weak_norm(g, w, 1.0);
    CHECK(weak <= 3.0 + 1e-12);
    CHECK(weak >= 3.0 * std::pow(10.0, -1.0 / 64.0) - 1e-12);
  }

  TEST_CASE("exponents and fitting") {
    CHECK(alpha_exponent(2.0, 0.0) == 1.0);
    CHECK(alpha_exponent(1.5, 1.0) == doctest::Approx(1.0 + 2.0));
    CHECK(beta_exponent(3.0, 2.0) == doctest::Approx(0.5 + 1.0));
    std::vector<ScanRow> rows(4);
    std::vector<double> x = {1.0, 2.0, 4.0, 8.0}, y;
    for (double v : x) y.push_back(5.0 * std::pow(v, 0.75));
    double slope = 0.0, icpt = 0.0;
    fit_loglog(rows, x, y, slope, icpt);
    CHECK(slope == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(std::exp(icpt) == doctest::Approx(5.0).epsilon(1e-12));
    for (const auto& r : rows) CHECK(std::abs(r.residual) < 1e-12);
  }

  TEST_CASE("empirical norms") {
    const auto corpus = weighted_corpus(1024, -1.0, 1.0, 7, 8);
    REQUIRE(corpus.size() == 8);
    CHECK(weighted_corpus(1024, -1.0, 1.0, 7, 8)[0].samples() == corpus[0].samples());
    const auto one = Weight::constant(1024, -1.0, 1.0);
    CHECK(empirical_weighted_norm(kIdentity, 2.0, one, corpus).value == doctest::Approx(1.0).epsilon(1e-14));
    const Symbol m = synth_hm_symbol(SingularSet({0.0}, {-kInf, kInf}), 2, 5, 1024, -1.0, 1.0);
    double sup = 0.0;
    for (const cplx& v : m.values) sup = std::max(sup, std::abs(v));
    const Operator tm = [&](const SampledSignal& f) { return apply_multiplier(m, f); };
    CHECK(empirical_weighted_norm(tm, 2.0, one, corpus).value <= sup + 1e-10);
    const Symbol half = make_symbol([](double x) { return cplx(x >= 0.0 ? 1.0 : 0.0); }, SingularSet({0.0}, {-kInf, kInf}),
                                    1024, -1.0, 1.0, SymbolClass::Mar);
    const Operator h = [&](const SampledSignal& f) { return apply_multiplier(half, f); };
    CHECK(empirical_weighted_norm(h, 2.0, one, corpus).value <= 1.0 + 1e-10);

    const auto scan = exponent_scan(kIdentity, 2.0, 0.0, {-0.5, 0.0, 0.5}, corpus);
    CHECK(std::abs(scan.slope) < 1e-9);
    const auto blow = blowup_scan(kIdentity, 0.0, {1.5, 1.25, 1.125}, corpus);
    CHECK(std::abs(blow.slope) < 1e-9);
    CHECK(blow.predicted == doctest::Approx(1.0));
  }

  TEST_CASE("modular check of the identity") {
    const auto f = SampledSignal::from_function(512, 0.0, 4.0, [](double x) { return cplx(std::exp(-x)); });
    const auto w = Weight::power(512, 0.0, 4.0, 1.0, 0.3);
    const auto r = modular_check(kIdentity, f, {0.05, 0.1, 0.5, 0.9}, YoungFunction::lp(1.0), w);
    CHECK(r.max_ratio <= 1.0 + 1e-12);
    REQUIRE(r.rows.size() == 4);
    for (const auto& row : r.rows) CHECK(row.ratio <= 1.0 + 1e-12);
  }

  TEST_CASE("lower bound witness") {
    WitnessInput in;
    in.coeffs = {{3, cplx(1.0)}};
    in.xi = SingularSet({3.2}, Interval{-100.0, 100.0});
    in.range = 256.0;
    const auto r = lower_bound_witness(in);
    CHECK(r.s == doctest::Approx(1.0));
    CHECK(r.lambda == doctest::Approx(0.5));
    CHECK(r.core_min_ratio >= 0.5);
    CHECK(r.pf_excess <= 1e-12);
    CHECK(r.c > 0.0);
    CHECK(r.witness_ratio > 0.0);
    CHECK_FALSE(r.series.x.empty());

    in.coeffs = {{3, cplx(1.0)}, {5, cplx(0.0, 2.0)}, {-7, cplx(0.5)}};
    in.xi = SingularSet({3.2, 5.5}, Interval{-100.0, 100.0});
    const auto r2 = lower_bound_witness(in);
    CHECK(r2.s == doctest::Approx(std::sqrt(5.0)));
    CHECK(r2.core_min_ratio >= 0.5);

    in.coeffs = {{10, cplx(1.0)}};
    CHECK_THROWS_AS(lower_bound_witness(in), Error);
    in.coeffs = {{3, cplx(1.0)}};
    in.mu = 3.0;
    CHECK_THROWS_AS(lower_bound_witness(in), Error);
  }
}
