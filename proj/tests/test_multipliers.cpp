#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "zlab/multipliers.hpp"

using namespace zlab;

namespace {

SampledSignal noise(std::size_t n, double a, double b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(nd(rng), nd(rng));
  return SampledSignal(std::move(v), a, b);
}

double max_diff(const SampledSignal& f, const SampledSignal& g) {
  double e = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) e = std::max(e, std::abs(f[j] - g[j]));
  return e;
}

const SingularSet kZero({0.0}, {-kInf, kInf});

}  // namespace

TEST_SUITE("multipliers") {
  TEST_CASE("identity and half-line symbols") {
    const auto f = noise(1024, -4.0, 4.0, 1);
    const Symbol one = make_symbol([](double) { return cplx(1.0); }, kZero, 1024, -4.0, 4.0);
    CHECK(max_diff(apply_multiplier(one, f), f) < 1e-12 * f.norm2());
    const Symbol half = make_symbol([](double x) { return cplx(x >= 0.0 ? 1.0 : 0.0); }, kZero, 1024, -4.0, 4.0,
                                    SymbolClass::Mar);
    for (int k : {-5, -1, 0, 3}) {
      const auto e = SampledSignal::from_function(1024, -4.0, 4.0, [k](double x) { return std::polar(1.0, 2.0 * kPi * k * x); });
      const auto out = apply_multiplier(half, e);
      if (k >= 0) CHECK(max_diff(out, e) < 1e-12);
      else CHECK(out.norm2() < 1e-12);
    }
    CHECK(mar_norm(half) == doctest::Approx(1.0));
    CHECK(hm_norm(one, 2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hm_norm(half, 2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(apply_multiplier(std::vector<cplx>(512, 1.0), f), Error);
  }

  TEST_CASE("composition and plancherel") {
    const auto f = noise(2048, -8.0, 8.0, 2);
    const Symbol m1 = synth_hm_symbol(kZero, 2, 1, 2048, -8.0, 8.0);
    const Symbol m2 = synth_hm_symbol(SingularSet({-1.0, 2.0}, {-kInf, kInf}), 2, 2, 2048, -8.0, 8.0);
    std::vector<cplx> prod(m1.size());
    double sup = 0.0;
    for (std::size_t q = 0; q < prod.size(); ++q) {
      prod[q] = m1.values[q] * m2.values[q];
      sup = std::max(sup, std::abs(m1.values[q]));
    }
    const auto lhs = apply_multiplier(m1, apply_multiplier(m2, f));
    CHECK(max_diff(lhs, apply_multiplier(prod, f)) < 1e-10 * f.norm2());
    CHECK(apply_multiplier(m1, f).norm2() <= sup * f.norm2() * (1.0 + 1e-12));
  }

  TEST_CASE("HM synthesis") {
    const Symbol a = synth_hm_symbol(kZero, 2, 7, 1024, -8.0, 8.0);
    const Symbol b = synth_hm_symbol(kZero, 2, 7, 1024, -8.0, 8.0);
    CHECK(a.values == b.values);
    CHECK(hm_norm(a, 2) <= 1.0 + 1e-2);
    // bump over three octaves of |ξ|: dist-weighted derivatives stay bounded
    const Symbol lb = make_symbol([](double x) {
      const double t = (std::log2(std::abs(x)) - 1.0) / 3.0;
      return cplx(std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0);
    }, kZero, 1024, -8.0, 8.0);
    const HmReport r = hm_norm_report(lb, 2);
    CHECK(std::isfinite(r.value));
    CHECK(r.value >= 1.0);
    CHECK(r.value < 20.0);
  }

  TEST_CASE("variation of a triangle wave") {
    // k triangular teeth of height A on (1, 1 + k), away from the singular point;
    // the frequency step 1/16 hits every peak and trough
    const int k = 4;
    const double amp = 0.75;
    const Symbol m = make_symbol([&](double x) {
      if (!(x > 1.0 && x < 1.0 + k)) return cplx(0.0);
      const double fr = x - std::floor(x);
      return cplx(amp * (1.0 - std::abs(2.0 * fr - 1.0)));
    }, kZero, 4096, -8.0, 8.0, SymbolClass::Mar);
    CHECK(mar_norm(m) == doctest::Approx(amp + 2.0 * k * amp).epsilon(1e-12));
  }

  TEST_CASE("step symbols") {
    StepSymbol s;
    s.components.push_back({{0.0, 8.0}, {{0.0, 1.0}, {1.0, 2.0}, {2.0, 4.0}}, {0.25, 0.5, 1.0}});
    validate_steps(s);
    // sup 1; variation 1/4 + 1/2 up, then 1 down into the uncovered part of ω
    CHECK(mar_norm(s) == doctest::Approx(1.0 + 0.75 + 1.0));
    StepSymbol bad;
    bad.components.push_back({{0.0, 1.0}, {{0.0, 0.6}, {0.5, 1.0}}, {1.0, 1.0}});
    CHECK_THROWS_AS(validate_steps(bad), Error);
    CHECK(s(0.5) == 0.25);
    CHECK(s(3.0) == 1.0);
    CHECK(s(5.0) == 0.0);
  }

  TEST_CASE("square functions") {
    const SingularSet xi({0.0, 1.5}, {-kInf, kInf});
    const auto tone = SampledSignal::from_function(1024, -8.0, 8.0, [](double x) { return 2.0 * std::polar(1.0, 2.0 * kPi * 0.5 * x); });
    const auto h = rough_square_function(xi, std::vector<cplx>(1024, 1.0), tone);
    for (std::size_t j = 0; j < h.size(); ++j) CHECK(h[j].real() == doctest::Approx(2.0).epsilon(1e-12));
    const auto f = noise(1024, -8.0, 8.0, 3);
    const auto hf = rough_square_function(xi, std::vector<cplx>(1024, 1.0), f);
    // ‖𝟙_{O_Ξ} f̂‖ with the frequencies 0 and 1.5 removed
    auto spec = f.spectrum();
    for (std::size_t q = 0; q < spec.size(); ++q)
      if (f.xi(q) == 0.0 || f.xi(q) == 1.5) spec[q] = 0.0;
    const double off = SampledSignal::from_spectrum(spec, f.a(), f.b()).norm2();
    CHECK(std::abs(hf.norm2() - off) < 1e-10 * off);
    const auto g1 = smooth_square_function(xi, f, 1);
    const auto g8 = smooth_square_function(xi, f, 8);
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(g1[j].real() <= g8[j].real() + 1e-12);
  }

  TEST_CASE("lorentz sequence norms") {
    for (double p : {1.0, 2.0}) CHECK(lorentz_seq_norm(std::vector<double>(8, 1.0), p, 1.0) == doctest::Approx(std::pow(8.0, 1.0 / p)));
    CHECK(lorentz_seq_norm({1.0}, 1.5, 1.0) == 1.0);
    CHECK(lorentz_seq_norm({1.0, 0.5, 0.25, 0.125}, 1.0, 1.0) == doctest::Approx(15.0 / 8.0));
  }

  TEST_CASE("atom decomposition reconstructs exactly") {
    StepSymbol four;
    four.components.push_back({{0.0, 8.0}, {{0.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}, {3.0, 4.0}}, {1.0, 1.0, 1.0, 1.0}});
    const auto d = atom_decompose(four, 1.0);
    std::set<int> js;
    for (const auto& a : d.atoms) {
      CHECK(check_jatom(a.atom));
      js.insert(*a.atom.j);
    }
    for (int j : js) CHECK((j == 1 || j == 2 || j == 4));
    for (double x = 0.05; x < 8.0; x += 0.1) CHECK(evaluate_decomposition(d, x) == four(x));

    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> ex(-6, 3), cnt(1, 6), sign(0, 1);
    for (int t = 0; t < 100; ++t) {
      StepSymbol s;
      for (int w = 0; w < 3; ++w) {
        StepComponent c{{w * 10.0, w * 10.0 + 10.0}, {}, {}};
        const int m = cnt(rng);
        for (int j = 0; j < m; ++j) {
          c.pieces.push_back({w * 10.0 + j, w * 10.0 + j + 0.5});
          c.heights.push_back((sign(rng) ? 1.0 : -1.0) * std::ldexp(1.0, ex(rng)));
        }
        s.components.push_back(std::move(c));
      }
      const auto dd = atom_decompose(s, 1.0);
      for (const auto& a : dd.atoms) CHECK(check_jatom(a.atom));
      for (double x = 0.25; x < 30.0; x += 0.5) CHECK(evaluate_decomposition(dd, x) == s(x));
      CHECK(dd.comparability > 0.0);
    }
  }

  TEST_CASE("lifting singular sets") {
    const SingularSet xi({0.0, 1.0}, {-4.0, 4.0});
    RAtom whole;
    whole.steps.components = {{{-4.0, 0.0}, {{-4.0, 0.0}}, {1.0}}, {{0.0, 1.0}, {{0.0, 1.0}}, {1.0}}, {{1.0, 4.0}, {{1.0, 4.0}}, {1.0}}};
    whole.j = 1;
    const auto l = lift_singular_set(whole, xi);
    REQUIRE(l.size() == 1);
    const std::set<double> pts(l[0].points().begin(), l[0].points().end());
    CHECK(pts.count(0.0) == 1);
    CHECK(pts.count(1.0) == 1);
    RAtom two;
    two.p = 1.0;
    two.j = 2;
    two.steps.components = {{{0.0, 1.0}, {{0.1, 0.3}, {0.5, 0.9}}, {0.5, 0.5}}};
    const auto l2 = lift_singular_set(two, xi);
    std::size_t total = 0;
    for (const auto& s : l2) total += s.size();
    CHECK(total <= 4);
    two.p = 2.0;
    const auto u = lift_singular_set(two, xi);
    REQUIRE(u.size() == 1);
    CHECK(u[0].size() <= total);
  }
}
