#include <doctest.h>

#include <cmath>
#include <random>

#include "zlab/timefreq.hpp"

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

cplx inner(const SampledSignal& f, const SampledSignal& g) {
  cplx acc(0.0);
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * std::conj(g[j]);
  return acc * f.h();
}

}  // namespace

TEST_SUITE("timefreq") {
  TEST_CASE("gabor window partition and support") {
    const GaborWindow w;
    const auto grid = SampledSignal::zeros(4096, -8.0, 8.0);
    CHECK(w.partition_error(grid) < 1e-8);
    for (double xi : {-0.5, -1e-9, 1.0 + 1e-9, 3.0}) CHECK(w.hat(xi) == 0.0);
    for (double xi = 0.01; xi < 0.5; xi += 0.037) CHECK(w.hat(xi) == doctest::Approx(w.hat(1.0 - xi)).epsilon(1e-12));
  }

  TEST_CASE("gabor round trip and energy") {
    const auto f = noise(2048, -4.0, 4.0, 1);
    for (int m = -1; m <= 3; ++m) {
      const auto c = gabor_analyze(f, m);
      const auto g = gabor_synthesize(c);
      double err = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) err += std::norm(g[j] - f[j]);
      CHECK(std::sqrt(err * f.h()) < 1e-6 * f.norm2());
      CHECK(gabor_energy(c) == doctest::Approx(f.norm2() * f.norm2()).epsilon(1e-4));
    }
    const auto zero = SampledSignal::zeros(2048, -4.0, 4.0);
    for (const auto& row : gabor_analyze(zero, 1).coeffs)
      for (const cplx& v : row) CHECK(v == cplx(0.0));
    CHECK_THROWS_AS(gabor_analyze(f, 12), Error);
  }

  TEST_CASE("tiles for a point") {
    const auto grid = SampledSignal::zeros(2048, -8.0, 8.0);
    const auto q = tiles_for_set(SingularSet({0.0}, {-kInf, kInf}), grid);
    REQUIRE(!q.empty());
    CHECK(almost_orthogonal(q));
    for (const Tile& t : q.tiles) CHECK(t.time.length() * t.freq.length() == 1.0);
    // exhaustive pair scan
    for (std::size_t i = 0; i < q.size(); i += 7)
      for (std::size_t j = 0; j < q.size(); j += 5) {
        const auto& a = q.tiles[i].freq;
        const auto& b = q.tiles[j].freq;
        const bool overlap = a.left() < b.right() && b.left() < a.right();
        if (overlap) CHECK(a == b);
      }
    const auto empty = tiles_for_set(SingularSet({0.0}, {-kInf, kInf}), grid, std::pair<int, int>{3, 1});
    CHECK(empty.empty());
  }

  TEST_CASE("tiles for two points lie in one component") {
    const auto grid = SampledSignal::zeros(2048, -8.0, 8.0);
    const SingularSet xi({0.0, 1.0}, {-kInf, kInf});
    const auto q = tiles_for_set(xi, grid);
    const auto cover = complement_cover(xi);
    for (std::size_t i = 0; i < q.size(); ++i) {
      int hits = 0;
      for (const auto& c : cover.intervals)
        if (c.a <= q.tiles[i].freq.left() && q.tiles[i].freq.right() <= c.b) ++hits;
      CHECK(hits == 1);
      CHECK(cover.intervals[static_cast<std::size_t>(q.component[i])].a <= q.tiles[i].freq.left());
    }
  }

  TEST_CASE("model operator") {
    const auto f = noise(2048, -8.0, 8.0, 4);
    const TileEngine eng(f);
    const auto zero = eng.apply(TileCollection{}, f);
    CHECK(zero.norm2() == 0.0);
    const auto q = tiles_for_set(SingularSet({0.0}, {-kInf, kInf}), f);
    TileCollection one;
    one.tiles.push_back(q.tiles[q.size() / 2]);
    one.component.push_back(q.component[q.size() / 2]);
    one.component_count = q.component_count;
    const Tile& p = one.tiles[0];
    const auto phi = eng.packet(p, true), psi = eng.packet(p, false);
    const auto out = eng.apply(one, phi);
    const cplx c = p.time.length() * zlab::inner(phi, phi);
    double err = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) err = std::max(err, std::abs(out[j] - c * psi[j]));
    CHECK(err < 1e-10 * std::abs(c) * std::max(1.0, psi.abs()[f.size() / 2]));
    // linearity
    const auto g = noise(2048, -8.0, 8.0, 5);
    SampledSignal sum = f;
    for (std::size_t j = 0; j < f.size(); ++j) sum[j] += 2.0 * g[j];
    const auto tf = eng.apply(q, f), tg = eng.apply(q, g), ts = eng.apply(q, sum);
    SampledSignal lin = tf;
    for (std::size_t j = 0; j < f.size(); ++j) lin[j] += 2.0 * tg[j];
    CHECK(max_diff(ts, lin) < 1e-9 * (1.0 + ts.norm2()));
    // the symbol of the full family
    const auto mu = tile_family_symbol(q, f);
    auto spec = f.spectrum();
    for (std::size_t s = 0; s < spec.size(); ++s) spec[s] *= mu[s];
    CHECK(max_diff(tf, SampledSignal::from_spectrum(spec, f.a(), f.b())) < 1e-9 * (1.0 + tf.norm2()));
  }

  TEST_CASE("packet normalization") {
    const auto grid = SampledSignal::zeros(2048, -8.0, 8.0);
    const TileEngine eng(grid);
    const auto q = tiles_for_set(SingularSet({0.0}, {-kInf, kInf}), grid);
    const Tile& p = q.tiles[q.size() / 3];
    const auto prof = eng.wavsupp_profile(p);
    REQUIRE(prof.size() == 5);
    CHECK(prof[0] == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("projection matches tile coefficients") {
    const SingularSet xi({0.0}, {-kInf, kInf});
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    const DyadicInterval l{-1, 0, 0};
    const auto f = SampledSignal::from_function(2048, -8.0, 8.0, [&](double x) {
      return x >= 0.0 && x < 2.0 ? cplx(nd(rng), nd(rng)) : cplx(0.0);
    });
    const auto p = project(f, l, xi);
    CHECK(projection_defect(f, p.g, l, xi) < 1e-6 * f.norm2());
    const auto zero = SampledSignal::zeros(2048, -8.0, 8.0);
    CHECK(project(zero, l, xi).g.norm2() == 0.0);
    CHECK_THROWS_AS(project(f, DyadicInterval{0, 0, 0}, xi), Error);
  }
}
