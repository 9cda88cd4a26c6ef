#include "doctest.h"

#include <cmath>
#include <random>

#include "coarsent/control.hpp"
#include "coarsent/error.hpp"
#include "coarsent/map.hpp"
#include "oracles.hpp"

using namespace coarsent;

namespace {
Map doubling() { return Map::linear({{2.0}}); }
}  // namespace

TEST_CASE("basic images") {
  CHECK(doubling().apply(Point({3.0})).coords[0] == doctest::Approx(6.0));
  CHECK(doubling().iterate_apply(3, Point({1.0})).coords[0] == doctest::Approx(8.0));
  const auto id = Map::identity(Space::euclidean(2));
  CHECK(id.iterate_apply(5, Point({1.5, -2.0})) == Point({1.5, -2.0}));
  const auto h = Map::homothety(Space::euclidean(2), 3.0);
  CHECK(h.apply(Point({1.0, -1.0})) == Point({3.0, -3.0}));
}

TEST_CASE("chain_linear maps anchors to anchors") {
  const auto chain = Space::chain(ChainRule::Rectangles, 10);
  const auto f = Map::chain_linear(chain);
  for (std::size_t n = 0; n + 1 < 10; ++n) {
    const auto img = f.apply(Point(n, {0.0, 0.0}));
    CHECK(img.chart == n + 1);
    CHECK(img.coords[0] == doctest::Approx(0.0));
    CHECK(img.coords[1] == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(f.apply(Point(9, {0.0, 0.0})), InvalidInput);
}

TEST_CASE("iterate map matches repeated application") {
  std::mt19937_64 rng(3);
  const auto f = Map::linear({{1.0, 2.0}, {-1.0, 0.5}});
  for (int k = 1; k <= 4; ++k) {
    const auto fk = Map::iterate(f, k);
    for (int t = 0; t < 10; ++t) {
      const auto x = Space::euclidean(2).sample(rng, Point({0.0, 0.0}), 3.0);
      Point y = x;
      for (int i = 0; i < k; ++i) y = f.apply(y);
      const auto z = fk.apply(x);
      CHECK(z.coords[0] == doctest::Approx(y.coords[0]));
      CHECK(z.coords[1] == doctest::Approx(y.coords[1]));
    }
  }
}

TEST_CASE("conjugated doubling is phi f phi^-1") {
  const auto g = Map::conjugated_doubling();
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto x = Space::halfplane().sample(rng, Point({0.0, 0.0}), 3.0);
    const auto back = squeeze(squeeze_inverse(x));
    CHECK(back.coords[0] == doctest::Approx(x.coords[0]));
    CHECK(back.coords[1] == doctest::Approx(x.coords[1]));
    auto pre = squeeze_inverse(x);
    pre.coords[0] *= 2.0;
    const auto expected = squeeze(pre);
    const auto got = g.apply(x);
    CHECK(got.coords[0] == doctest::Approx(expected.coords[0]));
    CHECK(got.coords[1] == doctest::Approx(expected.coords[1]));
  }
}

TEST_CASE("operator norm agrees with power iteration") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 30; ++t) {
    const std::size_t q = 1 + static_cast<std::size_t>(t % 3);
    Matrix a(q, std::vector<double>(q));
    for (auto& row : a)
      for (auto& v : row) v = u(rng);
    CHECK(operator_norm(a) == doctest::Approx(oracle::operator_norm(a)).epsilon(1e-6));
  }
  CHECK(operator_norm({{2.0, 0.0}, {0.0, 3.0}}) == doctest::Approx(3.0));
}

TEST_CASE("spectral constants") {
  const auto d = Map::linear({{2.0, 0.0}, {0.0, 3.0}});
  REQUIRE(d.expansion_constant());
  CHECK(*d.expansion_constant() == doctest::Approx(2.0));
  CHECK(*d.big_lambda() == doctest::Approx(6.0));
  CHECK(*d.lipschitz_constant() == doctest::Approx(3.0));
  const auto c = Map::linear({{0.5, 0.0}, {0.0, 0.5}});
  CHECK(*c.big_lambda() == doctest::Approx(1.0));
  const auto full = Map::linear({{1.0, 2.0}, {3.0, 4.0}});
  CHECK_FALSE(full.triangular_eigenvalues());
  CHECK_FALSE(full.big_lambda());
  CHECK(*full.with_declared(std::nullopt, std::nullopt, 5.0).big_lambda() == doctest::Approx(5.0));
}

TEST_CASE("verify_control") {
  ControlWitness two;
  two.L = ControlFunction::affine(2.0);
  const auto r1 = verify_control(doubling(), two, 50.0, 500, 1);
  CHECK(r1.violations == 0);
  CHECK(r1.max_ratio <= 1.0 + 1e-9);

  const auto sq = Map::power(Space::half_line(2.0), 2.0);
  const auto r2 = verify_control(sq, two, 100.0, 500, 1);
  CHECK(r2.violations >= 1);
  CHECK_FALSE(r2.witnesses.empty());

  ControlWitness one;
  one.L = ControlFunction::affine(1.0);
  CHECK(verify_control(Map::identity(Space::euclidean(2)), one, 20.0, 300, 2).violations == 0);
}

TEST_CASE("control functions") {
  const auto a = ControlFunction::affine(2.0, 1.0);
  const auto c = ControlFunction::compose(a, a);
  for (double t : {0.0, 0.5, 3.0, 10.0}) CHECK(c(t) == doctest::Approx(4.0 * t + 3.0));
  CHECK(a.inverse(a(2.5)) == doctest::Approx(2.5));
  CHECK(a.iterate(1.0, 2) == doctest::Approx(7.0));
  const auto tbl = ControlFunction::table({{0.0, 1.0}, {1.0, 3.0}, {2.0, 4.0}}, 2.0);
  CHECK(tbl(0.5) == doctest::Approx(2.0));
  CHECK(tbl(3.0) == doctest::Approx(6.0));
  CHECK(tbl.inverse(3.5) == doctest::Approx(1.5));
  const auto p = ControlFunction::power_affine(1.0, 0.0, 2.0);
  CHECK(p(3.0) == doctest::Approx(9.0));
  const auto m = ControlFunction::max(ControlFunction::affine(1.0, 2.0), ControlFunction::affine(3.0));
  CHECK(m(0.5) == doctest::Approx(2.5));
  CHECK(m(2.0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(ControlFunction::affine(-1.0), InvalidInput);
  CHECK_THROWS_AS(ControlFunction::table({{0.0, 1.0}, {1.0, 0.5}}, 1.0), InvalidInput);
}

TEST_CASE("eta") {
  CHECK(eta(ControlFunction::affine(2.0), 1.0, 1) == doctest::Approx(1.0));
  CHECK(eta(ControlFunction::affine(2.0), 1.0, 3) == doctest::Approx(7.0));
  CHECK(eta(ControlFunction::affine(1.0), 2.0, 4) == doctest::Approx(8.0));
}

TEST_CASE("polynomial maps on half-lines") {
  const auto x = Space::half_line(2.0);
  const auto g = Map::polynomial(x, x, {0.0, 0.0, 1.0}, {1.0});
  CHECK(g.apply(Point({2.0})).coords[0] == doctest::Approx(4.5));
  const auto g2 = Map::iterate(g, 2);
  CHECK(g2.apply(Point({2.0})).coords[0] == doctest::Approx(4.5 * 4.5 + 1.0 / 4.5));
  CHECK_THROWS_AS(g.apply(Point({1.0})), InvalidInput);
}
