#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "coarsent/error.hpp"
#include "coarsent/orbit.hpp"
#include "oracles.hpp"

using namespace coarsent;

namespace {

Map doubling() { return Map::linear({{2.0}}); }

PseudoOrbit orbit1(std::vector<double> xs, double delta) {
  PseudoOrbit o;
  o.delta = delta;
  for (double x : xs) o.points.push_back(Point({x}));
  return o;
}

Matrix to_matrix(const oracle::IMat& a) {
  Matrix m;
  for (const auto& row : a) m.emplace_back(row.begin(), row.end());
  return m;
}

std::vector<oracle::IOrbit> as_int(const std::vector<PseudoOrbit>& fam) {
  std::vector<oracle::IOrbit> out;
  for (const auto& o : fam) {
    oracle::IOrbit io;
    for (const auto& p : o.points) io.emplace_back(p.coords.begin(), p.coords.end());
    out.push_back(std::move(io));
  }
  return out;
}

}  // namespace

TEST_CASE("validate") {
  CHECK(validate(doubling(), orbit1({1, 2, 4}, 0.1)).valid);
  const auto v = validate(doubling(), orbit1({1, 2, 10}, 2.0));
  CHECK_FALSE(v.valid);
  REQUIRE(v.first_violation);
  CHECK(*v.first_violation == 1);
  CHECK(validate(doubling(), orbit1({1, 3, 6}, 1.0)).valid);
}

TEST_CASE("orbit distance") {
  const auto s = Space::euclidean(1);
  CHECK(orbit_distance(s, orbit1({0, 1, 2}, 1), orbit1({0, 1, 2}, 1)) == 0.0);
  CHECK(orbit_distance(s, orbit1({0, 1, 2}, 1), orbit1({0, 3, 1}, 1)) == doctest::Approx(2.0));
  CHECK_THROWS_AS(orbit_distance(s, orbit1({0, 1}, 1), orbit1({0, 1, 2}, 1)), InvalidInput);
}

TEST_CASE("enumerate small cases") {
  CHECK(enumerate(Map::identity(Space::euclidean(1)), Point({0.0}), 1, 1.0, 1.0).size() == 3);
  const auto fam = enumerate(doubling(), Point({0.0}), 2, 2.0, 1.0);
  CHECK(fam.size() == 25);
  for (const auto& o : fam) CHECK(validate(doubling(), o).valid);
  CHECK(enumerate(doubling(), Point({0.3}), 1, 0.2, 1.0).empty());
  CHECK_THROWS_AS(enumerate(doubling(), Point({0.0}), 6, 2.0, 1.0, 100), BudgetExceeded);
  CHECK_THROWS_AS(enumerate(doubling(), Point({0.0}), 0, 2.0, 1.0), InvalidInput);
}

TEST_CASE("enumerate matches the brute-force oracle") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 12; ++t) {
    const std::size_t q = 1 + static_cast<std::size_t>(t % 2);
    const auto a = oracle::random_int_matrix(rng, q, -2, 2);
    const double delta = (t % 3 == 0) ? 1.5 : 1.0;
    const int n = q == 1 ? 4 : 3;
    const oracle::IVec x0(q, 1);
    auto want = oracle::pseudoorbits(a, x0, n, delta);
    auto got = as_int(enumerate(Map::linear(to_matrix(a)), Point(std::vector<double>(q, 1.0)), n, delta, 1.0));
    CHECK(got == want);  // same lattice order, not only the same multiset
  }
}

TEST_CASE("final-term closure") {
  const auto ft = final_terms_lower(doubling(), Point({0.0}), 3, 2.0, 1.0);
  CHECK(ft.n() == 3);
  std::set<double> xs;
  for (const auto& p : ft.points()) xs.insert(p.coords[0]);
  for (int v = -10; v <= 10; ++v) CHECK(xs.count(v) == 1);
  CHECK(xs.size() == 29);  // 2*[-6,6] +- 2 = [-14,14]

  const auto id = final_terms_lower(Map::identity(Space::euclidean(2)), Point({0.0, 0.0}), 2, 1.0, 1.0);
  CHECK(id.points().size() == 13);

  for (std::size_t i = 0; i < ft.points().size(); ++i) {
    const auto o = ft.reconstruct(3, i);
    CHECK(o.points.size() == 4);
    CHECK(o.points.back() == ft.points()[i]);
    CHECK(validate(doubling(), o).valid);
  }
}

TEST_CASE("final-term closure contains every enumerated final term") {
  const auto f = Map::linear({{1.0, 1.0}, {0.0, 2.0}});
  const auto ft = final_terms_lower(f, Point({0.0, 0.0}), 3, 1.0, 1.0);
  std::set<Point> last(ft.points().begin(), ft.points().end());
  for (const auto& o : enumerate(f, Point({0.0, 0.0}), 3, 1.0, 1.0)) CHECK(last.count(o.points.back()) == 1);
}

TEST_CASE("shadow hull") {
  for (int n = 1; n <= 5; ++n) {
    const auto h = shadow_hull(doubling(), Point({0.0}), n, 2.0);
    CHECK(h.semi_axes[0] == doctest::Approx(std::pow(2.0, n + 1)));
  }
  const auto d = shadow_hull(Map::linear({{2.0, 0.0}, {0.0, 3.0}}), Point({0.0, 0.0}), 3, 1.0);
  CHECK(d.semi_axes[0] == doctest::Approx(27.0));
  CHECK(d.semi_axes[1] == doctest::Approx(8.0));
  CHECK(shadow_hull(Map::linear({{10.0}}), Point({0.0}), 2, 9.0).semi_axes[0] == doctest::Approx(100.0));
}

TEST_CASE("shadow hull contains every final term") {
  const auto f = Map::linear({{2.0, 0.0}, {0.0, 3.0}});
  const auto h = shadow_hull(f, Point({0.0, 0.0}), 3, 1.0);
  for (const auto& o : enumerate(f, Point({0.0, 0.0}), 3, 1.0, 1.0)) {
    const auto& p = o.points.back().coords;
    double s = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      double proj = 0.0;
      for (std::size_t j = 0; j < 2; ++j) proj += (p[j] - h.center[j]) * h.axes[i][j];
      s += (proj / h.semi_axes[i]) * (proj / h.semi_axes[i]);
    }
    CHECK(s <= 1.0 + 1e-9);
  }
}

TEST_CASE("subsample") {
  const auto o = orbit1({1, 2, 4, 8, 16, 32, 64}, 1.0);
  const auto one = subsample(o, 1, ControlFunction::affine(2.0));
  CHECK(one.points == o.points);
  CHECK(one.delta == 1.0);
  const auto three = subsample(o, 3, ControlFunction::affine(2.0));
  CHECK(three.delta == doctest::Approx(7.0));
  REQUIRE(three.points.size() == 3);
  CHECK(three.points[1].coords[0] == 8.0);
  CHECK(subsample(orbit1({0, 0, 0, 0, 0}, 2.0), 4, ControlFunction::affine(1.0)).delta == doctest::Approx(8.0));
}

TEST_CASE("subsampled pseudoorbits are valid for the iterate") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto f = Map::linear({{1.5, 0.5}, {-0.25, 1.25}});
  const auto L = ControlFunction::affine(operator_norm(f.matrix()));
  for (int t = 0; t < 100; ++t) {
    const int k = 1 + t % 4;
    PseudoOrbit o;
    o.delta = 0.75;
    o.points.push_back(Point({u(rng), u(rng)}));
    for (int i = 0; i < 3 * k; ++i) {
      auto y = f.apply(o.points.back());
      const double a = u(rng) * M_PI, r = 0.75 * std::abs(u(rng));
      y.coords[0] += r * std::cos(a);
      y.coords[1] += r * std::sin(a);
      o.points.push_back(y);
    }
    REQUIRE(validate(f, o).valid);
    CHECK(validate(Map::iterate(f, k), subsample(o, k, L)).valid);
  }
}

TEST_CASE("json line round trip") {
  auto o = orbit1({0.5, -1.25, 3}, 1.5);
  CHECK(from_json_line(to_json_line(o)).points == o.points);
  CHECK(from_json_line(to_json_line(o)).delta == 1.5);
  CHECK_THROWS(from_json_line("{"));
}
