#include "doctest.h"

#include <cmath>
#include <random>

#include "coarsent/greedy.hpp"
#include "coarsent/orbit.hpp"
#include "oracles.hpp"

using namespace coarsent;

namespace {

std::vector<Point> line(std::vector<double> xs) {
  std::vector<Point> out;
  for (double x : xs) out.emplace_back(std::vector<double>{x});
  return out;
}

}  // namespace

TEST_CASE("hand traces") {
  const auto s = Space::euclidean(1);
  const auto pts = line({0, 3, 6, 9});
  CHECK(greedy_separated(s, pts, 4.0) == std::vector<std::size_t>{0, 2});
  CHECK(greedy_spanning(s, pts, 4.0) == std::vector<std::size_t>{0, 2});
  CHECK(greedy_separated(s, line({5}), 0.1).size() == 1);
  CHECK(greedy_spanning(s, pts, 100.0).size() == 1);

  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(i);
  const auto hundred = line(xs);
  const auto sep = greedy_separated(s, hundred, 10.0);
  REQUIRE(sep.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(sep[i] == 10 * i);
  const auto span = greedy_spanning(s, hundred, 10.0);
  CHECK(span.size() <= 10);
  CHECK(oracle::spans(hundred.size(), span,
                      [&](std::size_t i, std::size_t j) { return s.distance(hundred[i], hundred[j]); }, 10.0));
}

TEST_CASE("maximality and sandwich on random point clouds") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_real_distribution<double> ur(0.5, 8.0);
  const auto s = Space::euclidean(2);
  for (int t = 0; t < 40; ++t) {
    std::vector<Point> pts(static_cast<std::size_t>(50 + t * 5));
    for (auto& p : pts) p = Point({u(rng), u(rng)});
    const double R = ur(rng);
    auto d = [&](std::size_t i, std::size_t j) { return s.distance(pts[i], pts[j]); };
    const auto sep = greedy_separated(s, pts, R);
    const auto span = greedy_spanning(s, pts, R);
    CHECK(oracle::is_separated(sep, d, R));
    CHECK(oracle::spans(pts.size(), sep, d, R));  // maximal: every rejected point is < R from a kept one
    CHECK(oracle::spans(pts.size(), span, d, R));
    CHECK(sep.size() == oracle::first_fit(pts.size(), d, R));
    CHECK(greedy_separated(s, pts, 2 * R).size() <= span.size());
    CHECK(span.size() <= sep.size());
  }
}

TEST_CASE("indexed greedy equals the plain scan") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  const auto s = Space::euclidean(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<Point> pts(300);
    for (auto& p : pts) p = Point({u(rng), u(rng), u(rng)});
    const double R = 2.0 + t;
    auto d = [&](std::size_t i, std::size_t j) { return s.distance(pts[i], pts[j]); };
    auto key = [&](std::size_t i) { return point_key(pts[i]); };
    CHECK(greedy_separated_indexed(s, pts.size(), key, d, R) == greedy_separated(pts.size(), d, R));
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
    const auto rev = greedy_separated_indexed(s, pts.size(), key, d, R, order);
    CHECK(oracle::is_separated(rev, d, R));
    CHECK(oracle::spans(pts.size(), rev, d, R));
    CHECK(rev.front() == pts.size() - 1);
  }
}

TEST_CASE("greedy on chain blocks uses chart gaps") {
  const auto chain = Space::chain(ChainRule::Rectangles, 8);
  std::vector<Point> pts;
  for (std::size_t b = 0; b < 8; ++b) pts.emplace_back(b, std::vector<double>{0.0, 0.0});
  auto d = [&](std::size_t i, std::size_t j) { return chain.distance(pts[i], pts[j]); };
  auto key = [&](std::size_t i) { return point_key(pts[i]); };
  for (double R : {1.0, 3.0, 7.0, 20.0})
    CHECK(greedy_separated_indexed(chain, pts.size(), key, d, R) == greedy_separated(pts.size(), d, R));
}
