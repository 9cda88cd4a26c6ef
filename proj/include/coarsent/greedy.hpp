#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "coarsent/point.hpp"
#include "coarsent/space.hpp"

namespace coarsent {

using DistanceFn = std::function<double(std::size_t, std::size_t)>;

/// First-fit packing: scan items 0..count-1, keep an item iff it is at
/// distance >= R from every kept item. Returns kept indices in scan order.
std::vector<std::size_t> greedy_separated(std::size_t count, const DistanceFn& dist, double R);

/// First-fit cover: keep an item iff no kept item is within distance < R.
/// The kept set R-spans the input.
std::vector<std::size_t> greedy_spanning(std::size_t count, const DistanceFn& dist, double R);

/// Convenience overloads on explicit point lists.
std::vector<std::size_t> greedy_separated(const Space& space, const std::vector<Point>& items, double R);
std::vector<std::size_t> greedy_spanning(const Space& space, const std::vector<Point>& items, double R);

/// Hash key of an item: chart plus up to three coordinates. Keys must satisfy
/// dist(i, j) >= max_k |key_i[k] - key_j[k]| whenever the charts agree, and
/// dist(i, j) >= space.chart_gap(chart_i, chart_j) otherwise.
struct HashKey {
  std::size_t chart = 0;
  std::array<double, 3> c{};
  std::size_t dims = 0;
};
using KeyFn = std::function<HashKey(std::size_t)>;

HashKey point_key(const Point& p);

/// Same output as greedy_separated (first-fit in `order`, or 0..count-1 when
/// `order` is empty), accelerated by a uniform grid of cell size R on the keys.
std::vector<std::size_t> greedy_separated_indexed(const Space& space, std::size_t count, const KeyFn& key,
                                                  const DistanceFn& dist, double R,
                                                  const std::vector<std::size_t>& order = {});

}  // namespace coarsent
