#include "coarsent/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "coarsent/error.hpp"

namespace coarsent {

namespace {

struct Cell {
  std::size_t chart;
  std::array<long long, 3> k;
  bool operator==(const Cell&) const = default;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    std::size_t h = std::hash<std::size_t>()(c.chart);
    for (long long v : c.k) h = h * 1000003u ^ std::hash<long long>()(v);
    return h;
  }
};

}  // namespace

std::vector<std::size_t> greedy_separated(std::size_t count, const DistanceFn& dist, double R) {
  if (!(R > 0.0)) throw InvalidInput("greedy needs R > 0");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < count; ++i) {
    bool ok = true;
    for (std::size_t k : kept)
      if (dist(i, k) < R) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(i);
  }
  return kept;
}

std::vector<std::size_t> greedy_spanning(std::size_t count, const DistanceFn& dist, double R) {
  // "not within < R of a kept item" is the same first-fit rule.
  return greedy_separated(count, dist, R);
}

std::vector<std::size_t> greedy_separated(const Space& space, const std::vector<Point>& items, double R) {
  return greedy_separated_indexed(
      space, items.size(), [&](std::size_t i) { return point_key(items[i]); },
      [&](std::size_t i, std::size_t j) { return space.distance(items[i], items[j]); }, R);
}

std::vector<std::size_t> greedy_spanning(const Space& space, const std::vector<Point>& items, double R) {
  return greedy_separated(space, items, R);
}

HashKey point_key(const Point& p) {
  HashKey k;
  k.chart = p.chart;
  k.dims = std::min<std::size_t>(3, p.coords.size());
  for (std::size_t i = 0; i < k.dims; ++i) k.c[i] = p.coords[i];
  return k;
}

std::vector<std::size_t> greedy_separated_indexed(const Space& space, std::size_t count, const KeyFn& key,
                                                  const DistanceFn& dist, double R,
                                                  const std::vector<std::size_t>& order) {
  if (!(R > 0.0)) throw InvalidInput("greedy needs R > 0");
  if (!order.empty() && order.size() != count) throw InvalidInput("greedy order must list every item");
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> grid;
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_chart;
  std::vector<std::size_t> kept;

  auto cell_of = [&](const HashKey& h) {
    Cell c{h.chart, {0, 0, 0}};
    for (std::size_t d = 0; d < h.dims; ++d) c.k[d] = static_cast<long long>(std::floor(h.c[d] / R));
    return c;
  };

  for (std::size_t pos = 0; pos < count; ++pos) {
    const std::size_t i = order.empty() ? pos : order[pos];
    const HashKey h = key(i);
    const Cell home = cell_of(h);
    bool ok = true;

    // Same chart: only neighbouring cells can hold items closer than R.
    std::array<long long, 3> off{};
    const std::size_t dims = h.dims;
    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) total *= 3;
    for (std::size_t code = 0; code < total && ok; ++code) {
      std::size_t rest = code;
      for (std::size_t d = 0; d < 3; ++d) {
        if (d < dims) {
          off[d] = static_cast<long long>(rest % 3) - 1;
          rest /= 3;
        } else {
          off[d] = 0;
        }
      }
      Cell c = home;
      for (std::size_t d = 0; d < 3; ++d) c.k[d] += off[d];
      auto it = grid.find(c);
      if (it == grid.end()) continue;
      for (std::size_t k : it->second)
        if (dist(i, k) < R) {
          ok = false;
          break;
        }
    }

    // Other charts closer than R.
    for (auto it = by_chart.begin(); ok && it != by_chart.end(); ++it) {
      if (it->first == h.chart || space.chart_gap(it->first, h.chart) >= R) continue;
      for (std::size_t k : it->second)
        if (dist(i, k) < R) {
          ok = false;
          break;
        }
    }

    if (ok) {
      kept.push_back(i);
      grid[home].push_back(i);
      by_chart[h.chart].push_back(i);
    }
  }
  return kept;
}

}  // namespace coarsent
