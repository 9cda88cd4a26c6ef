#pragma once

#include <compare>
#include <cstddef>
#include <ostream>
#include <vector>

namespace coarsent {

/// A point of a SpaceDescriptor: a chart index plus chart-local coordinates.
struct Point {
  std::size_t chart = 0;
  std::vector<double> coords;

  Point() = default;
  Point(std::size_t chart_id, std::vector<double> c) : chart(chart_id), coords(std::move(c)) {}
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}

  friend bool operator==(const Point&, const Point&) = default;
  /// Deterministic enumeration order: chart ascending, then lexicographic coords.
  friend std::partial_ordering operator<=>(const Point& a, const Point& b) {
    if (auto c = a.chart <=> b.chart; c != 0) return c;
    return std::lexicographical_compare_three_way(a.coords.begin(), a.coords.end(),
                                                  b.coords.begin(), b.coords.end());
  }
};

inline std::ostream& operator<<(std::ostream& os, const Point& p) {
  os << '[' << p.chart;
  for (double c : p.coords) os << ',' << c;
  return os << ']';
}

}  // namespace coarsent
