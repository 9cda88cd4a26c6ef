#pragma once

// Brute-force reference implementations used to cross-check the library.
// They share nothing with src/ beyond plain std types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using IVec = std::vector<long long>;
using IMat = std::vector<std::vector<long long>>;
using IOrbit = std::vector<IVec>;

inline IVec mat_vec(const IMat& a, const IVec& x) {
  IVec y(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline long long norm2(const IVec& a, const IVec& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Integer points z with |z - c|^2 <= delta^2, scanned over the bounding box.
inline std::vector<IVec> ball(const IVec& c, double delta) {
  const long long r = static_cast<long long>(std::floor(delta)) + 1;
  std::vector<IVec> out;
  IVec z(c.size());
  std::function<void(std::size_t)> rec = [&](std::size_t d) {
    if (d == c.size()) {
      if (static_cast<double>(norm2(z, c)) <= delta * delta) out.push_back(z);
      return;
    }
    for (long long v = c[d] - r; v <= c[d] + r; ++v) {
      z[d] = v;
      rec(d + 1);
    }
  };
  rec(0);
  return out;
}

// Every integer delta-pseudoorbit of x -> A x of length n starting at x0.
inline std::vector<IOrbit> pseudoorbits(const IMat& a, const IVec& x0, int n, double delta) {
  std::vector<IOrbit> out;
  IOrbit cur{x0};
  std::function<void()> rec = [&]() {
    if (static_cast<int>(cur.size()) == n + 1) {
      out.push_back(cur);
      return;
    }
    for (const auto& z : ball(mat_vec(a, cur.back()), delta)) {
      cur.push_back(z);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

// Largest singular value by power iteration on A^T A.
inline double operator_norm(const std::vector<std::vector<double>>& a, int iters = 500) {
  const std::size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
  std::vector<double> v(n, 1.0), w(m), u(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = 1.0 + 0.1 * static_cast<double>(j);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) w[i] += a[i][j] * v[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      u[j] = 0.0;
      for (std::size_t i = 0; i < m; ++i) u[j] += a[i][j] * w[i];
    }
    double nu = 0.0;
    for (double x : u) nu += x * x;
    nu = std::sqrt(nu);
    if (nu == 0.0) return 0.0;
    double nv = 0.0;
    for (double x : v) nv += x * x;
    lambda = std::sqrt(nu / std::sqrt(nv));
    for (std::size_t j = 0; j < n; ++j) v[j] = u[j] / nu;
  }
  return lambda;
}

// Pairwise checks of a greedy selection over `count` items.
inline bool is_separated(const std::vector<std::size_t>& kept, const std::function<double(std::size_t, std::size_t)>& d,
                         double R) {
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      if (d(kept[i], kept[j]) < R) return false;
  return true;
}

inline bool spans(std::size_t count, const std::vector<std::size_t>& kept,
                  const std::function<double(std::size_t, std::size_t)>& d, double R) {
  for (std::size_t i = 0; i < count; ++i) {
    bool covered = false;
    for (std::size_t k : kept)
      if (d(i, k) < R) {
        covered = true;
        break;
      }
    if (!covered) return false;
  }
  return true;
}

// First-fit packing written out directly.
inline std::size_t first_fit(std::size_t count, const std::function<double(std::size_t, std::size_t)>& d, double R) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < count; ++i) {
    bool ok = true;
    for (std::size_t k : kept)
      if (d(i, k) < R) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(i);
  }
  return kept.size();
}

inline IMat random_int_matrix(std::mt19937_64& rng, std::size_t q, long long lo, long long hi) {
  std::uniform_int_distribution<long long> u(lo, hi);
  IMat a(q, IVec(q));
  for (auto& row : a)
    for (auto& v : row) v = u(rng);
  return a;
}

}  // namespace oracle
