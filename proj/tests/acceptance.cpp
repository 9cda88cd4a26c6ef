// One PASS/FAIL line per acceptance criterion; exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coarsent/config.hpp"
#include "coarsent/entropy.hpp"
#include "coarsent/error.hpp"
#include "coarsent/greedy.hpp"
#include "coarsent/orbit.hpp"
#include "coarsent/presets.hpp"
#include "coarsent/runner.hpp"
#include "oracles.hpp"

using namespace coarsent;

namespace {

constexpr double kLn2 = std::numbers::ln2;
const double kLn6 = std::log(6.0);
constexpr double kConeDim = 1.6309;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Timed {
  RunResult result;
  double seconds = 0.0;
};

Timed run_preset(const std::string& id) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOptions opts;
  opts.write_files = false;
  Timed t{run(parse_config(preset_config(id)), opts), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

const EntropyEstimate& entropy_of(const RunResult& r, const std::string& label) {
  const auto* j = r.find(label);
  if (!j || !j->entropy) throw std::runtime_error("no entropy result for job '" + label + "'");
  return *j->entropy;
}

bool within(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

Matrix to_matrix(const oracle::IMat& a) {
  Matrix m;
  for (const auto& row : a) m.emplace_back(row.begin(), row.end());
  return m;
}

// Runs a criterion body, turning exceptions into a FAIL line.
void criterion(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, ok, what, detail);
  } catch (const std::exception& e) {
    report(id, false, what, std::string("error: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

std::pair<bool, std::string> doubling() {
  const auto t = run_preset("LINEAR_1D_DOUBLING");
  const double h = entropy_of(t.result, "doubling").value();
  const bool ok = within(h, kLn2, 0.15) && t.seconds < 60.0;
  return {ok, "slope " + fmt(h) + " vs log 2 = " + fmt(kLn2) + " (+-15%), " + fmt(t.seconds, 1) + " s (< 60 s)"};
}

std::pair<bool, std::string> diag23() {
  const auto t = run_preset("LINEAR_2D_DIAG23");
  const auto& e = entropy_of(t.result, "diag23");
  const double lo = e.extrapolated_lower.value_or(NAN), up = e.extrapolated_upper.value_or(NAN);
  const bool ok = within(lo, kLn6, 0.15) && within(up, kLn6, 0.15) && lo <= up && t.seconds < 300.0;
  return {ok, "lower " + fmt(lo) + ", upper " + fmt(up) + " vs log 6 = " + fmt(kLn6) + " (+-15%), " +
                  fmt(t.seconds, 1) + " s (< 300 s)"};
}

std::pair<bool, std::string> contraction() {
  const auto t = run_preset("LINEAR_CONTRACTION");
  const double c = entropy_of(t.result, "contraction").value();
  const double i = entropy_of(t.result, "identity").value();
  return {c <= 0.10 && i <= 0.10, "contraction " + fmt(c) + ", identity " + fmt(i) + " (<= 0.10)"};
}

std::pair<bool, std::string> cone() {
  const auto t = run_preset("E6_CONE_CANTOR");
  const auto* b = t.result.find("bcd");
  if (!b || !b->dimension) throw std::runtime_error("no bcd result");
  const double d = b->dimension->fitted_dimension;
  const double h = entropy_of(t.result, "homothety").value();
  const bool ok = std::abs(d - kConeDim) <= 0.10 && within(h, kConeDim * kLn2, 0.20);
  return {ok, "bcd " + fmt(d) + " vs " + fmt(kConeDim) + " (+-0.10), entropy " + fmt(h) + " vs " +
                  fmt(kConeDim * kLn2) + " (+-20%)"};
}

// Random FULL_ENUM families, optionally thinned to at most 500 members.
std::pair<bool, std::string> sandwich() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ur(0.5, 6.0);
  const std::vector<double> deltas{1.0, 1.5, 2.0};
  int fails = 0, families = 0;
  std::size_t largest = 0;
  while (families < 200) {
    const std::size_t q = 1 + rng() % 2;
    const auto a = oracle::random_int_matrix(rng, q, -2, 2);
    const double delta = deltas[rng() % deltas.size()];
    const int n = 1 + static_cast<int>(rng() % 4);
    std::vector<double> x0(q);
    for (auto& v : x0) v = static_cast<double>(static_cast<int>(rng() % 5) - 2);
    std::vector<PseudoOrbit> fam;
    try {
      fam = enumerate(Map::linear(to_matrix(a)), Point(x0), n, delta, 1.0, 20000);
    } catch (const BudgetExceeded&) {
      continue;
    }
    if (fam.empty()) continue;
    if (fam.size() > 500) {
      std::vector<std::size_t> idx(fam.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(500);
      std::sort(idx.begin(), idx.end());
      std::vector<PseudoOrbit> thin;
      for (auto i : idx) thin.push_back(fam[i]);
      fam = std::move(thin);
    }
    ++families;
    largest = std::max(largest, fam.size());
    const auto space = Space::euclidean(q);
    auto d = [&](std::size_t i, std::size_t j) { return orbit_distance(space, fam[i], fam[j]); };
    const double R = ur(rng);
    const auto sep2 = greedy_separated(fam.size(), d, 2 * R);
    const auto span = greedy_spanning(fam.size(), d, R);
    const auto sep = greedy_separated(fam.size(), d, R);
    const bool ok = sep2.size() <= span.size() && span.size() <= sep.size() && oracle::spans(fam.size(), span, d, R) &&
                    oracle::is_separated(sep, d, R) && oracle::is_separated(sep2, d, 2 * R);
    if (!ok) ++fails;
  }
  return {fails == 0, std::to_string(families) + " families (largest " + std::to_string(largest) + "), " +
                          std::to_string(fails) + " failures"};
}

std::pair<bool, std::string> subsampling() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> gauss;
  int invalid = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t q = 1 + static_cast<std::size_t>(t % 3);
    Matrix a(q, std::vector<double>(q));
    for (auto& row : a)
      for (auto& v : row) v = 1.5 * u(rng);
    std::vector<double> b(q);
    for (auto& v : b) v = 2.0 * u(rng);
    const auto space = Space::euclidean(q);
    const auto f = Map::affine(space, space, a, b);
    const auto L = ControlFunction::affine(std::max(oracle::operator_norm(a), 1e-3));
    const int k = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % 2);
    const double delta = 0.1 + 2.9 * std::abs(u(rng));
    PseudoOrbit o;
    o.delta = delta;
    std::vector<double> x(q);
    for (auto& v : x) v = 3.0 * u(rng);
    o.points.emplace_back(x);
    for (int i = 0; i < k * m; ++i) {
      auto y = f.apply(o.points.back());
      std::vector<double> dir(q);
      double nrm = 0.0;
      for (auto& v : dir) nrm += (v = gauss(rng)) * v;
      nrm = std::sqrt(nrm);
      const double r = delta * std::abs(u(rng));
      for (std::size_t j = 0; j < q; ++j) y.coords[j] += r * dir[j] / nrm;
      o.points.push_back(y);
    }
    if (!validate(f, o).valid) throw std::runtime_error("generator produced an invalid pseudoorbit");
    const auto s = subsample(o, k, L);
    if (std::abs(s.delta - eta(L, delta, k)) > 1e-12 * s.delta || !validate(Map::iterate(f, k), s).valid) ++invalid;
  }

  // s(f, kn) >= s(f^k, n): lifts of a separated f^k family seed the f scan.
  int cases = 0, bad = 0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t q = 1 + static_cast<std::size_t>(t % 2);
    const auto ia = oracle::random_int_matrix(rng, q, -2, 2);
    const auto f = Map::linear(to_matrix(ia));
    for (int k = 2; k <= 4; ++k)
      for (int n = 1; k * n <= 4; ++n) {
        const double delta = q == 1 ? 2.0 : 1.0;
        const Point x0(std::vector<double>(q, 1.0));
        std::vector<PseudoOrbit> fam_k, fam;
        try {
          fam_k = enumerate(Map::iterate(f, k), x0, n, delta, 1.0, 20000);
          fam = enumerate(f, x0, k * n, delta, 1.0, 20000);
        } catch (const BudgetExceeded&) {
          continue;
        }
        const auto space = Space::euclidean(q);
        std::map<std::vector<Point>, std::size_t> index;
        for (std::size_t i = 0; i < fam.size(); ++i) index.emplace(fam[i].points, i);
        for (double R : {1.0, 2.0, 4.0}) {
          ++cases;
          const auto kept_k = separated_orbits(space, fam_k, R);
          std::vector<std::size_t> priority;
          bool lifted_ok = true;
          for (auto i : kept_k) {
            const auto it = index.find(lift_iterate_orbit(f, fam_k[i], k).points);
            if (it == index.end()) {
              lifted_ok = false;
              break;
            }
            priority.push_back(it->second);
          }
          const auto kept = separated_orbits(space, fam, R, priority);
          auto d = [&](std::size_t i, std::size_t j) { return orbit_distance(space, fam[i], fam[j]); };
          const std::size_t s_f = std::max(kept.size(), separated_orbits(space, fam, R).size());
          if (!lifted_ok || !oracle::is_separated(kept, d, R) || s_f < kept_k.size()) ++bad;
        }
      }
  }
  return {invalid == 0 && bad == 0, "1000 subsamples, " + std::to_string(invalid) + " invalid; " +
                                        std::to_string(cases) + " exhaustive s(f,kn) >= s(f^k,n) cases, " +
                                        std::to_string(bad) + " failures"};
}

std::pair<bool, std::string> products() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ur(1.0, 6.0);
  int fails = 0;
  for (int t = 0; t < 50; ++t) {
    const auto fa = oracle::random_int_matrix(rng, 1, -2, 2);
    const auto ga = t % 2 == 0 ? fa : oracle::random_int_matrix(rng, 1, -2, 2);
    const double delta = 1.0 + static_cast<double>(rng() % 2);
    const int n = 1 + static_cast<int>(rng() % 3);
    const auto s = Space::euclidean(1);
    const auto left = enumerate(Map::linear(to_matrix(fa)), Point({0.0}), n, delta, 1.0);
    const auto right = enumerate(Map::linear(to_matrix(ga)), Point({1.0}), n, delta, 1.0);
    const double R = ur(rng);
    const auto pc = count_product(s, left, s, right, R);
    const double size = static_cast<double>(left.size() * right.size());
    const bool ok = pc.spanning_upper <= pc.left_spanning * pc.right_spanning &&
                    pc.separated_lower >= pc.left_separated * pc.right_separated && pc.separated_lower <= size &&
                    pc.spanning_upper >= 1.0 && pc.product_of_separated_is_separated;
    if (!ok) ++fails;
  }
  return {fails == 0, "50 instances (n <= 3), " + std::to_string(fails) + " failures"};
}

std::pair<bool, std::string> chain_square() {
  const auto t = run_preset("E2_CHAIN_SQUARED");
  const double f = entropy_of(t.result, "f").value();
  const double f2 = entropy_of(t.result, "f2").value();
  const bool ok = f >= 0.55 && f2 <= 0.85 && f2 < 2 * f - 0.3;
  return {ok, "rate(f) " + fmt(f) + " (>= 0.55), rate(f^2) " + fmt(f2) + " (<= 0.85, < 2 rate(f) - 0.3 = " +
                  fmt(2 * f - 0.3) + ")"};
}

std::pair<bool, std::string> infinity() {
  const auto t1 = run_preset("E1_CONJUGATED");
  const auto& g = entropy_of(t1.result, "g");
  bool ok = g.infinite;
  std::string detail = "conjugated doubling slopes";
  for (double d : {1.0, 2.0, 3.0}) {
    const auto it = std::find_if(g.per_delta.begin(), g.per_delta.end(), [&](const auto& s) { return s.delta == d; });
    const double s = it == g.per_delta.end() ? 0.0 : it->lower.value_or(0.0);
    ok = ok && s >= 0.8 * d;
    detail += " " + fmt(s, 3) + (s >= 0.8 * d ? "" : "(<0.8d)");
  }
  detail += std::string(g.infinite ? " flagged" : " NOT flagged");

  const auto t5 = run_preset("E5_IDENTITY_GROWTH");
  const auto& e = entropy_of(t5.result, "identity");
  auto rate = [&](double d) {
    for (const auto& s : e.per_delta)
      if (s.delta == d && s.lower) return *s.lower;
    return std::nan("");
  };
  ok = ok && e.infinite;
  detail += "; spider identity ratios";
  for (double d : {1.0, 2.0}) {
    const double r = rate(2 * d) / rate(d);
    ok = ok && r >= 1.6 && r <= 2.4;
    detail += " " + fmt(r, 3);
  }
  detail += std::string(e.infinite ? " flagged" : " NOT flagged");
  return {ok, detail};
}

std::pair<bool, std::string> coarse() {
  const auto t4 = run_preset("CO4_CONJUGACY");
  const auto* good = t4.result.find("good");
  const auto* bad = t4.result.find("bad");
  if (!good || !good->conjugacy || !bad || !bad->conjugacy) throw std::runtime_error("missing conjugacy results");
  double worst = 0.0;
  for (const auto* c : {&good->conjugacy->K_phi, &good->conjugacy->K_psi, &good->conjugacy->psi_phi,
                        &good->conjugacy->phi_psi})
    for (const auto& [r, d] : c->points) worst = std::max(worst, d);
  const auto& kpsi = bad->conjugacy->K_psi;
  const double T = kpsi.points.back().first;
  const double ratio = kpsi.points.back().second / T;
  bool ok = worst == 0.0 && kpsi.classification == Trend::Growing && std::abs(ratio - 2.0) <= 0.05 * 2.0;
  std::string detail = "quadratic conjugacy: good max defect " + fmt(worst) + ", bad K_psi " + trend_name(kpsi.classification) +
                       " defect/T " + fmt(ratio) + " at T=" + fmt(T, 1);

  const auto t9 = run_preset("CO9_ITERATE_DEFECT");
  const auto* a = t9.result.find("g_vs_f");
  const auto* b = t9.result.find("g2_vs_f2");
  if (!a || !a->defect || !b || !b->defect) throw std::runtime_error("missing defect results");
  double gf = 0.0;
  for (const auto& [r, d] : a->defect->points) gf = std::max(gf, d);
  // the half-line starts at 2, so the last region reaches x = 2 + radius
  const double T9 = 2.0 + b->defect->points.back().first;
  const double d9 = b->defect->points.back().second;
  ok = ok && gf <= 0.5 && a->defect->classification == Trend::Bounded && b->defect->classification == Trend::Growing &&
       std::abs(T9 - 100.0) < 1e-9 && d9 >= 1.9 * T9;
  detail += "; iterate defect: (g,f) " + fmt(gf) + " " + trend_name(a->defect->classification) + ", (g^2,f^2) " + fmt(d9) + " " +
            trend_name(b->defect->classification) + " at T=" + fmt(T9, 1) + " (>= " + fmt(1.9 * T9, 1) + ")";
  return {ok, detail};
}

std::pair<bool, std::string> oracle_equivalence() {
  std::mt19937_64 rng(31337);
  int mismatches = 0;
  std::size_t total = 0;
  for (int t = 0; t < 30; ++t) {
    const std::size_t q = 1 + static_cast<std::size_t>(t % 2);
    const auto a = oracle::random_int_matrix(rng, q, -2, 2);
    const double delta = std::vector<double>{1.0, 1.5, 2.0}[rng() % 3];
    const int n = q == 1 ? 1 + static_cast<int>(rng() % 4) : 1 + static_cast<int>(rng() % 3);
    oracle::IVec x0(q);
    std::vector<double> dx(q);
    for (std::size_t i = 0; i < q; ++i) dx[i] = static_cast<double>(x0[i] = static_cast<long long>(rng() % 7) - 3);
    auto want = oracle::pseudoorbits(a, x0, n, delta);
    std::vector<oracle::IOrbit> got;
    for (const auto& o : enumerate(Map::linear(to_matrix(a)), Point(dx), n, delta, 1.0)) {
      oracle::IOrbit io;
      for (const auto& p : o.points) {
        oracle::IVec v;
        for (double c : p.coords) v.push_back(std::llround(c));
        io.push_back(std::move(v));
      }
      got.push_back(std::move(io));
    }
    total += want.size();
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) ++mismatches;
  }
  return {mismatches == 0,
          "30 cases, " + std::to_string(total) + " orbits, " + std::to_string(mismatches) + " mismatched cases"};
}

}  // namespace

int main() {
  criterion(1, "doubling on R", doubling);
  criterion(2, "diag(2,3) on R^2", diag23);
  criterion(3, "contraction and identity", contraction);
  criterion(4, "cone over the Cantor arc", cone);
  criterion(5, "separated/spanning sandwich", sandwich);
  criterion(6, "subsampling", subsampling);
  criterion(7, "product inequalities", products);
  criterion(8, "chain map and its square", chain_square);
  criterion(9, "infinite entropy signatures", infinity);
  criterion(10, "coarse checkers", coarse);
  criterion(11, "enumeration vs brute force", oracle_equivalence);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
