#include "coarsent/presets.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>

#include "coarsent/error.hpp"

namespace coarsent {

namespace {

constexpr double kLn2 = std::numbers::ln2;
const double kLn6 = std::log(6.0);
constexpr double kCantorConeDim = 1.0 + 0.6309297535714574;  // 1 + log 2 / log 3

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json nums(std::initializer_list<double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json cell(double delta, Json R, int n_lo, int n_hi, double spacing, const char* lower = "FINAL_TERM",
          const char* upper = nullptr) {
  Json c = {{"delta", num(delta)}, {"R", std::move(R)}, {"n", {n_lo, n_hi}}, {"lower", lower}, {"spacing", num(spacing)}};
  if (upper) c["upper"] = upper;
  return c;
}

Json entropy_job(const char* label, Json space, Json map, Json x0, Json cells, Json seeded = nullptr) {
  Json s = {{"cells", std::move(cells)}, {"stabilization_tol", "0.02"}};
  if (!seeded.is_null()) s["seeded"] = std::move(seeded);
  return {{"type", "entropy"}, {"label", label}, {"space", std::move(space)}, {"map", std::move(map)},
          {"x0", std::move(x0)}, {"schedule", std::move(s)}};
}

Json doc(const std::string& id, Json jobs) {
  return {{"schema", kConfigSchema}, {"name", id}, {"preset", id}, {"seed", 1},
          {"budget", 20'000'000}, {"outputs", {{"dir", "results"}}}, {"jobs", std::move(jobs)}};
}

Json mat(std::initializer_list<std::initializer_list<double>> rows) {
  Json m = Json::array();
  for (auto r : rows) m.push_back(nums(r));
  return m;
}

Json euclid(int q) { return {{"kind", "euclidean"}, {"q", q}}; }
Json poly(std::initializer_list<double> c) { return {{"kind", "polynomial"}, {"coeffs", nums(c)}}; }
Json e2_chain() { return {{"kind", "chain"}, {"rule", "rectangles"}, {"blocks", 60}}; }
Json e2_seeded() { return {{"prefix", 0}, {"seed_spacing", "0.0078125"}}; }

Json e2_f_job() {
  return entropy_job("f", e2_chain(), {{"kind", "chain_linear"}}, "origin",
                     {cell(3, nums({2, 4}), 4, 16, 1, "SEEDED"), cell(4, nums({2, 4}), 4, 16, 1, "SEEDED")}, e2_seeded());
}

struct PresetDef {
  std::string description;
  std::string expectation;
  std::function<Json()> config;
  std::function<void(const RunResult&, PresetVerdict&)> check;
};

void expect(PresetVerdict& v, bool ok, const std::string& what) {
  v.passed = v.passed && ok;
  v.checks.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
}

std::string f4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const EntropyEstimate* entropy(const RunResult& r, const std::string& label, PresetVerdict& v) {
  const auto* j = r.find(label);
  if (!j || !j->entropy) {
    expect(v, false, "job '" + label + "' produced an entropy estimate");
    return nullptr;
  }
  return &*j->entropy;
}

bool within(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

const std::map<std::string, PresetDef>& catalog() {
  static const std::map<std::string, PresetDef> defs = {
      {"LINEAR_1D_DOUBLING",
       {"x -> 2x on the real line", "expected log 2",
        [] {
          return doc("LINEAR_1D_DOUBLING",
                     {entropy_job("doubling", euclid(1), {{"kind", "linear"}, {"matrix", mat({{2}})}}, nums({0}),
                                  {cell(4, nums({32, 64, 128}), 8, 16, 1, "FINAL_TERM", "SHADOW_HULL"),
                                   cell(8, nums({32, 64, 128}), 8, 16, 1, "FINAL_TERM", "SHADOW_HULL")})});
        },
        [](const RunResult& r, PresetVerdict& v) {
          if (const auto* e = entropy(r, "doubling", v))
            expect(v, within(e->value(), kLn2, 0.15), "slope " + f4(e->value()) + " within 15% of log 2");
        }}},
      {"LINEAR_2D_DIAG23",
       {"diag(2,3) on the plane", "expected log 6",
        [] {
          return doc("LINEAR_2D_DIAG23",
                     {entropy_job("diag23", euclid(2), {{"kind", "linear"}, {"matrix", mat({{2, 0}, {0, 3}})}},
                                  nums({0, 0}),
                                  {cell(4, nums({12, 24, 48}), 3, 7, 2.8, "FINAL_TERM", "SHADOW_HULL"),
                                   cell(8, nums({24, 48, 96}), 3, 7, 5.6, "FINAL_TERM", "SHADOW_HULL")})});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* e = entropy(r, "diag23", v);
          if (!e) return;
          const bool both = e->extrapolated_lower && e->extrapolated_upper;
          expect(v, both, "lower and upper bounds present");
          if (!both) return;
          const double lo = *e->extrapolated_lower, up = *e->extrapolated_upper;
          expect(v, within(lo, kLn6, 0.15), "lower slope " + f4(lo) + " within 15% of log 6");
          expect(v, within(up, kLn6, 0.15), "upper slope " + f4(up) + " within 15% of log 6");
          expect(v, lo <= up, "lower <= upper");
        }}},
      {"LINEAR_CONTRACTION",
       {"x -> x/2 and the identity on the plane", "expected 0",
        [] {
          auto cells = [] {
            return Json{cell(1, nums({4, 8}), 20, 40, 1), cell(2, nums({4, 8}), 20, 40, 2)};
          };
          return doc("LINEAR_CONTRACTION",
                     {entropy_job("contraction", euclid(2),
                                  {{"kind", "linear"}, {"matrix", mat({{0.5, 0}, {0, 0.5}})}}, nums({0, 0}), cells()),
                      entropy_job("identity", euclid(2), {{"kind", "identity"}}, nums({0, 0}), cells())});
        },
        [](const RunResult& r, PresetVerdict& v) {
          for (const char* label : {"contraction", "identity"})
            if (const auto* e = entropy(r, label, v))
              expect(v, e->value() <= 0.10, std::string(label) + " slope " + f4(e->value()) + " <= 0.10");
        }}},
      {"E1_CONJUGATED",
       {"doubling conjugated by a Lipschitz homeomorphism of the half-plane", "expected +INFINITY",
        [] {
          Json seeded = {{"drift", nums({0, 1})}, {"tail", 1}, {"seed_axes", {true, false}}, {"seed_spacing", "2e-5"}};
          return doc("E1_CONJUGATED",
                     {entropy_job("g", {{"kind", "halfplane"}}, {{"kind", "conjugated_doubling"}}, nums({0, 0}),
                                  {cell(1, nums({2, 4, 8}), 4, 12, 1, "SEEDED"), cell(2, nums({2, 4, 8}), 3, 7, 1, "SEEDED"),
                                   cell(3, nums({2, 4, 8}), 3, 5, 1, "SEEDED")},
                                  seeded)});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* e = entropy(r, "g", v);
          if (!e) return;
          for (const auto& d : e->per_delta) {
            const double s = d.lower.value_or(0.0);
            expect(v, s >= 0.8 * d.delta, "delta " + f4(d.delta) + " slope " + f4(s) + " >= 0.8 delta");
          }
          expect(v, e->infinite, "infinity flag set");
        }}},
      {"E2_CHAIN",
       {"block-linear map on a chain of alternating rectangles", "expected rate >= log 2",
        [] { return doc("E2_CHAIN", {e2_f_job()}); },
        [](const RunResult& r, PresetVerdict& v) {
          if (const auto* e = entropy(r, "f", v)) expect(v, e->value() >= 0.55, "rate " + f4(e->value()) + " >= 0.55");
        }}},
      {"E2_CHAIN_SQUARED",
       {"the rectangle chain map against its square", "expected rate(f^2) < 2 rate(f)",
        [] {
          return doc("E2_CHAIN_SQUARED",
                     {e2_f_job(),
                      entropy_job("f2", e2_chain(), {{"kind", "iterate"}, {"base", {{"kind", "chain_linear"}}}, {"k", 2}},
                                  "origin",
                                  {cell(3, nums({2, 4}), 2, 8, 1, "SEEDED"), cell(4, nums({2, 4}), 2, 8, 1, "SEEDED")},
                                  e2_seeded())});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* f = entropy(r, "f", v);
          const auto* f2 = entropy(r, "f2", v);
          if (!f || !f2) return;
          const double a = f->value(), b = f2->value();
          expect(v, a >= 0.55, "rate(f) " + f4(a) + " >= 0.55");
          expect(v, b <= 0.85, "rate(f^2) " + f4(b) + " <= 0.85");
          expect(v, b < 2 * a - 0.3, "rate(f^2) < 2 rate(f) - 0.3");
        }}},
      {"E3_PRODUCT",
       {"segment chains whose growth phases alternate", "expected exact product count inequalities",
        [] {
          auto chain = [](const char* rule) { return Json{{"kind", "chain"}, {"rule", rule}, {"blocks", 40}}; };
          Json prod_space = {{"kind", "product"}, {"left", chain("segments_f")}, {"right", chain("segments_g")}};
          Json prod_map = {{"kind", "product"}, {"left", {{"kind", "chain_linear"}}}, {"right", {{"kind", "chain_linear"}}}};
          Json cells = {cell(4, nums({8, 16}), 4, 10, 1)};
          return doc("E3_PRODUCT",
                     {{{"type", "product"},
                       {"label", "exhaustive"},
                       {"left", {{"space", chain("segments_f")}, {"map", {{"kind", "chain_linear"}}}, {"x0", "origin"}}},
                       {"right", {{"space", chain("segments_g")}, {"map", {{"kind", "chain_linear"}}}, {"x0", "origin"}}},
                       {"n", 3},
                       {"delta", "4"},
                       {"spacing", "1"},
                       {"R", nums({2, 4, 8})}},
                      entropy_job("f", chain("segments_f"), {{"kind", "chain_linear"}}, "origin", cells),
                      entropy_job("g", chain("segments_g"), {{"kind", "chain_linear"}}, "origin", cells),
                      entropy_job("f_x_g", prod_space, prod_map, "origin", cells)});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* p = r.find("exhaustive");
          if (!p || p->product.empty()) {
            expect(v, false, "product counts computed");
            return;
          }
          for (const auto& [R, pc] : p->product) {
            expect(v, pc.spanning_upper <= pc.left_spanning * pc.right_spanning,
                   "R " + f4(R) + ": spanning(f x g) <= spanning(f) spanning(g)");
            expect(v, pc.separated_lower >= pc.left_separated * pc.right_separated,
                   "R " + f4(R) + ": separated(f x g) >= separated(f) separated(g)");
          }
        }}},
      {"E5_IDENTITY_GROWTH",
       {"identity on a half-line with spaces of doubling dimension attached", "expected rate linear in delta",
        [] {
          return doc("E5_IDENTITY_GROWTH",
                     {entropy_job("identity", {{"kind", "spider"}, {"max_level", 12}}, {{"kind", "identity"}}, "origin",
                                  {cell(1, nums({1, 2}), 3, 12, 1, "SPIDER_AXES"), cell(2, nums({1, 2}), 2, 6, 1, "SPIDER_AXES"),
                                   cell(4, nums({1, 2}), 1, 3, 1, "SPIDER_AXES")})});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* e = entropy(r, "identity", v);
          if (!e) return;
          for (std::size_t i = 0; i + 1 < e->per_delta.size(); ++i) {
            const auto& a = e->per_delta[i];
            const auto& b = e->per_delta[i + 1];
            const double ratio = b.lower.value_or(0.0) / std::max(a.lower.value_or(0.0), 1e-300);
            expect(v, ratio >= 1.6 && ratio <= 2.4,
                   "rate(" + f4(b.delta) + ") / rate(" + f4(a.delta) + ") = " + f4(ratio) + " in [1.6, 2.4]");
          }
          expect(v, e->infinite, "infinity flag set");
        }}},
      {"E6_CONE_CANTOR",
       {"homothety x -> 2x on the cone over a Cantor arc", "expected (bcd + 1) log 2 ~ 1.1306",
        [] {
          Json cone = {{"kind", "cone"}, {"q", 2}, {"base", {{"kind", "cantor_arc"}, {"levels", 8}, {"arc", "1"}}}};
          Json eps = Json::array();
          for (int k = 2; k <= 6; ++k) eps.push_back(num(std::pow(3.0, -k)));
          return doc("E6_CONE_CANTOR",
                     {{{"type", "bcd"},
                       {"label", "bcd"},
                       {"space", cone},
                       {"center", "origin"},
                       {"radius", "1"},
                       {"epsilons", eps},
                       {"spacing_factor", "0.25"}},
                      entropy_job("homothety", cone, {{"kind", "homothety"}, {"lambda", "2"}}, "origin",
                                  {cell(4, nums({16, 32}), 6, 14, 4)})});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* b = r.find("bcd");
          if (!b || !b->dimension) {
            expect(v, false, "bcd computed");
          } else {
            const double d = b->dimension->fitted_dimension;
            expect(v, std::abs(d - kCantorConeDim) <= 0.10, "bcd " + f4(d) + " within 0.10 of 1.6309");
          }
          if (const auto* e = entropy(r, "homothety", v))
            expect(v, within(e->value(), kCantorConeDim * kLn2, 0.20), "entropy " + f4(e->value()) + " within 20% of 1.1306");
        }}},
      {"CO4_CONJUGACY",
       {"x^2 and x^2 + 2x conjugated by x - 1", "expected zero defects, growing defect with the wrong inverse",
        [] {
          auto job = [](const char* label, Json psi) {
            return Json{{"type", "conjugacy"},
                        {"label", label},
                        {"X", euclid(1)},
                        {"f", poly({0, 0, 1})},
                        {"g", poly({0, 2, 1})},
                        {"phi", {{"map", poly({-1, 1})}, {"control", {{"kind", "affine"}, {"a", "1"}, {"b", "0"}}}}},
                        {"psi", {{"map", std::move(psi)}, {"control", {{"kind", "affine"}, {"a", "1"}, {"b", "0"}}}}},
                        {"radii", nums({12.5, 25, 50, 100})},
                        {"spacing", "0.5"}};
          };
          return doc("CO4_CONJUGACY", {job("good", poly({1, 1})), job("bad", poly({0, 1}))});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* g = r.find("good");
          const auto* b = r.find("bad");
          if (!g || !b || !g->conjugacy || !b->conjugacy) {
            expect(v, false, "conjugacy reports computed");
            return;
          }
          double worst = 0.0;
          for (const auto* c : {&g->conjugacy->K_phi, &g->conjugacy->K_psi, &g->conjugacy->psi_phi, &g->conjugacy->phi_psi})
            for (const auto& [rad, d] : c->points) worst = std::max(worst, d);
          expect(v, worst == 0.0, "good pair: all four defects exactly 0");
          const auto& k = b->conjugacy->K_psi;
          expect(v, k.classification == Trend::Growing, std::string("wrong inverse: K_psi ") + trend_name(k.classification));
          const double ratio = k.points.back().second / k.points.back().first;
          expect(v, std::abs(ratio - 2.0) <= 0.10, "wrong inverse: defect(T)/T = " + f4(ratio) + " within 5% of 2");
        }}},
      {"CO9_ITERATE_DEFECT",
       {"x^2 + 1/x against x^2 on [2, inf), and their squares", "expected bounded defect, growing for the squares",
        [] {
          Json line = {{"kind", "half_line"}, {"lower", "2"}};
          Json g = {{"kind", "polynomial"}, {"coeffs", nums({0, 0, 1})}, {"inverse_coeffs", nums({1})}};
          Json f = poly({0, 0, 1});
          auto defect = [&](const char* label, Json a, Json b) {
            return Json{{"type", "defect"}, {"label", label}, {"space", line}, {"f1", std::move(a)},
                        {"f2", std::move(b)},   {"radii", nums({23, 48, 98})}, {"spacing", "0.25"}};
          };
          return doc("CO9_ITERATE_DEFECT",
                     {defect("g_vs_f", g, f),
                      defect("g2_vs_f2", {{"kind", "iterate"}, {"base", g}, {"k", 2}}, {{"kind", "iterate"}, {"base", f}, {"k", 2}})});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* a = r.find("g_vs_f");
          const auto* b = r.find("g2_vs_f2");
          if (!a || !b || !a->defect || !b->defect) {
            expect(v, false, "defect curves computed");
            return;
          }
          double worst = 0.0;
          for (const auto& [rad, d] : a->defect->points) worst = std::max(worst, d);
          expect(v, worst <= 0.5 + 1e-12, "(g, f) defect " + f4(worst) + " <= 0.5");
          expect(v, a->defect->classification == Trend::Bounded,
                 std::string("(g, f) ") + trend_name(a->defect->classification));
          expect(v, b->defect->classification == Trend::Growing,
                 std::string("(g^2, f^2) ") + trend_name(b->defect->classification));
          const double T = 2.0 + b->defect->points.back().first;
          const double d = b->defect->points.back().second;
          expect(v, d >= 1.9 * T, "(g^2, f^2) defect " + f4(d) + " >= 1.9 T at T = " + f4(T));
        }}},
      {"LEM_SELF_PRODUCT",
       {"identity times identity on the line, exhaustive families", "expected s(f x f) >= s(f)^2",
        [] {
          Json side = {{"space", euclid(1)}, {"map", {{"kind", "identity"}}}, {"x0", nums({0})}};
          return doc("LEM_SELF_PRODUCT", {{{"type", "product"},
                                           {"label", "self"},
                                           {"left", side},
                                           {"n", 3},
                                           {"delta", "2"},
                                           {"spacing", "1"},
                                           {"R", nums({2, 3, 4})}}});
        },
        [](const RunResult& r, PresetVerdict& v) {
          const auto* p = r.find("self");
          if (!p || p->product.empty()) {
            expect(v, false, "product counts computed");
            return;
          }
          for (const auto& [R, pc] : p->product) {
            expect(v, pc.separated_lower >= pc.left_separated * pc.left_separated,
                   "R " + f4(R) + ": s(f x f) = " + f4(pc.separated_lower) + " >= s(f)^2 = " +
                       f4(pc.left_separated * pc.left_separated));
            expect(v, pc.spanning_upper <= pc.left_spanning * pc.right_spanning, "R " + f4(R) + ": r(f x f) <= r(f)^2");
          }
        }}},
  };
  return defs;
}

const PresetDef& def(const std::string& id) {
  const auto& c = catalog();
  const auto it = c.find(id);
  if (it == c.end()) throw InvalidInput("unknown preset '" + id + "'");
  return it->second;
}

}  // namespace

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids = {"LINEAR_1D_DOUBLING", "LINEAR_2D_DIAG23", "LINEAR_CONTRACTION",
                                               "E1_CONJUGATED",      "E2_CHAIN",         "E2_CHAIN_SQUARED",
                                               "E3_PRODUCT",         "E5_IDENTITY_GROWTH", "E6_CONE_CANTOR",
                                               "CO4_CONJUGACY",      "CO9_ITERATE_DEFECT", "LEM_SELF_PRODUCT"};
  return ids;
}

bool is_preset(const std::string& id) { return catalog().count(id) > 0; }

std::string preset_description(const std::string& id) { return def(id).description; }
std::string preset_expectation(const std::string& id) { return def(id).expectation; }
Json preset_config(const std::string& id) { return def(id).config(); }

PresetVerdict check_preset(const std::string& id, const RunResult& result) {
  PresetVerdict v;
  def(id).check(result, v);
  return v;
}

}  // namespace coarsent
