#include "coarsent/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "coarsent/error.hpp"

namespace coarsent {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InvalidInput(where + ": unknown key '" + k + "'");
  }
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InvalidInput(where + ": missing '" + key + "'");
  return j.at(key);
}

std::string str(const Json& j, const std::string& where) {
  if (!j.is_string()) throw InvalidInput(where + ": expected a string");
  return j.get<std::string>();
}

long long integer(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
  }
  throw InvalidInput(where + ": expected an integer");
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(parse_number(v));
  return out;
}

Matrix matrix(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInput("matrix: expected a nonempty array of rows");
  Matrix m;
  for (const auto& row : j) m.push_back(numbers(row, "matrix row"));
  for (const auto& row : m)
    if (row.size() != m.front().size()) throw InvalidInput("matrix: ragged rows");
  return m;
}

BaseSetSpec parse_base(const Json& j) {
  check_keys(j, {"kind", "levels", "arc", "angles", "resolution"}, "cone base");
  BaseSetSpec b;
  const auto kind = str(need(j, "kind", "cone base"), "cone base kind");
  if (kind == "full_sphere") {
    b.kind = BaseSetSpec::Kind::FullSphere;
    if (j.contains("resolution")) b.resolution = static_cast<int>(integer(j["resolution"], "resolution"));
  } else if (kind == "finite_angles") {
    b.kind = BaseSetSpec::Kind::FiniteAngles;
    b.angles = numbers(need(j, "angles", "cone base"), "angles");
  } else if (kind == "cantor_arc") {
    b.kind = BaseSetSpec::Kind::CantorArc;
    b.levels = static_cast<int>(integer(need(j, "levels", "cone base"), "levels"));
    if (j.contains("arc")) b.arc = parse_number(j["arc"]);
  } else {
    throw InvalidInput("unknown cone base kind '" + kind + "'");
  }
  return b;
}

ChainRule parse_rule(const std::string& s) {
  if (s == "rectangles") return ChainRule::Rectangles;
  if (s == "segments_f") return ChainRule::SegmentsF;
  if (s == "segments_g") return ChainRule::SegmentsG;
  throw InvalidInput("unknown chain rule '" + s + "'");
}

Map with_declared(const Json& j, Map m) {
  if (!j.contains("declared")) return m;
  const Json& d = j["declared"];
  check_keys(d, {"expansion", "lipschitz", "big_lambda"}, "declared");
  auto opt = [&](const char* k) -> std::optional<double> {
    if (!d.contains(k)) return std::nullopt;
    return parse_number(d[k]);
  };
  return m.with_declared(opt("expansion"), opt("lipschitz"), opt("big_lambda"));
}

std::size_t size_value(const Json& j, const std::string& where) {
  const long long v = integer(j, where);
  if (v <= 0) throw InvalidInput(where + " must be positive");
  return static_cast<std::size_t>(v);
}

Schedule parse_schedule(const Json& j) {
  check_keys(j, {"cells", "stabilization_tol", "seeded"}, "schedule");
  Schedule s;
  if (j.contains("stabilization_tol")) s.stabilization_tol = parse_number(j["stabilization_tol"]);
  if (j.contains("seeded")) {
    const Json& o = j["seeded"];
    check_keys(o, {"drift", "tail", "prefix", "seed_spacing", "seed_axes"}, "seeded");
    auto& so = s.options.seeded;
    if (o.contains("drift")) so.drift = numbers(o["drift"], "drift");
    if (o.contains("tail")) so.tail = static_cast<int>(integer(o["tail"], "tail"));
    if (o.contains("prefix")) so.prefix = static_cast<int>(integer(o["prefix"], "prefix"));
    if (o.contains("seed_spacing")) so.seed_spacing = parse_number(o["seed_spacing"]);
    if (o.contains("seed_axes")) {
      if (!o["seed_axes"].is_array()) throw InvalidInput("seed_axes: expected an array");
      for (const auto& v : o["seed_axes"]) {
        if (!v.is_boolean()) throw InvalidInput("seed_axes: expected booleans");
        so.seed_axes.push_back(v.get<bool>());
      }
    }
  }
  const Json& cells = need(j, "cells", "schedule");
  if (!cells.is_array()) throw InvalidInput("schedule cells: expected an array");
  for (const auto& c : cells) {
    check_keys(c, {"delta", "R", "n", "lower", "upper", "spacing"}, "schedule cell");
    ScheduleCell cell;
    cell.delta = parse_number(need(c, "delta", "schedule cell"));
    cell.R_list = numbers(need(c, "R", "schedule cell"), "R");
    const Json& n = need(c, "n", "schedule cell");
    if (!n.is_array() || n.size() != 2) throw InvalidInput("schedule cell n: expected [n_lo, n_hi]");
    cell.n_lo = static_cast<int>(integer(n[0], "n_lo"));
    cell.n_hi = static_cast<int>(integer(n[1], "n_hi"));
    if (c.contains("lower")) cell.lower = strategy_from_name(str(c["lower"], "lower"));
    if (c.contains("upper")) cell.upper = strategy_from_name(str(c["upper"], "upper"));
    cell.spacing = parse_number(need(c, "spacing", "schedule cell"));
    s.cells.push_back(std::move(cell));
  }
  return s;
}

std::vector<double> radii(const Json& j) {
  auto r = numbers(j, "radii");
  if (r.empty()) throw InvalidInput("radii: expected at least one radius");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0)) throw InvalidInput("radii must be positive");
    if (i > 0 && !(r[i] > r[i - 1])) throw InvalidInput("radii must be strictly increasing");
  }
  return r;
}

double positive(const Json& j, const std::string& where) {
  const double v = parse_number(j);
  if (!(v > 0.0)) throw InvalidInput(where + " must be positive");
  return v;
}

CoarseMapCert parse_cert(const Json& j, const Space& domain) {
  check_keys(j, {"map", "control", "K", "M"}, "certificate");
  CoarseMapCert c{parse_map(need(j, "map", "certificate"), domain),
                  j.contains("control") ? parse_control(j["control"]) : ControlFunction::affine(1.0, 0.0), std::nullopt,
                  std::nullopt};
  if (j.contains("K")) c.K_close = parse_number(j["K"]);
  if (j.contains("M")) c.M_dense = parse_number(j["M"]);
  return c;
}

Job parse_job(const Json& j, std::size_t budget) {
  if (!j.is_object()) throw InvalidInput("job: expected an object");
  const std::string type = str(need(j, "type", "job"), "job type");
  const std::string label = j.contains("label") ? str(j["label"], "label") : type;
  if (type == "entropy") {
    check_keys(j, {"type", "label", "space", "map", "x0", "schedule"}, "entropy job");
    EntropyJob e{parse_space(need(j, "space", "entropy job")), Map::identity(Space::euclidean(1)), Point(), {}};
    e.map = parse_map(need(j, "map", "entropy job"), e.space);
    if (!e.map.is_self_map()) throw InvalidInput("entropy job: map must be a self-map");
    e.x0 = parse_point(need(j, "x0", "entropy job"), e.space);
    e.schedule = parse_schedule(need(j, "schedule", "entropy job"));
    e.schedule.options.budget = budget;
    validate_schedule(e.schedule);
    return Job{label, std::move(e)};
  }
  if (type == "bcd") {
    check_keys(j, {"type", "label", "space", "center", "radius", "box", "epsilons", "spacing_factor"}, "bcd job");
    BcdJob b{parse_space(need(j, "space", "bcd job")), {}, {}, 0.25};
    b.region.center = parse_point(need(j, "center", "bcd job"), b.space);
    b.region.radius = parse_number(need(j, "radius", "bcd job"));
    if (j.contains("box")) {
      const Json& box = j["box"];
      if (!box.is_array() || box.size() != 2) throw InvalidInput("bcd box: expected [lo, hi]");
      b.region.box = std::make_pair(numbers(box[0], "box lo"), numbers(box[1], "box hi"));
    }
    b.epsilons = numbers(need(j, "epsilons", "bcd job"), "epsilons");
    if (j.contains("spacing_factor")) b.spacing_factor = parse_number(j["spacing_factor"]);
    return Job{label, std::move(b)};
  }
  if (type == "conjugacy") {
    check_keys(j, {"type", "label", "X", "Y", "f", "g", "phi", "psi", "radii", "spacing"}, "conjugacy job");
    const Space X = parse_space(need(j, "X", "conjugacy job"));
    const Space Y = j.contains("Y") ? parse_space(j["Y"]) : X;
    return Job{label, ConjugacyJob{parse_map(need(j, "f", "conjugacy job"), X), parse_map(need(j, "g", "conjugacy job"), Y),
                            parse_cert(need(j, "phi", "conjugacy job"), X), parse_cert(need(j, "psi", "conjugacy job"), Y),
                            radii(need(j, "radii", "conjugacy job")), positive(need(j, "spacing", "conjugacy job"), "spacing")}};
  }
  if (type == "defect") {
    check_keys(j, {"type", "label", "space", "f1", "f2", "radii", "spacing"}, "defect job");
    const Space X = parse_space(need(j, "space", "defect job"));
    return Job{label, DefectJob{parse_map(need(j, "f1", "defect job"), X), parse_map(need(j, "f2", "defect job"), X),
                         radii(need(j, "radii", "defect job")), positive(need(j, "spacing", "defect job"), "spacing")}};
  }
  if (type == "product") {
    check_keys(j, {"type", "label", "left", "right", "n", "delta", "spacing", "R"}, "product job");
    auto side = [&](const char* key) {
      const Json& s = need(j, key, "product job");
      check_keys(s, {"space", "map", "x0"}, std::string("product ") + key);
      const Space sp = parse_space(need(s, "space", key));
      return std::make_pair(parse_map(need(s, "map", key), sp), parse_point(need(s, "x0", key), sp));
    };
    auto [lm, lx] = side("left");
    auto [rm, rx] = j.contains("right") ? side("right") : std::make_pair(lm, lx);
    ProductJob p{lm, rm, lx, rx, static_cast<int>(integer(need(j, "n", "product job"), "n")),
                 positive(need(j, "delta", "product job"), "delta"), positive(need(j, "spacing", "product job"), "spacing"),
                 radii(need(j, "R", "product job"))};
    if (p.n < 1) throw InvalidInput("product job: n must be >= 1");
    return Job{label, std::move(p)};
  }
  if (type == "embedding") {
    check_keys(j, {"type", "label", "domain", "codomain", "cert", "radius", "samples", "density_radius", "density_spacing"},
               "embedding job");
    const Space X = parse_space(need(j, "domain", "embedding job"));
    Json cert = need(j, "cert", "embedding job");
    if (j.contains("codomain") && !cert["map"].contains("codomain")) cert["map"]["codomain"] = j["codomain"];
    EmbeddingJob e{parse_cert(cert, X), positive(need(j, "radius", "embedding job"), "radius"), 1000, std::nullopt, 1.0};
    if (j.contains("samples")) e.samples = size_value(j["samples"], "samples");
    if (j.contains("density_radius")) e.density_radius = positive(j["density_radius"], "density_radius");
    if (j.contains("density_spacing")) e.density_spacing = positive(j["density_spacing"], "density_spacing");
    return Job{label, std::move(e)};
  }
  throw InvalidInput("unknown job type '" + type + "'");
}

}  // namespace

double parse_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      double a = 0.0, b = 0.0;
      const auto [pa, ea] = std::from_chars(s.data(), s.data() + slash, a);
      const auto [pb, eb] = std::from_chars(s.data() + slash + 1, s.data() + s.size(), b);
      if (ea == std::errc() && eb == std::errc() && pa == s.data() + slash && pb == s.data() + s.size() && b != 0.0)
        return a / b;
    }
    throw InvalidInput("not a decimal number: '" + s + "'");
  }
  throw InvalidInput("expected a number or a decimal string");
}

Space parse_space(const Json& j) {
  if (!j.is_object()) throw InvalidInput("space: expected an object");
  const std::string kind = str(need(j, "kind", "space"), "space kind");
  if (kind == "euclidean") {
    check_keys(j, {"kind", "q"}, "euclidean space");
    return Space::euclidean(size_value(need(j, "q", "euclidean space"), "q"));
  }
  if (kind == "integers") {
    check_keys(j, {"kind", "q"}, "integers space");
    return Space::integers(size_value(need(j, "q", "integers space"), "q"));
  }
  if (kind == "halfplane") {
    check_keys(j, {"kind"}, "halfplane space");
    return Space::halfplane();
  }
  if (kind == "half_line") {
    check_keys(j, {"kind", "lower"}, "half_line space");
    return Space::half_line(parse_number(need(j, "lower", "half_line space")));
  }
  if (kind == "cone") {
    check_keys(j, {"kind", "q", "base", "tolerance"}, "cone space");
    const double tol = j.contains("tolerance") ? parse_number(j["tolerance"]) : 1e-9;
    return Space::cone(size_value(need(j, "q", "cone space"), "q"), parse_base(need(j, "base", "cone space")), tol);
  }
  if (kind == "chain") {
    check_keys(j, {"kind", "rule", "blocks"}, "chain space");
    return Space::chain(parse_rule(str(need(j, "rule", "chain space"), "rule")),
                        size_value(need(j, "blocks", "chain space"), "blocks"));
  }
  if (kind == "spider") {
    check_keys(j, {"kind", "max_level"}, "spider space");
    return Space::spider(static_cast<std::size_t>(integer(need(j, "max_level", "spider space"), "max_level")));
  }
  if (kind == "product") {
    check_keys(j, {"kind", "left", "right"}, "product space");
    return Space::product(parse_space(need(j, "left", "product space")), parse_space(need(j, "right", "product space")));
  }
  throw InvalidInput("unknown space kind '" + kind + "'");
}

Map parse_map(const Json& j, const Space& domain) {
  if (!j.is_object()) throw InvalidInput("map: expected an object");
  const std::string kind = str(need(j, "kind", "map"), "map kind");
  auto codomain = [&]() { return j.contains("codomain") ? parse_space(j["codomain"]) : domain; };
  Map m = Map::identity(domain);
  if (kind == "identity") {
    check_keys(j, {"kind", "declared"}, "identity map");
  } else if (kind == "linear") {
    check_keys(j, {"kind", "matrix", "declared"}, "linear map");
    const Matrix a = matrix(need(j, "matrix", "linear map"));
    if (domain.kind() == Space::Kind::Euclidean)
      m = Map::linear(a);
    else
      m = Map::affine(domain, domain, a, std::vector<double>(a.size(), 0.0));
    if (!(m.domain() == domain)) throw InvalidInput("linear map: matrix size does not match the space");
  } else if (kind == "affine") {
    check_keys(j, {"kind", "matrix", "offset", "codomain", "declared"}, "affine map");
    m = Map::affine(domain, codomain(), matrix(need(j, "matrix", "affine map")), numbers(need(j, "offset", "affine map"), "offset"));
  } else if (kind == "homothety") {
    check_keys(j, {"kind", "lambda", "declared"}, "homothety map");
    m = Map::homothety(domain, parse_number(need(j, "lambda", "homothety map")));
  } else if (kind == "chain_linear") {
    check_keys(j, {"kind", "declared"}, "chain_linear map");
    m = Map::chain_linear(domain);
  } else if (kind == "conjugated_doubling") {
    check_keys(j, {"kind", "declared"}, "conjugated_doubling map");
    m = Map::conjugated_doubling();
    if (!(m.domain() == domain)) throw InvalidInput("conjugated_doubling lives on the half-plane");
  } else if (kind == "iterate") {
    check_keys(j, {"kind", "base", "k", "declared"}, "iterate map");
    m = Map::iterate(parse_map(need(j, "base", "iterate map"), domain),
                     static_cast<int>(integer(need(j, "k", "iterate map"), "k")));
  } else if (kind == "product") {
    check_keys(j, {"kind", "left", "right", "declared"}, "product map");
    if (domain.kind() != Space::Kind::Product) throw InvalidInput("product map needs a product space");
    m = Map::product(parse_map(need(j, "left", "product map"), domain.left()),
                     parse_map(need(j, "right", "product map"), domain.right()));
  } else if (kind == "power") {
    check_keys(j, {"kind", "exponent", "declared"}, "power map");
    m = Map::power(domain, parse_number(need(j, "exponent", "power map")));
  } else if (kind == "polynomial") {
    check_keys(j, {"kind", "coeffs", "inverse_coeffs", "codomain", "declared"}, "polynomial map");
    m = Map::polynomial(domain, codomain(), numbers(need(j, "coeffs", "polynomial map"), "coeffs"),
                        j.contains("inverse_coeffs") ? numbers(j["inverse_coeffs"], "inverse_coeffs") : std::vector<double>{});
  } else if (kind == "compose") {
    check_keys(j, {"kind", "outer", "inner", "declared"}, "compose map");
    const Map inner = parse_map(need(j, "inner", "compose map"), domain);
    m = Map::compose(parse_map(need(j, "outer", "compose map"), inner.codomain()), inner);
  } else {
    throw InvalidInput("unknown map kind '" + kind + "'");
  }
  return with_declared(j, m);
}

ControlFunction parse_control(const Json& j) {
  if (!j.is_object()) throw InvalidInput("control: expected an object");
  const std::string kind = str(need(j, "kind", "control"), "control kind");
  if (kind == "affine") {
    check_keys(j, {"kind", "a", "b"}, "affine control");
    return ControlFunction::affine(parse_number(need(j, "a", "affine control")),
                                   j.contains("b") ? parse_number(j["b"]) : 0.0);
  }
  if (kind == "power_affine") {
    check_keys(j, {"kind", "a", "b", "p"}, "power_affine control");
    return ControlFunction::power_affine(parse_number(need(j, "a", "power_affine control")),
                                         j.contains("b") ? parse_number(j["b"]) : 0.0,
                                         parse_number(need(j, "p", "power_affine control")));
  }
  if (kind == "table") {
    check_keys(j, {"kind", "knots", "tail_slope"}, "table control");
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : need(j, "knots", "table control")) {
      const auto v = numbers(k, "knot");
      if (v.size() != 2) throw InvalidInput("table control: knots are [t, L(t)] pairs");
      knots.emplace_back(v[0], v[1]);
    }
    return ControlFunction::table(std::move(knots), parse_number(need(j, "tail_slope", "table control")));
  }
  throw InvalidInput("unknown control kind '" + kind + "'");
}

Point parse_point(const Json& j, const Space& space) {
  Point p;
  if (j.is_string() && j.get<std::string>() == "origin") {
    p = space.origin();
  } else if (j.is_array()) {
    p = Point(0, numbers(j, "point"));
  } else if (j.is_object()) {
    check_keys(j, {"chart", "coords"}, "point");
    p = Point(static_cast<std::size_t>(integer(need(j, "chart", "point"), "chart")), numbers(need(j, "coords", "point"), "coords"));
  } else {
    throw InvalidInput("point: expected an array, an object or \"origin\"");
  }
  if (!space.contains(p)) throw InvalidInput("point is not a member of its space");
  return p;
}

const char* job_type_name(const JobTask& t) {
  static constexpr const char* names[] = {"entropy", "bcd", "conjugacy", "defect", "product", "embedding"};
  return names[t.index()];
}

ExperimentConfig parse_config(const Json& doc) {
  check_keys(doc, {"schema", "name", "preset", "seed", "budget", "outputs", "jobs"}, "config");
  const std::string schema = str(need(doc, "schema", "config"), "schema");
  if (schema != kConfigSchema) throw InvalidInput("unsupported config schema '" + schema + "'");
  ExperimentConfig cfg;
  cfg.source = doc;
  cfg.name = doc.contains("name") ? str(doc["name"], "name") : "experiment";
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos)
    throw InvalidInput("config name must be a nonempty file stem");
  if (doc.contains("preset")) cfg.preset = str(doc["preset"], "preset");
  if (doc.contains("seed")) cfg.seed = static_cast<std::uint64_t>(integer(doc["seed"], "seed"));
  if (doc.contains("budget")) cfg.budget = size_value(doc["budget"], "budget");
  if (doc.contains("outputs")) {
    check_keys(doc["outputs"], {"dir"}, "outputs");
    if (doc["outputs"].contains("dir")) cfg.output_dir = str(doc["outputs"]["dir"], "outputs dir");
  }
  const Json& jobs = need(doc, "jobs", "config");
  if (!jobs.is_array() || jobs.empty()) throw InvalidInput("config: jobs must be a nonempty array");
  for (const auto& j : jobs) cfg.jobs.push_back(parse_job(j, cfg.budget));
  for (std::size_t i = 0; i < cfg.jobs.size(); ++i)
    for (std::size_t k = i + 1; k < cfg.jobs.size(); ++k)
      if (cfg.jobs[i].label == cfg.jobs[k].label) throw InvalidInput("duplicate job label '" + cfg.jobs[i].label + "'");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

std::optional<std::size_t> budget_from_env() {
  const char* v = std::getenv("ORBIT_BUDGET");
  if (!v || !*v) return std::nullopt;
  std::size_t b = 0;
  const std::string s(v);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), b);
  if (ec != std::errc() || p != s.data() + s.size() || b == 0) throw InvalidInput("ORBIT_BUDGET must be a positive integer");
  return b;
}

void apply_budget(ExperimentConfig& cfg, std::size_t budget) {
  if (budget == 0) throw InvalidInput("budget must be positive");
  cfg.budget = budget;
  for (auto& job : cfg.jobs)
    if (auto* e = std::get_if<EntropyJob>(&job.task)) e->schedule.options.budget = budget;
}

std::string config_hash(const Json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace coarsent
