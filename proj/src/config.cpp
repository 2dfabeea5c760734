#include "helmqmc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace helmqmc {

namespace {

using nlohmann::json;

const std::vector<std::pair<RunKind, std::string>>& kind_names() {
  static const std::vector<std::pair<RunKind, std::string>> names{
      {RunKind::farfield_expectation, "farfield_expectation"},
      {RunKind::dim_truncation_study, "dim_truncation_study"},
      {RunKind::fem_convergence, "fem_convergence"},
      {RunKind::pml_sweep, "pml_sweep"},
      {RunKind::verify_hankel, "verify_hankel"},
      {RunKind::constants_report, "constants_report"}};
  return names;
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + "." + key + ": wrong type");
  }
}

std::vector<MeshOptions::Refinement> read_refinements(const json& obj, const char* key,
                                                       std::vector<MeshOptions::Refinement> fallback,
                                                       const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array()) throw ValidationError(where + "." + key + ": expected a list of [from, to, factor]");
  std::vector<MeshOptions::Refinement> out;
  for (const auto& item : *it) {
    if (!item.is_array() || item.size() != 3) throw ValidationError(where + "." + key + ": entries are [from, to, factor]");
    try {
      out.push_back({item[0].get<double>(), item[1].get<double>(), item[2].get<double>()});
    } catch (const json::exception&) {
      throw ValidationError(where + "." + key + ": entries must be numbers");
    }
  }
  return out;
}

json refinements_json(const std::vector<MeshOptions::Refinement>& r) {
  json out = json::array();
  for (const auto& x : r) out.push_back({x.from, x.to, x.factor});
  return out;
}

bool power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

void check_refinements(const std::vector<MeshOptions::Refinement>& r, const std::string& where) {
  for (const auto& x : r)
    require(x.from < x.to && x.factor > 0.0 && std::isfinite(x.factor), where + ": refinement needs from < to and factor > 0");
}

}  // namespace

std::string to_string(RunKind kind) {
  for (const auto& [k, name] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

RunKind run_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kind_names())
    if (n == name) return k;
  throw ValidationError("unknown run kind '" + name + "'");
}

StarObstacle make_obstacle(const GeometryConfig& g) {
  if (g.obstacle == "circle") return StarObstacle::circle(g.circle_radius);
  if (g.obstacle != "butterfly" || g.butterfly.size() != 3) throw ValidationError("unsupported obstacle");
  const double a = g.butterfly[0], b = g.butterfly[1], c = g.butterfly[2];
  return StarObstacle(
      [a, b, c](double t) {
        const double st = std::sin(t);
        return (a + st * st) * (b + c * std::cos(2.0 * t));
      },
      "butterfly");
}

std::vector<double> ExperimentConfig::knots() const {
  const double r0 = geometry.R0, eta = geometry.eta;
  return {r0 - 1.5 * eta, r0 - eta, r0 - 0.5 * eta, r0, geometry.R1};
}

void ExperimentConfig::validate() const {
  require(std::isfinite(k) && k > 0.0, "wavenumber must be positive");
  require(incident_direction.allFinite() && incident_direction.norm() > 0.0, "incident_direction must be nonzero");

  const auto& g = geometry;
  require(g.obstacle == "butterfly" || g.obstacle == "circle", "geometry.obstacle must be butterfly or circle");
  double r_max = 0.0;
  if (g.obstacle == "butterfly") {
    require(g.butterfly.size() == 3, "geometry.butterfly needs three coefficients");
    const double a = g.butterfly[0], b = g.butterfly[1], c = g.butterfly[2];
    require(a > 0.0 && b > std::abs(c), "geometry.butterfly: radius must stay positive");
  } else {
    require(g.circle_radius > 0.0, "geometry.circle_radius must be positive");
  }
  r_max = make_obstacle(g).r_max();
  require(g.eta > 0.0, "geometry.eta must be positive");
  const std::vector<double> radii{r_max, g.R0 - 1.5 * g.eta, g.R0 - g.eta, g.R0 - 0.5 * g.eta, g.R0, g.R1, g.R2};
  for (std::size_t i = 1; i < radii.size(); ++i)
    require(radii[i] > radii[i - 1],
            "geometry radii must increase: obstacle < R0-3eta/2 < R0-eta < R0-eta/2 < R0 < R1 < R2");
  require(g.pml_scale > 0.0, "geometry.pml_scale must be positive");

  require(field.n0 > 0.0 && field.xi_n >= 0.0 && field.q > 1.0, "field: need n0 > 0, xi_n >= 0, q > 1");
  require(field.s >= 1 && field.s <= 64, "field.s must lie in [1, 64]");

  require(fem.n_theta >= 8 && fem.n_theta % 2 == 0, "fem.n_theta must be even and at least 8");
  require(fem.n_radial == 0 || fem.n_radial >= 2, "fem.n_radial must be 0 (automatic) or at least 2");
  require(fem.degree == 1 || fem.degree == 2, "fem.degree must be 1 or 2");
  require(fem.solver_tol > 0.0 && fem.solver_tol <= 1e-6, "fem.solver_tol must lie in (0, 1e-6]");
  require(fem.quad_degree >= 0 && fem.quad_degree <= 6, "fem.quad_degree must lie in [0, 6]");
  check_refinements(fem.refinements, "fem.refinements");

  require(!qmc.N.empty(), "qmc.N must not be empty");
  for (auto n : qmc.N) require(power_of_two(n) && n >= 8, "qmc.N entries must be powers of 2 and at least 8");
  for (std::size_t i = 1; i < qmc.N.size(); ++i) require(qmc.N[i] > qmc.N[i - 1], "qmc.N must be increasing");
  require(qmc.L >= 2, "qmc.L must be at least 2");
  require(qmc.lambda > 0.5 && qmc.lambda <= 1.0, "qmc.lambda must lie in (1/2, 1]");
  if (qmc.beta_scale) require(*qmc.beta_scale > 0.0, "qmc.beta_scale must be positive");
  require(!qmc.cache_dir.empty(), "qmc.cache_dir must not be empty");
  require(static_cast<std::int64_t>(field.s) <= qmc.N.back() / 4,
          "field.s must not exceed N/4 so that distinct odd components exist");

  require(!truncation.s_list.empty(), "truncation.s_list must not be empty");
  for (std::size_t i = 0; i < truncation.s_list.size(); ++i) {
    require(truncation.s_list[i] >= 1 && truncation.s_list[i] <= 64, "truncation.s_list entries must lie in [1, 64]");
    if (i) require(truncation.s_list[i] > truncation.s_list[i - 1], "truncation.s_list must be increasing");
  }
  require(power_of_two(truncation.N) && truncation.N >= 8, "truncation.N must be a power of 2, at least 8");
  require(static_cast<std::int64_t>(truncation.s_list.back()) <= truncation.N / 4,
          "truncation.s_list must not exceed N/4");
  require(truncation.circle_radius > 0.0 && truncation.circle_radius < g.R1,
          "truncation.circle_radius must lie inside the physical region");

  const auto& v = verification;
  require(!v.n_theta.empty(), "verification.n_theta must not be empty");
  for (int n : v.n_theta) require(n >= 8 && n % 2 == 0, "verification.n_theta entries must be even and at least 8");
  require(v.chi_eta > 0.0 && v.chi_r0 - 0.5 * v.chi_eta > 0.0 && v.chi_r0 < g.R0 - 0.5 * g.eta,
          "verification: oracle cutoff must reach 1 inside R0 - eta/2");
  check_refinements(v.refinements, "verification.refinements");
  check_refinements(v.pml_refinements, "verification.pml_refinements");
  require(!v.pml_widths.empty(), "verification.pml_widths must not be empty");
  for (double w : v.pml_widths) require(w > 0.0, "verification.pml_widths must be positive");
  require(v.pml_n_theta >= 8 && v.pml_n_theta % 2 == 0, "verification.pml_n_theta must be even and at least 8");

  const auto& a = analysis;
  require(a.mu_A > 0.0 && a.mu_n > 0.0 && a.k0 > 0.0, "analysis: mu_A, mu_n and k0 must be positive");
  require(a.p > 0.0 && a.p < 1.0, "analysis.p must lie in (0, 1)");
  require(a.delta > 0.0 && a.delta < 1.0, "analysis.delta must lie in (0, 1)");
  require(a.tau >= 1, "analysis.tau must be at least 1");
  require(a.h >= 0.0 && a.farfield_budget > 0.0, "analysis: h >= 0 and farfield_budget > 0");
  require(a.budget_s >= 1 && a.budget_N >= 1, "analysis: budget_s and budget_N must be positive");
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  check_keys(doc, "config",
             {"kind", "name", "output_dir", "wavenumber", "incident_direction", "workers", "geometry", "field", "fem",
              "qmc", "truncation", "verification", "analysis"});
  if (!doc.contains("kind")) throw ValidationError("config: missing 'kind'");
  std::string kind;
  read(doc, "kind", kind, "config");
  cfg.kind = run_kind_from_string(kind);
  read(doc, "name", cfg.name, "config");
  read(doc, "output_dir", cfg.output_dir, "config");
  read(doc, "wavenumber", cfg.k, "config");
  read(doc, "workers", cfg.workers, "config");
  if (doc.contains("incident_direction")) {
    std::vector<double> d;
    read(doc, "incident_direction", d, "config");
    if (d.size() != 2) throw ValidationError("config.incident_direction needs two components");
    cfg.incident_direction = Vec2(d[0], d[1]);
  }

  if (doc.contains("geometry")) {
    const json& g = doc["geometry"];
    if (g.is_object() && g.empty()) throw ValidationError("geometry: empty override");
    check_keys(g, "geometry", {"obstacle", "butterfly", "circle_radius", "R0", "eta", "R1", "R2", "pml_scale"});
    auto& o = cfg.geometry;
    read(g, "obstacle", o.obstacle, "geometry");
    read(g, "butterfly", o.butterfly, "geometry");
    read(g, "circle_radius", o.circle_radius, "geometry");
    read(g, "R0", o.R0, "geometry");
    read(g, "eta", o.eta, "geometry");
    read(g, "R1", o.R1, "geometry");
    read(g, "R2", o.R2, "geometry");
    read(g, "pml_scale", o.pml_scale, "geometry");
  }
  if (doc.contains("field")) {
    const json& f = doc["field"];
    check_keys(f, "field", {"n0", "xi_n", "q", "s"});
    read(f, "n0", cfg.field.n0, "field");
    read(f, "xi_n", cfg.field.xi_n, "field");
    read(f, "q", cfg.field.q, "field");
    read(f, "s", cfg.field.s, "field");
  }
  if (doc.contains("fem")) {
    const json& f = doc["fem"];
    check_keys(f, "fem", {"n_theta", "n_radial", "degree", "solver_tol", "quad_degree", "pollution_limit", "refinements"});
    read(f, "n_theta", cfg.fem.n_theta, "fem");
    read(f, "n_radial", cfg.fem.n_radial, "fem");
    read(f, "degree", cfg.fem.degree, "fem");
    read(f, "solver_tol", cfg.fem.solver_tol, "fem");
    read(f, "quad_degree", cfg.fem.quad_degree, "fem");
    read(f, "pollution_limit", cfg.fem.pollution_limit, "fem");
    cfg.fem.refinements = read_refinements(f, "refinements", cfg.fem.refinements, "fem");
  }
  if (doc.contains("qmc")) {
    const json& q = doc["qmc"];
    check_keys(q, "qmc", {"N", "L", "seed", "cache_dir", "lambda", "beta_scale"});
    read(q, "N", cfg.qmc.N, "qmc");
    read(q, "L", cfg.qmc.L, "qmc");
    read(q, "seed", cfg.qmc.seed, "qmc");
    read(q, "cache_dir", cfg.qmc.cache_dir, "qmc");
    read(q, "lambda", cfg.qmc.lambda, "qmc");
    if (q.contains("beta_scale") && !q["beta_scale"].is_null()) {
      double v = 0.0;
      read(q, "beta_scale", v, "qmc");
      cfg.qmc.beta_scale = v;
    }
  }
  if (doc.contains("truncation")) {
    const json& t = doc["truncation"];
    check_keys(t, "truncation", {"s_list", "N", "circle_radius"});
    read(t, "s_list", cfg.truncation.s_list, "truncation");
    read(t, "N", cfg.truncation.N, "truncation");
    read(t, "circle_radius", cfg.truncation.circle_radius, "truncation");
  }
  if (doc.contains("verification")) {
    const json& v = doc["verification"];
    check_keys(v, "verification",
               {"n_theta", "chi_r0", "chi_eta", "refinements", "pml_widths", "pml_n_theta", "pml_refinements"});
    auto& o = cfg.verification;
    read(v, "n_theta", o.n_theta, "verification");
    read(v, "chi_r0", o.chi_r0, "verification");
    read(v, "chi_eta", o.chi_eta, "verification");
    o.refinements = read_refinements(v, "refinements", o.refinements, "verification");
    read(v, "pml_widths", o.pml_widths, "verification");
    read(v, "pml_n_theta", o.pml_n_theta, "verification");
    o.pml_refinements = read_refinements(v, "pml_refinements", o.pml_refinements, "verification");
  }
  if (doc.contains("analysis")) {
    const json& a = doc["analysis"];
    check_keys(a, "analysis",
               {"mu_A", "mu_n", "k0", "p", "delta", "tau", "farfield_budget", "h", "budget_s", "budget_N"});
    auto& o = cfg.analysis;
    read(a, "mu_A", o.mu_A, "analysis");
    read(a, "mu_n", o.mu_n, "analysis");
    read(a, "k0", o.k0, "analysis");
    read(a, "p", o.p, "analysis");
    read(a, "delta", o.delta, "analysis");
    read(a, "tau", o.tau, "analysis");
    read(a, "farfield_budget", o.farfield_budget, "analysis");
    read(a, "h", o.h, "analysis");
    read(a, "budget_s", o.budget_s, "analysis");
    read(a, "budget_N", o.budget_N, "analysis");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["kind"] = to_string(cfg.kind);
  doc["name"] = cfg.name;
  doc["output_dir"] = cfg.output_dir;
  doc["wavenumber"] = cfg.k;
  doc["incident_direction"] = {cfg.incident_direction.x(), cfg.incident_direction.y()};
  doc["workers"] = cfg.workers;
  const auto& g = cfg.geometry;
  doc["geometry"] = {{"obstacle", g.obstacle}, {"butterfly", g.butterfly}, {"circle_radius", g.circle_radius},
                     {"R0", g.R0},             {"eta", g.eta},             {"R1", g.R1},
                     {"R2", g.R2},             {"pml_scale", g.pml_scale}};
  doc["field"] = {{"n0", cfg.field.n0}, {"xi_n", cfg.field.xi_n}, {"q", cfg.field.q}, {"s", cfg.field.s}};
  const auto& f = cfg.fem;
  doc["fem"] = {{"n_theta", f.n_theta},         {"n_radial", f.n_radial},
                {"degree", f.degree},           {"solver_tol", f.solver_tol},
                {"quad_degree", f.quad_degree}, {"pollution_limit", f.pollution_limit},
                {"refinements", refinements_json(f.refinements)}};
  const auto& q = cfg.qmc;
  doc["qmc"] = {{"N", q.N},           {"L", q.L},
                {"seed", q.seed},     {"cache_dir", q.cache_dir},
                {"lambda", q.lambda}, {"beta_scale", q.beta_scale ? json(*q.beta_scale) : json(nullptr)}};
  doc["truncation"] = {{"s_list", cfg.truncation.s_list},
                       {"N", cfg.truncation.N},
                       {"circle_radius", cfg.truncation.circle_radius}};
  const auto& v = cfg.verification;
  doc["verification"] = {{"n_theta", v.n_theta},
                         {"chi_r0", v.chi_r0},
                         {"chi_eta", v.chi_eta},
                         {"refinements", refinements_json(v.refinements)},
                         {"pml_widths", v.pml_widths},
                         {"pml_n_theta", v.pml_n_theta},
                         {"pml_refinements", refinements_json(v.pml_refinements)}};
  const auto& a = cfg.analysis;
  doc["analysis"] = {{"mu_A", a.mu_A},       {"mu_n", a.mu_n},
                     {"k0", a.k0},           {"p", a.p},
                     {"delta", a.delta},     {"tau", a.tau},
                     {"farfield_budget", a.farfield_budget}, {"h", a.h},
                     {"budget_s", a.budget_s}, {"budget_N", a.budget_N}};
  return doc;
}

}  // namespace helmqmc
