#include "helmqmc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "helmqmc/analysis.hpp"

namespace helmqmc {

namespace fs = std::filesystem;
using nlohmann::json;

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more pairs");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("loglog_slope: x values coincide");
  return (n * sxy - sx * sy) / denom;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << std::endl;
}

RandomFieldSpec make_field(const ExperimentConfig& cfg) {
  RandomFieldSpec f;
  f.n0 = cfg.field.n0;
  f.xi_n = cfg.field.xi_n;
  f.q = cfg.field.q;
  f.fluc_profile = RadialProfile::fluc(cfg.geometry.R0, cfg.geometry.eta);
  f.validate();
  return f;
}

FemOptions fem_options(const ExperimentConfig& cfg) {
  FemOptions o;
  o.quad_degree = cfg.fem.quad_degree;
  o.pollution_limit = cfg.fem.pollution_limit;
  return o;
}

Vec2 unit_direction(const ExperimentConfig& cfg) { return cfg.incident_direction.normalized(); }

std::vector<double> oracle_knots(const ExperimentConfig& cfg) {
  const auto& v = cfg.verification;
  return {v.chi_r0 - 0.5 * v.chi_eta, v.chi_r0, cfg.geometry.R0 - 0.5 * cfg.geometry.eta, cfg.geometry.R0,
          cfg.geometry.R1};
}

// Manufactured Hankel oracle on the disk of radius r2 with PML [R1, r2].
OracleLevel solve_oracle(const ExperimentConfig& cfg, int n_theta, double r2,
                         const std::vector<MeshOptions::Refinement>& refinements, FarFieldPattern* pattern) {
  const double k = cfg.k;
  const double r1 = cfg.geometry.R1;
  MeshOptions opt;
  opt.knots = oracle_knots(cfg);
  opt.refinements = refinements;
  auto mesh = std::make_shared<const TriMesh>(mesh_disk(r2, n_theta, 0, opt));
  auto space = std::make_shared<const FeSpace>(mesh, cfg.fem.degree);
  RandomFieldSpec field = make_field(cfg);
  field.xi_n = 0.0;
  HelmholtzAssembler assembler(space, PmlProfile(r1, r2, cfg.geometry.pml_scale), field, k, fem_options(cfg));
  const RadialProfile chi = RadialProfile::ffp(cfg.verification.chi_r0, cfg.verification.chi_eta);
  const DiscreteField u =
      solve(assemble(assembler, ParamVector(), build_load(*space, LoadSpec::oracle(k, chi))), assembler,
            cfg.fem.solver_tol);
  const auto exact = [&](const Point2& x) {
    const OracleSample o = exact_oracle(k, chi, x);
    return FieldValue{o.w, o.grad_w};
  };
  const ErrorNorms err = error_norms(u, exact, r1, assembler.quad_degree());
  if (pattern) {
    const RadialProfile ffp = RadialProfile::ffp(cfg.geometry.R0, cfg.geometry.eta);
    *pattern = FarFieldOperator(*space, ffp, k, default_angles(), assembler.quad_degree()).apply(u.coefficients);
  }
  OracleLevel level;
  level.n_theta = n_theta;
  level.h_max = mesh->h_max();
  level.dofs = space->free_count();
  level.rel_l2 = err.relative_l2();
  level.rel_h1 = err.relative_h1();
  return level;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& text) {
    write_text_atomic(dir_ / name, text);
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }
  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string pattern_csv(const FarFieldPattern& p) {
  std::ostringstream os;
  write_farfield_csv(os, p);
  return os.str();
}

std::string oracle_csv(const std::vector<OracleLevel>& levels) {
  std::string s = "n_theta,h_max,dofs,rel_l2,rel_h1\n";
  for (const auto& l : levels)
    s += std::to_string(l.n_theta) + "," + fmt(l.h_max) + "," + std::to_string(l.dofs) + "," + fmt(l.rel_l2) + "," +
         fmt(l.rel_h1) + "\n";
  return s;
}

}  // namespace

ScatteringModel::ScatteringModel(const ExperimentConfig& cfg, std::ostream* log)
    : tol_(cfg.fem.solver_tol), field_(make_field(cfg)) {
  Stopwatch sw;
  const StarObstacle obstacle = make_obstacle(cfg.geometry);
  MeshOptions opt;
  opt.knots = cfg.knots();
  opt.refinements = cfg.fem.refinements;
  mesh_ = std::make_shared<const TriMesh>(mesh_annulus(obstacle, cfg.geometry.R2, cfg.fem.n_theta, cfg.fem.n_radial, opt));
  space_ = std::make_shared<const FeSpace>(mesh_, cfg.fem.degree);
  assembler_ = std::make_unique<HelmholtzAssembler>(
      space_, PmlProfile(cfg.geometry.R1, cfg.geometry.R2, cfg.geometry.pml_scale), field_, cfg.k, fem_options(cfg));
  const PlaneWave wave(cfg.k, unit_direction(cfg));
  load_ = assembler_->restrict_to_free(
      build_load(*space_, LoadSpec::plane_wave(wave, RadialProfile::alt(cfg.geometry.R0, cfg.geometry.eta))));
  farfield_ = std::make_unique<FarFieldOperator>(*space_, RadialProfile::ffp(cfg.geometry.R0, cfg.geometry.eta), cfg.k,
                                                 default_angles(), assembler_->quad_degree());
  std::ostringstream os;
  os << "mesh: " << mesh_->vertex_count() << " vertices, " << mesh_->triangle_count() << " triangles, h_max "
     << mesh_->h_max() << "; " << space_->free_count() << " free dofs; setup " << std::setprecision(3) << sw.seconds()
     << " s";
  note(log, os.str());
}

VectorC ScatteringModel::solve(const ParamVector& y, SparseSolver& solver) const {
  return assembler_->extend_to_full(solver.solve(assembler_->matrix(y), load_, tol_));
}

PodWeights config_weights(const ExperimentConfig& cfg, std::size_t s) {
  std::vector<double> beta(s);
  const double scale = cfg.qmc.beta_scale.value_or(1.0);
  for (std::size_t j = 0; j < s; ++j) beta[j] = scale * std::pow(static_cast<double>(j + 1), -cfg.field.q);
  return PodWeights(cfg.qmc.lambda, std::move(beta));
}

FarFieldStudy farfield_study(const ExperimentConfig& cfg, std::size_t workers, std::ostream* log) {
  FarFieldStudy study;
  study.angles = default_angles();
  const ScatteringModel model(cfg, log);
  const std::size_t s = cfg.field.s;
  {
    SparseSolver solver;
    study.homogeneous = model.far_field(model.solve(ParamVector(std::vector<double>(s, 0.0)), solver));
  }
  const std::int64_t n_max = cfg.qmc.N.back();
  study.rule = cached_cbc(cfg.qmc.cache_dir, s, n_max, config_weights(cfg, s));

  workers = std::max<std::size_t>(1, workers);
  std::vector<std::unique_ptr<SparseSolver>> solvers;
  for (std::size_t w = 0; w < workers; ++w) solvers.push_back(std::make_unique<SparseSolver>());
  Stopwatch sw;
  std::atomic<std::size_t> done{0};
  const std::size_t total = static_cast<std::size_t>(n_max) * cfg.qmc.L;
  const Integrand integrand = [&](const ParamVector& y, std::size_t worker) {
    auto values = model.far_field(model.solve(y, *solvers[worker])).values;
    const std::size_t d = ++done;
    if (log && (d % std::max<std::size_t>(1, total / 20) == 0 || d == total)) {
      std::ostringstream os;
      os << "solves " << d << "/" << total << " (" << std::setprecision(4) << sw.seconds() << " s)";
      note(log, os.str());
    }
    return values;
  };
  study.estimates = qmc_estimate_nested(study.rule, cfg.qmc.N, cfg.qmc.L, cfg.qmc.seed, integrand, workers);

  std::vector<double> ns;
  for (std::int64_t n : cfg.qmc.N) {
    study.median_stderr.push_back(median(study.estimates.at(n).std_error));
    ns.push_back(static_cast<double>(n));
  }
  if (ns.size() >= 2 && std::all_of(study.median_stderr.begin(), study.median_stderr.end(), [](double v) { return v > 0.0; }))
    study.stderr_slope = loglog_slope(ns, study.median_stderr);
  else
    study.stderr_slope = std::numeric_limits<double>::quiet_NaN();
  return study;
}

TruncationStudy truncation_study(const ExperimentConfig& cfg, std::size_t workers, std::ostream* log) {
  TruncationStudy study;
  study.angles = default_angles();
  study.s_list = cfg.truncation.s_list;
  const ScatteringModel model(cfg, log);
  const CircleSampler sampler(model.space(), cfg.truncation.circle_radius, study.angles);
  const std::size_t s_ref = study.s_list.back();
  // CBC is sequential, so the rule for s is the leading part of the s_ref rule.
  const LatticeRule full = cached_cbc(cfg.qmc.cache_dir, s_ref, cfg.truncation.N, config_weights(cfg, s_ref));

  workers = std::max<std::size_t>(1, workers);
  std::vector<std::unique_ptr<SparseSolver>> solvers;
  for (std::size_t w = 0; w < workers; ++w) solvers.push_back(std::make_unique<SparseSolver>());
  const Integrand integrand = [&](const ParamVector& y, std::size_t worker) {
    const auto values = sampler.apply(model.solve(y, *solvers[worker]));
    std::vector<Complex> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::abs(values[i]);
    return out;
  };
  for (std::size_t s : study.s_list) {
    Stopwatch sw;
    LatticeRule rule;
    rule.n = full.n;
    rule.z.assign(full.z.begin(), full.z.begin() + static_cast<std::ptrdiff_t>(s));
    const ShiftedEstimate est = qmc_estimate(rule, cfg.qmc.L, cfg.qmc.seed, integrand, workers);
    std::vector<double> mean(est.mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] = est.mean[i].real();
    study.mean_abs.push_back(std::move(mean));
    study.stderr_abs.push_back(est.std_error);
    std::ostringstream os;
    os << "truncation s = " << s << " done (" << std::setprecision(4) << sw.seconds() << " s)";
    note(log, os.str());
  }
  const auto& ref = study.mean_abs.back();
  for (const auto& mean : study.mean_abs) {
    std::vector<double> d(mean.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(mean[i] - ref[i]);
    study.median_diff.push_back(median(d));
    study.diff.push_back(std::move(d));
  }
  return study;
}

HankelStudy hankel_study(const ExperimentConfig& cfg, std::ostream* log) {
  HankelStudy study;
  std::vector<int> ladder = cfg.verification.n_theta;
  std::sort(ladder.begin(), ladder.end());
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    Stopwatch sw;
    const bool finest = i + 1 == ladder.size();
    study.levels.push_back(solve_oracle(cfg, ladder[i], cfg.geometry.R2, cfg.verification.refinements,
                                        finest ? &study.finest_pattern : nullptr));
    const auto& l = study.levels.back();
    std::ostringstream os;
    os << "oracle n_theta " << l.n_theta << ": h_max " << l.h_max << ", dofs " << l.dofs << ", rel L2 " << l.rel_l2
       << ", rel H1 " << l.rel_h1 << " (" << std::setprecision(3) << sw.seconds() << " s)";
    note(log, os.str());
  }
  if (study.levels.size() >= 2) {
    std::vector<double> h, l2, h1;
    for (const auto& l : study.levels) {
      h.push_back(l.h_max);
      l2.push_back(l.rel_l2);
      h1.push_back(l.rel_h1);
    }
    study.l2_slope = loglog_slope(h, l2);
    study.h1_slope = loglog_slope(h, h1);
  }
  study.farfield_target = 0.25 * std::sqrt(2.0 / (kPi * cfg.k));
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
  for (const Complex& v : study.finest_pattern.values) {
    const double a = std::abs(v);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    sum += a;
    study.farfield_max_rel_dev =
        std::max(study.farfield_max_rel_dev, std::abs(a - study.farfield_target) / study.farfield_target);
  }
  study.farfield_variation = (hi - lo) / (sum / static_cast<double>(study.finest_pattern.values.size()));
  return study;
}

std::vector<PmlSweepLevel> pml_sweep_study(const ExperimentConfig& cfg, std::ostream* log) {
  std::vector<PmlSweepLevel> out;
  for (double width : cfg.verification.pml_widths) {
    Stopwatch sw;
    PmlSweepLevel l;
    l.width = width;
    l.R2 = cfg.geometry.R1 + width;
    const int n = 2 * static_cast<int>(std::lround(cfg.verification.pml_n_theta * l.R2 / cfg.geometry.R2 / 2.0));
    l.level = solve_oracle(cfg, n, l.R2, cfg.verification.pml_refinements, nullptr);
    std::ostringstream os;
    os << "pml width " << width << ": n_theta " << n << ", dofs " << l.level.dofs << ", rel L2 " << l.level.rel_l2
       << " (" << std::setprecision(3) << sw.seconds() << " s)";
    note(log, os.str());
    out.push_back(l);
  }
  return out;
}

std::vector<FemConvergenceLevel> fem_convergence_study(const ExperimentConfig& cfg, std::ostream* log) {
  std::vector<int> ladder = cfg.verification.n_theta;
  std::sort(ladder.begin(), ladder.end());
  std::vector<FemConvergenceLevel> out;
  for (int n : ladder) {
    ExperimentConfig c = cfg;
    c.fem.n_theta = n;
    const ScatteringModel model(c, log);
    SparseSolver solver;
    FemConvergenceLevel l;
    l.n_theta = n;
    l.h_max = model.mesh().h_max();
    l.dofs = model.space().free_count();
    l.pattern = model.far_field(model.solve(ParamVector(std::vector<double>(cfg.field.s, 0.0)), solver));
    out.push_back(std::move(l));
  }
  const auto& fine = out.back().pattern.values;
  double scale = 0.0;
  for (const Complex& v : fine) scale = std::max(scale, std::abs(v));
  for (auto& l : out) {
    double d = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) d = std::max(d, std::abs(l.pattern.values[i] - fine[i]));
    l.max_rel_diff = d / scale;
  }
  return out;
}

json constants_report(const ExperimentConfig& cfg) {
  ProblemConstants c = ProblemConstants::from_background(cfg.field.n0, cfg.field.n0, cfg.field.xi_n);
  c.mu_A = cfg.analysis.mu_A;
  c.mu_n = cfg.analysis.mu_n;
  c.k0 = cfg.analysis.k0;
  c.R0 = cfg.geometry.R0;
  c.R = cfg.geometry.R0;
  const RandomFieldSpec field = make_field(cfg);
  const AssumptionReport assumptions = check_assumptions(field, c);

  double h = cfg.analysis.h;
  if (h == 0.0) {
    const StarObstacle obstacle = make_obstacle(cfg.geometry);
    MeshOptions opt;
    opt.knots = cfg.knots();
    opt.refinements = cfg.fem.refinements;
    h = mesh_annulus(obstacle, cfg.geometry.R2, cfg.fem.n_theta, cfg.fem.n_radial, opt).h_max();
  }
  const MeshThreshold mt =
      mesh_threshold(h, cfg.k, cfg.fem.degree, cfg.geometry.R2, cfg.analysis.tau, cfg.analysis.farfield_budget);
  BudgetInputs in;
  in.s = cfg.analysis.budget_s;
  in.N = cfg.analysis.budget_N;
  in.h = h;
  in.k = cfg.k;
  in.m = cfg.fem.degree;
  in.p = cfg.analysis.p;
  in.delta = cfg.analysis.delta;
  json report;
  report["constants"] = to_json(c);
  report["C_stab"] = stability_constant(c);
  report["C_stab_unrooted"] = stability_constant_unrooted(c);
  report["theta_lambda"] = theta_lambda(cfg.qmc.lambda);
  report["assumptions"] = to_json(assumptions);
  report["mesh_threshold"] = to_json(mt);
  report["mesh_threshold"]["h"] = h;
  report["error_budget"] = to_json(error_budget(in, c));
  return report;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

RunReport run_experiment(const ExperimentConfig& cfg, const RunContext& ctx) {
  cfg.validate();
  OutputDir out(ctx.out_dir);
  RunReport report;
  const auto started = std::chrono::system_clock::now();
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));

  auto manifest = [&](const std::string& status, const std::string& error) {
    json m;
    m["status"] = status;
    m["kind"] = to_string(cfg.kind);
    m["config_hash"] = hash;
    m["seed"] = cfg.qmc.seed;
    m["version"] = kVersion;
    m["solver_backend"] = SparseSolver::backend();
    m["started"] = iso_time(started);
    m["finished"] = iso_time(std::chrono::system_clock::now());
    json stages = json::array();
    for (const auto& [name, secs] : report.stages) stages.push_back({{"stage", name}, {"seconds", secs}});
    m["stages"] = stages;
    m["outputs"] = out.files();
    if (!error.empty()) m["error"] = error;
    write_text_atomic(out.path() / "manifest.json", m.dump(2) + "\n");
  };
  // A stale manifest from an earlier run must not survive a failure.
  std::error_code ec;
  fs::remove(out.path() / "manifest.json", ec);

  try {
    out.write("config_resolved.json", to_json(cfg).dump(2) + "\n");
    Stopwatch sw;
    json summary;
    switch (cfg.kind) {
      case RunKind::farfield_expectation: {
        const FarFieldStudy st = farfield_study(cfg, ctx.workers, ctx.log);
        report.stages.emplace_back("qmc", sw.seconds());
        out.write("farfield_homogeneous.csv", pattern_csv(st.homogeneous));
        json per_n = json::array();
        for (std::size_t i = 0; i < cfg.qmc.N.size(); ++i) {
          const std::int64_t n = cfg.qmc.N[i];
          const ShiftedEstimate& e = st.estimates.at(n);
          FarFieldPattern mean{st.angles, e.mean};
          out.write("farfield_mean_N" + std::to_string(n) + ".csv", pattern_csv(mean));
          std::string csv = "angle_deg,stderr_abs\n";
          for (std::size_t a = 0; a < st.angles.size(); ++a) csv += fmt(st.angles[a]) + "," + fmt(e.std_error[a]) + "\n";
          out.write("farfield_stderr_N" + std::to_string(n) + ".csv", csv);
          per_n.push_back({{"N", n}, {"median_stderr", st.median_stderr[i]}});
        }
        summary["generating_vector"] = st.rule.z;
        summary["N_max"] = st.rule.n;
        summary["stderr"] = per_n;
        summary["stderr_slope"] = std::isfinite(st.stderr_slope) ? json(st.stderr_slope) : json(nullptr);
        break;
      }
      case RunKind::dim_truncation_study: {
        const TruncationStudy st = truncation_study(cfg, ctx.workers, ctx.log);
        report.stages.emplace_back("qmc", sw.seconds());
        json per_s = json::array();
        for (std::size_t i = 0; i < st.s_list.size(); ++i) {
          const std::string tag = std::to_string(st.s_list[i]);
          std::string mean = "angle_deg,mean_abs,stderr\n";
          std::string diff = "angle_deg,abs_diff\n";
          for (std::size_t a = 0; a < st.angles.size(); ++a) {
            mean += fmt(st.angles[a]) + "," + fmt(st.mean_abs[i][a]) + "," + fmt(st.stderr_abs[i][a]) + "\n";
            diff += fmt(st.angles[a]) + "," + fmt(st.diff[i][a]) + "\n";
          }
          out.write("circle_mean_s" + tag + ".csv", mean);
          out.write("circle_diff_s" + tag + "_vs_s" + std::to_string(st.s_list.back()) + ".csv", diff);
          per_s.push_back({{"s", st.s_list[i]}, {"median_diff", st.median_diff[i]}});
        }
        summary["truncation"] = per_s;
        break;
      }
      case RunKind::fem_convergence: {
        const auto levels = fem_convergence_study(cfg, ctx.log);
        report.stages.emplace_back("solve", sw.seconds());
        std::string csv = "n_theta,h_max,dofs,max_rel_diff\n";
        for (const auto& l : levels) {
          csv += std::to_string(l.n_theta) + "," + fmt(l.h_max) + "," + std::to_string(l.dofs) + "," +
                 fmt(l.max_rel_diff) + "\n";
          out.write("farfield_homogeneous_nt" + std::to_string(l.n_theta) + ".csv", pattern_csv(l.pattern));
        }
        out.write("fem_convergence.csv", csv);
        break;
      }
      case RunKind::pml_sweep: {
        const auto levels = pml_sweep_study(cfg, ctx.log);
        report.stages.emplace_back("solve", sw.seconds());
        std::string csv = "width,R2,n_theta,h_max,dofs,rel_l2,rel_h1\n";
        for (const auto& l : levels)
          csv += fmt(l.width) + "," + fmt(l.R2) + "," + std::to_string(l.level.n_theta) + "," + fmt(l.level.h_max) +
                 "," + std::to_string(l.level.dofs) + "," + fmt(l.level.rel_l2) + "," + fmt(l.level.rel_h1) + "\n";
        out.write("pml_sweep.csv", csv);
        bool decreasing = true;
        for (std::size_t i = 1; i < levels.size(); ++i)
          decreasing = decreasing && levels[i].level.rel_l2 < levels[i - 1].level.rel_l2;
        summary["strictly_decreasing"] = decreasing;
        break;
      }
      case RunKind::verify_hankel: {
        const HankelStudy st = hankel_study(cfg, ctx.log);
        report.stages.emplace_back("solve", sw.seconds());
        out.write("hankel_ladder.csv", oracle_csv(st.levels));
        out.write("hankel_farfield.csv", pattern_csv(st.finest_pattern));
        summary["l2_slope"] = st.l2_slope;
        summary["h1_slope"] = st.h1_slope;
        summary["farfield_target"] = st.farfield_target;
        summary["farfield_max_rel_dev"] = st.farfield_max_rel_dev;
        summary["farfield_variation"] = st.farfield_variation;
        break;
      }
      case RunKind::constants_report: {
        summary = constants_report(cfg);
        report.stages.emplace_back("analysis", sw.seconds());
        out.write("constants_report.json", summary.dump(2) + "\n");
        break;
      }
    }
    report.summary = summary;
    out.write("summary.json", summary.dump(2) + "\n");
    report.files = out.files();
    manifest("success", "");
  } catch (const std::exception& e) {
    report.files = out.files();
    try {
      manifest("failed", e.what());
    } catch (...) {
    }
    throw;
  }
  return report;
}

}  // namespace helmqmc
