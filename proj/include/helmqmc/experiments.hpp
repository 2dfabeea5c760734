#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "helmqmc/config.hpp"
#include "helmqmc/fem.hpp"
#include "helmqmc/qmc.hpp"
#include "helmqmc/scattering.hpp"

namespace helmqmc {

inline constexpr const char* kVersion = "helmqmc 0.1.0";

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> values);

/// Plane-wave scattering by the configured obstacle in the PML-truncated
/// annulus, solved for u^alt. One instance is shared read-only by all workers.
class ScatteringModel {
 public:
  explicit ScatteringModel(const ExperimentConfig& cfg, std::ostream* log = nullptr);

  const TriMesh& mesh() const { return *mesh_; }
  const FeSpace& space() const { return *space_; }
  const HelmholtzAssembler& assembler() const { return *assembler_; }
  const RandomFieldSpec& field() const { return field_; }

  /// Full-dof coefficients of u^alt for parameter y.
  VectorC solve(const ParamVector& y, SparseSolver& solver) const;
  FarFieldPattern far_field(const VectorC& full) const { return farfield_->apply(full); }
  const FarFieldOperator& farfield_operator() const { return *farfield_; }

 private:
  double tol_;
  RandomFieldSpec field_;
  std::shared_ptr<const TriMesh> mesh_;
  std::shared_ptr<const FeSpace> space_;
  std::unique_ptr<HelmholtzAssembler> assembler_;
  VectorC load_;
  std::unique_ptr<FarFieldOperator> farfield_;
};

PodWeights config_weights(const ExperimentConfig& cfg, std::size_t s);

struct FarFieldStudy {
  std::vector<double> angles;
  FarFieldPattern homogeneous;
  LatticeRule rule;
  std::map<std::int64_t, ShiftedEstimate> estimates;
  std::vector<double> median_stderr;  // per N in cfg.qmc.N
  double stderr_slope = 0.0;
};
FarFieldStudy farfield_study(const ExperimentConfig& cfg, std::size_t workers, std::ostream* log = nullptr);

struct TruncationStudy {
  std::vector<double> angles;
  std::vector<std::size_t> s_list;
  std::vector<std::vector<double>> mean_abs;    // per s
  std::vector<std::vector<double>> stderr_abs;  // per s
  std::vector<std::vector<double>> diff;        // per s, against the largest s
  std::vector<double> median_diff;
};
TruncationStudy truncation_study(const ExperimentConfig& cfg, std::size_t workers, std::ostream* log = nullptr);

struct OracleLevel {
  int n_theta = 0;
  double h_max = 0.0;
  std::size_t dofs = 0;
  double rel_l2 = 0.0;
  double rel_h1 = 0.0;
};

struct HankelStudy {
  std::vector<OracleLevel> levels;
  double l2_slope = 0.0;
  double h1_slope = 0.0;
  FarFieldPattern finest_pattern;
  double farfield_target = 0.0;       // 1/4 sqrt(2/(pi k))
  double farfield_max_rel_dev = 0.0;  // max | |u_inf| - target | / target
  double farfield_variation = 0.0;    // (max - min) / mean of |u_inf|
};
HankelStudy hankel_study(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct PmlSweepLevel {
  double width = 0.0;
  double R2 = 0.0;
  OracleLevel level;
};
std::vector<PmlSweepLevel> pml_sweep_study(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct FemConvergenceLevel {
  int n_theta = 0;
  double h_max = 0.0;
  std::size_t dofs = 0;
  FarFieldPattern pattern;
  double max_rel_diff = 0.0;  // against the finest level, relative to its max |u_inf|
};
std::vector<FemConvergenceLevel> fem_convergence_study(const ExperimentConfig& cfg, std::ostream* log = nullptr);

nlohmann::json constants_report(const ExperimentConfig& cfg);

struct RunContext {
  std::filesystem::path out_dir;
  std::size_t workers = 1;
  std::ostream* log = nullptr;
};

struct RunReport {
  std::vector<std::string> files;
  std::vector<std::pair<std::string, double>> stages;
  nlohmann::json summary;
};

/// Runs the configured experiment into ctx.out_dir. Writes the resolved
/// config first and the manifest last (atomically); a failure leaves a
/// manifest with status "failed" and rethrows.
RunReport run_experiment(const ExperimentConfig& cfg, const RunContext& ctx);

/// FNV-1a of the resolved config text.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace helmqmc
