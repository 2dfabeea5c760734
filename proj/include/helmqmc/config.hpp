#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "helmqmc/mesh.hpp"
#include "helmqmc/types.hpp"

namespace helmqmc {

/// Raised for malformed or inconsistent configurations (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunKind { farfield_expectation, dim_truncation_study, fem_convergence, pml_sweep, verify_hankel, constants_report };

std::string to_string(RunKind kind);
RunKind run_kind_from_string(const std::string& name);

struct GeometryConfig {
  std::string obstacle = "butterfly";  // butterfly | circle
  /// (a + sin^2 t)(b + c cos 2t)
  std::vector<double> butterfly{0.3, 1.5, 1.4};
  double circle_radius = 1.0;
  double R0 = 4.5;
  double eta = 1.0;
  double R1 = 4.52;
  double R2 = 5.0;
  double pml_scale = 3.0;
};

/// Obstacle described by the geometry section.
StarObstacle make_obstacle(const GeometryConfig& g);

struct FieldConfig {
  double n0 = 1.0;
  double xi_n = 0.8319;
  double q = 3.0;
  std::size_t s = 8;
};

struct FemConfig {
  int n_theta = 256;
  int n_radial = 0;
  int degree = 2;
  double solver_tol = 1e-10;
  int quad_degree = 0;
  double pollution_limit = 100.0;
  std::vector<MeshOptions::Refinement> refinements;
};

struct QmcConfig {
  std::vector<std::int64_t> N{64, 128, 256, 512};
  std::size_t L = 10;
  std::uint64_t seed = 20240101;
  std::string cache_dir = "lattice_cache";
  double lambda = 1.0 / 1.8;
  /// beta_j = beta_scale * j^{-q}. Setting it to C_stab k R xi gives the
  /// problem-dependent weights; unset keeps beta_j = b_j.
  std::optional<double> beta_scale;
};

struct TruncationConfig {
  std::vector<std::size_t> s_list{4, 8, 16};
  std::int64_t N = 64;
  double circle_radius = 4.25;
};

struct VerificationConfig {
  std::vector<int> n_theta{128, 256, 512};
  /// Oracle cutoff chi = ffp(chi_r0, chi_eta), rising on [chi_r0 - chi_eta/2, chi_r0].
  double chi_r0 = 2.0;
  double chi_eta = 2.0;
  std::vector<MeshOptions::Refinement> refinements{{0.0, 4.52, 2.0}, {4.52, 5.0, 8.0}};
  std::vector<double> pml_widths{0.25, 0.5, 1.0};
  /// n_theta at R2 = geometry.R2; scaled with the outer radius so the
  /// tangential spacing stays fixed.
  int pml_n_theta = 512;
  std::vector<MeshOptions::Refinement> pml_refinements{{0.0, 4.52, 2.0}};
};

struct AnalysisConfig {
  double mu_A = 1.0;
  double mu_n = 1.0;
  double k0 = 12.0;
  double p = 1.0 / 3.0;
  double delta = 0.1;
  int tau = 1;
  double farfield_budget = 1.0;
  /// Mesh width for the threshold and budget; 0 takes the mesh's h_max.
  double h = 0.0;
  std::size_t budget_s = 32;
  std::int64_t budget_N = 1024;
};

struct ExperimentConfig {
  RunKind kind = RunKind::farfield_expectation;
  std::string name = "experiment";
  std::string output_dir = "out";
  double k = 12.0;
  Vec2 incident_direction{0.0, -1.0};
  std::size_t workers = 0;  // 0: hardware concurrency
  GeometryConfig geometry;
  FieldConfig field;
  FemConfig fem;
  QmcConfig qmc;
  TruncationConfig truncation;
  VerificationConfig verification;
  AnalysisConfig analysis;

  /// Throws ValidationError.
  void validate() const;
  /// Mesh knots R0 - 3eta/2, R0 - eta, R0 - eta/2, R0, R1.
  std::vector<double> knots() const;
};

/// Parses and validates; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
/// Fully resolved config with every default expanded.
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace helmqmc
