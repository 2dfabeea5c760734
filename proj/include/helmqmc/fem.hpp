#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "helmqmc/mesh.hpp"
#include "helmqmc/pml.hpp"
#include "helmqmc/randomfield.hpp"
#include "helmqmc/types.hpp"

namespace helmqmc {

using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;
using VectorC = Eigen::VectorXcd;

/// Continuous Lagrange space of degree 1 or 2 on a TriMesh.
///
/// Dof numbering: vertices first, then one dof per edge (degree 2). Local
/// dofs of a triangle (v0, v1, v2) are the vertices followed by the edges
/// (v0v1, v1v2, v2v0).
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const TriMesh> mesh, int degree);

  const TriMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int local_count() const { return degree_ == 1 ? 3 : 6; }

  std::size_t dof_count() const { return coords_.size(); }
  std::size_t free_count() const { return free_count_; }
  const std::vector<Point2>& dof_coords() const { return coords_; }
  const std::vector<std::uint8_t>& dirichlet_mask() const { return dirichlet_; }
  /// Index among free dofs, or -1 for constrained dofs.
  int free_index(std::size_t dof) const { return free_index_[dof]; }

  const int* element_dofs(std::size_t t) const { return &element_dofs_[t * static_cast<std::size_t>(local_count())]; }

  /// Physical gradients of the barycentric coordinates and the area.
  struct Geometry {
    std::array<Vec2, 3> grad_lambda;
    double area = 0.0;
  };
  Geometry geometry(std::size_t t) const;
  Point2 map(std::size_t t, const std::array<double, 3>& bary) const;

  /// Shape function values and physical gradients at barycentric point.
  void shape(const Geometry& geo, const std::array<double, 3>& bary, double* values, Vec2* grads) const;

  /// Nodal interpolant of a function.
  VectorC interpolate(const std::function<Complex(const Point2&)>& fn) const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  int degree_;
  std::vector<Point2> coords_;
  std::vector<int> element_dofs_;
  std::vector<std::uint8_t> dirichlet_;
  std::vector<int> free_index_;
  std::size_t free_count_ = 0;
};

struct FemOptions {
  /// 0 selects 2m + 2.
  int quad_degree = 0;
  /// Warn when (hk)^{2l} k R2 exceeds this value.
  double pollution_limit = 100.0;
  /// Smoothness index l in the pollution term; 0 selects l = m.
  int ell = 0;
};

/// Complex-symmetric system over the free dofs.
struct AssembledSystem {
  SparseMatrixC matrix;
  VectorC rhs;
  bool complex_symmetric = true;
};

/// Right-hand side as a load functional over all dofs; entries on
/// constrained dofs are dropped by the assembler.
struct LoadFunctional {
  std::function<Complex(const Point2&)> density;
  /// Elements entirely outside [r_lo, r_hi] are skipped; the density must
  /// vanish there.
  double r_lo = 0.0;
  double r_hi = std::numeric_limits<double>::infinity();
  double sign = 1.0;
};

/// rhs_i = sign * int density * phi_i over all dofs (phi_i real).
VectorC integrate_load(const FeSpace& space, const LoadFunctional& load, int quad_degree = 0);

/// Assembles the PML-truncated Helmholtz form
///   a(u, v) = int A_PML grad u . grad v - k^2 n_PML u v
/// over a fixed sparsity pattern. The y-independent part is integrated once;
/// matrix(y) adds only the elements where the random fields fluctuate.
class HelmholtzAssembler {
 public:
  HelmholtzAssembler(std::shared_ptr<const FeSpace> space, PmlProfile profile, RandomFieldSpec field, double k,
                     FemOptions options = {});

  const FeSpace& space() const { return *space_; }
  std::shared_ptr<const FeSpace> space_ptr() const { return space_; }
  double k() const { return k_; }
  const PmlProfile& pml() const { return profile_; }
  const RandomFieldSpec& field() const { return field_; }
  int quad_degree() const { return quad_degree_; }

  /// Structurally fixed matrix over free dofs for parameter y.
  SparseMatrixC matrix(const ParamVector& y) const;
  /// Same pattern with the mean coefficients.
  const SparseMatrixC& base_matrix() const { return base_; }

  /// Restricts a full-dof load vector to the free dofs.
  VectorC restrict_to_free(const VectorC& full) const;
  /// Scatters a free-dof vector into the full vector with zero Dirichlet values.
  VectorC extend_to_full(const VectorC& free) const;

  double pollution_term() const { return pollution_; }
  bool threshold_exceeded() const { return pollution_ > options_.pollution_limit; }

 private:
  void add_elements(const std::vector<std::size_t>& elements, const ParamVector* y, bool fluctuation_only,
                    Complex* values) const;

  std::shared_ptr<const FeSpace> space_;
  PmlProfile profile_;
  RandomFieldSpec field_;
  double k_;
  FemOptions options_;
  int quad_degree_;
  TriQuadRule rule_;
  SparseMatrixC base_;
  // Per element: nloc x nloc indices into the value array, -1 if constrained.
  std::vector<int> value_index_;
  std::vector<std::size_t> all_elements_;
  std::vector<std::size_t> random_elements_;
  double pollution_ = 0.0;
};

/// One-shot assembly for a given y and a full-dof load vector.
AssembledSystem assemble(const HelmholtzAssembler& assembler, const ParamVector& y, const VectorC& full_load);

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Sparse LU (UMFPACK when built with it) that reuses the symbolic analysis
/// across matrices with identical patterns and enforces the relative
/// residual contract with a few steps of iterative refinement.
class SparseSolver {
 public:
  SparseSolver();
  ~SparseSolver();
  SparseSolver(const SparseSolver&) = delete;
  SparseSolver& operator=(const SparseSolver&) = delete;

  VectorC solve(const SparseMatrixC& matrix, const VectorC& rhs, double tol = 1e-10);
  double last_residual() const { return last_residual_; }
  static const char* backend();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double last_residual_ = 0.0;
};

/// Finite element function with values on every dof (zero on constrained dofs).
struct DiscreteField {
  std::shared_ptr<const FeSpace> space;
  VectorC coefficients;
};

DiscreteField solve(const AssembledSystem& system, const HelmholtzAssembler& assembler, double tol = 1e-10);

struct FieldValue {
  Complex value;
  CVec2 gradient;
};

/// Point evaluation; throws std::out_of_range outside the mesh.
FieldValue evaluate(const DiscreteField& field, const Point2& x);

/// Relative L2 and H1-seminorm errors against an exact solution, over the
/// elements whose vertices all lie within radius r_max.
struct ErrorNorms {
  double l2_error = 0.0;
  double l2_norm = 0.0;
  double h1_error = 0.0;
  double h1_norm = 0.0;
  double relative_l2() const { return l2_error / l2_norm; }
  double relative_h1() const { return h1_error / h1_norm; }
};
ErrorNorms error_norms(const DiscreteField& field, const std::function<FieldValue(const Point2&)>& exact, double r_max,
                       int quad_degree = 0);

/// Coordinate dump "row col re im" with 0-based indices.
void write_matrix(std::ostream& os, const SparseMatrixC& matrix);

}  // namespace helmqmc
