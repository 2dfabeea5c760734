#include "helmqmc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <ostream>

#ifdef HELMQMC_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace helmqmc {

// ---------------------------------------------------------------------------
// FeSpace

FeSpace::FeSpace(std::shared_ptr<const TriMesh> mesh, int degree) : mesh_(std::move(mesh)), degree_(degree) {
  if (!mesh_) throw std::invalid_argument("FeSpace: null mesh");
  if (degree_ != 1 && degree_ != 2) throw std::invalid_argument("FeSpace: degree must be 1 or 2");

  const auto& verts = mesh_->vertices();
  const auto& tris = mesh_->triangles();
  const auto& tags = mesh_->boundary_tags();
  const std::size_t nloc = static_cast<std::size_t>(local_count());

  coords_ = verts;
  dirichlet_.resize(verts.size());
  for (std::size_t v = 0; v < verts.size(); ++v) dirichlet_[v] = tags[v] != BoundaryTag::interior ? 1 : 0;
  element_dofs_.resize(tris.size() * nloc);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (std::size_t k = 0; k < 3; ++k) element_dofs_[t * nloc + k] = tris[t][k];
  }

  if (degree_ == 2) {
    struct EdgeRef {
      std::uint64_t key;
      std::uint32_t slot;  // t * 3 + local edge
    };
    std::vector<EdgeRef> refs;
    refs.reserve(3 * tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
      for (std::size_t e = 0; e < 3; ++e) {
        auto a = static_cast<std::uint64_t>(tris[t][e]);
        auto b = static_cast<std::uint64_t>(tris[t][(e + 1) % 3]);
        if (a > b) std::swap(a, b);
        refs.push_back({(a << 32) | b, static_cast<std::uint32_t>(t * 3 + e)});
      }
    }
    std::sort(refs.begin(), refs.end(), [](const EdgeRef& x, const EdgeRef& y) {
      return x.key < y.key || (x.key == y.key && x.slot < y.slot);
    });
    std::size_t i = 0;
    while (i < refs.size()) {
      std::size_t j = i;
      while (j < refs.size() && refs[j].key == refs[i].key) ++j;
      const auto a = static_cast<std::size_t>(refs[i].key >> 32);
      const auto b = static_cast<std::size_t>(refs[i].key & 0xffffffffu);
      const int dof = static_cast<int>(coords_.size());
      coords_.push_back(0.5 * (verts[a] + verts[b]));
      const bool boundary_edge = (j - i) == 1;
      dirichlet_.push_back(boundary_edge && dirichlet_[a] && dirichlet_[b] ? 1 : 0);
      for (std::size_t m = i; m < j; ++m) {
        const std::size_t t = refs[m].slot / 3;
        const std::size_t e = refs[m].slot % 3;
        element_dofs_[t * nloc + 3 + e] = dof;
      }
      i = j;
    }
  }

  free_index_.assign(coords_.size(), -1);
  int next = 0;
  for (std::size_t d = 0; d < coords_.size(); ++d) {
    if (!dirichlet_[d]) free_index_[d] = next++;
  }
  free_count_ = static_cast<std::size_t>(next);
}

FeSpace::Geometry FeSpace::geometry(std::size_t t) const {
  const auto& tri = mesh_->triangles()[t];
  const auto& v = mesh_->vertices();
  const Point2& a = v[static_cast<std::size_t>(tri[0])];
  const Point2& b = v[static_cast<std::size_t>(tri[1])];
  const Point2& c = v[static_cast<std::size_t>(tri[2])];
  const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  Geometry g;
  g.area = 0.5 * det;
  g.grad_lambda[0] = Vec2(b.y() - c.y(), c.x() - b.x()) / det;
  g.grad_lambda[1] = Vec2(c.y() - a.y(), a.x() - c.x()) / det;
  g.grad_lambda[2] = Vec2(a.y() - b.y(), b.x() - a.x()) / det;
  return g;
}

Point2 FeSpace::map(std::size_t t, const std::array<double, 3>& bary) const {
  const auto& tri = mesh_->triangles()[t];
  const auto& v = mesh_->vertices();
  return bary[0] * v[static_cast<std::size_t>(tri[0])] + bary[1] * v[static_cast<std::size_t>(tri[1])] +
         bary[2] * v[static_cast<std::size_t>(tri[2])];
}

void FeSpace::shape(const Geometry& geo, const std::array<double, 3>& l, double* values, Vec2* grads) const {
  const auto& g = geo.grad_lambda;
  if (degree_ == 1) {
    for (int i = 0; i < 3; ++i) {
      if (values) values[i] = l[static_cast<std::size_t>(i)];
      if (grads) grads[i] = g[static_cast<std::size_t>(i)];
    }
    return;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (values) values[i] = l[i] * (2.0 * l[i] - 1.0);
    if (grads) grads[i] = (4.0 * l[i] - 1.0) * g[i];
  }
  for (std::size_t e = 0; e < 3; ++e) {
    const std::size_t a = e;
    const std::size_t b = (e + 1) % 3;
    if (values) values[3 + e] = 4.0 * l[a] * l[b];
    if (grads) grads[3 + e] = 4.0 * (l[a] * g[b] + l[b] * g[a]);
  }
}

VectorC FeSpace::interpolate(const std::function<Complex(const Point2&)>& fn) const {
  VectorC out(static_cast<Eigen::Index>(coords_.size()));
  for (std::size_t d = 0; d < coords_.size(); ++d) out[static_cast<Eigen::Index>(d)] = fn(coords_[d]);
  return out;
}

// ---------------------------------------------------------------------------
// Loads

namespace {

int default_quad_degree(int degree) { return std::min(6, 2 * degree + 2); }

// Conservative radial extent of a triangle.
std::pair<double, double> radial_extent(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double edge = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const Point2& p = v[static_cast<std::size_t>(tri[k])];
    lo = std::min(lo, p.norm());
    hi = std::max(hi, p.norm());
    edge = std::max(edge, (p - v[static_cast<std::size_t>(tri[(k + 1) % 3])]).norm());
  }
  return {std::max(0.0, lo - edge), hi};
}

}  // namespace

VectorC integrate_load(const FeSpace& space, const LoadFunctional& load, int quad_degree) {
  const TriQuadRule rule = quad_rule(quad_degree > 0 ? quad_degree : default_quad_degree(space.degree()));
  const int nloc = space.local_count();
  VectorC rhs = VectorC::Zero(static_cast<Eigen::Index>(space.dof_count()));
  std::array<double, 6> phi{};
  for (std::size_t t = 0; t < space.mesh().triangle_count(); ++t) {
    const auto [lo, hi] = radial_extent(space.mesh(), t);
    if (lo >= load.r_hi || hi <= load.r_lo) continue;
    const auto geo = space.geometry(t);
    const int* dofs = space.element_dofs(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Complex f = load.density(space.map(t, rule.points[q]));
      if (f == Complex(0.0)) continue;
      space.shape(geo, rule.points[q], phi.data(), nullptr);
      const Complex wf = load.sign * rule.weights[q] * geo.area * f;
      for (int a = 0; a < nloc; ++a) rhs[dofs[a]] += wf * phi[static_cast<std::size_t>(a)];
    }
  }
  return rhs;
}

// ---------------------------------------------------------------------------
// HelmholtzAssembler

HelmholtzAssembler::HelmholtzAssembler(std::shared_ptr<const FeSpace> space, PmlProfile profile,
                                       RandomFieldSpec field, double k, FemOptions options)
    : space_(std::move(space)), profile_(std::move(profile)), field_(std::move(field)), k_(k), options_(options) {
  if (!space_) throw std::invalid_argument("HelmholtzAssembler: null space");
  if (!(k_ > 0.0)) throw std::invalid_argument("HelmholtzAssembler: wavenumber must be positive");
  field_.validate();
  const int m = space_->degree();
  quad_degree_ = options_.quad_degree > 0 ? options_.quad_degree : default_quad_degree(m);
  if (quad_degree_ < std::min(6, 2 * m + 2)) {
    throw std::invalid_argument("HelmholtzAssembler: quadrature degree must be at least 2m + 2");
  }
  rule_ = quad_rule(quad_degree_);

  const ptrdiff_t nloc = space_->local_count();
  const std::size_t ntri = space_->mesh().triangle_count();
  const auto nfree = static_cast<int>(space_->free_count());

  std::vector<Eigen::Triplet<Complex, int>> triplets;
  triplets.reserve(ntri * static_cast<std::size_t>(nloc * nloc));
  for (std::size_t t = 0; t < ntri; ++t) {
    const int* dofs = space_->element_dofs(t);
    for (ptrdiff_t a = 0; a < nloc; ++a) {
      const int fa = space_->free_index(static_cast<std::size_t>(dofs[a]));
      if (fa < 0) continue;
      for (ptrdiff_t b = 0; b < nloc; ++b) {
        const int fb = space_->free_index(static_cast<std::size_t>(dofs[b]));
        if (fb >= 0) triplets.emplace_back(fa, fb, Complex(0.0));
      }
    }
  }
  base_.resize(nfree, nfree);
  base_.setFromTriplets(triplets.begin(), triplets.end());
  base_.makeCompressed();

  const int* outer = base_.outerIndexPtr();
  const int* inner = base_.innerIndexPtr();
  value_index_.assign(ntri * static_cast<std::size_t>(nloc * nloc), -1);
  for (std::size_t t = 0; t < ntri; ++t) {
    const int* dofs = space_->element_dofs(t);
    for (ptrdiff_t a = 0; a < nloc; ++a) {
      const int fa = space_->free_index(static_cast<std::size_t>(dofs[a]));
      if (fa < 0) continue;
      for (ptrdiff_t b = 0; b < nloc; ++b) {
        const int fb = space_->free_index(static_cast<std::size_t>(dofs[b]));
        if (fb < 0) continue;
        const int* first = inner + outer[fb];
        const int* last = inner + outer[fb + 1];
        const int* hit = std::lower_bound(first, last, fa);
        value_index_[t * static_cast<std::size_t>(nloc * nloc) + static_cast<std::size_t>(a * nloc + b)] =
            static_cast<int>(hit - inner);
      }
    }
  }

  const double rho = field_.support_radius();
  all_elements_.resize(ntri);
  for (std::size_t t = 0; t < ntri; ++t) {
    all_elements_[t] = t;
    if (field_.has_matrix_fluctuation() || radial_extent(space_->mesh(), t).first < rho) {
      random_elements_.push_back(t);
    }
  }

  add_elements(all_elements_, nullptr, false, base_.valuePtr());
  for (Eigen::Index i = 0; i < base_.nonZeros(); ++i) {
    if (!std::isfinite(base_.valuePtr()[i].real()) || !std::isfinite(base_.valuePtr()[i].imag())) {
      throw std::runtime_error("HelmholtzAssembler: non-finite matrix entry");
    }
  }

  const int ell = options_.ell > 0 ? options_.ell : m;
  pollution_ = std::pow(space_->mesh().h_max() * k_, 2.0 * ell) * k_ * profile_.r2();
  if (threshold_exceeded()) {
    std::clog << "helmqmc: warning: mesh resolution indicator (hk)^{2l} k R2 = " << pollution_
              << " exceeds " << options_.pollution_limit << '\n';
  }
}

void HelmholtzAssembler::add_elements(const std::vector<std::size_t>& elements, const ParamVector* y,
                                      bool fluctuation_only, Complex* values) const {
  const int nloc = space_->local_count();
  const auto nq = rule_.weights.size();
  const double k2 = k_ * k_;
  std::array<double, 6> phi{};
  std::array<Vec2, 6> grad{};
  std::array<Complex, 36> local{};
  const Mat2 identity = Mat2::Identity();

  for (std::size_t t : elements) {
    const auto geo = space_->geometry(t);
    local.fill(Complex(0.0));
    bool touched = false;
    for (std::size_t q = 0; q < nq; ++q) {
      const Point2 x = space_->map(t, rule_.points[q]);
      const double w = rule_.weights[q] * geo.area;
      CMat2 a;
      Complex n;
      bool has_stiffness = true;
      if (fluctuation_only) {
        const double dn = y ? field_.xi_n * field_.fluctuation(y->values(), x) : 0.0;
        n = dn;
        if (field_.has_matrix_fluctuation() && y) {
          a = (sample_A(field_, *y, x) - identity).cast<Complex>();
        } else {
          has_stiffness = false;
          a.setZero();
        }
        if (dn == 0.0 && !has_stiffness) continue;
      } else {
        const auto c = pml_coefficients(profile_, identity, field_.n0, x);
        a = c.a_pml;
        n = c.n_pml;
      }
      touched = true;
      space_->shape(geo, rule_.points[q], phi.data(), grad.data());
      const Complex wn = -k2 * w * n;
      for (int i = 0; i < nloc; ++i) {
        CVec2 agi = CVec2::Zero();
        if (has_stiffness) agi = a * grad[static_cast<std::size_t>(i)].cast<Complex>();
        for (int j = i; j < nloc; ++j) {
          Complex v = wn * (phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)]);
          if (has_stiffness) {
            // a is symmetric, so (a grad_i) . grad_j = (a grad_j) . grad_i
            v += w * (agi.x() * grad[static_cast<std::size_t>(j)].x() + agi.y() * grad[static_cast<std::size_t>(j)].y());
          }
          local[static_cast<std::size_t>(i * nloc + j)] += v;
        }
      }
    }
    if (!touched) continue;
    const int* map = &value_index_[t * static_cast<std::size_t>(nloc * nloc)];
    for (int i = 0; i < nloc; ++i) {
      for (int j = i; j < nloc; ++j) {
        const Complex v = local[static_cast<std::size_t>(i * nloc + j)];
        const int ij = map[i * nloc + j];
        if (ij < 0) continue;
        values[ij] += v;
        if (j != i) values[map[j * nloc + i]] += v;
      }
    }
  }
}

SparseMatrixC HelmholtzAssembler::matrix(const ParamVector& y) const {
  SparseMatrixC out = base_;
  if (y.size() == 0 || (field_.xi_n == 0.0 && !field_.has_matrix_fluctuation())) return out;
  add_elements(random_elements_, &y, true, out.valuePtr());
  for (Eigen::Index i = 0; i < out.nonZeros(); ++i) {
    if (!std::isfinite(out.valuePtr()[i].real())) throw std::runtime_error("HelmholtzAssembler: non-finite matrix entry");
  }
  return out;
}

VectorC HelmholtzAssembler::restrict_to_free(const VectorC& full) const {
  VectorC out(static_cast<Eigen::Index>(space_->free_count()));
  for (std::size_t d = 0; d < space_->dof_count(); ++d) {
    const int f = space_->free_index(d);
    if (f >= 0) out[f] = full[static_cast<Eigen::Index>(d)];
  }
  return out;
}

VectorC HelmholtzAssembler::extend_to_full(const VectorC& free) const {
  VectorC out = VectorC::Zero(static_cast<Eigen::Index>(space_->dof_count()));
  for (std::size_t d = 0; d < space_->dof_count(); ++d) {
    const int f = space_->free_index(d);
    if (f >= 0) out[static_cast<Eigen::Index>(d)] = free[f];
  }
  return out;
}

AssembledSystem assemble(const HelmholtzAssembler& assembler, const ParamVector& y, const VectorC& full_load) {
  if (static_cast<std::size_t>(full_load.size()) != assembler.space().dof_count()) {
    throw std::invalid_argument("assemble: load vector size does not match the dof count");
  }
  AssembledSystem sys;
  sys.matrix = assembler.matrix(y);
  sys.rhs = assembler.restrict_to_free(full_load);
  return sys;
}

// ---------------------------------------------------------------------------
// SparseSolver

struct SparseSolver::Impl {
#ifdef HELMQMC_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrixC> lu;
#else
  Eigen::SparseLU<SparseMatrixC, Eigen::COLAMDOrdering<int>> lu;
#endif
  std::vector<int> outer;
  std::vector<int> inner;
  bool analyzed = false;

  bool same_pattern(const SparseMatrixC& m) const {
    if (!analyzed || static_cast<std::size_t>(m.outerSize() + 1) != outer.size() ||
        static_cast<std::size_t>(m.nonZeros()) != inner.size()) {
      return false;
    }
    return std::equal(outer.begin(), outer.end(), m.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), m.innerIndexPtr());
  }
};

SparseSolver::SparseSolver() : impl_(std::make_unique<Impl>()) {}
SparseSolver::~SparseSolver() = default;

const char* SparseSolver::backend() {
#ifdef HELMQMC_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

VectorC SparseSolver::solve(const SparseMatrixC& matrix, const VectorC& rhs, double tol) {
  if (!(tol > 0.0 && tol <= 1e-6)) throw std::invalid_argument("SparseSolver::solve: tol must lie in (0, 1e-6]");
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size()) {
    throw std::invalid_argument("SparseSolver::solve: dimension mismatch");
  }
  if (!matrix.isCompressed()) {
    SparseMatrixC compressed = matrix;
    compressed.makeCompressed();
    return solve(compressed, rhs, tol);
  }
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    last_residual_ = 0.0;
    return VectorC::Zero(rhs.size());
  }
  if (!impl_->same_pattern(matrix)) {
    impl_->lu.analyzePattern(matrix);
    impl_->outer.assign(matrix.outerIndexPtr(), matrix.outerIndexPtr() + matrix.outerSize() + 1);
    impl_->inner.assign(matrix.innerIndexPtr(), matrix.innerIndexPtr() + matrix.nonZeros());
    impl_->analyzed = true;
  }
  impl_->lu.factorize(matrix);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->analyzed = false;
    throw SolveError("SparseSolver: factorization failed", std::numeric_limits<double>::infinity());
  }
  VectorC x = impl_->lu.solve(rhs);
  VectorC r = rhs - matrix * x;
  last_residual_ = r.norm() / bnorm;
  for (int step = 0; step < 4 && last_residual_ > tol; ++step) {
    x += impl_->lu.solve(r);
    r = rhs - matrix * x;
    last_residual_ = r.norm() / bnorm;
  }
  if (!(last_residual_ <= tol)) {
    throw SolveError("SparseSolver: relative residual " + std::to_string(last_residual_) + " above tolerance",
                     last_residual_);
  }
  return x;
}

DiscreteField solve(const AssembledSystem& system, const HelmholtzAssembler& assembler, double tol) {
  SparseSolver solver;
  const VectorC x = solver.solve(system.matrix, system.rhs, tol);
  return DiscreteField{assembler.space_ptr(), assembler.extend_to_full(x)};
}

// ---------------------------------------------------------------------------
// Evaluation

FieldValue evaluate(const DiscreteField& field, const Point2& x) {
  const FeSpace& space = *field.space;
  const auto t = space.mesh().locate(x);
  if (!t) throw std::out_of_range("evaluate: point outside the mesh");
  const auto geo = space.geometry(*t);
  const auto bary = space.mesh().barycentric(*t, x);
  std::array<double, 6> phi{};
  std::array<Vec2, 6> grad{};
  space.shape(geo, bary, phi.data(), grad.data());
  const int* dofs = space.element_dofs(*t);
  FieldValue out{Complex(0.0), CVec2::Zero()};
  for (int a = 0; a < space.local_count(); ++a) {
    const Complex c = field.coefficients[dofs[a]];
    out.value += c * phi[static_cast<std::size_t>(a)];
    out.gradient += c * grad[static_cast<std::size_t>(a)].cast<Complex>();
  }
  return out;
}

ErrorNorms error_norms(const DiscreteField& field, const std::function<FieldValue(const Point2&)>& exact, double r_max,
                       int quad_degree) {
  const FeSpace& space = *field.space;
  const TriQuadRule rule = quad_rule(quad_degree > 0 ? quad_degree : 6);
  const int nloc = space.local_count();
  const auto& verts = space.mesh().vertices();
  ErrorNorms out;
  double e0 = 0.0, n0 = 0.0, e1 = 0.0, n1 = 0.0;
  std::array<double, 6> phi{};
  std::array<Vec2, 6> grad{};
  for (std::size_t t = 0; t < space.mesh().triangle_count(); ++t) {
    const auto& tri = space.mesh().triangles()[t];
    bool inside = true;
    for (int v : tri) inside = inside && verts[static_cast<std::size_t>(v)].norm() <= r_max + 1e-12;
    if (!inside) continue;
    const auto geo = space.geometry(t);
    const int* dofs = space.element_dofs(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      space.shape(geo, rule.points[q], phi.data(), grad.data());
      Complex uh(0.0);
      CVec2 gh = CVec2::Zero();
      for (int a = 0; a < nloc; ++a) {
        const Complex c = field.coefficients[dofs[a]];
        uh += c * phi[static_cast<std::size_t>(a)];
        gh += c * grad[static_cast<std::size_t>(a)].cast<Complex>();
      }
      const FieldValue ex = exact(space.map(t, rule.points[q]));
      const double w = rule.weights[q] * geo.area;
      e0 += w * std::norm(uh - ex.value);
      n0 += w * std::norm(ex.value);
      e1 += w * (gh - ex.gradient).squaredNorm();
      n1 += w * ex.gradient.squaredNorm();
    }
  }
  out.l2_error = std::sqrt(e0);
  out.l2_norm = std::sqrt(n0);
  out.h1_error = std::sqrt(e1);
  out.h1_norm = std::sqrt(n1);
  return out;
}

void write_matrix(std::ostream& os, const SparseMatrixC& matrix) {
  os.precision(17);
  for (int col = 0; col < matrix.outerSize(); ++col) {
    for (SparseMatrixC::InnerIterator it(matrix, col); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
    }
  }
}

}  // namespace helmqmc
