#include "helmqmc/scattering.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "helmqmc/special.hpp"

namespace helmqmc {

PlaneWave::PlaneWave(double k, Vec2 direction) : k_(k), direction_(std::move(direction)) {
  if (!(k_ > 0.0)) throw std::invalid_argument("PlaneWave: wavenumber must be positive");
  if (std::abs(direction_.norm() - 1.0) > 1e-14) throw std::invalid_argument("PlaneWave: direction must be a unit vector");
}

Complex PlaneWave::value(const Point2& x) const {
  const double phase = k_ * direction_.dot(x);
  return {std::cos(phase), std::sin(phase)};
}

CVec2 PlaneWave::gradient(const Point2& x) const { return (kI * k_ * value(x)) * direction_.cast<Complex>(); }

Complex f_alt(const PlaneWave& pw, const RadialProfile& alt, const Point2& x) {
  if (alt.is_flat_at(x.norm())) return 0.0;
  const ProfileSample s = alt.eval(x);
  const Complex ui = pw.value(x);
  const Complex grad_dot = kI * pw.k() * ui * s.gradient.dot(pw.direction());
  return 2.0 * grad_dot + ui * s.laplacian;
}

OracleSample exact_oracle(double k, const RadialProfile& chi, const Point2& x) {
  OracleSample out{Complex(0.0), CVec2::Zero(), Complex(0.0)};
  const double r = x.norm();
  const ProfileSample c = chi.eval(x);
  if (c.value == 0.0 && c.gradient.isZero(0.0) && c.laplacian == 0.0) return out;
  // G = (i/4) H0(kr), grad G = -(i/4) k H1(kr) xhat
  const Complex g = 0.25 * kI * hankel1(0, k * r);
  const Complex dg = -0.25 * kI * k * hankel1(1, k * r);
  const Vec2 xhat = x / r;
  out.w = c.value * g;
  out.grad_w = (c.gradient.cast<Complex>() * g) + (c.value * dg) * xhat.cast<Complex>();
  out.f_w = 2.0 * c.gradient.dot(xhat) * dg + g * c.laplacian;
  return out;
}

LoadSpec LoadSpec::volume(std::function<Complex(const Point2&)> f) {
  LoadSpec s;
  s.kind = LoadKind::volume_f;
  s.f = std::move(f);
  return s;
}

LoadSpec LoadSpec::plane_wave(const PlaneWave& wave, const RadialProfile& alt) {
  if (alt.kind() != ProfileKind::alt) throw std::invalid_argument("LoadSpec: profile must be of kind alt");
  LoadSpec s;
  s.kind = LoadKind::plane_wave_alt;
  s.wave = wave;
  s.alt = alt;
  return s;
}

LoadSpec LoadSpec::oracle(double k, const RadialProfile& chi) {
  if (!(k > 0.0)) throw std::invalid_argument("LoadSpec: wavenumber must be positive");
  if (chi.value(0.0) != 0.0) throw std::invalid_argument("LoadSpec: oracle cutoff must vanish near the origin");
  LoadSpec s;
  s.kind = LoadKind::exact_oracle;
  s.k = k;
  s.chi = chi;
  return s;
}

VectorC build_load(const FeSpace& space, const LoadSpec& load) {
  LoadFunctional functional;
  switch (load.kind) {
    case LoadKind::volume_f:
      if (!load.f) return VectorC::Zero(static_cast<Eigen::Index>(space.dof_count()));
      functional.density = load.f;
      functional.r_lo = load.r_lo;
      functional.r_hi = load.r_hi;
      functional.sign = 1.0;
      break;
    case LoadKind::plane_wave_alt:
      functional.density = [&load](const Point2& x) { return f_alt(load.wave, load.alt, x); };
      functional.r_lo = load.alt.inner_radius();
      functional.r_hi = load.alt.outer_radius();
      functional.sign = -1.0;
      break;
    case LoadKind::exact_oracle:
      functional.density = [&load](const Point2& x) { return exact_oracle(load.k, load.chi, x).f_w; };
      functional.r_lo = load.chi.inner_radius();
      functional.r_hi = load.chi.outer_radius();
      functional.sign = -1.0;
      break;
  }
  return integrate_load(space, functional);
}

std::vector<double> default_angles() {
  std::vector<double> out(360);
  for (int i = 0; i < 360; ++i) out[static_cast<std::size_t>(i)] = i + 1.0;
  return out;
}

Complex farfield_prefactor(double k) {
  return std::polar(1.0, kPi / 4.0) / (2.0 * std::sqrt(2.0 * kPi) * std::sqrt(k));
}

namespace {

bool touches_annulus(const FeSpace& space, std::size_t t, double lo, double hi) {
  const auto& tri = space.mesh().triangles()[t];
  const auto& v = space.mesh().vertices();
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  double edge = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const Point2& p = v[static_cast<std::size_t>(tri[k])];
    rmin = std::min(rmin, p.norm());
    rmax = std::max(rmax, p.norm());
    edge = std::max(edge, (p - v[static_cast<std::size_t>(tri[(k + 1) % 3])]).norm());
  }
  return rmin - edge < hi && rmax > lo;
}

Vec2 direction_of(double deg) {
  const double t = deg * kPi / 180.0;
  return {std::cos(t), std::sin(t)};
}

}  // namespace

FarFieldPattern far_field(const DiscreteField& field, const RadialProfile& ffp, double k,
                          const std::vector<double>& angles_deg, int quad_degree) {
  if (ffp.kind() != ProfileKind::ffp) throw std::invalid_argument("far_field: profile must be of kind ffp");
  const FeSpace& space = *field.space;
  const TriQuadRule rule = quad_rule(quad_degree > 0 ? quad_degree : std::min(6, 2 * space.degree() + 2));
  const int nloc = space.local_count();
  const Complex c = farfield_prefactor(k);
  std::vector<Vec2> dirs;
  for (double a : angles_deg) dirs.push_back(direction_of(a));
  std::vector<Complex> acc(angles_deg.size(), Complex(0.0));
  std::array<double, 6> phi{};
  for (std::size_t t = 0; t < space.mesh().triangle_count(); ++t) {
    if (!touches_annulus(space, t, ffp.inner_radius(), ffp.outer_radius())) continue;
    const auto geo = space.geometry(t);
    const int* dofs = space.element_dofs(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Point2 x = space.map(t, rule.points[q]);
      const ProfileSample s = ffp.eval(x);
      if (s.laplacian == 0.0 && s.gradient.isZero(0.0)) continue;
      space.shape(geo, rule.points[q], phi.data(), nullptr);
      Complex u(0.0);
      for (int a = 0; a < nloc; ++a) u += field.coefficients[dofs[a]] * phi[static_cast<std::size_t>(a)];
      const Complex wu = rule.weights[q] * geo.area * u;
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Complex kernel = s.laplacian - 2.0 * kI * k * dirs[d].dot(s.gradient);
        acc[d] += wu * kernel * std::polar(1.0, -k * x.dot(dirs[d]));
      }
    }
  }
  FarFieldPattern out;
  out.angles_deg = angles_deg;
  out.values.resize(acc.size());
  for (std::size_t d = 0; d < acc.size(); ++d) out.values[d] = c * acc[d];
  return out;
}

FarFieldOperator::FarFieldOperator(const FeSpace& space, const RadialProfile& ffp, double k,
                                   std::vector<double> angles_deg, int quad_degree)
    : angles_(std::move(angles_deg)) {
  if (ffp.kind() != ProfileKind::ffp) throw std::invalid_argument("FarFieldOperator: profile must be of kind ffp");
  const TriQuadRule rule = quad_rule(quad_degree > 0 ? quad_degree : std::min(6, 2 * space.degree() + 2));
  const int nloc = space.local_count();
  std::vector<std::size_t> elements;
  std::vector<int> column(space.dof_count(), -1);
  for (std::size_t t = 0; t < space.mesh().triangle_count(); ++t) {
    if (!touches_annulus(space, t, ffp.inner_radius(), ffp.outer_radius())) continue;
    elements.push_back(t);
    const int* dofs = space.element_dofs(t);
    for (int a = 0; a < nloc; ++a) {
      auto& col = column[static_cast<std::size_t>(dofs[a])];
      if (col < 0) {
        col = static_cast<int>(dofs_.size());
        dofs_.push_back(dofs[a]);
      }
    }
  }
  matrix_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(angles_.size()), static_cast<Eigen::Index>(dofs_.size()));
  const Complex c = farfield_prefactor(k);
  std::vector<Vec2> dirs;
  for (double a : angles_) dirs.push_back(direction_of(a));
  std::array<double, 6> phi{};
  for (std::size_t t : elements) {
    const auto geo = space.geometry(t);
    const int* dofs = space.element_dofs(t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Point2 x = space.map(t, rule.points[q]);
      const ProfileSample s = ffp.eval(x);
      if (s.laplacian == 0.0 && s.gradient.isZero(0.0)) continue;
      space.shape(geo, rule.points[q], phi.data(), nullptr);
      const double w = rule.weights[q] * geo.area;
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Complex kernel =
            c * w * (s.laplacian - 2.0 * kI * k * dirs[d].dot(s.gradient)) * std::polar(1.0, -k * x.dot(dirs[d]));
        for (int a = 0; a < nloc; ++a) {
          matrix_(static_cast<Eigen::Index>(d), column[static_cast<std::size_t>(dofs[a])]) +=
              kernel * phi[static_cast<std::size_t>(a)];
        }
      }
    }
  }
}

FarFieldPattern FarFieldOperator::apply(const VectorC& coefficients) const {
  VectorC local(static_cast<Eigen::Index>(dofs_.size()));
  for (std::size_t j = 0; j < dofs_.size(); ++j) local[static_cast<Eigen::Index>(j)] = coefficients[dofs_[j]];
  const VectorC values = matrix_ * local;
  FarFieldPattern out;
  out.angles_deg = angles_;
  out.values.assign(values.data(), values.data() + values.size());
  return out;
}

CircleSampler::CircleSampler(const FeSpace& space, double radius, std::vector<double> angles_deg)
    : radius_(radius), angles_(std::move(angles_deg)), nloc_(space.local_count()) {
  std::array<double, 6> phi{};
  for (double a : angles_) {
    const Point2 x = radius_ * direction_of(a);
    const auto t = space.mesh().locate(x);
    if (!t) throw std::out_of_range("CircleSampler: sample point outside the mesh");
    const auto geo = space.geometry(*t);
    space.shape(geo, space.mesh().barycentric(*t, x), phi.data(), nullptr);
    const int* dofs = space.element_dofs(*t);
    for (int k = 0; k < nloc_; ++k) {
      dofs_.push_back(dofs[k]);
      weights_.push_back(phi[static_cast<std::size_t>(k)]);
    }
  }
}

std::vector<Complex> CircleSampler::apply(const VectorC& coefficients) const {
  std::vector<Complex> out(angles_.size(), Complex(0.0));
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    for (int k = 0; k < nloc_; ++k) {
      const std::size_t j = i * static_cast<std::size_t>(nloc_) + static_cast<std::size_t>(k);
      out[i] += coefficients[dofs_[j]] * weights_[j];
    }
  }
  return out;
}

void write_farfield_csv(std::ostream& os, const FarFieldPattern& pattern) {
  os << "angle_deg,re,im,abs\n";
  char buf[160];
  for (std::size_t i = 0; i < pattern.values.size(); ++i) {
    const Complex v = pattern.values[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", pattern.angles_deg[i], v.real(), v.imag(),
                  std::abs(v));
    os << buf;
  }
}

}  // namespace helmqmc
