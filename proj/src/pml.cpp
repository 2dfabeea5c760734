#include "helmqmc/pml.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace helmqmc {

PmlProfile::PmlProfile(double r1, double r2, double scale, int dimension)
    : profile_(RadialProfile::pml(r1, r2, scale)) {
  if (dimension != 2) {
    throw std::invalid_argument("PmlProfile: only two-dimensional PMLs are implemented");
  }
  if (!(r1 > 0.0)) throw std::invalid_argument("PmlProfile: R1 must be positive");
}

PmlCoefficients pml_coefficients(const PmlProfile& profile, const Mat2& a_phys, double n_phys, const Point2& x) {
  PmlCoefficients out;
  const double r = x.norm();
  if (r <= profile.r1()) {
    out.a_pml = a_phys.cast<Complex>();
    out.n_pml = n_phys;
    return out;
  }
  const PmlStretch s = profile.stretch(r);
  const Complex radial = s.beta / s.alpha;
  const Complex tangential = s.alpha / s.beta;
  const Vec2 e = x / r;
  const Complex diff = radial - tangential;
  out.a_pml(0, 0) = tangential + diff * (e.x() * e.x());
  out.a_pml(1, 1) = tangential + diff * (e.y() * e.y());
  out.a_pml(0, 1) = diff * (e.x() * e.y());
  out.a_pml(1, 0) = out.a_pml(0, 1);
  out.n_pml = s.alpha * s.beta;
  return out;
}

double pml_positivity_margin(const PmlProfile& profile, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("pml_positivity_margin: samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double r = profile.r1() + unit(rng) * (profile.r2() + 1.0 - profile.r1());
    const double theta = 2.0 * kPi * unit(rng);
    const Point2 x(r * std::cos(theta), r * std::sin(theta));
    const CMat2 a = pml_coefficients(profile, Mat2::Identity(), 1.0, x).a_pml;
    CVec2 zeta(Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng)));
    zeta.normalize();
    // Eigen's dot conjugates its first argument.
    const Complex form = zeta.dot(a * zeta);
    margin = std::min(margin, form.real());
  }
  return margin;
}

}  // namespace helmqmc
