#include "helmqmc/cutoffs.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace helmqmc {

namespace {

// Monomial coefficients c[0..7] of the polynomial piece on [0,1].
constexpr std::array<std::array<double, 8>, 3> kCoefficients{{
    {0.0, 0.0, 3.0, -2.0, 0.0, 0.0, 0.0, 0.0},
    {0.0, 0.0, 0.0, 10.0, -15.0, 6.0, 0.0, 0.0},
    {0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0},
}};

double poly_derivative(const std::array<double, 8>& c, double r, int n) {
  // Horner on the n-th derivative coefficients.
  double acc = 0.0;
  for (int p = 7; p >= n; --p) {
    double falling = 1.0;
    for (int q = 0; q < n; ++q) falling *= static_cast<double>(p - q);
    acc = acc * r + c[static_cast<std::size_t>(p)] * falling;
  }
  return acc;
}

}  // namespace

CutoffPoly::CutoffPoly(int order) : order_(order) {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("CutoffPoly: order must be 1, 2 or 3, got " + std::to_string(order));
  }
}

double CutoffPoly::eval(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  return poly_derivative(kCoefficients[static_cast<std::size_t>(order_ - 1)], r, 0);
}

double CutoffPoly::deriv(double r, int n) const {
  if (n < 0 || n > order_ + 1) {
    throw std::invalid_argument("CutoffPoly::deriv: derivative order " + std::to_string(n) +
                                " exceeds smoothness class " + std::to_string(order_) + " + 1");
  }
  if (n == 0) return eval(r);
  if (r < 0.0 || r > 1.0) return 0.0;
  return poly_derivative(kCoefficients[static_cast<std::size_t>(order_ - 1)], r, n);
}

double CutoffPoly::max_slope() const {
  // The slope of every member of the family peaks at r = 1/2.
  return deriv(0.5, 1);
}

double cutoff_eval(const CutoffPoly& poly, double r) { return poly.eval(r); }

double cutoff_deriv(const CutoffPoly& poly, double r, int n) { return poly.deriv(r, n); }

namespace {

int order_for(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::pml:
      return 3;
    case ProfileKind::alt:
    case ProfileKind::ffp:
      return 2;
    case ProfileKind::fluc:
      return 1;
  }
  return 1;
}

}  // namespace

RadialProfile::RadialProfile(ProfileKind kind, double inner_radius, double outer_radius, double scale)
    : kind_(kind), inner_(inner_radius), outer_(outer_radius), scale_(scale), poly_(order_for(kind)) {
  if (!(inner_radius < outer_radius)) {
    throw std::invalid_argument("RadialProfile: inner radius must be below outer radius");
  }
  if (kind == ProfileKind::pml && !(scale > 0.0)) {
    throw std::invalid_argument("RadialProfile: pml scale must be positive");
  }
  if (kind != ProfileKind::pml) scale_ = 1.0;
}

RadialProfile RadialProfile::pml(double r1, double r2, double scale) {
  return RadialProfile(ProfileKind::pml, r1, r2, scale);
}

RadialProfile RadialProfile::alt(double r0, double eta) {
  return RadialProfile(ProfileKind::alt, r0 - eta, r0 - eta / 2.0);
}

RadialProfile RadialProfile::ffp(double r0, double eta) {
  return RadialProfile(ProfileKind::ffp, r0 - eta / 2.0, r0);
}

RadialProfile RadialProfile::fluc(double r0, double eta) {
  return RadialProfile(ProfileKind::fluc, r0 - 1.5 * eta, r0 - eta);
}

RadialJet RadialProfile::jet(double r) const {
  const double width = outer_ - inner_;
  const double t = (r - inner_) / width;
  RadialJet out;
  const double v = poly_.eval(t);
  const double d1 = (t > 0.0 && t < 1.0) ? poly_.deriv(t, 1) / width : 0.0;
  const double d2 = (t > 0.0 && t < 1.0) ? poly_.deriv(t, 2) / (width * width) : 0.0;
  switch (kind_) {
    case ProfileKind::pml:
      out = {scale_ * v, scale_ * d1, scale_ * d2};
      break;
    case ProfileKind::ffp:
      out = {v, d1, d2};
      break;
    case ProfileKind::alt:
    case ProfileKind::fluc:
      out = {1.0 - v, -d1, -d2};
      break;
  }
  return out;
}

double RadialProfile::value(double r) const { return jet(r).value; }

ProfileSample RadialProfile::eval(const Point2& x) const {
  const double r = x.norm();
  const RadialJet j = jet(r);
  ProfileSample s;
  s.value = j.value;
  if (r > 0.0 && (j.d1 != 0.0 || j.d2 != 0.0)) {
    s.gradient = (j.d1 / r) * x;
    s.laplacian = j.d2 + j.d1 / r;
  }
  return s;
}

ProfileSample radial_profile_eval(const RadialProfile& profile, const Point2& x) { return profile.eval(x); }

PmlStretch pml_sigma_alpha_beta(const RadialProfile& profile, double r) {
  if (profile.kind() != ProfileKind::pml) {
    throw std::invalid_argument("pml_sigma_alpha_beta: profile is not a pml profile");
  }
  PmlStretch s;
  if (r <= profile.inner_radius()) return s;
  const RadialJet j = profile.jet(r);
  s.sigma = j.value + r * j.d1;
  s.alpha = Complex(1.0, s.sigma);
  s.beta = Complex(1.0, j.value);
  return s;
}

}  // namespace helmqmc
