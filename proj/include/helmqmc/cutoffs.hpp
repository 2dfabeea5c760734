#pragma once

#include "helmqmc/types.hpp"

namespace helmqmc {

/// Piecewise polynomial step: 0 for r <= 0, 1 for r >= 1, and on [0,1] the
/// unique odd-degree polynomial whose first `order` derivatives vanish at
/// both ends (3r^2-2r^3, 10r^3-15r^4+6r^5, 35r^4-84r^5+70r^6-20r^7).
class CutoffPoly {
 public:
  explicit CutoffPoly(int order);

  int order() const { return order_; }

  double eval(double r) const;

  /// Exact n-th derivative. Accepts 0 <= n <= order + 1; beyond that the
  /// derivative is discontinuous at the knots and is rejected.
  double deriv(double r, int n) const;

  /// max over [0,1] of the first derivative.
  double max_slope() const;

 private:
  int order_;
};

double cutoff_eval(const CutoffPoly& poly, double r);
double cutoff_deriv(const CutoffPoly& poly, double r, int n);

enum class ProfileKind { pml, alt, ffp, fluc };

/// Value and first two radial derivatives of a radial profile.
struct RadialJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

struct ProfileSample {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  double laplacian = 0.0;
};

/// Radial cutoff profile on the transition annulus [inner, outer].
///
///   pml  : scale * cut3(t), rising from 0 to `scale`
///   alt  : 1 - cut2(t),     falling from 1 to 0
///   ffp  : cut2(t),         rising from 0 to 1
///   fluc : 1 - cut1(t),     falling from 1 to 0
///
/// with t = (r - inner) / (outer - inner).
class RadialProfile {
 public:
  RadialProfile(ProfileKind kind, double inner_radius, double outer_radius, double scale = 1.0);

  static RadialProfile pml(double r1, double r2, double scale);
  /// 1 on [0, r0 - eta], 0 beyond r0 - eta/2.
  static RadialProfile alt(double r0, double eta);
  /// 0 on [0, r0 - eta/2], 1 beyond r0.
  static RadialProfile ffp(double r0, double eta);
  /// 1 on [0, r0 - 3eta/2], 0 beyond r0 - eta.
  static RadialProfile fluc(double r0, double eta);

  ProfileKind kind() const { return kind_; }
  double inner_radius() const { return inner_; }
  double outer_radius() const { return outer_; }
  double scale() const { return scale_; }
  const CutoffPoly& poly() const { return poly_; }

  double value(double r) const;
  RadialJet jet(double r) const;

  /// Value, gradient and Laplacian of x -> phi(|x|) in two dimensions.
  ProfileSample eval(const Point2& x) const;

  /// True when the profile is constant in a neighbourhood of radius r.
  bool is_flat_at(double r) const { return r <= inner_ || r >= outer_; }

 private:
  ProfileKind kind_;
  double inner_;
  double outer_;
  double scale_;
  CutoffPoly poly_;
};

ProfileSample radial_profile_eval(const RadialProfile& profile, const Point2& x);

struct PmlStretch {
  double sigma = 0.0;
  Complex alpha{1.0, 0.0};
  Complex beta{1.0, 0.0};
};

/// sigma = (r phi(r))', alpha = 1 + i sigma, beta = 1 + i phi for a pml profile.
PmlStretch pml_sigma_alpha_beta(const RadialProfile& profile, double r);

}  // namespace helmqmc
