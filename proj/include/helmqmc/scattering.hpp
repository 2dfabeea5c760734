#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "helmqmc/cutoffs.hpp"
#include "helmqmc/fem.hpp"
#include "helmqmc/types.hpp"

namespace helmqmc {

/// u^I(x) = exp(i k alpha . x).
class PlaneWave {
 public:
  PlaneWave(double k, Vec2 direction);

  double k() const { return k_; }
  const Vec2& direction() const { return direction_; }

  Complex value(const Point2& x) const;
  CVec2 gradient(const Point2& x) const;

 private:
  double k_;
  Vec2 direction_;
};

/// f^alt = 2 grad(phi_alt) . grad(u^I) + u^I lap(phi_alt), so that
/// (Delta + k^2)((1 - phi_alt) u^I) = -f^alt.
Complex f_alt(const PlaneWave& pw, const RadialProfile& alt, const Point2& x);

struct OracleSample {
  Complex w;
  CVec2 grad_w;
  Complex f_w;
};

/// w = chi(|x|) (i/4) H_0^(1)(k|x|) and f_w = (Delta + k^2) w.
OracleSample exact_oracle(double k, const RadialProfile& chi, const Point2& x);

enum class LoadKind { volume_f, plane_wave_alt, exact_oracle };

struct LoadSpec {
  LoadKind kind = LoadKind::volume_f;
  // volume_f
  std::function<Complex(const Point2&)> f;
  double r_lo = 0.0;
  double r_hi = std::numeric_limits<double>::infinity();
  // plane_wave_alt
  PlaneWave wave{1.0, Vec2(0.0, -1.0)};
  RadialProfile alt = RadialProfile::alt(4.5, 1.0);
  // exact_oracle
  double k = 1.0;
  RadialProfile chi = RadialProfile::ffp(2.0, 2.0);

  static LoadSpec volume(std::function<Complex(const Point2&)> f);
  static LoadSpec plane_wave(const PlaneWave& wave, const RadialProfile& alt);
  static LoadSpec oracle(double k, const RadialProfile& chi);
};

/// Full-dof load vector: +int f phi_i for volume_f, -int f^alt phi_i for
/// plane_wave_alt and -int f_w phi_i for exact_oracle. The latter two follow
/// from writing the equation as div(A grad u) + k^2 n u = -f.
VectorC build_load(const FeSpace& space, const LoadSpec& load);

struct FarFieldPattern {
  std::vector<double> angles_deg;
  std::vector<Complex> values;
};

/// Integer degrees 1..360.
std::vector<double> default_angles();

/// c(2, k) = e^{i pi/4} / (2 sqrt(2 pi) sqrt(k)).
Complex farfield_prefactor(double k);

/// u_inf(xhat) = c(2,k) int u (lap(phi_ffp) - 2ik xhat . grad(phi_ffp)) e^{-ik x . xhat}
/// by element quadrature over the transition annulus of phi_ffp.
FarFieldPattern far_field(const DiscreteField& field, const RadialProfile& ffp, double k,
                          const std::vector<double>& angles_deg, int quad_degree = 0);

/// The same functional precomputed as a dense (angles x dofs) operator on the
/// dofs touching the transition annulus.
class FarFieldOperator {
 public:
  FarFieldOperator(const FeSpace& space, const RadialProfile& ffp, double k, std::vector<double> angles_deg,
                   int quad_degree = 0);

  FarFieldPattern apply(const VectorC& coefficients) const;
  const std::vector<double>& angles() const { return angles_; }

 private:
  std::vector<double> angles_;
  std::vector<int> dofs_;
  Eigen::MatrixXcd matrix_;
};

/// Point values of a field at x = radius (cos t, sin t) for the given angles.
class CircleSampler {
 public:
  CircleSampler(const FeSpace& space, double radius, std::vector<double> angles_deg);

  std::vector<Complex> apply(const VectorC& coefficients) const;
  const std::vector<double>& angles() const { return angles_; }
  double radius() const { return radius_; }

 private:
  double radius_;
  std::vector<double> angles_;
  int nloc_ = 0;
  std::vector<int> dofs_;
  std::vector<double> weights_;
};

/// CSV with header angle_deg,re,im,abs.
void write_farfield_csv(std::ostream& os, const FarFieldPattern& pattern);

}  // namespace helmqmc
