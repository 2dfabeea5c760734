#pragma once

#include <cstdint>

#include "helmqmc/cutoffs.hpp"
#include "helmqmc/types.hpp"

namespace helmqmc {

/// Radial PML on the annulus R1 < r < R2 with stretching profile
/// phi_PML(r) = scale * cut3((r - R1) / (R2 - R1)).
///
/// Only two space dimensions are supported. In three dimensions the radial
/// and tangential eigenvalues would be beta^2/alpha and alpha (twice) and
/// n_PML = alpha beta^2; requesting dimension 3 throws.
class PmlProfile {
 public:
  PmlProfile(double r1, double r2, double scale, int dimension = 2);

  double r1() const { return profile_.inner_radius(); }
  double r2() const { return profile_.outer_radius(); }
  double scale() const { return profile_.scale(); }
  const RadialProfile& profile() const { return profile_; }

  PmlStretch stretch(double r) const { return pml_sigma_alpha_beta(profile_, r); }

 private:
  RadialProfile profile_;
};

struct PmlCoefficients {
  CMat2 a_pml = CMat2::Identity();
  Complex n_pml{1.0, 0.0};
};

/// A_PML = H K H^T and n_PML = alpha beta beyond R1, the physical (A, n)
/// inside. H K H^T is formed from its eigenpairs: beta/alpha on the radial
/// direction and alpha/beta on the tangential one.
PmlCoefficients pml_coefficients(const PmlProfile& profile, const Mat2& a_phys, double n_phys, const Point2& x);

/// Minimum of Re(conj(zeta)^T A_PML zeta) over random radii in [R1, R2 + 1]
/// and random complex unit vectors zeta.
double pml_positivity_margin(const PmlProfile& profile, int samples, std::uint64_t seed);

}  // namespace helmqmc
