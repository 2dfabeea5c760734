#pragma once

#include <functional>
#include <span>
#include <vector>

#include "helmqmc/cutoffs.hpp"
#include "helmqmc/types.hpp"

namespace helmqmc {

/// Parameter vector y in [-1/2, 1/2]^s.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

 private:
  std::vector<double> values_;
};

/// Keep the first s entries; the remainder is implicitly zero.
ParamVector truncate(const ParamVector& y, std::size_t s);

/// Matrix-valued fluctuation Psi_j(x).
using MatrixMode = std::function<Mat2(const Point2&)>;

/// Affine random coefficients
///
///   A(x,y) = A_0 + xi_A sum_j y_j Psi_j(x)
///   n(x,y) = n_0 + xi_n sum_j y_j psi_j(x),
///   psi_j(x) = j^{-q} sin(j pi x1) sin(j pi x2) phi_fluc(|x|).
///
/// A_0 is the identity.
struct RandomFieldSpec {
  double n0 = 1.0;
  double xi_n = 0.8319;
  double q = 3.0;
  RadialProfile fluc_profile = RadialProfile::fluc(4.5, 1.0);
  double xi_A = 0.0;
  std::vector<MatrixMode> a_modes;

  void validate() const;

  /// psi_j(x) for j >= 1.
  double psi(std::size_t j, const Point2& x) const;

  /// sum_{j<=s} y_j psi_j(x), evaluated with a sine recurrence.
  double fluctuation(std::span<const double> y, const Point2& x) const;

  /// Radius beyond which n(x,y) = n0 for every y.
  double support_radius() const { return fluc_profile.outer_radius(); }

  bool has_matrix_fluctuation() const { return xi_A != 0.0 && !a_modes.empty(); }
};

double sample_n(const RandomFieldSpec& spec, const ParamVector& y, const Point2& x);
Mat2 sample_A(const RandomFieldSpec& spec, const ParamVector& y, const Point2& x);

struct AdmissibilitySums {
  /// sum_{j<=j_max} ||psi_j||_inf bound  (sum j^{-q})
  double partial_inf = 0.0;
  /// integral tail bound for j > j_max
  double tail_inf = 0.0;
  /// sum_{j<=j_max} j^{-q} (c1 j + c0), the nontrapping bound
  double partial_nontrap = 0.0;
  double tail_nontrap = 0.0;
  /// slope/offset of the nontrapping summand (7 pi and 22 for the shipped field)
  double c1 = 0.0;
  double c0 = 0.0;

  double sum_inf() const { return partial_inf + tail_inf; }
  double sum_nontrap() const { return partial_nontrap + tail_nontrap; }
};

/// Partial sums of the sup-norm and nontrapping bounds with rigorous integral
/// tails. The nontrapping summand is j^{-q}(1 + 2 rho (j pi + g)) with rho the
/// fluctuation support radius and g the maximal slope of phi_fluc.
AdmissibilitySums admissibility_sums(const RandomFieldSpec& spec, std::size_t j_max);

}  // namespace helmqmc
