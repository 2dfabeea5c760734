#pragma once

#include "helmqmc/types.hpp"

namespace helmqmc {

/// Bessel functions of the first and second kind, orders 0 and 1, for x > 0.
/// Ascending series in extended precision up to kSeriesLimit, Hankel's
/// asymptotic expansion beyond.
double bessel_j0(double x);
double bessel_j1(double x);
double bessel_y0(double x);
double bessel_y1(double x);

/// H_n^(1)(x) = J_n(x) + i Y_n(x) for n in {0, 1}.
Complex hankel1(int n, double x);

inline constexpr double kSeriesLimit = 17.0;

}  // namespace helmqmc
