#pragma once

#include <complex>

#include <Eigen/Dense>

namespace helmqmc {

using Complex = std::complex<double>;
using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2d;
using CMat2 = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

}  // namespace helmqmc
