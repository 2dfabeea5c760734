#include <doctest.h>

#include <cmath>
#include <random>

#include "helmqmc/cutoffs.hpp"

using namespace helmqmc;

TEST_CASE("cutoff polynomial values") {
  CHECK(cutoff_eval(CutoffPoly(3), -0.5) == 0.0);
  CHECK(cutoff_eval(CutoffPoly(2), 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cutoff_eval(CutoffPoly(1), 0.25) == doctest::Approx(0.15625).epsilon(1e-15));
  CHECK(cutoff_eval(CutoffPoly(1), 3.0) == 1.0);
  // 35r^4 - 84r^5 + 70r^6 - 20r^7 at r = 0.3
  const double r = 0.3;
  const double expect = 35 * std::pow(r, 4) - 84 * std::pow(r, 5) + 70 * std::pow(r, 6) - 20 * std::pow(r, 7);
  CHECK(cutoff_eval(CutoffPoly(3), r) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("cutoff polynomial derivatives") {
  CHECK(cutoff_deriv(CutoffPoly(2), 0.0, 1) == 0.0);
  CHECK(cutoff_deriv(CutoffPoly(2), 0.5, 1) == doctest::Approx(1.875).epsilon(1e-15));
  CHECK(cutoff_deriv(CutoffPoly(3), 1.2, 1) == 0.0);
  CHECK_THROWS(cutoff_deriv(CutoffPoly(1), 0.5, 3));
  CHECK(CutoffPoly(1).max_slope() == doctest::Approx(1.5));
}

TEST_CASE("cutoff derivatives match finite differences and are continuous at the knots") {
  for (int order = 1; order <= 3; ++order) {
    const CutoffPoly p(order);
    for (double r : {0.1, 0.37, 0.5, 0.81}) {
      for (int n = 1; n <= order + 1; ++n) {
        const double h = 1e-5;
        const double fd = (p.deriv(r + h, n - 1) - p.deriv(r - h, n - 1)) / (2 * h);
        CHECK(p.deriv(r, n) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
    for (int n = 1; n <= order; ++n) {
      for (double knot : {0.0, 1.0}) {
        const double left = p.deriv(knot - 1e-9, n);
        const double right = p.deriv(knot + 1e-9, n);
        CHECK(std::abs(left - right) < 1e-6);
      }
    }
  }
}

TEST_CASE("partition identity and monotonicity") {
  for (int order = 1; order <= 3; ++order) {
    const CutoffPoly p(order);
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double r = i / 1000.0;
      CHECK(p.eval(r) + p.eval(1.0 - r) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(p.eval(r) >= prev - 1e-15);
      prev = p.eval(r);
    }
  }
}

TEST_CASE("pml stretching functions") {
  const RadialProfile pml = RadialProfile::pml(4.52, 5.0, 3.0);
  const PmlStretch inside = pml_sigma_alpha_beta(pml, 4.0);
  CHECK(inside.sigma == 0.0);
  CHECK(inside.alpha == Complex(1.0, 0.0));
  CHECK(inside.beta == Complex(1.0, 0.0));

  const PmlStretch outside = pml_sigma_alpha_beta(pml, 6.0);
  CHECK(outside.sigma == doctest::Approx(3.0));
  CHECK(std::abs(outside.alpha - Complex(1.0, 3.0)) < 1e-14);
  CHECK(std::abs(outside.beta - Complex(1.0, 3.0)) < 1e-14);

  const double r = 4.76, h = 1e-6;
  const double fd = ((r + h) * pml.value(r + h) - (r - h) * pml.value(r - h)) / (2 * h);
  CHECK(pml_sigma_alpha_beta(pml, r).sigma == doctest::Approx(fd).epsilon(1e-7));

  for (double knot : {4.52, 5.0}) {
    const double a = pml_sigma_alpha_beta(pml, knot - 1e-12).sigma;
    const double b = pml_sigma_alpha_beta(pml, knot + 1e-12).sigma;
    CHECK(std::abs(a - b) < 1e-9);
  }
}

TEST_CASE("radial profile evaluation") {
  const RadialProfile alt = RadialProfile::alt(4.5, 1.0);
  const ProfileSample a = radial_profile_eval(alt, Point2(1.0, 0.0));
  CHECK(a.value == 1.0);
  CHECK(a.gradient.norm() == 0.0);
  CHECK(a.laplacian == 0.0);

  const ProfileSample f = radial_profile_eval(RadialProfile::ffp(4.5, 1.0), Point2(5.0, 0.0));
  CHECK(f.value == 1.0);
  CHECK(f.gradient.norm() == 0.0);
  CHECK(f.laplacian == 0.0);

  const Point2 x(3.75, 0.0);
  const double h = 1e-6;
  const ProfileSample s = alt.eval(x);
  const double gx = (alt.eval(x + Point2(h, 0)).value - alt.eval(x - Point2(h, 0)).value) / (2 * h);
  const double gy = (alt.eval(x + Point2(0, h)).value - alt.eval(x - Point2(0, h)).value) / (2 * h);
  CHECK(std::abs(s.gradient.x() - gx) < 1e-6);
  CHECK(std::abs(s.gradient.y() - gy) < 1e-6);
}

TEST_CASE("gradient and laplacian consistency on random points") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-5.5, 5.5);
  const std::vector<RadialProfile> profiles{RadialProfile::pml(4.52, 5.0, 3.0), RadialProfile::alt(4.5, 1.0),
                                            RadialProfile::ffp(4.5, 1.0), RadialProfile::fluc(4.5, 1.0)};
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const Point2 x(u(gen), u(gen));
    for (const auto& p : profiles) {
      const double r = x.norm();
      // Central differences straddling a knot see the jump in higher derivatives.
      if (std::abs(r - p.inner_radius()) < 1e-3 || std::abs(r - p.outer_radius()) < 1e-3) continue;
      const ProfileSample s = p.eval(x);
      const double h = 1e-5;
      Vec2 fd;
      fd.x() = (p.eval(x + Point2(h, 0)).value - p.eval(x - Point2(h, 0)).value) / (2 * h);
      fd.y() = (p.eval(x + Point2(0, h)).value - p.eval(x - Point2(0, h)).value) / (2 * h);
      const double scale = std::max(1.0, s.gradient.norm());
      CHECK((s.gradient - fd).norm() <= 1e-5 * scale);
      const double hl = 1e-4;
      const double lap = (p.eval(x + Point2(hl, 0)).value + p.eval(x - Point2(hl, 0)).value +
                          p.eval(x + Point2(0, hl)).value + p.eval(x - Point2(0, hl)).value - 4 * s.value) /
                         (hl * hl);
      CHECK(std::abs(s.laplacian - lap) <= 1e-3 * std::max(1.0, std::abs(s.laplacian)));
      ++checked;
    }
  }
  CHECK(checked > 39000);
}

TEST_CASE("support discipline") {
  const RadialProfile fluc = RadialProfile::fluc(4.5, 1.0);
  const RadialProfile alt = RadialProfile::alt(4.5, 1.0);
  for (double r : {3.5, 3.6, 4.0, 6.0}) CHECK(fluc.value(r) == 0.0);
  for (double r : {4.0, 4.2, 5.0}) CHECK(alt.value(r) == 0.0);
  CHECK(fluc.value(3.0) == 1.0);
  CHECK(alt.value(3.5) == 1.0);
  CHECK(fluc.inner_radius() == 3.0);
  CHECK(fluc.outer_radius() == 3.5);
  CHECK(alt.inner_radius() == 3.5);
  CHECK(alt.outer_radius() == 4.0);
}
