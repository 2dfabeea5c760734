#include "helmqmc/randomfield.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace helmqmc {

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!(values_[j] >= -0.5 && values_[j] <= 0.5)) {
      throw std::invalid_argument("ParamVector: component " + std::to_string(j + 1) + " outside [-1/2, 1/2]");
    }
  }
}

ParamVector truncate(const ParamVector& y, std::size_t s) {
  if (s > y.size()) throw std::invalid_argument("truncate: s exceeds the parameter dimension");
  auto v = y.values();
  return ParamVector(std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(s)));
}

void RandomFieldSpec::validate() const {
  if (!(q > 1.0)) throw std::invalid_argument("RandomFieldSpec: decay exponent q must exceed 1");
  if (!(xi_n >= 0.0)) throw std::invalid_argument("RandomFieldSpec: xi_n must be nonnegative");
  if (!(xi_A >= 0.0)) throw std::invalid_argument("RandomFieldSpec: xi_A must be nonnegative");
  if (fluc_profile.kind() != ProfileKind::fluc) {
    throw std::invalid_argument("RandomFieldSpec: fluctuation profile must be of kind fluc");
  }
}

double RandomFieldSpec::psi(std::size_t j, const Point2& x) const {
  const double jd = static_cast<double>(j);
  return std::pow(jd, -q) * std::sin(jd * kPi * x.x()) * std::sin(jd * kPi * x.y()) *
         fluc_profile.value(x.norm());
}

double RandomFieldSpec::fluctuation(std::span<const double> y, const Point2& x) const {
  if (y.empty()) return 0.0;
  const double cutoff = fluc_profile.value(x.norm());
  if (cutoff == 0.0) return 0.0;
  // sin((j+1)a) = 2 cos(a) sin(ja) - sin((j-1)a)
  const double a = kPi * x.x();
  const double b = kPi * x.y();
  const double ca = 2.0 * std::cos(a);
  const double cb = 2.0 * std::cos(b);
  double sa_prev = 0.0, sa = std::sin(a);
  double sb_prev = 0.0, sb = std::sin(b);
  double acc = 0.0;
  for (std::size_t j = 1; j <= y.size(); ++j) {
    const double jd = static_cast<double>(j);
    const double decay = (q == 3.0) ? 1.0 / (jd * jd * jd) : std::pow(jd, -q);
    acc += y[j - 1] * decay * sa * sb;
    const double sa_next = ca * sa - sa_prev;
    const double sb_next = cb * sb - sb_prev;
    sa_prev = sa;
    sa = sa_next;
    sb_prev = sb;
    sb = sb_next;
  }
  return acc * cutoff;
}

double sample_n(const RandomFieldSpec& spec, const ParamVector& y, const Point2& x) {
  return spec.n0 + spec.xi_n * spec.fluctuation(y.values(), x);
}

Mat2 sample_A(const RandomFieldSpec& spec, const ParamVector& y, const Point2& x) {
  Mat2 a = Mat2::Identity();
  if (spec.xi_A == 0.0) return a;
  const std::size_t terms = std::min(y.size(), spec.a_modes.size());
  for (std::size_t j = 0; j < terms; ++j) {
    if (y[j] != 0.0) a += spec.xi_A * y[j] * spec.a_modes[j](x);
  }
  return a;
}

AdmissibilitySums admissibility_sums(const RandomFieldSpec& spec, std::size_t j_max) {
  if (j_max < 1) throw std::invalid_argument("admissibility_sums: j_max must be at least 1");
  const double q = spec.q;
  const double rho = spec.fluc_profile.outer_radius();
  const double width = spec.fluc_profile.outer_radius() - spec.fluc_profile.inner_radius();
  const double slope = spec.fluc_profile.poly().max_slope() / width;

  AdmissibilitySums out;
  out.c1 = 2.0 * rho * kPi;
  out.c0 = 1.0 + 2.0 * rho * slope;

  // Sum smallest terms first.
  for (std::size_t j = j_max; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    const double t = std::pow(jd, -q);
    out.partial_inf += t;
    out.partial_nontrap += t * (out.c1 * jd + out.c0);
  }
  const double jm = static_cast<double>(j_max);
  // sum_{j>J} j^{-p} <= int_J^inf x^{-p} dx for decreasing summands.
  out.tail_inf = std::pow(jm, 1.0 - q) / (q - 1.0);
  out.tail_nontrap = out.c0 * out.tail_inf +
                     (q > 2.0 ? out.c1 * std::pow(jm, 2.0 - q) / (q - 2.0)
                              : std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace helmqmc
