#include "helmqmc/special.hpp"

#include <cmath>
#include <stdexcept>

namespace helmqmc {

namespace {

constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

struct SeriesPair {
  long double j;
  long double y;
};

// J_n and Y_n from the ascending series, n in {0, 1}.
SeriesPair ascending(int n, long double x) {
  const long double h = x / 2.0L;
  const long double h2 = h * h;
  const long double log_term = std::log(h) + kEulerGamma;
  long double term = n == 0 ? 1.0L : h;  // (x/2)^{2k+n} / (k! (k+n)!)
  long double j = 0.0L;
  long double tail = 0.0L;
  long double harmonic_k = 0.0L;    // H_k
  long double harmonic_kn = n == 0 ? 0.0L : 1.0L;  // H_{k+n}
  for (int k = 0; k < 200; ++k) {
    const long double sign = (k % 2 == 0) ? 1.0L : -1.0L;
    j += sign * term;
    tail += sign * (harmonic_k + harmonic_kn) * term;
    const long double next = term * h2 / (static_cast<long double>(k + 1) * static_cast<long double>(k + 1 + n));
    if (k > 2 * static_cast<int>(x) + 10 && std::fabs(next) < 1e-24L * std::fabs(j)) break;
    term = next;
    harmonic_k += 1.0L / static_cast<long double>(k + 1);
    harmonic_kn += 1.0L / static_cast<long double>(k + 1 + n);
  }
  SeriesPair out;
  out.j = j;
  if (n == 0) {
    // Y0 = (2/pi)(ln(x/2) + gamma) J0 - (2/pi) sum (-1)^k H_k (x/2)^{2k}/(k!)^2
    out.y = (2.0L / kPiL) * (log_term * j - 0.5L * tail);
  } else {
    out.y = (2.0L / kPiL) * log_term * j - 2.0L / (kPiL * x) - tail / kPiL;
  }
  return out;
}

// Hankel's expansion H_n^(1)(x) ~ sqrt(2/(pi x)) e^{i(x - n pi/2 - pi/4)} sum i^k a_k / x^k.
Complex asymptotic(int n, double x) {
  const long double mu = 4.0L * n * n;
  std::complex<long double> sum(1.0L, 0.0L);
  long double a = 1.0L;
  long double prev = 1.0L;
  std::complex<long double> ik(1.0L, 0.0L);
  const std::complex<long double> i(0.0L, 1.0L);
  for (int k = 1; k < 100; ++k) {
    const long double odd = 2.0L * k - 1.0L;
    a *= (mu - odd * odd) / (static_cast<long double>(k) * 8.0L * x);
    if (std::fabs(a) > prev) break;
    ik *= i;
    sum += ik * a;
    prev = std::fabs(a);
    if (prev < 1e-21L) break;
  }
  const long double phase = x - n * kPiL / 2.0L - kPiL / 4.0L;
  const std::complex<long double> value =
      std::sqrt(2.0L / (kPiL * x)) * std::complex<long double>(std::cos(phase), std::sin(phase)) * sum;
  return {static_cast<double>(value.real()), static_cast<double>(value.imag())};
}

void check_argument(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("Bessel functions need a positive finite argument");
}

}  // namespace

Complex hankel1(int n, double x) {
  if (n != 0 && n != 1) throw std::invalid_argument("hankel1: only orders 0 and 1");
  check_argument(x);
  if (x <= kSeriesLimit) {
    const SeriesPair s = ascending(n, static_cast<long double>(x));
    return {static_cast<double>(s.j), static_cast<double>(s.y)};
  }
  return asymptotic(n, x);
}

double bessel_j0(double x) { return hankel1(0, x).real(); }
double bessel_j1(double x) { return hankel1(1, x).real(); }
double bessel_y0(double x) { return hankel1(0, x).imag(); }
double bessel_y1(double x) { return hankel1(1, x).imag(); }

}  // namespace helmqmc
