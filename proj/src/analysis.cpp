#include "helmqmc/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "helmqmc/scattering.hpp"

namespace helmqmc {

ProblemConstants ProblemConstants::from_background(double n0_min, double n0_max, double xi_n) {
  ProblemConstants c;
  c.n0_min = n0_min;
  c.n0_max = n0_max;
  c.n_min = n0_min / 2.0;
  c.n_max = n0_max + n0_min / 2.0;
  c.xi_n = xi_n;
  return c;
}

ProblemConstants ProblemConstants::shipped() { return from_background(1.0, 1.0, 0.8319); }

void ProblemConstants::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("ProblemConstants: ") + name + " must be positive");
  };
  positive(mu_A, "mu_A");
  positive(mu_n, "mu_n");
  positive(A_min, "A_min");
  positive(A_max, "A_max");
  positive(n_min, "n_min");
  positive(n_max, "n_max");
  positive(k0, "k0");
  positive(R0, "R0");
  positive(R, "R");
  if (d < 1) throw std::invalid_argument("ProblemConstants: d must be at least 1");
  if (xi_A < 0.0 || xi_n < 0.0) throw std::invalid_argument("ProblemConstants: xi must be nonnegative");
}

namespace {

double stability_core(const ProblemConstants& c, bool rooted) {
  c.validate();
  const double kr = c.k0 * c.R0;
  const double half_a = c.mu_A / 2.0;
  const double half_n = c.mu_n / 2.0;
  const double bracket = 1.0 + (c.d - 1) / (2.0 * kr);
  const double root = std::sqrt(1.0 / half_a + (1.0 / half_n) * bracket * bracket);
  const double m = std::min(half_a, half_n);
  const double last = c.n_max / (rooted ? std::sqrt(m) : m);
  return (1.0 / std::min(c.A_min, c.n_min)) * (1.0 / kr + 4.0 * root * last);
}

}  // namespace

double stability_constant(const ProblemConstants& c) { return stability_core(c, true); }

double stability_constant_unrooted(const ProblemConstants& c) { return stability_core(c, false); }

AssumptionReport check_assumptions(const RandomFieldSpec& spec, const ProblemConstants& c, std::size_t j_max) {
  AssumptionReport r;
  r.sums = admissibility_sums(spec, j_max);
  r.xi_n = spec.xi_n;
  r.positivity_threshold = c.n0_min / r.sums.sum_inf();
  r.nontrapping_threshold = c.mu_n / r.sums.sum_nontrap();
  r.positivity_pass = spec.xi_n <= r.positivity_threshold;
  r.nontrapping_pass = spec.xi_n <= r.nontrapping_threshold;
  return r;
}

MeshThreshold mesh_threshold(double h, double k, int m, double R2, int tau, double farfield_budget) {
  if (!(h > 0.0) || !(k > 0.0) || m < 1 || !(R2 > 0.0) || tau < 1)
    throw std::invalid_argument("mesh_threshold: arguments must be positive");
  MeshThreshold t;
  t.ell = std::min(tau, m);
  t.hk = h * k;
  const double p = std::pow(t.hk, 2.0 * t.ell);
  t.pollution = p * k * R2;
  t.farfield_indicator = p * std::pow(k, 1.5) * R2 * R2;
  t.farfield_budget = farfield_budget;
  t.within_farfield_budget = t.farfield_indicator <= farfield_budget;
  return t;
}

ErrorBudget error_budget(const BudgetInputs& in, const ProblemConstants& c) {
  if (!(in.p > 0.0 && in.p < 1.0)) throw std::invalid_argument("error_budget: p must lie in (0, 1)");
  if (in.s < 1 || in.N < 1 || !(in.h > 0.0) || !(in.k > 0.0) || in.m < 1)
    throw std::invalid_argument("error_budget: s, N, h, k and m must be positive");
  ErrorBudget b;
  const double cstab = stability_constant(c);
  const double sd = static_cast<double>(in.s);
  b.kappa = cstab * in.k * c.R * c.xi();
  b.M_opt = static_cast<int>(std::ceil(1.0 / (1.0 - in.p) - 1e-12));
  const double lead = cstab * c.R * std::pow(in.k, in.r - 1.0);
  b.trunc_rate = -2.0 / in.p + 1.0;
  b.trunc_optimal = lead * std::pow(b.kappa, b.M_opt + 1) * std::pow(sd, b.trunc_rate);
  b.trunc_M0 = lead * b.kappa * std::pow(sd, -1.0 / in.p + 1.0);
  b.qmc_rate = -std::min(1.0 - in.delta, 1.0 / in.p - 0.5);
  b.qmc = std::pow(static_cast<double>(in.N), b.qmc_rate);
  const double hk = in.h * in.k;
  b.fem_exp = std::exp(-in.k);
  b.fem_lower = std::pow(hk, in.m + 1);
  b.fem_pollution = std::pow(hk, 2 * in.m) * in.k;
  const double bracket = b.fem_exp + b.fem_lower + b.fem_pollution;
  b.fem = bracket / in.k;
  b.fem_farfield = std::abs(farfield_prefactor(in.k)) * in.k * bracket;
  b.total = std::sqrt(2.0) * (b.trunc_optimal + b.qmc + b.fem);
  return b;
}

nlohmann::json to_json(const ProblemConstants& c) {
  return {{"mu_A", c.mu_A},   {"mu_n", c.mu_n},   {"A_min", c.A_min}, {"A_max", c.A_max}, {"n0_min", c.n0_min},
          {"n0_max", c.n0_max}, {"n_min", c.n_min}, {"n_max", c.n_max}, {"k0", c.k0},       {"R0", c.R0},
          {"R", c.R},         {"d", c.d},         {"xi_A", c.xi_A},   {"xi_n", c.xi_n},   {"xi", c.xi()}};
}

nlohmann::json to_json(const AssumptionReport& r) {
  return {{"sum_psi_inf", r.sums.sum_inf()},
          {"sum_nontrapping", r.sums.sum_nontrap()},
          {"nontrapping_slope", r.sums.c1},
          {"nontrapping_offset", r.sums.c0},
          {"xi_n", r.xi_n},
          {"positivity_threshold", r.positivity_threshold},
          {"nontrapping_threshold", r.nontrapping_threshold},
          {"positivity", r.positivity_pass ? "PASS" : "FAIL"},
          {"nontrapping", r.nontrapping_pass ? "PASS" : "FAIL"}};
}

nlohmann::json to_json(const MeshThreshold& t) {
  return {{"ell", t.ell},
          {"hk", t.hk},
          {"pollution", t.pollution},
          {"farfield_indicator", t.farfield_indicator},
          {"farfield_budget", t.farfield_budget},
          {"within_farfield_budget", t.within_farfield_budget}};
}

nlohmann::json to_json(const ErrorBudget& b) {
  return {{"note", "upper-bound shapes; generic constants C(M,b), C_FEM, C_PML set to 1"},
          {"kappa", b.kappa},
          {"M_opt", b.M_opt},
          {"trunc_rate", b.trunc_rate},
          {"trunc_optimal", b.trunc_optimal},
          {"trunc_M0", b.trunc_M0},
          {"qmc_rate", b.qmc_rate},
          {"qmc", b.qmc},
          {"fem_exp", b.fem_exp},
          {"fem_lower", b.fem_lower},
          {"fem_pollution", b.fem_pollution},
          {"fem", b.fem},
          {"fem_farfield", b.fem_farfield},
          {"total", b.total}};
}

}  // namespace helmqmc
