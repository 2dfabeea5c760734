#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "helmqmc/randomfield.hpp"

namespace helmqmc {

struct ProblemConstants {
  double mu_A = 1.0;
  double mu_n = 1.0;
  double A_min = 1.0;
  double A_max = 1.0;
  double n0_min = 1.0;
  double n0_max = 1.0;
  double n_min = 0.5;
  double n_max = 1.5;
  double k0 = 12.0;
  double R0 = 4.5;
  double R = 4.5;
  int d = 2;
  double xi_A = 0.0;
  double xi_n = 0.8319;

  double xi() const { return xi_A + xi_n; }

  /// n_min = n0_min / 2 and n_max = n0_max + n0_min / 2.
  static ProblemConstants from_background(double n0_min, double n0_max, double xi_n);
  /// A = I, n0 = 1, mu_A = mu_n = 1, k0 = 12, R0 = R = 4.5, xi_n = 0.8319.
  static ProblemConstants shipped();

  void validate() const;
};

/// (1/min{A_min, n_min}) (1/(k0 R0)
///   + 4 sqrt(1/(mu_A/2) + (1/(mu_n/2)) (1 + (d-1)/(2 k0 R0))^2) n_max / sqrt(min{mu_A/2, mu_n/2})).
double stability_constant(const ProblemConstants& c);

/// The same expression with n_max / min{mu_A/2, mu_n/2} in place of
/// n_max / sqrt(min{mu_A/2, mu_n/2}); this is the reading that reproduces the
/// printed worked value 48.26 for the shipped inputs.
double stability_constant_unrooted(const ProblemConstants& c);

struct AssumptionReport {
  AdmissibilitySums sums;
  double positivity_threshold = 0.0;  // n0_min / sum ||psi_j||
  double nontrapping_threshold = 0.0; // mu_n / sum of the nontrapping bounds
  double xi_n = 0.0;
  bool positivity_pass = false;
  bool nontrapping_pass = false;
};

AssumptionReport check_assumptions(const RandomFieldSpec& spec, const ProblemConstants& c, std::size_t j_max = 1000000);

struct MeshThreshold {
  int ell = 1;
  double hk = 0.0;
  double pollution = 0.0;         // (hk)^{2l} k R2
  double farfield_indicator = 0.0; // (hk)^{2l} k^{3/2} R2^2
  double farfield_budget = 1.0;
  bool within_farfield_budget = false;
};

/// l = min(tau, m).
MeshThreshold mesh_threshold(double h, double k, int m, double R2, int tau, double farfield_budget = 1.0);

/// Upper-bound shapes with every unknown generic constant set to 1.
struct ErrorBudget {
  double kappa = 0.0;  // C_stab k R xi
  int M_opt = 0;       // ceil(1 / (1 - p))
  double trunc_rate = 0.0;  // -2/p + 1
  double trunc_optimal = 0.0;  // C_stab R k^{r-1} kappa^{M_opt+1} s^{-2/p+1}
  double trunc_M0 = 0.0;       // C_stab R k^{r-1} kappa s^{-1/p+1}
  double qmc_rate = 0.0;       // -min(1 - delta, 1/p - 1/2)
  double qmc = 0.0;            // N^{qmc_rate}
  double fem_exp = 0.0;        // exp(-k)
  double fem_lower = 0.0;      // (hk)^{m+1}
  double fem_pollution = 0.0;  // (hk)^{2m} k
  double fem = 0.0;            // k^{-1} (exp + lower + pollution)
  double fem_farfield = 0.0;   // |c(2,k)| k (exp + lower + pollution)
  double total = 0.0;          // sqrt(2) (trunc_optimal + qmc + fem)
};

struct BudgetInputs {
  std::size_t s = 32;
  std::int64_t N = 1024;
  double h = 0.0125;
  double k = 12.0;
  int m = 2;
  double p = 1.0 / 3.0;
  double delta = 0.1;
  double r = 0.0;  // functional in H^r(D_R)'
};

ErrorBudget error_budget(const BudgetInputs& in, const ProblemConstants& c);

nlohmann::json to_json(const ProblemConstants& c);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const MeshThreshold& t);
nlohmann::json to_json(const ErrorBudget& b);

}  // namespace helmqmc
