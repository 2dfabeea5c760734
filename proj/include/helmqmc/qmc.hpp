#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmqmc/randomfield.hpp"
#include "helmqmc/types.hpp"

namespace helmqmc {

/// theta(lambda) = 2 zeta(2 lambda) / (2 pi^2)^lambda.
double theta_lambda(double lambda);

/// Product-and-order-dependent weights gamma_u = Gamma_|u| prod_{j in u} betatilde_j.
struct PodWeights {
  double lambda = 1.0 / 1.8;
  double theta = 0.0;
  std::vector<double> beta;        // beta_j, j = 1..s
  std::vector<double> beta_tilde;  // (beta_j / sqrt(theta))^{2/(1+lambda)}
  std::vector<double> Gamma;       // Gamma_l = (l!)^{2/(1+lambda)}, l = 0..s

  PodWeights() = default;
  PodWeights(double lambda, std::vector<double> beta);

  /// lambda = 1/1.8 and beta_j = scale * j^{-q}.
  static PodWeights shipped(std::size_t s, double q = 3.0, double scale = 1.0);
  /// Weights given directly by Gamma_0..Gamma_s and betatilde_1..betatilde_s.
  static PodWeights raw(std::vector<double> Gamma, std::vector<double> beta_tilde);

  std::size_t dimension() const { return beta_tilde.size(); }
  /// FNV-1a over lambda and the derived weights.
  std::uint64_t hash() const;
};

/// B2(x) = x^2 - x + 1/6.
inline double bernoulli2(double x) { return x * x - x + 1.0 / 6.0; }

/// Shift-averaged squared worst-case error of the rank-1 lattice rule with
/// generating vector z in the unanchored Sobolev space with POD weights,
/// via the O(s^2 N) order recursion.
double worst_case_error_sq(const std::vector<std::int64_t>& z, std::int64_t n, const PodWeights& w);

struct LatticeRule {
  std::vector<std::int64_t> z;
  std::int64_t n = 0;

  std::size_t dimension() const { return z.size(); }
  /// Throws unless n >= 2 and every z_j is coprime to n, in [1, n-1] and distinct.
  void validate() const;
};

/// Fast CBC over odd, not yet used candidates; ties go to the smallest.
LatticeRule cbc_construct(std::size_t s, std::int64_t n, const PodWeights& w);

/// Points frac(i z / n + shift) - 1/2 for i = 1..n (i = n is the shifted origin).
std::vector<std::vector<double>> shifted_points(const LatticeRule& rule, const std::vector<double>& shift);

/// L shifts of dimension `dim` drawn from per-shift substreams of `seed`,
/// independent of N and s.
std::vector<std::vector<double>> make_shifts(std::size_t L, std::uint64_t seed, std::size_t dim = 64);

struct ShiftedEstimate {
  std::vector<Complex> mean;
  std::vector<double> std_error;
  std::vector<std::vector<Complex>> shift_means;  // Q_l per shift
  std::size_t L = 0;
  std::int64_t n = 0;
  std::size_t s = 0;
  std::uint64_t seed = 0;
};

/// Integrand y -> outputs; `worker` identifies the calling worker so that
/// callers can keep per-worker scratch state.
using Integrand = std::function<std::vector<Complex>(const ParamVector& y, std::size_t worker)>;

class IntegrandError : public std::runtime_error {
 public:
  IntegrandError(const std::string& what, std::size_t shift, std::int64_t index, std::vector<double> y)
      : std::runtime_error(what), shift_(shift), index_(index), y_(std::move(y)) {}
  std::size_t shift() const { return shift_; }
  std::int64_t index() const { return index_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::size_t shift_;
  std::int64_t index_;
  std::vector<double> y_;
};

/// Mean over L random shifts and the standard error
/// sqrt(sum_l |Q_l - Qbar|^2 / (L (L - 1))), componentwise.
ShiftedEstimate qmc_estimate(const LatticeRule& rule, std::size_t L, std::uint64_t seed, const Integrand& integrand,
                             std::size_t workers = 1);

/// Estimates for every n' in `ns` (powers of two dividing rule.n) from one
/// pass over the rule.n points: the n'-point rule with the same z and shift
/// uses the points with index divisible by rule.n / n'.
std::map<std::int64_t, ShiftedEstimate> qmc_estimate_nested(const LatticeRule& rule, const std::vector<std::int64_t>& ns,
                                                            std::size_t L, std::uint64_t seed,
                                                            const Integrand& integrand, std::size_t workers = 1);

/// Lattice vector file: line 1 "N s", line 2 the s integers.
void write_lattice(std::ostream& os, const LatticeRule& rule);
LatticeRule read_lattice(std::istream& is);
std::string lattice_cache_name(const LatticeRule& rule, const PodWeights& w);
std::string lattice_cache_name(std::int64_t n, std::size_t s, const PodWeights& w);

/// Loads the vector from dir if cached, otherwise constructs and stores it.
LatticeRule cached_cbc(const std::string& dir, std::size_t s, std::int64_t n, const PodWeights& w);

}  // namespace helmqmc
