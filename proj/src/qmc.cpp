#include "helmqmc/qmc.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace helmqmc {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, double v) {
  unsigned char bytes[sizeof(double)];
  std::memcpy(bytes, &v, sizeof(double));
  for (unsigned char b : bytes) {
    h ^= b;
    h *= kFnvPrime;
  }
}

bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

// q_{d,l}(i) for l = 0..d stored as q[l * n + i], i = 0..n-1 standing for
// the point index i + 1.
class OrderRecursion {
 public:
  OrderRecursion(std::int64_t n, std::size_t s) : n_(n), q_((s + 1) * static_cast<std::size_t>(n), 0.0) {
    std::fill(q_.begin(), q_.begin() + n_, 1.0);
  }

  // Values B2({(i+1) z / n}) for i = 0..n-1.
  std::vector<double> column(std::int64_t z) const {
    std::vector<double> b(static_cast<std::size_t>(n_));
    for (std::int64_t i = 0; i < n_; ++i) {
      const std::int64_t m = ((i + 1) % n_) * (z % n_) % n_;
      b[static_cast<std::size_t>(i)] = bernoulli2(static_cast<double>(m) / static_cast<double>(n_));
    }
    return b;
  }

  void push(std::size_t d, double beta_tilde, const std::vector<double>& b) {
    // Descending l so q_{d-1,l-1} is still the previous level.
    for (std::size_t l = d; l >= 1; --l) {
      double* cur = &q_[l * n_];
      const double* prev = &q_[(l - 1) * n_];
      for (std::int64_t i = 0; i < n_; ++i) cur[i] += beta_tilde * b[i] * prev[i];
    }
  }

  double mean(std::size_t l) const {
    const double* row = &q_[l * n_];
    double sum = 0.0;
    for (std::int64_t i = 0; i < n_; ++i) sum += row[i];
    return sum / static_cast<double>(n_);
  }

  const double* row(std::size_t l) const { return &q_[l * n_]; }

 private:
  std::int64_t n_;
  std::vector<double> q_;
};

}  // namespace

double theta_lambda(double lambda) {
  if (!(lambda > 0.5) || !(lambda <= 1.0)) throw std::invalid_argument("lambda must lie in (1/2, 1]");
  return 2.0 * std::riemann_zeta(2.0 * lambda) / std::pow(2.0 * kPi * kPi, lambda);
}

PodWeights::PodWeights(double lambda_in, std::vector<double> beta_in) : lambda(lambda_in), beta(std::move(beta_in)) {
  theta = theta_lambda(lambda);
  const double expo = 2.0 / (1.0 + lambda);
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (!(beta[j] > 0.0) || !std::isfinite(beta[j])) throw std::invalid_argument("POD weights need beta_j > 0");
    if (j > 0 && beta[j] > beta[j - 1]) throw std::invalid_argument("POD weights need nonincreasing beta_j");
  }
  beta_tilde.resize(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) beta_tilde[j] = std::pow(beta[j] / std::sqrt(theta), expo);
  Gamma.resize(beta.size() + 1);
  double log_fact = 0.0;
  Gamma[0] = 1.0;
  for (std::size_t l = 1; l <= beta.size(); ++l) {
    log_fact += std::log(static_cast<double>(l));
    Gamma[l] = std::exp(expo * log_fact);
  }
}

PodWeights PodWeights::shipped(std::size_t s, double q, double scale) {
  std::vector<double> beta(s);
  for (std::size_t j = 0; j < s; ++j) beta[j] = scale * std::pow(static_cast<double>(j + 1), -q);
  return PodWeights(1.0 / 1.8, std::move(beta));
}

PodWeights PodWeights::raw(std::vector<double> Gamma, std::vector<double> beta_tilde) {
  if (Gamma.size() != beta_tilde.size() + 1) throw std::invalid_argument("raw POD weights need s+1 order weights");
  PodWeights w;
  w.lambda = std::numeric_limits<double>::quiet_NaN();
  w.theta = std::numeric_limits<double>::quiet_NaN();
  w.Gamma = std::move(Gamma);
  w.beta_tilde = std::move(beta_tilde);
  return w;
}

std::uint64_t PodWeights::hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, lambda);
  for (double g : Gamma) fnv_mix(h, g);
  for (double b : beta_tilde) fnv_mix(h, b);
  return h;
}

double worst_case_error_sq(const std::vector<std::int64_t>& z, std::int64_t n, const PodWeights& w) {
  if (n < 1) throw std::invalid_argument("worst_case_error_sq: N must be positive");
  const std::size_t s = z.size();
  if (s > w.dimension()) throw std::invalid_argument("worst_case_error_sq: weights shorter than z");
  OrderRecursion rec(n, s);
  for (std::size_t d = 1; d <= s; ++d) rec.push(d, w.beta_tilde[d - 1], rec.column(z[d - 1]));
  double e2 = 0.0;
  for (std::size_t l = 1; l <= s; ++l) e2 += w.Gamma[l] * rec.mean(l);
  return e2;
}

void LatticeRule::validate() const {
  if (n < 2) throw std::invalid_argument("lattice rule needs N >= 2");
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] < 1 || z[j] >= n) throw std::invalid_argument("generating vector entry outside [1, N-1]");
    if (std::gcd(z[j], n) != 1) throw std::invalid_argument("generating vector entry not coprime to N");
    for (std::size_t k = 0; k < j; ++k)
      if (z[k] == z[j]) throw std::invalid_argument("generating vector entries must be distinct");
  }
}

LatticeRule cbc_construct(std::size_t s, std::int64_t n, const PodWeights& w) {
  if (!is_power_of_two(n) || n < 8) throw std::invalid_argument("cbc_construct: N must be a power of 2 >= 8");
  if (s < 1 || static_cast<std::int64_t>(s) > n / 4)
    throw std::invalid_argument("cbc_construct: need 1 <= s <= phi(N)/2");
  if (w.dimension() < s) throw std::invalid_argument("cbc_construct: weights shorter than s");

  const auto un = static_cast<std::size_t>(n);
  std::vector<double> b2(un);
  for (std::size_t m = 0; m < un; ++m) b2[m] = bernoulli2(static_cast<double>(m) / static_cast<double>(n));

  OrderRecursion rec(n, s);
  std::vector<char> used(un, 0);
  LatticeRule rule;
  rule.n = n;
  std::vector<double> r(un);
  for (std::size_t d = 1; d <= s; ++d) {
    // e^2(z_1..z_{d-1}, c) = base + betatilde_d (1/N) sum_i B2({i c/N}) r(i)
    std::fill(r.begin(), r.end(), 0.0);
    for (std::size_t l = 1; l <= d; ++l) {
      const double* prev = rec.row(l - 1);
      for (std::size_t i = 0; i < un; ++i) r[i] += w.Gamma[l] * prev[i];
    }
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_c = -1;
    for (std::int64_t c = 1; c < n; c += 2) {
      if (used[static_cast<std::size_t>(c)]) continue;
      double acc = 0.0;
      std::int64_t m = 0;
      for (std::size_t i = 0; i < un; ++i) {
        m += c;
        if (m >= n) m -= n;
        acc += b2[static_cast<std::size_t>(m)] * r[i];
      }
      if (best_c < 0 || acc < best - 1e-12 * std::fabs(best)) {
        best = acc;
        best_c = c;
      }
    }
    used[static_cast<std::size_t>(best_c)] = 1;
    rule.z.push_back(best_c);
    rec.push(d, w.beta_tilde[d - 1], rec.column(best_c));
  }
  return rule;
}

std::vector<std::vector<double>> shifted_points(const LatticeRule& rule, const std::vector<double>& shift) {
  const std::size_t s = rule.dimension();
  if (shift.size() < s) throw std::invalid_argument("shifted_points: shift shorter than s");
  for (std::size_t j = 0; j < s; ++j)
    if (!(shift[j] >= 0.0 && shift[j] < 1.0)) throw std::invalid_argument("shifted_points: shift outside [0,1)");
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(rule.n), std::vector<double>(s));
  for (std::int64_t i = 1; i <= rule.n; ++i) {
    auto& p = pts[static_cast<std::size_t>(i - 1)];
    for (std::size_t j = 0; j < s; ++j) {
      const std::int64_t m = (i % rule.n) * rule.z[j] % rule.n;
      double v = static_cast<double>(m) / static_cast<double>(rule.n) + shift[j];
      if (v >= 1.0) v -= 1.0;
      p[j] = v - 0.5;
    }
  }
  return pts;
}

std::vector<std::vector<double>> make_shifts(std::size_t L, std::uint64_t seed, std::size_t dim) {
  std::vector<std::vector<double>> shifts(L, std::vector<double>(dim));
  for (std::size_t l = 0; l < L; ++l) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(l), 0x51f7u};
    std::mt19937_64 gen(seq);
    for (std::size_t j = 0; j < dim; ++j) shifts[l][j] = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  }
  return shifts;
}

namespace {

// Evaluates the integrand at the given point indices (1-based) of one shifted
// rule into slots, in parallel, and rethrows the first failure by index.
std::vector<std::vector<Complex>> evaluate_points(const LatticeRule& rule, const std::vector<double>& shift,
                                                  const std::vector<std::int64_t>& indices, std::size_t shift_id,
                                                  const Integrand& integrand, std::size_t workers) {
  const std::size_t s = rule.dimension();
  std::vector<std::vector<Complex>> out(indices.size());
  std::vector<std::exception_ptr> errors(indices.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto point = [&](std::int64_t i) {
    std::vector<double> y(s);
    for (std::size_t j = 0; j < s; ++j) {
      const std::int64_t m = (i % rule.n) * rule.z[j] % rule.n;
      double v = static_cast<double>(m) / static_cast<double>(rule.n) + shift[j];
      if (v >= 1.0) v -= 1.0;
      y[j] = v - 0.5;
    }
    return y;
  };

  auto work = [&](std::size_t worker) {
    while (!failed.load()) {
      const std::size_t t = next.fetch_add(1);
      if (t >= indices.size()) break;
      try {
        out[t] = integrand(ParamVector(point(indices[t])), worker);
      } catch (...) {
        errors[t] = std::current_exception();
        failed.store(true);
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, indices.size()));
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (!errors[t]) continue;
    std::string msg;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
      msg = "unknown error";
    }
    std::ostringstream os;
    os << "integrand failed at shift " << shift_id << ", point " << indices[t] << ": " << msg;
    throw IntegrandError(os.str(), shift_id, indices[t], point(indices[t]));
  }
  return out;
}

void finish(ShiftedEstimate& est) {
  const std::size_t L = est.shift_means.size();
  const std::size_t m = est.shift_means.front().size();
  est.mean.assign(m, Complex(0.0, 0.0));
  est.std_error.assign(m, 0.0);
  for (const auto& q : est.shift_means) {
    if (q.size() != m) throw std::runtime_error("integrand output length changed between shifts");
    for (std::size_t c = 0; c < m; ++c) est.mean[c] += q[c];
  }
  for (auto& v : est.mean) v /= static_cast<double>(L);
  for (const auto& q : est.shift_means)
    for (std::size_t c = 0; c < m; ++c) est.std_error[c] += std::norm(q[c] - est.mean[c]);
  for (auto& v : est.std_error) v = std::sqrt(v / (static_cast<double>(L) * static_cast<double>(L - 1)));
}

}  // namespace

ShiftedEstimate qmc_estimate(const LatticeRule& rule, std::size_t L, std::uint64_t seed, const Integrand& integrand,
                             std::size_t workers) {
  auto all = qmc_estimate_nested(rule, {rule.n}, L, seed, integrand, workers);
  return std::move(all.at(rule.n));
}

std::map<std::int64_t, ShiftedEstimate> qmc_estimate_nested(const LatticeRule& rule, const std::vector<std::int64_t>& ns,
                                                            std::size_t L, std::uint64_t seed,
                                                            const Integrand& integrand, std::size_t workers) {
  rule.validate();
  if (L < 2) throw std::invalid_argument("qmc_estimate: need L >= 2 shifts");
  if (ns.empty()) throw std::invalid_argument("qmc_estimate: empty N list");
  for (std::int64_t np : ns)
    if (np < 1 || rule.n % np != 0 || !is_power_of_two(rule.n / np))
      throw std::invalid_argument("qmc_estimate: every N must divide the rule size by a power of two");

  const auto shifts = make_shifts(L, seed, std::max<std::size_t>(64, rule.dimension()));
  std::vector<std::int64_t> indices(static_cast<std::size_t>(rule.n));
  std::iota(indices.begin(), indices.end(), std::int64_t{1});

  std::map<std::int64_t, ShiftedEstimate> result;
  for (std::int64_t np : ns) {
    ShiftedEstimate& e = result[np];
    e.L = L;
    e.n = np;
    e.s = rule.dimension();
    e.seed = seed;
  }
  for (std::size_t l = 0; l < L; ++l) {
    const auto values = evaluate_points(rule, shifts[l], indices, l, integrand, workers);
    const std::size_t m = values.front().size();
    for (auto& [np, est] : result) {
      const std::int64_t stride = rule.n / np;
      std::vector<Complex> sum(m, Complex(0.0, 0.0));
      // Ordered accumulation keeps the result independent of the schedule.
      for (std::int64_t i = stride; i <= rule.n; i += stride) {
        const auto& v = values[static_cast<std::size_t>(i - 1)];
        if (v.size() != m) throw std::runtime_error("integrand output length changed between points");
        for (std::size_t c = 0; c < m; ++c) sum[c] += v[c];
      }
      for (auto& v : sum) v /= static_cast<double>(np);
      est.shift_means.push_back(std::move(sum));
    }
  }
  for (auto& [np, est] : result) finish(est);
  return result;
}

void write_lattice(std::ostream& os, const LatticeRule& rule) {
  os << rule.n << ' ' << rule.dimension() << '\n';
  for (std::size_t j = 0; j < rule.z.size(); ++j) os << (j ? " " : "") << rule.z[j];
  os << '\n';
}

LatticeRule read_lattice(std::istream& is) {
  LatticeRule rule;
  std::size_t s = 0;
  if (!(is >> rule.n >> s)) throw std::runtime_error("lattice file: missing header");
  rule.z.resize(s);
  for (auto& v : rule.z)
    if (!(is >> v)) throw std::runtime_error("lattice file: too few entries");
  rule.validate();
  return rule;
}

std::string lattice_cache_name(std::int64_t n, std::size_t s, const PodWeights& w) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "lattice_N%lld_s%zu_lambda%.6g_w%016llx.txt", static_cast<long long>(n), s, w.lambda,
                static_cast<unsigned long long>(w.hash()));
  return buf;
}

std::string lattice_cache_name(const LatticeRule& rule, const PodWeights& w) {
  return lattice_cache_name(rule.n, rule.dimension(), w);
}

LatticeRule cached_cbc(const std::string& dir, std::size_t s, std::int64_t n, const PodWeights& w) {
  namespace fs = std::filesystem;
  const fs::path path = fs::path(dir) / lattice_cache_name(n, s, w);
  if (fs::exists(path)) {
    std::ifstream in(path);
    LatticeRule rule = read_lattice(in);
    if (rule.n == n && rule.dimension() == s) return rule;
  }
  LatticeRule rule = cbc_construct(s, n, w);
  fs::create_directories(dir);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    write_lattice(out, rule);
  }
  fs::rename(tmp, path);
  return rule;
}

}  // namespace helmqmc
