// Acceptance suite. Usage: acceptance <criterion> [<criterion> ...]
// Prints one "PASS <name>" or "FAIL <name>" line per criterion, preceded by
// the measured quantities. Exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "helmqmc/analysis.hpp"
#include "helmqmc/experiments.hpp"
#include "helmqmc/qmc.hpp"
#include "helmqmc/randomfield.hpp"

using namespace helmqmc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double round_to(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(v * scale) / scale;
}

struct Outcome {
  bool pass = true;
  void check(bool ok, const std::string& what) {
    std::printf("  [%s] %s\n", ok ? "ok" : "xx", what.c_str());
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.k = 12.0;
  cfg.qmc.cache_dir = (std::filesystem::temp_directory_path() / "helmqmc_acceptance_cache").string();
  cfg.workers = workers();
  return cfg;
}

// ---------------------------------------------------------------------------

bool worked_constants() {
  Outcome o;
  const auto t0 = Clock::now();
  const ProblemConstants c = ProblemConstants::shipped();
  const AssumptionReport r = check_assumptions(RandomFieldSpec{}, c);
  const double cstab = stability_constant(c);
  const double unrooted = stability_constant_unrooted(c);
  const double elapsed = seconds_since(t0);

  o.check(r.sums.sum_inf() <= 1.2021, fmt("sum j^-3 = %.10f <= 1.2021", r.sums.sum_inf()));
  o.check(r.sums.sum_nontrap() <= 62.6193, fmt("sum j^-3 (7 j pi + 22) = %.10f <= 62.6193", r.sums.sum_nontrap()));
  o.check(round_to(r.positivity_threshold, 4) == 0.8319, fmt("xi_n threshold = %.8f, printed 0.8319", r.positivity_threshold));
  o.check(round_to(r.nontrapping_threshold, 5) == 0.01597,
          fmt("nontrapping threshold = %.8f, printed 0.01597", r.nontrapping_threshold));
  o.check(cstab <= 48.26, fmt("C_stab = %.6f <= 48.26", cstab));
  std::printf("  info: C_stab without the square root on min(mu/2) = %.6f\n", unrooted);
  o.check(elapsed < 1.0, fmt("runtime %.4f s < 1 s", elapsed));
  return o.pass;
}

// ---------------------------------------------------------------------------

double direct_subset_sum(const std::vector<std::int64_t>& z, std::int64_t n, const PodWeights& w) {
  const std::size_t s = z.size();
  long double total = 0.0L;
  for (unsigned mask = 1; mask < (1u << s); ++mask) {
    long double gamma = w.Gamma[static_cast<std::size_t>(__builtin_popcount(mask))];
    for (std::size_t j = 0; j < s; ++j)
      if (mask & (1u << j)) gamma *= w.beta_tilde[j];
    long double acc = 0.0L;
    for (std::int64_t i = 1; i <= n; ++i) {
      long double prod = 1.0L;
      for (std::size_t j = 0; j < s; ++j)
        if (mask & (1u << j)) prod *= bernoulli2(static_cast<double>((i * z[j]) % n) / static_cast<double>(n));
      acc += prod;
    }
    total += gamma * acc / static_cast<long double>(n);
  }
  return static_cast<double>(total);
}

bool qmc_kernel_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst_rel = 0.0;
  std::size_t cases = 0;
  for (std::int64_t n : {8, 16}) {
    for (std::size_t s = 1; s <= 3; ++s) {
      const PodWeights w = PodWeights::shipped(s);
      std::vector<std::int64_t> z(s);
      std::function<void(std::size_t)> rec = [&](std::size_t d) {
        if (d == s) {
          const double a = worst_case_error_sq(z, n, w);
          const double b = direct_subset_sum(z, n, w);
          worst_rel = std::max(worst_rel, std::abs(a - b) / std::abs(b));
          ++cases;
          return;
        }
        for (std::int64_t c = 1; c < n; c += 2) {
          if (std::find(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(d), c) != z.begin() + static_cast<std::ptrdiff_t>(d))
            continue;
          z[d] = c;
          rec(d + 1);
        }
      };
      rec(0);
    }
  }
  o.check(worst_rel <= 1e-12, fmt("recursion vs subset sum over %.0f vectors: max rel diff %.3e <= 1e-12",
                                  static_cast<double>(cases), worst_rel));

  const std::int64_t n = 16;
  const PodWeights w = PodWeights::shipped(4);
  const LatticeRule rule = cbc_construct(4, n, w);
  std::vector<std::int64_t> prefix;
  bool same = true;
  for (std::size_t s = 1; s <= 4; ++s) {
    const PodWeights ws = PodWeights::shipped(s);
    std::int64_t best = -1;
    double best_err = 0.0;
    for (std::int64_t c = 1; c < n; c += 2) {
      if (std::find(prefix.begin(), prefix.end(), c) != prefix.end()) continue;
      std::vector<std::int64_t> z = prefix;
      z.push_back(c);
      const double e = direct_subset_sum(z, n, ws);
      if (best < 0 || e < best_err - 1e-12 * std::abs(best_err)) best = c, best_err = e;
    }
    std::printf("  info: s=%zu cbc z=%lld exhaustive z=%lld\n", s, static_cast<long long>(rule.z[s - 1]),
                static_cast<long long>(best));
    same = same && rule.z[s - 1] == best;
    prefix.push_back(best);
  }
  o.check(same, "CBC equals exhaustive conditional minima for s <= 4, N = 16");
  const double elapsed = seconds_since(t0);
  o.check(elapsed < 10.0, fmt("runtime %.3f s < 10 s", elapsed));
  return o.pass;
}

// ---------------------------------------------------------------------------

bool hankel_verification() {
  Outcome o;
  ExperimentConfig cfg = desk_config();
  cfg.kind = RunKind::verify_hankel;
  const auto t0 = Clock::now();
  const HankelStudy st = hankel_study(cfg, &std::cerr);
  for (const auto& l : st.levels)
    std::printf("  info: n_theta=%d h=%.5f dofs=%zu relL2=%.4e relH1=%.4e\n", l.n_theta, l.h_max, l.dofs, l.rel_l2,
                l.rel_h1);
  std::printf("  info: H1 slope %.3f, runtime %.1f s\n", st.h1_slope, seconds_since(t0));
  o.check(st.l2_slope >= 2.6 && st.l2_slope <= 3.4, fmt("L2 slope %.3f in [2.6, 3.4]", st.l2_slope));
  o.check(st.farfield_max_rel_dev < 0.01,
          fmt("far field within %.3e of target %.6f (< 1%%)", st.farfield_max_rel_dev, st.farfield_target));
  o.check(std::abs(st.farfield_target - 0.05758) < 5e-6, fmt("target %.6f rounds to 0.05758", st.farfield_target));
  o.check(st.farfield_variation < 0.005, fmt("angle-to-angle variation %.3e < 0.5%%", st.farfield_variation));
  return o.pass;
}

bool pml_exponential_accuracy() {
  Outcome o;
  ExperimentConfig cfg = desk_config();
  cfg.kind = RunKind::pml_sweep;
  const std::vector<PmlSweepLevel> levels = pml_sweep_study(cfg, &std::cerr);
  o.check(levels.size() == 3 && levels[0].width == 0.25 && levels[1].width == 0.5 && levels[2].width == 1.0,
          "widths {0.25, 0.5, 1.0}");
  for (const auto& l : levels)
    std::printf("  info: width=%.2f R2=%.2f n_theta=%d h=%.5f relL2=%.4e\n", l.width, l.R2, l.level.n_theta,
                l.level.h_max, l.level.rel_l2);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double a = levels[i - 1].level.rel_l2, b = levels[i].level.rel_l2;
    o.check(b < a, fmt("error decreases %.4e -> %.4e", a, b));
    o.check(a / b >= 2.0, fmt("reduction %.2fx >= 2x", a / b));
    const double per_tenth = std::pow(a / b, 0.1 / (levels[i].width - levels[i - 1].width));
    std::printf("  info: reduction per 0.1 of width %.3fx\n", per_tenth);
  }
  return o.pass;
}

bool qmc_convergence_pde() {
  Outcome o;
  ExperimentConfig cfg = desk_config();
  cfg.field.s = 8;
  cfg.fem.n_theta = 256;
  cfg.qmc.N = {64, 128, 256, 512};
  cfg.qmc.L = 10;
  cfg.validate();
  const auto t0 = Clock::now();
  const FarFieldStudy st = farfield_study(cfg, cfg.workers, &std::cerr);
  for (std::size_t i = 0; i < cfg.qmc.N.size(); ++i)
    std::printf("  info: N=%lld median stderr %.4e\n", static_cast<long long>(cfg.qmc.N[i]), st.median_stderr[i]);
  std::printf("  info: runtime %.1f s with %zu workers\n", seconds_since(t0), cfg.workers);
  o.check(std::isfinite(st.stderr_slope) && st.stderr_slope >= -1.25 && st.stderr_slope <= -0.75,
          fmt("stderr slope %.3f in [-1.25, -0.75]", st.stderr_slope));
  return o.pass;
}

// Index of 180 - theta (mod 360, 0 -> 360) on the 1..360 degree grid.
std::size_t mirror_index(std::size_t i) {
  int m = (180 - static_cast<int>(i + 1)) % 360;
  if (m <= 0) m += 360;
  return static_cast<std::size_t>(m - 1);
}

bool farfield_symmetry() {
  Outcome o;
  {
    ExperimentConfig cfg = desk_config();
    cfg.fem.n_theta = 512;
    const ScatteringModel model(cfg, &std::cerr);
    SparseSolver solver;
    const FarFieldPattern p = model.far_field(model.solve(ParamVector(std::vector<double>(cfg.field.s, 0.0)), solver));
    double peak = 0.0, worst = 0.0;
    for (const auto& v : p.values) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < p.values.size(); ++i)
      worst = std::max(worst, std::abs(std::abs(p.values[i]) - std::abs(p.values[mirror_index(i)])));
    o.check(p.values.size() == 360 && worst / peak < 0.02,
            fmt("homogeneous asymmetry %.3e of max|u_inf| = %.4f (< 2%%)", worst / peak, peak));
  }
  {
    ExperimentConfig cfg = desk_config();
    cfg.field.s = 8;
    cfg.fem.n_theta = 256;
    cfg.qmc.N = {64};
    cfg.qmc.L = 10;
    cfg.validate();
    const FarFieldStudy st = farfield_study(cfg, cfg.workers, &std::cerr);
    const ShiftedEstimate& e = st.estimates.at(64);
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < e.mean.size(); ++i) {
      const std::size_t j = mirror_index(i);
      const double gap = std::abs(std::abs(e.mean[i]) - std::abs(e.mean[j]));
      const double se = std::sqrt(e.std_error[i] * e.std_error[i] + e.std_error[j] * e.std_error[j]);
      worst_ratio = std::max(worst_ratio, gap / se);
      if (gap > 3.0 * se) ++violations;
    }
    std::printf("  info: random case worst gap %.2f standard errors\n", worst_ratio);
    o.check(violations == 0, fmt("random case: %.0f of 360 angles outside 3 standard errors", static_cast<double>(violations)));
  }
  return o.pass;
}

bool dimension_truncation() {
  Outcome o;
  ExperimentConfig cfg = desk_config();
  cfg.kind = RunKind::dim_truncation_study;
  cfg.truncation.s_list = {4, 8, 16};
  cfg.truncation.circle_radius = 4.25;
  cfg.validate();
  const TruncationStudy st = truncation_study(cfg, cfg.workers, &std::cerr);
  for (std::size_t i = 0; i < st.s_list.size(); ++i)
    std::printf("  info: s=%zu median |diff| vs s=16: %.4e\n", st.s_list[i], st.median_diff[i]);
  o.check(st.median_diff[0] > st.median_diff[1],
          fmt("diff(4 vs 16) = %.4e > diff(8 vs 16) = %.4e", st.median_diff[0], st.median_diff[1]));
  return o.pass;
}

bool field_bounds() {
  Outcome o;
  const RandomFieldSpec spec;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  std::vector<Point2> points(1000);
  for (auto& p : points) p = Point2(box(rng), box(rng));
  std::size_t violations = 0;
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> y(64);
    for (auto& v : y) v = unit(rng);
    const ParamVector py(y);
    for (const auto& p : points) {
      const double n = sample_n(spec, py, p);
      lo = std::min(lo, n);
      hi = std::max(hi, n);
      if (!(n >= 0.5 && n <= 1.5)) ++violations;
    }
  }
  std::printf("  info: n ranged over [%.4f, %.4f]\n", lo, hi);
  o.check(violations == 0, fmt("%.0f violations of [0.5, 1.5] in 10^6 samples", static_cast<double>(violations)));
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<bool()>> criteria{
      {"worked_constants", worked_constants},
      {"qmc_kernel_oracle", qmc_kernel_oracle},
      {"hankel_verification", hankel_verification},
      {"pml_exponential_accuracy", pml_exponential_accuracy},
      {"qmc_convergence_pde", qmc_convergence_pde},
      {"farfield_symmetry", farfield_symmetry},
      {"dimension_truncation", dimension_truncation},
      {"field_bounds", field_bounds}};
  std::vector<std::string> names(argv + 1, argv + argc);
  if (names.empty())
    for (const auto& [name, fn] : criteria) names.push_back(name);
  int failures = 0;
  for (const auto& name : names) {
    auto it = criteria.find(name);
    if (it == criteria.end()) {
      std::printf("FAIL %s: unknown criterion\n", name.c_str());
      ++failures;
      continue;
    }
    bool ok = false;
    try {
      ok = it->second();
    } catch (const std::exception& e) {
      std::printf("  error: %s\n", e.what());
    }
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
