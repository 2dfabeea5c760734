// helmqmc: command-line driver for the scattering UQ experiments.
//
//   helmqmc run <config> [--out DIR] [--workers W] [--seed S]
//   helmqmc cbc --n N --s S --out FILE [--lambda L] [--q Q]
//   helmqmc report <config>
//
// Exit codes: 0 success, 2 invalid input, 1 runtime failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "helmqmc/config.hpp"
#include "helmqmc/experiments.hpp"
#include "helmqmc/qmc.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helmholtz scattering with random media: QMC far-field estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", helmqmc::kVersion);

  std::string config_path;
  std::string out_dir;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* workers_opt = run->add_option("--workers", workers, "Worker threads (default: config, then hardware)");
  auto* seed_opt = run->add_option("--seed", seed, "Random shift seed (overrides qmc.seed)");

  std::int64_t n = 0;
  std::size_t s = 0;
  std::string cbc_out;
  double lambda = 1.0 / 1.8;
  double q = 3.0;
  auto* cbc = app.add_subcommand("cbc", "Construct a lattice generating vector by CBC");
  cbc->add_option("--n", n, "Number of points (power of 2, at least 8)")->required();
  cbc->add_option("--s", s, "Dimension")->required();
  cbc->add_option("--out", cbc_out, "Output file")->required();
  cbc->add_option("--lambda", lambda, "Weight exponent lambda in (1/2, 1]");
  cbc->add_option("--q", q, "Decay of beta_j = j^-q");

  std::string report_path;
  auto* report = app.add_subcommand("report", "Print the constants and error-budget report");
  report->add_option("config", report_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*run) {
      helmqmc::ExperimentConfig cfg = helmqmc::load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (*seed_opt) cfg.qmc.seed = seed;
      if (*workers_opt) cfg.workers = workers;
      if (cfg.workers == 0) cfg.workers = std::max(1u, std::thread::hardware_concurrency());
      cfg.validate();
      helmqmc::RunContext ctx;
      ctx.out_dir = cfg.output_dir;
      ctx.workers = cfg.workers;
      ctx.log = &std::cerr;
      const auto result = helmqmc::run_experiment(cfg, ctx);
      for (const auto& f : result.files) std::cout << (ctx.out_dir / f).string() << '\n';
      std::cout << (ctx.out_dir / "manifest.json").string() << '\n';
    } else if (*cbc) {
      if (s < 1 || s > 64) throw helmqmc::ValidationError("--s must lie in [1, 64]");
      if (!(q > 1.0)) throw helmqmc::ValidationError("--q must exceed 1");
      helmqmc::PodWeights w;
      try {
        std::vector<double> beta(s);
        for (std::size_t j = 0; j < s; ++j) beta[j] = std::pow(static_cast<double>(j + 1), -q);
        w = helmqmc::PodWeights(lambda, std::move(beta));
      } catch (const std::invalid_argument& e) {
        throw helmqmc::ValidationError(e.what());
      }
      helmqmc::LatticeRule rule;
      try {
        rule = helmqmc::cbc_construct(s, n, w);
      } catch (const std::invalid_argument& e) {
        throw helmqmc::ValidationError(e.what());
      }
      std::ofstream out(cbc_out);
      if (!out) throw std::runtime_error("cannot write " + cbc_out);
      helmqmc::write_lattice(out, rule);
      if (!out) throw std::runtime_error("write failed for " + cbc_out);
    } else if (*report) {
      const helmqmc::ExperimentConfig cfg = helmqmc::load_config(report_path);
      std::cout << helmqmc::constants_report(cfg).dump(2) << '\n';
    }
  } catch (const helmqmc::ValidationError& e) {
    std::cerr << "helmqmc: invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "helmqmc: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
