#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string binary() {
  const char* b = std::getenv("HELMQMC_BIN");
  REQUIRE_MESSAGE(b != nullptr, "HELMQMC_BIN must point at the helmqmc executable");
  return b;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("helmqmc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + binary() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Small farfield run: coarse P1 mesh, low wavenumber.
json tiny_config(const fs::path& dir) {
  return {{"kind", "farfield_expectation"},
          {"name", "cli-test"},
          {"wavenumber", 2.0},
          {"field", {{"s", 2}}},
          {"fem", {{"n_theta", 32}, {"degree", 1}}},
          {"qmc", {{"N", {8, 16}}, {"L", 4}, {"cache_dir", (dir / "cache").string()}}}};
}

fs::path write_config(const fs::path& dir, const json& cfg, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << cfg.dump(2);
  return p;
}

}  // namespace

TEST_CASE("farfield run writes the output contract") {
  const fs::path dir = scratch("contract");
  const fs::path cfg = write_config(dir, tiny_config(dir));
  const fs::path out = dir / "out";
  REQUIRE(run("run \"" + cfg.string() + "\" --out \"" + out.string() + "\" --workers 1", dir / "log.txt") == 0);

  const std::vector<std::string> csvs{"farfield_homogeneous.csv", "farfield_mean_N8.csv", "farfield_mean_N16.csv",
                                      "farfield_stderr_N8.csv", "farfield_stderr_N16.csv"};
  for (const auto& name : csvs) {
    INFO(name);
    REQUIRE(fs::exists(out / name));
    const auto rows = csv_rows(out / name);
    REQUIRE(rows.size() == 361);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(std::stod(rows[i][0]) == doctest::Approx(static_cast<double>(i)));
      for (std::size_t c = 1; c < rows[i].size(); ++c) CHECK(std::isfinite(std::stod(rows[i][c])));
    }
  }
  CHECK(csv_rows(out / "farfield_stderr_N8.csv")[0] == std::vector<std::string>{"angle_deg", "stderr_abs"});

  const json resolved = json::parse(slurp(out / "config_resolved.json"));
  CHECK(resolved["wavenumber"] == 2.0);
  CHECK(resolved["field"]["s"] == 2);
  CHECK(resolved["qmc"]["N"] == json({8, 16}));
  CHECK(resolved["workers"] == 1);

  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["status"] == "success");
  CHECK(manifest["kind"] == "farfield_expectation");
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  for (const auto& name : csvs) {
    bool listed = false;
    for (const auto& o : manifest["outputs"]) listed = listed || o.get<std::string>() == name;
    CHECK_MESSAGE(listed, name);
  }
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary["generating_vector"].size() == 2);
  CHECK(summary["generating_vector"][0] == 1);
}

TEST_CASE("zero fluctuation gives zero standard error") {
  const fs::path dir = scratch("zero_xi");
  json c = tiny_config(dir);
  c["field"]["xi_n"] = 0.0;
  const fs::path cfg = write_config(dir, c);
  const fs::path out = dir / "out";
  REQUIRE(run("run \"" + cfg.string() + "\" --out \"" + out.string() + "\" --workers 1", dir / "log.txt") == 0);
  for (const char* name : {"farfield_stderr_N8.csv", "farfield_stderr_N16.csv"}) {
    const auto rows = csv_rows(out / name);
    REQUIRE(rows.size() == 361);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) == 0.0);
  }
  // With no fluctuation the mean equals the homogeneous pattern.
  const auto mean = csv_rows(out / "farfield_mean_N16.csv");
  const auto hom = csv_rows(out / "farfield_homogeneous.csv");
  REQUIRE(mean.size() == hom.size());
  for (std::size_t i = 1; i < mean.size(); ++i)
    for (std::size_t c = 1; c < mean[i].size(); ++c)
      CHECK(std::stod(mean[i][c]) == doctest::Approx(std::stod(hom[i][c])).epsilon(1e-12));
}

TEST_CASE("outputs are identical across worker counts") {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = write_config(dir, tiny_config(dir));
  REQUIRE(run("run \"" + cfg.string() + "\" --out \"" + (dir / "w1").string() + "\" --workers 1", dir / "a.txt") == 0);
  REQUIRE(run("run \"" + cfg.string() + "\" --out \"" + (dir / "w2").string() + "\" --workers 2", dir / "b.txt") == 0);
  for (const char* name : {"farfield_homogeneous.csv", "farfield_mean_N8.csv", "farfield_mean_N16.csv",
                           "farfield_stderr_N8.csv", "farfield_stderr_N16.csv", "summary.json"}) {
    INFO(name);
    CHECK(slurp(dir / "w1" / name) == slurp(dir / "w2" / name));
  }
}

TEST_CASE("seed override changes the shifts") {
  const fs::path dir = scratch("seed");
  const fs::path cfg = write_config(dir, tiny_config(dir));
  REQUIRE(run("run \"" + cfg.string() + "\" --out \"" + (dir / "a").string() + "\" --workers 1 --seed 1",
              dir / "a.txt") == 0);
  REQUIRE(run("run \"" + cfg.string() + "\" --out \"" + (dir / "b").string() + "\" --workers 1 --seed 2",
              dir / "b.txt") == 0);
  CHECK(slurp(dir / "a" / "farfield_mean_N16.csv") != slurp(dir / "b" / "farfield_mean_N16.csv"));
  CHECK(json::parse(slurp(dir / "a" / "manifest.json"))["seed"] == 1);
}

TEST_CASE("invalid input exits with code 2") {
  const fs::path dir = scratch("invalid");
  const fs::path log = dir / "log.txt";

  json unknown = tiny_config(dir);
  unknown["fem"]["n_thetas"] = 64;
  CHECK(run("run \"" + write_config(dir, unknown, "unknown.json").string() + "\" --out \"" + (dir / "o1").string() + "\"",
            log) == 2);
  CHECK(slurp(log).find("n_thetas") != std::string::npos);

  json empty_geometry = tiny_config(dir);
  empty_geometry["geometry"] = json::object();
  CHECK(run("run \"" + write_config(dir, empty_geometry, "empty.json").string() + "\" --out \"" +
                (dir / "o2").string() + "\"",
            log) == 2);

  json bad_n = tiny_config(dir);
  bad_n["qmc"]["N"] = {12};
  CHECK(run("run \"" + write_config(dir, bad_n, "bad_n.json").string() + "\" --out \"" + (dir / "o3").string() + "\"",
            log) == 2);

  json radii = tiny_config(dir);
  radii["geometry"] = {{"R1", 4.4}};
  CHECK(run("run \"" + write_config(dir, radii, "radii.json").string() + "\" --out \"" + (dir / "o4").string() + "\"",
            log) == 2);

  std::ofstream(dir / "broken.json") << "{\"kind\": ";
  CHECK(run("run \"" + (dir / "broken.json").string() + "\"", log) == 2);
  CHECK(run("run \"" + (dir / "missing.json").string() + "\"", log) == 2);
  CHECK(run("frobnicate", log) == 2);
  CHECK(run("cbc --n 12 --s 2 --out \"" + (dir / "z.txt").string() + "\"", log) == 2);
  CHECK(run("cbc --n 16 --s 2 --lambda 0.4 --out \"" + (dir / "z.txt").string() + "\"", log) == 2);
  // Nothing is produced for rejected configs.
  CHECK_FALSE(fs::exists(dir / "o1" / "manifest.json"));
}

TEST_CASE("runtime failure exits with code 1 and records a failed manifest") {
  const fs::path dir = scratch("failure");
  std::ofstream(dir / "blocker") << "not a directory";
  json c = tiny_config(dir);
  c["qmc"]["cache_dir"] = (dir / "blocker" / "cache").string();
  const fs::path out = dir / "out";
  CHECK(run("run \"" + write_config(dir, c).string() + "\" --out \"" + out.string() + "\" --workers 1",
            dir / "log.txt") == 1);
  REQUIRE(fs::exists(out / "manifest.json"));
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK(manifest.contains("error"));
  CHECK(fs::exists(out / "config_resolved.json"));
  CHECK_FALSE(fs::exists(out / "summary.json"));
}

TEST_CASE("report prints constants and assumption checks") {
  const fs::path dir = scratch("report");
  const fs::path log = dir / "log.txt";
  const json base{{"kind", "constants_report"}};
  REQUIRE(run("report \"" + write_config(dir, base, "shipped.json").string() + "\"", log) == 0);
  const json r = json::parse(slurp(log));
  CHECK(r["C_stab"].get<double>() == doctest::Approx(34.1357).epsilon(1e-5));
  CHECK(r["C_stab"].get<double>() <= 48.26);
  CHECK(std::round(r["C_stab_unrooted"].get<double>() * 100.0) / 100.0 == 48.26);
  CHECK(r["assumptions"]["positivity"] == "PASS");
  CHECK(r["assumptions"]["nontrapping"] == "FAIL");
  CHECK(r["theta_lambda"].get<double>() == doctest::Approx(3.65599528485981).epsilon(1e-12));

  json small = base;
  small["field"] = {{"xi_n", 0.01}};
  REQUIRE(run("report \"" + write_config(dir, small, "small.json").string() + "\"", log) == 0);
  const json s = json::parse(slurp(log));
  CHECK(s["assumptions"]["nontrapping"] == "PASS");
  CHECK(s["assumptions"]["positivity"] == "PASS");
}

TEST_CASE("cbc writes a lattice file") {
  const fs::path dir = scratch("cbc");
  const fs::path out = dir / "z.txt";
  REQUIRE(run("cbc --n 64 --s 5 --out \"" + out.string() + "\"", dir / "log.txt") == 0);
  std::ifstream in(out);
  std::vector<long long> numbers;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long long v;
    while (ls >> v) numbers.push_back(v);
  }
  REQUIRE(numbers.size() >= 5);
  const std::vector<long long> z(numbers.end() - 5, numbers.end());
  CHECK(z[0] == 1);
  for (long long v : z) {
    CHECK(v % 2 == 1);
    CHECK(v > 0);
    CHECK(v < 64);
  }
}

TEST_CASE("truncation study compares against the reference dimension") {
  const fs::path dir = scratch("truncation");
  const json c{{"kind", "dim_truncation_study"},
               {"wavenumber", 2.0},
               {"fem", {{"n_theta", 32}, {"degree", 1}}},
               {"qmc", {{"L", 2}, {"cache_dir", (dir / "cache").string()}}},
               {"truncation", {{"s_list", {1, 2, 4}}, {"N", 16}}}};
  const fs::path out = dir / "out";
  REQUIRE(run("run \"" + write_config(dir, c).string() + "\" --out \"" + out.string() + "\" --workers 1",
              dir / "log.txt") == 0);
  for (const char* tag : {"1", "2", "4"}) {
    INFO(tag);
    REQUIRE(fs::exists(out / ("circle_mean_s" + std::string(tag) + ".csv")));
    REQUIRE(fs::exists(out / ("circle_diff_s" + std::string(tag) + "_vs_s4.csv")));
  }
  const auto ref = csv_rows(out / "circle_diff_s4_vs_s4.csv");
  REQUIRE(ref.size() == 361);
  for (std::size_t i = 1; i < ref.size(); ++i) CHECK(std::stod(ref[i][1]) == 0.0);
  const auto low = csv_rows(out / "circle_diff_s1_vs_s4.csv");
  double max_low = 0.0;
  for (std::size_t i = 1; i < low.size(); ++i) max_low = std::max(max_low, std::stod(low[i][1]));
  CHECK(max_low > 0.0);
  CHECK(json::parse(slurp(out / "manifest.json"))["status"] == "success");
}
