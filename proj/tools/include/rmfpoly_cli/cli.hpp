#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rmfpoly::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kUsage = 2, kDomain = 3, kInfeasible = 4 };

/// Fully resolved parameters of one run; echoed into every output.
struct ExperimentConfig {
  std::string subcommand;
  std::string poly = "1,0,1";
  std::uint64_t n = 1000;
  std::string ns;
  std::uint64_t prime_bound = 100000;
  std::uint64_t empirical_n = 1000000;
  std::uint64_t trials = 1000;
  std::optional<std::uint64_t> seed;
  std::string model = "rademacher";
  std::string normalization = "exact";
  std::int64_t a = 0;
  std::int64_t b = 0;
  bool scan = false;
  std::uint64_t ab_samples = 100;
  std::int64_t ab_max = 0;
  std::uint64_t base = 1000;
  std::uint64_t scales = 8;
  std::string mode = "geometric";
  std::uint64_t cap = 1000000;
  double c = 0.01;
  double floor = 2.0;
  std::string thresholds = "0.5,1,1.5";
  double beta_floor = 0.01;
  std::uint64_t gcd_d = 100;
  std::uint64_t gcd_samples = 100000;
  std::uint64_t limit = 0;
  std::uint64_t x = 100;
  std::uint64_t y = 2;
  unsigned threads = 1;
  bool dry_run = false;
  std::string out;
  std::string format = "json";
  std::string config_path;
};

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Seed precedence: --seed, then the config file, then $RCL_SEED, then 0.
std::uint64_t resolve_seed(const ExperimentConfig& cfg);

/// Runs one command line (without the program name). Output goes to `out`
/// unless --out is given; errors are written to `err` as a JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rmfpoly::cli
