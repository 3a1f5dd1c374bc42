#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace urnlab::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailure = 1, kConfigError = 2 };

/// Invalid configuration; the message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::optional<int> n;
  std::optional<int> k;
  double eps = 0.25;
  std::optional<int> x0;
  std::optional<int> y0;
  std::string mode = "monotone";
  std::optional<std::int64_t> reps;
  std::optional<std::int64_t> t_max;
  double gamma1 = 4.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;  // empty: json for verify, csv otherwise
  std::string policy = "extremes";
  int jobs = 0;
  std::string ladder;
  std::string suite;
};

int run_kernel_dump(const RunConfig& cfg);
int run_mix(const RunConfig& cfg);
int run_cutoff_scan(const RunConfig& cfg);
int run_couple(const RunConfig& cfg);
int run_four_phase(const RunConfig& cfg);
int run_verify(const RunConfig& cfg);

}  // namespace urnlab::cli
