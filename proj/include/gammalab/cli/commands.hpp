#pragma once

// The gammalab subcommands as library functions, so tests can drive them
// without spawning a process.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <vector>

#include "gammalab/asymptotics.hpp"
#include "gammalab/cli/table.hpp"
#include "gammalab/mp.hpp"
#include "gammalab/verify.hpp"

namespace gammalab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitPrecisionExhausted = 2,
  kExitIoOrConfig = 3,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "A..B" (inclusive, empty when B < A), "a,b,c" or a single index.
std::vector<index_t> parse_n_spec(const std::string& spec);

struct RunConfig {
  std::string command;
  std::string command_line;
  std::string n_spec;
  std::vector<index_t> ns;
  mp::PrecisionPolicy policy;
  mp::prec_t frac_bits = 64;
  std::optional<std::string> tail_eps;  // decimal string
  Format format = Format::csv;
  std::optional<std::filesystem::path> out;
  std::uint64_t seed = 20240611;
  unsigned jobs = 1;
  std::optional<std::filesystem::path> cache_dir;
  std::vector<asym::Law> laws;  // empty = all
  index_t n_max = 200;          // verify
  int digits = 20;              // gamma
  // Test hook, forwarded to the exact suite.
  std::function<void(index_t, exact::StirlingRow&)> corrupt_stirling;
};

struct Manifest {
  std::string command;
  std::string command_line;
  mp::PrecisionPolicy policy;
  mp::prec_t frac_bits = 0;
  std::optional<std::string> tail_eps;
  std::uint64_t seed = 0;
  std::string n_range;
  unsigned jobs = 1;
  std::chrono::duration<double> wall{0};
  std::vector<std::pair<index_t, double>> per_n_seconds;
  std::map<std::string, verify::Counts> suites;
  std::optional<std::string> cache_dir;
  std::size_t cache_hits = 0, cache_misses = 0, cache_corrupt = 0, cache_written = 0;

  std::string to_json() const;
};

struct CommandResult {
  int exit_code = kExitOk;
  Table table;
  std::optional<std::string> text;  // plain output instead of a table (gamma)
  std::vector<std::string> messages;  // diagnostics for stderr
  Manifest manifest;
};

CommandResult cmd_verify(const RunConfig& config);
CommandResult cmd_table(const RunConfig& config);
CommandResult cmd_criterion(const RunConfig& config);
CommandResult cmd_asym(const RunConfig& config);
CommandResult cmd_gamma(const RunConfig& config);

// Truncated decimal expansion of gamma with `digits` digits after the point.
// The printed prefix is certified: gamma lies in [s, s + 10^-digits).
std::string gamma_digits(int digits);

// Loads/saves the cache, dispatches on config.command, writes the data file
// (config.out or `out`) and the manifest (<out>.manifest.json, or `err` when
// writing to stdout). Returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv with the documented flags; `run` afterwards.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gammalab::cli
