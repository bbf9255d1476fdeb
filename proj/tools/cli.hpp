#pragma once

// Command-line front end. `parse_args` builds a RunConfig from argv and an
// optional flat config file; `run` executes one command and returns the exit
// code (0 success, 1 usage error, 2 validation or numerical failure).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotnum::tools {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out;  // artifact path; empty writes to stdout
};

struct KeySpec {
  std::string name;
  std::string fallback;  // empty: required or family-dependent
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;
};

const std::vector<CommandSpec>& commands();

/// Config file grammar: one `key = value` per line, `#` starts a comment.
/// Keys are the long flag names without dashes, plus seed, workers and out.
std::map<std::string, std::string> parse_config_file(std::istream& in);

/// Returns false when help was printed and nothing should run.
bool parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out);

/// `lo:hi:count`, `lo:hi:count:log`, a comma list, or a single value.
std::vector<double> parse_grid(const std::string& text);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace rotnum::tools
