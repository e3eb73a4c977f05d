#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace burstalign::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kIoError = 3,
  kVerificationFailure = 4,
};

// Parses `key = value` lines; blank lines and lines starting with '#' are
// skipped. Throws IoError when unreadable, ConfigError on malformed lines or
// repeated keys.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

// Moves `--config FILE` (or `--config=FILE`) out of `args` and splices the
// file's entries in as `--key=value` tokens directly after the subcommand
// name, so explicit command-line flags still take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace burstalign::cli
