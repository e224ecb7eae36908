#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"
#include "ripkit/error.hpp"

namespace ripkit::cli {

/// Invalid invocation: missing or malformed parameter, unknown key.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct ParamSpec {
  std::string name;
  std::string help;
  std::optional<std::string> fallback;
};

struct CommandSpec {
  /// Flat name, e.g. "ric" or "transform-left".
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
};

/// Every command with its parameters; the shared ones (seed, format,
/// output, workers) are appended to each.
const std::vector<CommandSpec>& command_specs();
const CommandSpec& find_command(const std::string& name);

struct ExperimentConfig {
  std::string command;
  /// Resolved parameter values, defaults included.
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string output_path = "-";
  OutputFormat format = OutputFormat::csv;
  unsigned workers = 1;

  bool has(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  double real(const std::string& name) const;
  std::uint64_t count(const std::string& name) const;
  /// Comma-separated list of counts.
  std::vector<std::uint64_t> counts(const std::string& name) const;

  /// command plus every resolved parameter.
  std::map<std::string, std::string> echo() const;
};

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Flat key=value lines; '#' starts a comment line; blank lines skipped.
std::vector<ConfigEntry> read_config_stream(std::istream& in);
std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path);

/// Precedence: built-in defaults < config file < flags. Keys not declared by
/// the command are rejected.
ExperimentConfig resolve_config(const std::string& command,
                                const std::map<std::string, std::string>& flags,
                                const std::optional<std::filesystem::path>& config_file);

}  // namespace ripkit::cli
