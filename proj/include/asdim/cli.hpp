#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "asdim/io.hpp"

namespace asdim::cli {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, resource_cap = 3, scale_insufficient = 4 };

inline constexpr const char* kVersion = "asdim 0.1.0";

/// One key = value entry. `line` is the config line, 0 for flags.
struct Setting {
  std::string value;
  int line = 0;
  bool override = false;
};

/// Flat key = value configuration with [section] prefixes.
///
///   # comment            ; comment
///   command = dim        top-level key
///   [space]
///   kind = lattice       stored as "space.kind"
///
/// Lists are whitespace- or comma-separated. Every key must appear in the
/// schema; values are type-checked on access and by validate().
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "config");
  static Config parse_file(const std::filesystem::path& path);

  /// Flag override; replaces any config value and is marked in headers.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return settings_.count(key) > 0; }
  const std::map<std::string, Setting>& settings() const { return settings_; }
  /// Directory relative paths in the config resolve against.
  const std::filesystem::path& base_dir() const { return base_dir_; }

  std::string text(const std::string& key, const std::string& fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  double real(const std::string& key, double fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> words(const std::string& key) const;

  /// Checks every key against the schema and every value against its type.
  void validate() const;

  /// "# key=value" header: version, every setting in key order, and the
  /// list of flag overrides.
  CsvHeader header() const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  std::map<std::string, Setting> settings_;
  std::filesystem::path base_dir_ = ".";
};

/// Every key of the documented grammar, in schema order.
std::vector<std::string> schema_keys();

/// Full key of a flag name: exact schema key, or the unique key whose last
/// component matches. Throws ConfigError otherwise.
std::string resolve_flag(const std::string& name);

/// Runs one subcommand; `args` excludes the program name.
///
///   asdim <gen|dim|box|axioms|rough|heat|ns|end|report> [--config FILE]
///         [--out DIR] [--key value]...
///   asdim run --config FILE [--out DIR] [--key value]...
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace asdim::cli
