#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace scaling_lens::cli {

/// One `key = value` entry with the line it came from (0 = default/flag).
struct ConfigValue {
  std::string text;
  int line = 0;
  std::string origin;  // "default", "config", "flag"
};

/// Flat `key = value` text, `#` starts a comment. Throws ValidationError
/// "<source>:<line>: ..." on malformed lines or repeated keys.
std::map<std::string, ConfigValue> parse_config_text(std::string_view text,
                                                     const std::string& source);
std::map<std::string, ConfigValue> parse_config_file(const std::string& path);

struct KeySpec {
  std::string name;
  std::string default_value;  // empty = required
  std::string help;
};

/// Commands understood by the runner, in help order.
const std::vector<std::string>& command_names();

/// Keys accepted by `command` (including the common seed/trials/threads/
/// format/out keys). Throws ValidationError for an unknown command.
const std::vector<KeySpec>& command_keys(const std::string& command);

class Config {
 public:
  Config(std::string command, std::string source,
         std::map<std::string, ConfigValue> values);

  const std::string& command() const { return command_; }
  const std::map<std::string, ConfigValue>& values() const { return values_; }

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::uint64_t> get_u64s(const std::string& key) const;

  /// ValidationError naming the key and its source line.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const ConfigValue& at(const std::string& key) const;

  std::string command_;
  std::string source_;
  std::map<std::string, ConfigValue> values_;
};

/// Merges defaults, file entries and flag overrides (flags win). Unknown
/// keys in the file are rejected with their line number; required keys
/// without a value are rejected too.
Config resolve_config(const std::string& command, const std::string& source,
                      const std::map<std::string, ConfigValue>& file_values,
                      const std::map<std::string, std::string>& overrides);

}  // namespace scaling_lens::cli
