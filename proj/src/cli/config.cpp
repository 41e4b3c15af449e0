#include "scaling_lens/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scaling_lens/errors.hpp"

namespace scaling_lens::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<KeySpec> with_common(std::vector<KeySpec> keys) {
  keys.push_back({"seed", "1", "64-bit RNG seed"});
  keys.push_back({"trials", "1000", "Monte-Carlo trials"});
  keys.push_back({"threads", "0", "worker cap (0 = available parallelism)"});
  keys.push_back({"format", "csv", "csv or json"});
  keys.push_back({"out", "", "output path (default <command>.<format>)"});
  return keys;
}

std::vector<KeySpec> budget_keys() {
  return {{"varsigma", "1", "parameters per concept"},
          {"tau", "1", "tokens per text"},
          {"d_t", "6", "mean text degree"},
          {"epsilon", "0.5", "erasure fraction of the parent graph"}};
}

std::vector<KeySpec> sweep_keys() {
  auto k = budget_keys();
  k.push_back({"C_min", "", "smallest compute budget (FLOPs)"});
  k.push_back({"C_max", "", "largest compute budget (FLOPs)"});
  k.push_back({"budgets", "12", "number of log-spaced budgets"});
  k.push_back({"points_per_decade", "64", "coarse R grid density"});
  return k;
}

std::map<std::string, std::vector<KeySpec>> build_table() {
  std::map<std::string, std::vector<KeySpec>> t;
  t["threshold"] = with_common({
      {"R", "", "concepts (comma list allowed)"},
      {"T", "", "texts (comma list allowed)"},
      {"d_t", "6", "mean text degree"},
      {"epsilon", "0.5", "erasure fraction"},
      {"eps_lo", "0", "bisection lower end"},
      {"eps_hi", "1", "bisection upper end"},
      {"tol", "1e-10", "bisection tolerance"},
      {"eval_mode", "exact_log", "exact_log or poisson_limit"},
  });
  t["peel-sim"] = with_common({
      {"mode", "parent", "parent, learned or graphs"},
      {"R", "", "concepts"},
      {"T", "", "texts (comma list allowed)"},
      {"d_t", "6", "mean text degree"},
      {"epsilon", "0.5", "erasure fraction (parent mode)"},
      {"dump_graph", "", "write the first sampled graph here"},
  });
  auto iso = budget_keys();
  iso.push_back({"C", "", "compute budgets (comma list)"});
  iso.push_back({"points_per_decade", "64", "R grid density"});
  iso.push_back({"R_min", "0", "smallest R (0 = smallest feasible)"});
  iso.push_back({"R_max", "0", "largest R (0 = floor(C'))"});
  t["isoflop"] = with_common(iso);
  t["frontier"] = with_common(sweep_keys());
  t["loss"] = with_common(sweep_keys());
  auto em = sweep_keys();
  em.push_back({"levels", "100", "skill levels L"});
  em.push_back({"skills", "1000", "skills per level S"});
  em.push_back({"eta_scale", "7", "eta_l = exp(eta_scale * l / L)"});
  em.push_back({"task", "mixture", "homogeneous, binomial or mixture"});
  em.push_back({"task_level", "50", "level of a homogeneous task"});
  em.push_back({"task_arity", "5", "skills per homogeneous task"});
  em.push_back({"arity_min", "2", "smallest m of q(m)"});
  em.push_back({"arity_max", "7", "largest m of q(m)"});
  em.push_back({"pi", "0.5", "binomial level parameter"});
  em.push_back({"mixture_weights", "0.4,0.4,0.2", "mixture weights w_i"});
  em.push_back({"mixture_pis", "0.2,0.6,0.95", "mixture parameters pi_i"});
  em.push_back({"slope_tol", "0.02", "plateau slope tolerance per decade"});
  em.push_back({"min_width", "0.3", "minimum plateau width in decades"});
  em.push_back({"dump_levels", "false", "write <out>.levels.csv"});
  t["emergence"] = with_common(em);
  t["plateaus"] = with_common({
      {"curve", "", "emergence CSV with C and accuracy_lower_bound columns"},
      {"slope_tol", "0.02", "plateau slope tolerance per decade"},
      {"min_width", "0.3", "minimum plateau width in decades"},
  });
  return t;
}

const std::map<std::string, std::vector<KeySpec>>& table() {
  static const auto t = build_table();
  return t;
}

}  // namespace

std::map<std::string, ConfigValue> parse_config_text(std::string_view text,
                                                     const std::string& source) {
  std::map<std::string, ConfigValue> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    auto err = [&](const std::string& m) {
      throw ValidationError(source + ":" + std::to_string(line) + ": " + m);
    };
    if (eq == std::string::npos) err("expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_key(key)) err("invalid key '" + key + "'");
    if (value.empty()) err("missing value for '" + key + "'");
    if (out.count(key)) {
      err("duplicate key '" + key + "' (first set on line " +
          std::to_string(out[key].line) + ")");
    }
    out[key] = ConfigValue{value, line, "config"};
  }
  return out;
}

std::map<std::string, ConfigValue> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{
      "threshold", "peel-sim", "isoflop", "frontier", "loss", "emergence", "plateaus"};
  return names;
}

const std::vector<KeySpec>& command_keys(const std::string& command) {
  auto it = table().find(command);
  if (it == table().end()) throw ValidationError("unknown command '" + command + "'");
  return it->second;
}

Config::Config(std::string command, std::string source,
               std::map<std::string, ConfigValue> values)
    : command_(std::move(command)), source_(std::move(source)),
      values_(std::move(values)) {}

const ConfigValue& Config::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ValidationError("internal: key '" + key + "' not declared");
  }
  return it->second;
}

void Config::fail(const std::string& key, const std::string& message) const {
  const ConfigValue& v = at(key);
  std::string where;
  if (v.origin == "config") {
    where = source_ + ":" + std::to_string(v.line) + ": ";
  } else if (v.origin == "flag") {
    where = "--" + key + ": ";
  }
  throw ValidationError(where + key + " = " + v.text + ": " + message);
}

std::string Config::get_string(const std::string& key) const { return at(key).text; }

double Config::get_double(const std::string& key) const {
  const std::string& s = at(key).text;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    fail(key, "not a finite number");
  }
  return v;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string& s = at(key).text;
  if (s.empty() || s[0] == '-' || s[0] == '+') fail(key, "not a nonnegative integer");
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE) {
    // Accept integral scientific notation such as 1e6.
    const double d = get_double(key);
    if (d < 0.0 || d != std::floor(d) || d >= 1.8e19) fail(key, "not a nonnegative integer");
    return static_cast<std::uint64_t>(d);
  }
  return v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& s = at(key).text;
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(key, "expected true or false");
}

namespace {
std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
  return parts;
}
}  // namespace

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& part : split_list(at(key).text)) {
    Config one(command_, source_, {{key, ConfigValue{part, at(key).line, at(key).origin}}});
    try {
      out.push_back(one.get_double(key));
    } catch (const ValidationError&) {
      fail(key, "list entry '" + part + "' is not a finite number");
    }
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

std::vector<std::uint64_t> Config::get_u64s(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const std::string& part : split_list(at(key).text)) {
    Config one(command_, source_, {{key, ConfigValue{part, at(key).line, at(key).origin}}});
    try {
      out.push_back(one.get_u64(key));
    } catch (const ValidationError&) {
      fail(key, "list entry '" + part + "' is not a nonnegative integer");
    }
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

Config resolve_config(const std::string& command, const std::string& source,
                      const std::map<std::string, ConfigValue>& file_values,
                      const std::map<std::string, std::string>& overrides) {
  const std::vector<KeySpec>& keys = command_keys(command);
  auto declared = [&](const std::string& k) {
    return std::any_of(keys.begin(), keys.end(),
                       [&](const KeySpec& s) { return s.name == k; });
  };
  std::map<std::string, ConfigValue> values;
  for (const KeySpec& k : keys) {
    values[k.name] = ConfigValue{k.default_value, 0, "default"};
  }
  for (const auto& [k, v] : file_values) {
    if (!declared(k)) {
      throw ValidationError(source + ":" + std::to_string(v.line) + ": unknown key '" +
                            k + "' for command " + command);
    }
    values[k] = v;
  }
  for (const auto& [k, v] : overrides) {
    if (!declared(k)) throw ValidationError("--" + k + ": not valid for " + command);
    values[k] = ConfigValue{v, 0, "flag"};
  }
  for (const KeySpec& k : keys) {
    if (values[k.name].text.empty() && k.name != "out" && k.name != "dump_graph") {
      throw ValidationError(source + ": missing required key '" + k.name + "' (" +
                            k.help + ")");
    }
  }
  return Config(command, source, std::move(values));
}

}  // namespace scaling_lens::cli
