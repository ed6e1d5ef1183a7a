#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "asdim/cli.hpp"
#include "asdim/errors.hpp"

namespace asdim::cli {
namespace {

enum class Type { text, choice, integer, real, boolean, reals, words };

struct Key {
  const char* name;
  Type type;
  const char* choices = "";  // space separated, for Type::choice
};

// The documented grammar. Tolerances are plain keys so configs can override
// them; overrides end up in every CSV header.
const std::vector<Key>& schema() {
  static const std::vector<Key> keys = {
      {"command", Type::choice, "gen dim box axioms rough heat ns end report"},
      {"seed", Type::integer},
      {"threads", Type::integer},
      {"name", Type::text},

      {"space.kind", Type::choice,
       "lattice torus grid_graph unit_ball unit_square real_grid disk_union spiral_x spiral_y file"},
      {"space.dims", Type::integer},
      {"space.extent", Type::integer},
      {"space.side", Type::integer},
      {"space.norm", Type::choice, "sup l1 euclidean"},
      {"space.n", Type::integer},
      {"space.lo", Type::real},
      {"space.hi", Type::real},
      {"space.h", Type::real},
      {"space.n_lo", Type::integer},
      {"space.n_hi", Type::integer},
      {"space.per_disk", Type::integer},
      {"space.sampling", Type::choice, "uniform grid"},
      {"space.t_max", Type::real},
      {"space.resolution", Type::real},
      {"space.file", Type::text},
      {"space.center", Type::text},
      {"space.cap", Type::integer},

      {"estimator.r", Type::reals},
      {"estimator.R", Type::reals},
      {"estimator.ppo", Type::real},
      {"estimator.tail", Type::real},
      {"estimator.truncate", Type::boolean},
      {"estimator.min_range_factor", Type::real},
      {"estimator.min_ball", Type::integer},
      {"estimator.stabilization_tolerance", Type::real},
      {"estimator.packing_tolerance", Type::real},

      {"box.R_fixed", Type::real},
      {"box.r", Type::reals},
      {"box.r_hi", Type::real},
      {"box.floor", Type::real},
      {"box.ppo", Type::real},
      {"box.tail", Type::real},

      {"axioms.extent", Type::integer},
      {"axioms.product_extent", Type::integer},
      {"axioms.tolerance", Type::real},

      {"rough.witness", Type::choice, "z_grid dilation lattice_grid"},
      {"rough.extent", Type::integer},
      {"rough.h", Type::real},
      {"rough.transfer_r", Type::reals},
      {"rough.transfer_R", Type::reals},
      {"rough.exact_cap", Type::integer},
      {"rough.tolerance", Type::real},

      {"heat.mode", Type::choice, "spectral product krylov"},
      {"heat.cap", Type::integer},
      {"heat.radii", Type::reals},
      {"heat.t", Type::reals},
      {"heat.ppo", Type::real},
      {"heat.samples", Type::integer},
      {"heat.exact_diagonal_limit", Type::integer},
      {"heat.require_inside", Type::boolean},
      {"heat.min_decades", Type::real},

      {"ns.tolerance", Type::real},
      {"ns.cg_r", Type::reals},

      {"end.preset", Type::choice, "davies cylinder log oscillating"},
      {"end.N", Type::integer},
      {"end.D", Type::real},
      {"end.r_lo", Type::real},
      {"end.r_hi", Type::real},
      {"end.ppo", Type::real},
      {"end.tail", Type::real},
      {"end.settling_limit", Type::real},
      {"end.base", Type::real},
      {"end.exponent", Type::real},
      {"end.breakpoints", Type::integer},

      {"report.inputs", Type::words},
  };
  return keys;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : schema())
    if (name == k.name) return &k;
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_real(const std::string& s, double& v) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end;
}

bool parse_integer(const std::string& s, long long& v) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end;
}

bool parse_bool(const std::string& s, bool& v) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return v = true, true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return v = false, true;
  return false;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3)
        throw ConfigError(source + ": malformed section header '" + body + "'", number);
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ": expected 'key = value', got '" + body + "'", number);
    const std::string name = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (name.empty()) throw ConfigError(source + ": missing key before '='", number);
    const std::string key = section.empty() ? name : section + "." + name;
    if (!find_key(key)) throw ConfigError(source + ": unknown key '" + key + "'", number);
    if (cfg.settings_.count(key))
      throw ConfigError(source + ": duplicate key '" + key + "' (first on line " +
                            std::to_string(cfg.settings_[key].line) + ")",
                        number);
    cfg.settings_[key] = {value, number, false};
  }
  cfg.validate();
  return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  Config cfg = parse(in, path.filename().string());
  cfg.base_dir_ = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw ConfigError("unknown key '" + key + "'");
  settings_[key] = {value, 0, true};
}

void Config::fail(const std::string& key, const std::string& message) const {
  const auto it = settings_.find(key);
  if (it == settings_.end() || it->second.override)
    throw ConfigError((it == settings_.end() ? key : "--" + key) + ": " + message);
  throw ConfigError(key + ": " + message, it->second.line);
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto it = settings_.find(key);
  return it == settings_.end() ? fallback : it->second.value;
}

long long Config::integer(const std::string& key, long long fallback) const {
  const auto it = settings_.find(key);
  if (it == settings_.end()) return fallback;
  long long v = 0;
  if (!parse_integer(it->second.value, v)) fail(key, "expected an integer, got '" + it->second.value + "'");
  return v;
}

double Config::real(const std::string& key, double fallback) const {
  const auto it = settings_.find(key);
  if (it == settings_.end()) return fallback;
  double v = 0;
  if (!parse_real(it->second.value, v)) fail(key, "expected a number, got '" + it->second.value + "'");
  return v;
}

bool Config::boolean(const std::string& key, bool fallback) const {
  const auto it = settings_.find(key);
  if (it == settings_.end()) return fallback;
  bool v = false;
  if (!parse_bool(it->second.value, v)) fail(key, "expected true or false, got '" + it->second.value + "'");
  return v;
}

std::vector<double> Config::reals(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = settings_.find(key);
  if (it == settings_.end()) return fallback;
  std::vector<double> out;
  for (const auto& w : split_list(it->second.value)) {
    double v = 0;
    if (!parse_real(w, v)) fail(key, "expected a list of numbers, got '" + w + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

std::vector<std::string> Config::words(const std::string& key) const {
  const auto it = settings_.find(key);
  return it == settings_.end() ? std::vector<std::string>{} : split_list(it->second.value);
}

void Config::validate() const {
  for (const auto& [name, setting] : settings_) {
    const Key* key = find_key(name);
    if (!key) fail(name, "unknown key");
    switch (key->type) {
      case Type::text:
        if (setting.value.empty()) fail(name, "empty value");
        break;
      case Type::choice: {
        const auto options = split_list(key->choices);
        if (std::find(options.begin(), options.end(), setting.value) == options.end())
          fail(name, "'" + setting.value + "' is not one of: " + key->choices);
        break;
      }
      case Type::integer: integer(name, 0); break;
      case Type::real: real(name, 0.0); break;
      case Type::boolean: boolean(name, false); break;
      case Type::reals: reals(name, {}); break;
      case Type::words:
        if (words(name).empty()) fail(name, "empty list");
        break;
    }
  }
}

CsvHeader Config::header() const {
  CsvHeader h{{"version", kVersion}};
  std::string overrides;
  for (const auto& [name, setting] : settings_) {
    h.emplace_back(name, setting.value);
    if (setting.override) overrides += (overrides.empty() ? "" : ",") + name;
  }
  h.emplace_back("overrides", overrides.empty() ? "none" : overrides);
  return h;
}

std::vector<std::string> schema_keys() {
  std::vector<std::string> out;
  for (const auto& k : schema()) out.emplace_back(k.name);
  return out;
}

std::string resolve_flag(const std::string& name) {
  if (find_key(name)) return name;
  std::string found;
  for (const auto& k : schema()) {
    const std::string full = k.name;
    const auto dot = full.rfind('.');
    if (dot != std::string::npos && full.substr(dot + 1) == name) {
      if (!found.empty())
        throw ConfigError("--" + name + " is ambiguous (" + found + ", " + full + ")");
      found = full;
    }
  }
  if (found.empty()) throw ConfigError("unknown option --" + name);
  return found;
}

}  // namespace asdim::cli
