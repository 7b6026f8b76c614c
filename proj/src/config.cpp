#include "patchdyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace patchdyn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const auto t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc{} && ptr == t.data() + t.size();
}

bool parse_bool(const std::string& s, bool& out) {
  const auto t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return out = true, true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return out = false, true;
  return false;
}

// Empty string if the value is acceptable, else the reason.
std::string check_value(const ConfigKey& key, const std::string& value) {
  long long i = 0;
  double d = 0.0;
  bool b = false;
  switch (key.kind) {
    case ValueKind::integer:
      return parse_number(value, i) ? "" : "expected an integer";
    case ValueKind::real:
      return parse_number(value, d) ? "" : "expected a number";
    case ValueKind::boolean:
      return parse_bool(value, b) ? "" : "expected true or false";
    case ValueKind::text:
      return "";
    case ValueKind::int_list:
      for (const auto& item : split_list(value))
        if (!parse_number(item, i)) return "expected a comma-separated list of integers";
      return "";
    case ValueKind::real_list:
      for (const auto& item : split_list(value))
        if (!parse_number(item, d)) return "expected a comma-separated list of numbers";
      return "";
  }
  return "";
}

std::vector<ConfigKey> build_schema() {
  using K = ValueKind;
  std::vector<ConfigKey> s{
      {"run", "out", K::text, "out", "output directory"},
      {"run", "which", K::text, "all", "figure data set for the figures subcommand"},
      {"run", "threads", K::integer, "1", "worker threads"},
      {"run", "mode", K::text, "meso", "coupling mode: continuous or meso"},

      {"geometry", "n", K::integer, "20", "patch half-width"},
      {"geometry", "a", K::integer, "5", "core half-width"},
      {"geometry", "N", K::integer, "0", "microscale points per macroscale step (0: 4n+1)"},
      {"geometry", "h", K::real, "1", "microscale spacing"},
      {"geometry", "cos_ell", K::real, "0.91", "coupling parameter cos(ell)"},

      {"schedule", "delta_t", K::real, "0.5", "mesoscale step"},
      {"schedule", "q", K::integer, "2", "Taylor terms held per mesoscale step"},
      {"schedule", "steps", K::integer, "4", "mesoscale steps"},
      {"schedule", "forcing", K::text, "sin", "edge forcing: sin, exp or zero"},
      {"schedule", "dt_micro", K::real, "0", "microscale integrator step (0: automatic)"},
      {"schedule", "t_end", K::real, "0.4", "final time"},

      {"sweep", "n_min", K::integer, "4", "smallest n in bound sweeps"},
      {"sweep", "n_max", K::integer, "20", "largest n in bound sweeps"},
      {"sweep", "a_list", K::int_list, "", "core half-widths (empty: all)"},
      {"sweep", "delta_t_list", K::real_list, "0.5", "mesoscale steps"},
      {"sweep", "q_list", K::int_list, "1,3,5,7", "Taylor orders"},
      {"sweep", "cos_ell_list", K::real_list, "0.91", "cos(ell) values"},

      {"gl2d", "alpha", K::real, "1", "linear dispersion"},
      {"gl2d", "beta", K::real, "2", "nonlinear dispersion"},
      {"gl2d", "domain_width", K::real, "20", "periodic domain width"},
      {"gl2d", "H", K::real, "5", "macroscale spacing"},
      {"gl2d", "gamma", K::real, "1", "coupling strength"},
      {"gl2d", "seed", K::integer, "1", "random seed"},
      {"gl2d", "init_amplitude", K::real, "0.5", "initial sinusoid amplitude"},
      {"gl2d", "noise_std", K::real, "0.8", "initial noise standard deviation"},
      {"gl2d", "as_printed", K::boolean, "false", "use 1-(rx^2-ry^2)gamma for cos(ell)"},
      {"gl2d", "stale_steps", K::integer, "0", "experimental: neighbour data age in exchanges"},
      {"gl2d", "snapshot_times", K::real_list, "0.04,0.4", "field snapshot times"},
      {"gl2d", "series_dt", K::real, "0.01", "macroscale series sampling interval"},

      {"comms", "topology", K::text, "grid", "grid, ring or line"},
      {"comms", "patches", K::integer, "4", "patches per axis (grid) or in total"},
      {"comms", "payload", K::integer, "1", "scalars per message"},
      {"comms", "delays", K::text, "", "src-dst:steps list, steps may be inf"},
  };
  std::set<std::string> seen;
  for (const auto& k : s)
    if (!seen.insert(k.name).second) throw std::logic_error("duplicate config key " + k.name);
  return s;
}

}  // namespace

std::string ConfigKey::flag() const {
  std::string f = "--" + name;
  std::replace(f.begin() + 2, f.end(), '_', '-');
  return f;
}

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = build_schema();
  return schema;
}

const ConfigKey& find_key(const std::string& name) {
  for (const auto& k : config_schema())
    if (k.name == name) return k;
  throw ConfigError(0, "unknown key '" + name + "'");
}

ExperimentConfig::ExperimentConfig() {
  for (const auto& k : config_schema()) values_[k.name] = {k.default_value, false};
}

void ExperimentConfig::assign(const std::string& key, const std::string& value, bool explicit_value, int line) {
  const auto& k = find_key(key);
  if (const auto why = check_value(k, value); !why.empty())
    throw ConfigError(line, "key '" + key + "': " + why + ", got '" + value + "'");
  values_[key] = {trim(value), explicit_value};
}

void ExperimentConfig::parse(std::istream& in) {
  std::string line, section;
  std::set<std::string> in_file;
  for (int number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(number, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      const bool known = std::any_of(config_schema().begin(), config_schema().end(),
                                     [&](const ConfigKey& k) { return k.section == section; });
      if (!known) throw ConfigError(number, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(number, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(number, "key '" + key + "' appears before any [section]");
    const auto it = std::find_if(config_schema().begin(), config_schema().end(),
                                 [&](const ConfigKey& k) { return k.name == key; });
    if (it == config_schema().end()) throw ConfigError(number, "unknown key '" + key + "'");
    if (it->section != section)
      throw ConfigError(number, "key '" + key + "' belongs in [" + it->section + "], not [" + section + "]");
    if (!in_file.insert(key).second) throw ConfigError(number, "duplicate key '" + key + "'");
    assign(key, value, true, number);
  }
}

void ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  parse(in);
}

void ExperimentConfig::set_default(const std::string& key, const std::string& value) {
  if (!values_.at(find_key(key).name).explicit_value) assign(key, value, false, 0);
}

void ExperimentConfig::override_value(const std::string& key, const std::string& value) {
  assign(key, value, true, 0);
}

bool ExperimentConfig::explicitly_set(const std::string& key) const { return values_.at(find_key(key).name).explicit_value; }

const std::string& ExperimentConfig::raw(const std::string& key) const { return values_.at(find_key(key).name).value; }

long long ExperimentConfig::get_int(const std::string& key) const {
  long long v = 0;
  if (find_key(key).kind != ValueKind::integer || !parse_number(raw(key), v))
    throw ConfigError(0, "key '" + key + "' is not an integer");
  return v;
}

double ExperimentConfig::get_real(const std::string& key) const {
  double v = 0.0;
  if (find_key(key).kind != ValueKind::real || !parse_number(raw(key), v))
    throw ConfigError(0, "key '" + key + "' is not a number");
  return v;
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  bool v = false;
  if (find_key(key).kind != ValueKind::boolean || !parse_bool(raw(key), v))
    throw ConfigError(0, "key '" + key + "' is not a boolean");
  return v;
}

std::string ExperimentConfig::get_text(const std::string& key) const { return raw(key); }

std::vector<long long> ExperimentConfig::get_int_list(const std::string& key) const {
  if (find_key(key).kind != ValueKind::int_list) throw ConfigError(0, "key '" + key + "' is not an integer list");
  std::vector<long long> out;
  for (const auto& item : split_list(raw(key))) {
    long long v = 0;
    parse_number(item, v);
    out.push_back(v);
  }
  return out;
}

std::vector<double> ExperimentConfig::get_real_list(const std::string& key) const {
  if (find_key(key).kind != ValueKind::real_list) throw ConfigError(0, "key '" + key + "' is not a number list");
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) {
    double v = 0.0;
    parse_number(item, v);
    out.push_back(v);
  }
  return out;
}

}  // namespace patchdyn
