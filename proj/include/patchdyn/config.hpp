#pragma once

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchdyn {

enum class ValueKind { integer, real, boolean, text, int_list, real_list };

struct ConfigKey {
  std::string section;
  std::string name;
  ValueKind kind = ValueKind::text;
  std::string default_value;
  std::string help;

  // "--" + name with '_' replaced by '-'.
  std::string flag() const;
};

class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what : "config: " + what),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

// The experiment schema; key names are unique across sections.
const std::vector<ConfigKey>& config_schema();
const ConfigKey& find_key(const std::string& name);

// Sectioned key=value text.  '#' starts a comment; blank lines are ignored.
//
//   [geometry]
//   n = 20
//   a = 5
class ExperimentConfig {
public:
  ExperimentConfig();

  void parse(std::istream& in);
  void load(const std::string& path);
  // Later sources win: defaults < set_default < file < override.
  void set_default(const std::string& key, const std::string& value);
  void override_value(const std::string& key, const std::string& value);

  bool explicitly_set(const std::string& key) const;
  const std::string& raw(const std::string& key) const;

  long long get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_text(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;

private:
  struct Entry {
    std::string value;
    bool explicit_value = false;
  };
  void assign(const std::string& key, const std::string& value, bool explicit_value, int line);

  std::map<std::string, Entry> values_;
};

}  // namespace patchdyn
