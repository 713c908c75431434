// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_CONFIG_HPP
#define SIRM_CONFIG_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sirm
{

// Parse failure with file and line attached.
class ConfigError : public std::runtime_error
{
public:
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

// Minimal INI-style configuration: [section] headers, key = value lines,
// '#' or ';' comments, lists as whitespace-separated values. Lookups are
// tracked so unknown keys can be reported after parsing a run description.
class ConfigFile
{
public:
  static ConfigFile parse_file(const std::string &path);
  static ConfigFile parse_string(const std::string &text, const std::string &name);

  bool has(const std::string &section, const std::string &key) const;

  std::string get_string(const std::string &section, const std::string &key) const;
  std::string get_string(const std::string &section, const std::string &key,
                         const std::string &fallback) const;
  double get_double(const std::string &section, const std::string &key) const;
  double get_double(const std::string &section, const std::string &key, double fallback) const;
  int get_int(const std::string &section, const std::string &key) const;
  int get_int(const std::string &section, const std::string &key, int fallback) const;
  bool get_bool(const std::string &section, const std::string &key, bool fallback) const;
  std::vector<double> get_list(const std::string &section, const std::string &key) const;
  std::vector<int> get_int_list(const std::string &section, const std::string &key) const;

  // Keys never looked up by any accessor; used to flag typos.
  std::vector<std::string> untouched_keys() const;

  // Merges every "section.key" of the named override section into the base
  // sections (used for the paper-scale switch).
  void apply_override_section(const std::string &name);

private:
  struct Entry
  {
    std::string value;
    int line = 0;
    mutable bool touched = false;
  };

  const Entry *find(const std::string &section, const std::string &key) const;
  const Entry &require(const std::string &section, const std::string &key) const;

  std::string name_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace sirm

#endif  // SIRM_CONFIG_HPP
