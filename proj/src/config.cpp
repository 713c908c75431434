// SPDX-License-Identifier: Apache-2.0

#include "sirm/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace sirm
{

namespace
{

std::string trim(const std::string &s)
{
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
    ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
    --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string &s)
{
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] == '#' || s[i] == ';')
      return s.substr(0, i);
  return s;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string &text, const std::string &name)
{
  ConfigFile cfg;
  cfg.name_ = name;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(name + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
    auto &sec = cfg.sections_[section];
    if (sec.count(key))
      throw ConfigError(name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    sec[key] = Entry{value, line_no, false};
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

const ConfigFile::Entry *ConfigFile::find(const std::string &section,
                                          const std::string &key) const
{
  const auto sec = sections_.find(section);
  if (sec == sections_.end())
    return nullptr;
  const auto it = sec->second.find(key);
  if (it == sec->second.end())
    return nullptr;
  it->second.touched = true;
  return &it->second;
}

const ConfigFile::Entry &ConfigFile::require(const std::string &section,
                                             const std::string &key) const
{
  const Entry *e = find(section, key);
  if (!e)
    throw ConfigError(name_ + ": missing required key [" + section + "] " + key);
  return *e;
}

bool ConfigFile::has(const std::string &section, const std::string &key) const
{
  return find(section, key) != nullptr;
}

std::string ConfigFile::get_string(const std::string &section, const std::string &key) const
{
  return require(section, key).value;
}

std::string ConfigFile::get_string(const std::string &section, const std::string &key,
                                   const std::string &fallback) const
{
  const Entry *e = find(section, key);
  return e ? e->value : fallback;
}

double ConfigFile::get_double(const std::string &section, const std::string &key) const
{
  const Entry &e = require(section, key);
  try {
    size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size())
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception &) {
    throw ConfigError(name_ + ":" + std::to_string(e.line) + ": '" + e.value +
                      "' is not a number");
  }
}

double ConfigFile::get_double(const std::string &section, const std::string &key,
                              double fallback) const
{
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string &section, const std::string &key) const
{
  const Entry &e = require(section, key);
  try {
    size_t pos = 0;
    const int v = std::stoi(e.value, &pos);
    if (pos != e.value.size())
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception &) {
    throw ConfigError(name_ + ":" + std::to_string(e.line) + ": '" + e.value +
                      "' is not an integer");
  }
}

int ConfigFile::get_int(const std::string &section, const std::string &key, int fallback) const
{
  return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string &section, const std::string &key,
                          bool fallback) const
{
  const Entry *e = find(section, key);
  if (!e)
    return fallback;
  const std::string &v = e->value;
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ConfigError(name_ + ":" + std::to_string(e->line) + ": '" + v + "' is not a boolean");
}

std::vector<double> ConfigFile::get_list(const std::string &section,
                                         const std::string &key) const
{
  const Entry &e = require(section, key);
  std::istringstream in(e.value);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size())
        throw std::invalid_argument("trailing characters");
    } catch (const std::exception &) {
      throw ConfigError(name_ + ":" + std::to_string(e.line) + ": '" + tok +
                        "' is not a number");
    }
  }
  if (out.empty())
    throw ConfigError(name_ + ":" + std::to_string(e.line) + ": empty list");
  return out;
}

std::vector<int> ConfigFile::get_int_list(const std::string &section,
                                          const std::string &key) const
{
  std::vector<int> out;
  for (double v : get_list(section, key)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw ConfigError(name_ + ": list value " + std::to_string(v) + " in [" + section +
                        "] " + key + " is not an integer");
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> ConfigFile::untouched_keys() const
{
  std::vector<std::string> out;
  for (const auto &[sec, entries] : sections_)
    for (const auto &[key, entry] : entries)
      if (!entry.touched)
        out.push_back("[" + sec + "] " + key);
  return out;
}

void ConfigFile::apply_override_section(const std::string &name)
{
  const auto sec = sections_.find(name);
  if (sec == sections_.end())
    return;
  for (const auto &[key, entry] : sec->second) {
    const size_t dot = key.find('.');
    if (dot == std::string::npos)
      throw ConfigError(name_ + ":" + std::to_string(entry.line) +
                        ": override keys must look like section.key");
    sections_[key.substr(0, dot)][key.substr(dot + 1)] =
        Entry{entry.value, entry.line, false};
    entry.touched = true;
  }
  sections_.erase(name);
}

}  // namespace sirm
