#include "dotrecon/config.hpp"

#include <fstream>
#include <sstream>

#include "dotrecon/errors.hpp"

namespace dotrecon {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  consumed_.erase(key);
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string* Config::lookup(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  consumed_.insert(key);
  return &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  const std::string* v = lookup(key);
  return v ? *v : fallback;
}

std::string Config::require_string(const std::string& key) {
  const std::string* v = lookup(key);
  if (!v) throw ConfigError("missing required config key '" + key + "'");
  return *v;
}

double Config::get_double(const std::string& key, double fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + *v + "' as number");
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + *v + "' as integer");
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long d = std::stoull(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + *v + "' as unsigned");
  }
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': cannot parse list item '" + item + "'");
    }
  }
  return out;
}

void Config::ensure_all_consumed() const {
  std::string leftovers;
  for (const auto& [key, value] : values_) {
    if (!consumed_.count(key)) leftovers += (leftovers.empty() ? "" : ", ") + key;
  }
  if (!leftovers.empty())
    throw ConfigError("unrecognized config keys: " + leftovers);
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    cfg.set(key, value);
  }
  return cfg;
}

void apply_override(Config& config, const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key=value, got '" + key_equals_value + "'");
  config.set(trim(key_equals_value.substr(0, eq)),
             trim(key_equals_value.substr(eq + 1)));
}

void write_effective_config(const Config& config, const std::string& command,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write effective config '" + path + "'");
  out << "command = " << command << "\n";
  for (const auto& [key, value] : config.entries()) {
    if (key != "command") out << key << " = " << value << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace dotrecon
