#ifndef DOTRECON_CONFIG_HPP
#define DOTRECON_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace dotrecon {

// Flat key=value configuration: file plus command-line overrides. Every key
// must be consumed by the command that runs; leftovers are hard errors so
// typos never pass silently.
class Config {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback);
  std::string require_string(const std::string& key);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback);

  // Throws ConfigError naming any key that was set but never read.
  void ensure_all_consumed() const;

  // Resolved snapshot for the effective-config file (insertion-ordered map).
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;

  const std::string* lookup(const std::string& key);
};

Config load_config_file(const std::string& path);
void apply_override(Config& config, const std::string& key_equals_value);
void write_effective_config(const Config& config, const std::string& command,
                            const std::string& path);

}  // namespace dotrecon

#endif
