#ifndef FANETSIM_CONFIG_HPP_
#define FANETSIM_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fanetsim/sim.hpp"

namespace fanetsim {

// Flat key-value config files: one `key = value` per line, `#` comments.
// Getters mark keys as consumed so unknown (misspelled) keys can be rejected
// after a scenario or grid has been built.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long get_long(const std::string& key, long def) const;
  int get_int(const std::string& key, int def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& def) const;

  // Keys present in the file that no getter ever touched.
  std::vector<std::string> unconsumed() const;
  void require_fully_consumed() const;  // throws ConfigError on leftovers

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

ScenarioConfig scenario_from_config(const Config& cfg);

}  // namespace fanetsim

#endif  // FANETSIM_CONFIG_HPP_
