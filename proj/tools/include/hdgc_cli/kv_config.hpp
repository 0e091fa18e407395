#pragma once

#include <map>
#include <string>
#include <vector>

namespace hdgc::cli {

/// Flat "key = value" config file. '#' starts a comment; blank lines are
/// ignored; keys must be unique.
std::map<std::string, std::string> load_kv_config(const std::string& path);

// Typed lookups; throw ConfigError naming the key on a bad value.
double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback);
int kv_int(const std::map<std::string, std::string>& kv, const std::string& key, int fallback);
long long kv_long(const std::map<std::string, std::string>& kv, const std::string& key,
                  long long fallback);
bool kv_bool(const std::map<std::string, std::string>& kv, const std::string& key,
             bool fallback);
std::string kv_string(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& fallback);
std::vector<double> kv_double_list(const std::map<std::string, std::string>& kv,
                                   const std::string& key, std::vector<double> fallback);

/// Rejects configs containing keys outside the allowed set.
void kv_check_known(const std::map<std::string, std::string>& kv,
                    const std::vector<std::string>& known);

}  // namespace hdgc::cli
