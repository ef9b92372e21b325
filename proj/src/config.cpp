#include "folk/config.hpp"

#include <cstdlib>
#include <fstream>

#include "folk/errors.hpp"
#include "folk/text.hpp"

namespace folk {

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageFailure("cannot open config file: " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": empty key");
    // strip an inline comment outside quotes
    if (!value.empty() && value[0] != '"') {
      std::size_t hash = value.find('#');
      if (hash != std::string::npos) value = trim(value.substr(0, hash));
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

OptionResolver::OptionResolver(std::map<std::string, std::string> cli,
                               std::map<std::string, std::string> file, EnvGetter env)
    : cli_(std::move(cli)), file_(std::move(file)), env_(std::move(env)) {
  if (!env_) env_ = [](const char* name) { return std::getenv(name); };
}

std::optional<std::string> OptionResolver::get_optional(const std::string& key,
                                                        const std::string& env_var) const {
  if (auto it = cli_.find(key); it != cli_.end()) return it->second;
  if (auto it = file_.find(key); it != file_.end()) return it->second;
  if (!env_var.empty()) {
    if (const char* v = env_(env_var.c_str())) return std::string(v);
  }
  return std::nullopt;
}

std::string OptionResolver::get(const std::string& key, const std::string& env_var,
                                const std::string& fallback) const {
  return get_optional(key, env_var).value_or(fallback);
}

long OptionResolver::get_long(const std::string& key, const std::string& env_var,
                              long fallback) const {
  auto v = get_optional(key, env_var);
  if (!v) return fallback;
  try {
    std::size_t consumed = 0;
    long parsed = std::stol(*v, &consumed);
    if (consumed != v->size()) throw ConfigError("");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("option " + key + " expects an integer, got '" + *v + "'");
  }
}

double OptionResolver::get_double(const std::string& key, const std::string& env_var,
                                  double fallback) const {
  auto v = get_optional(key, env_var);
  if (!v) return fallback;
  try {
    std::size_t consumed = 0;
    double parsed = std::stod(*v, &consumed);
    if (consumed != v->size()) throw ConfigError("");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("option " + key + " expects a number, got '" + *v + "'");
  }
}

bool OptionResolver::get_bool(const std::string& key, const std::string& env_var,
                              bool fallback) const {
  auto v = get_optional(key, env_var);
  if (!v) return fallback;
  std::string s = to_lower(*v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("option " + key + " expects a boolean, got '" + *v + "'");
}

}  // namespace folk
