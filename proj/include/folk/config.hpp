#ifndef FOLK_CONFIG_HPP
#define FOLK_CONFIG_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace folk {

inline constexpr const char* kDefaultModelId = "text-davinci-003";

// Flat TOML-style document: `key = value` lines, optional quotes, `#`
// comments. Throws FormatError on malformed lines.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

// Option lookup with the precedence command-line flag > config file >
// environment > default.
class OptionResolver {
 public:
  using EnvGetter = std::function<const char*(const char*)>;

  OptionResolver(std::map<std::string, std::string> cli,
                 std::map<std::string, std::string> file, EnvGetter env = nullptr);

  // `env_var` may be empty when no environment variable backs the option.
  std::string get(const std::string& key, const std::string& env_var,
                  const std::string& fallback) const;
  std::optional<std::string> get_optional(const std::string& key,
                                          const std::string& env_var) const;

  long get_long(const std::string& key, const std::string& env_var, long fallback) const;
  double get_double(const std::string& key, const std::string& env_var, double fallback) const;
  bool get_bool(const std::string& key, const std::string& env_var, bool fallback) const;

 private:
  std::map<std::string, std::string> cli_;
  std::map<std::string, std::string> file_;
  EnvGetter env_;
};

}  // namespace folk

#endif  // FOLK_CONFIG_HPP
