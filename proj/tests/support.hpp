#ifndef FOLK_TESTS_SUPPORT_HPP
#define FOLK_TESTS_SUPPORT_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "folk/errors.hpp"
#include "folk/http.hpp"

namespace folk::test {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(FOLK_SOURCE_DIR); }
inline fs::path cli_path() { return fs::path(FOLK_CLI_PATH); }
inline fs::path assets_dir() { return source_dir() / "assets" / "prompts"; }
inline fs::path golden_dir() { return source_dir() / "tests" / "golden"; }
inline fs::path data_dir() { return source_dir() / "tests" / "data"; }
inline fs::path fixtures_dir() { return source_dir() / "fixtures"; }

struct TempDir {
  fs::path path;

  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "folk-test-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path file(const std::string& name) const { return path / name; }
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out += "'";
  return out;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command with stdout/stderr captured. `env_prefix` may carry
// VAR=value assignments.
inline CommandResult run_command(const std::string& cmd, const std::string& env_prefix = "") {
  TempDir dir;
  fs::path out_file = dir.file("out"), err_file = dir.file("err");
  std::string full = env_prefix + " " + cmd + " > " + shell_quote(out_file.string()) + " 2> " +
                     shell_quote(err_file.string());
  int rc = std::system(full.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = read_file(out_file);
  result.err = read_file(err_file);
  return result;
}

// Serves canned responses and records every request.
class StubTransport : public HttpTransport {
 public:
  std::vector<HttpResponse> responses;  // consumed front to back; last repeats
  std::vector<std::string> get_urls;
  std::vector<std::string> post_urls;
  std::vector<std::string> post_bodies;
  int fail_first_n = 0;  // throw NetworkError for the first n requests

  HttpResponse get(const std::string& url, const std::vector<HttpHeader>&) override {
    get_urls.push_back(url);
    return next();
  }
  HttpResponse post(const std::string& url, const std::vector<HttpHeader>&,
                    const std::string& body, const std::string&) override {
    post_urls.push_back(url);
    post_bodies.push_back(body);
    return next();
  }
  int calls() const { return served_; }

 private:
  HttpResponse next() {
    served_++;
    if (fail_first_n > 0) {
      fail_first_n--;
      throw NetworkError("stub transport: simulated connection failure");
    }
    if (responses.empty()) throw NetworkError("stub transport: no canned response");
    HttpResponse r = responses.front();
    if (responses.size() > 1) responses.erase(responses.begin());
    return r;
  }
  int served_ = 0;
};

// Fails every request; used to prove a code path makes no network calls.
class DenyAllTransport : public HttpTransport {
 public:
  int calls = 0;
  HttpResponse get(const std::string&, const std::vector<HttpHeader>&) override {
    calls++;
    throw NetworkError("deny-all transport: network access attempted");
  }
  HttpResponse post(const std::string&, const std::vector<HttpHeader>&, const std::string&,
                    const std::string&) override {
    calls++;
    throw NetworkError("deny-all transport: network access attempted");
  }
};

// Zeroes wall-clock fields so replay outputs can be compared byte-for-byte.
inline nlohmann::json normalize_trace_json(nlohmann::json j) {
  if (j.contains("timings")) {
    for (auto& [key, value] : j["timings"].items()) {
      (void)key;
      value = 0;
    }
  }
  if (j.contains("completions")) {
    for (auto& c : j["completions"]) c["latency_ms"] = 0;
  }
  return j;
}

inline std::string normalize_trace_file(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << normalize_trace_json(nlohmann::json::parse(line)).dump() << '\n';
  }
  return out.str();
}

}  // namespace folk::test

#endif  // FOLK_TESTS_SUPPORT_HPP
