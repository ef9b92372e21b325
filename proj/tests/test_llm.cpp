#include "doctest.h"

#include "folk/digest.hpp"
#include "folk/errors.hpp"
#include "folk/llm.hpp"
#include "folk/text.hpp"
#include "support.hpp"

using namespace folk;

TEST_CASE("scripted backend serves its queue in order and then fails") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"A", "B"});
  Gateway gateway(backend);
  CompletionRequest req;
  req.model_id = "m";
  req.prompt = "p";
  CHECK(gateway.complete(req).text == "A");
  CHECK(gateway.complete(req).text == "B");
  CHECK_THROWS_AS(gateway.complete(req), BackendUnavailable);
  CHECK(gateway.call_count() == 3);
}

TEST_CASE("request tag depends only on model, prompt and stops") {
  CompletionRequest a;
  a.model_id = "text-davinci-003";
  a.prompt = "Claim: X\n>>>>>>\n";
  a.stop_sequences = {"------"};
  a.max_tokens = 512;
  a.temperature = 0.0;

  CompletionRequest b = a;
  b.max_tokens = 64;
  b.temperature = 0.9;
  CHECK(a.tag() == b.tag());

  CompletionRequest c = a;
  c.prompt += " ";
  CHECK(c.tag() != a.tag());

  CompletionRequest d = a;
  d.stop_sequences = {};
  CHECK(d.tag() != a.tag());

  CompletionRequest e = a;
  e.model_id = "other-model";
  CHECK(e.tag() != a.tag());
}

TEST_CASE("request tag matches an independent sha256sum of the canonical bytes") {
  CompletionRequest req;
  req.model_id = "text-davinci-003";
  req.prompt = "Some prompt with a claim.\n>>>>>>\n";
  req.stop_sequences = {"------", "Claim:"};

  // canonical byte stream: model \0 prompt (\0 stop)*
  std::string bytes = req.model_id;
  bytes.push_back('\0');
  bytes += req.prompt;
  for (const std::string& s : req.stop_sequences) {
    bytes.push_back('\0');
    bytes += s;
  }
  test::TempDir dir;
  test::write_file(dir.file("bytes"), bytes);
  test::CommandResult r =
      test::run_command("sha256sum " + test::shell_quote(dir.file("bytes").string()));
  REQUIRE(r.exit_code == 0);
  std::string expected = r.out.substr(0, 64);
  CHECK(req.tag() == expected);
}

TEST_CASE("recording produces a loadable replay store") {
  test::TempDir dir;
  auto backend =
      std::make_shared<ScriptedBackend>(std::vector<std::string>{"one", "two", "three"});
  Gateway gateway(backend);
  gateway.record_session(dir.file("trace.ndjson"));
  CHECK(gateway.recording());

  CompletionRequest req;
  req.model_id = "m";
  req.stop_sequences = {"------"};
  for (const char* p : {"p1", "p2", "p3"}) {
    req.prompt = p;
    gateway.complete(req);
  }
  std::filesystem::path path = gateway.finalize_session();
  CHECK(!gateway.recording());

  // three entries, in call order
  std::vector<std::string> lines = split_lines(test::read_file(path));
  REQUIRE(lines.size() == 3);
  CHECK(nlohmann::json::parse(lines[0])["prompt"] == "p1");
  CHECK(nlohmann::json::parse(lines[2])["prompt"] == "p3");

  ReplayStore store = ReplayStore::load(path);
  CHECK(store.size() == 3);

  // replaying the same requests issues zero scripted/live calls
  Gateway replay_gateway(std::make_shared<ReplayBackend>(std::move(store)));
  req.prompt = "p2";
  CompletionResult result = replay_gateway.complete(req);
  CHECK(result.text == "two");
  CHECK(result.backend == BackendKind::Replay);
  CHECK(result.latency_ms == 0);
  CHECK(backend->call_count() == 3);  // unchanged

  req.prompt = "never recorded";
  CHECK_THROWS_AS(replay_gateway.complete(req), ReplayMiss);
}

TEST_CASE("an empty recording is a valid empty store") {
  test::TempDir dir;
  auto backend = std::make_shared<ScriptedBackend>();
  Gateway gateway(backend);
  gateway.record_session(dir.file("empty.ndjson"));
  std::filesystem::path path = gateway.finalize_session();
  ReplayStore store = ReplayStore::load(path);
  CHECK(store.size() == 0);
}

namespace {

std::string openai_body(const std::string& text) {
  nlohmann::json j{{"choices", {{{"text", text}}}},
                   {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 34}}}};
  return j.dump();
}

}  // namespace

TEST_CASE("live backend retries transient failures with a bounded budget") {
  CompletionRequest req;
  req.model_id = "m";
  req.prompt = "p";

  SUBCASE("connection failures then success") {
    auto transport = std::make_shared<test::StubTransport>();
    transport->fail_first_n = 2;
    transport->responses = {{200, openai_body("ok")}};
    LiveConfig config;
    config.url = "http://example.test/v1/completions";
    config.initial_backoff = std::chrono::milliseconds(1);
    LiveBackend backend(config, transport);
    CompletionResult result = backend.complete(req);
    CHECK(result.text == "ok");
    CHECK(result.token_usage.has_value());
    CHECK(result.token_usage->completion_tokens == 34);
    CHECK(transport->calls() == 3);
  }

  SUBCASE("rate limiting is retried") {
    auto transport = std::make_shared<test::StubTransport>();
    transport->responses = {{429, "slow down"}, {200, openai_body("ok")}};
    LiveConfig config;
    config.url = "http://example.test/v1/completions";
    config.initial_backoff = std::chrono::milliseconds(1);
    LiveBackend backend(config, transport);
    CHECK(backend.complete(req).text == "ok");
    CHECK(transport->calls() == 2);
  }

  SUBCASE("persistent failure exhausts the retry budget") {
    auto transport = std::make_shared<test::StubTransport>();
    transport->fail_first_n = 100;
    LiveConfig config;
    config.url = "http://example.test/v1/completions";
    config.max_retries = 3;
    config.initial_backoff = std::chrono::milliseconds(1);
    LiveBackend backend(config, transport);
    CHECK_THROWS_AS(backend.complete(req), BackendUnavailable);
    CHECK(transport->calls() == 4);  // initial attempt + 3 retries
  }

  SUBCASE("auth failures do not retry") {
    auto transport = std::make_shared<test::StubTransport>();
    transport->responses = {{401, "bad key"}};
    LiveConfig config;
    config.url = "http://example.test/v1/completions";
    config.initial_backoff = std::chrono::milliseconds(1);
    LiveBackend backend(config, transport);
    CHECK_THROWS_AS(backend.complete(req), BackendUnavailable);
    CHECK(transport->calls() == 1);
  }
}

TEST_CASE("adapter mapping renames wire fields") {
  auto transport = std::make_shared<test::StubTransport>();
  nlohmann::json custom{{"output", {{"content", "mapped"}}}};
  transport->responses = {{200, custom.dump()}};

  AdapterMapping mapping;
  mapping.model_field = "engine";
  mapping.prompt_field = "input";
  mapping.completion_pointer = "/output/content";

  LiveConfig config;
  config.url = "http://example.test/generate";
  config.mapping = mapping;
  LiveBackend backend(config, transport);

  CompletionRequest req;
  req.model_id = "m1";
  req.prompt = "hello";
  req.stop_sequences = {"------"};
  CompletionResult result = backend.complete(req);
  CHECK(result.text == "mapped");

  nlohmann::json sent = nlohmann::json::parse(transport->post_bodies.at(0));
  CHECK(sent["engine"] == "m1");
  CHECK(sent["input"] == "hello");
  CHECK(!sent.contains("model"));
  CHECK(!sent.contains("prompt"));
}

TEST_CASE("adapter mapping loads overrides from a json file") {
  test::TempDir dir;
  test::write_file(dir.file("mapping.json"),
                   R"({"prompt_field": "text_in", "completion_pointer": "/result"})");
  AdapterMapping m = AdapterMapping::load(dir.file("mapping.json"));
  CHECK(m.prompt_field == "text_in");
  CHECK(m.completion_pointer == "/result");
  CHECK(m.model_field == "model");  // untouched default
}
