#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "stlgen/http_clients.hpp"

using namespace stlgen;

namespace {

struct MockServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  explicit MockServer() = default;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~MockServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  std::string endpoint(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port) + path;
  }
};

}  // namespace

TEST_CASE("HTTP generator returns the endpoint's completions") {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    nlohmann::json body = nlohmann::json::parse(req.body);
    CHECK(body.at("prompt").get<std::string>() == "Translate: x stays high");
    CHECK(body.at("n") == 1);
    res.set_content(R"json({"choices":[{"text":"G[0,5](x > 1)"}]})json", "application/json");
  });
  mock.start();

  HttpGenerator::Options opt;
  opt.endpoint = mock.endpoint("/v1/completions");
  opt.prompt_template = "Translate: {input}";
  HttpGenerator gen(opt);
  GenerationResult out = gen.generate("x stays high", 3, 0);
  CHECK(out.texts.size() == 3);
  CHECK(out.errors.empty());
  CHECK(hits == 3);
  CHECK(out.provenance == "http:" + opt.endpoint);
  for (const std::string& t : out.texts) CHECK(t == "G[0,5](x > 1)");
}

TEST_CASE("HTTP generator forwards the bearer token from the environment") {
  MockServer mock;
  std::string seen_auth;
  mock.server.Post("/gen", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"text":"x > 0"}]})", "application/json");
  });
  mock.start();

  setenv("STLGEN_TEST_TOKEN", "sekrit", 1);
  HttpGenerator::Options opt;
  opt.endpoint = mock.endpoint("/gen");
  opt.token_env = "STLGEN_TEST_TOKEN";
  HttpGenerator gen(opt);
  gen.generate("x", 1, 0);
  CHECK(seen_auth == "Bearer sekrit");
  unsetenv("STLGEN_TEST_TOKEN");
}

TEST_CASE("HTTP generator retries a failing endpoint exactly max_attempts times") {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 503;
  });
  mock.start();

  HttpGenerator::Options opt;
  opt.endpoint = mock.endpoint("/flaky");
  opt.retry.max_attempts = 3;
  opt.retry.backoff_base_ms = 1;
  HttpGenerator gen(opt);
  CHECK_THROWS_AS(gen.generate("x", 1, 0), HttpError);
  CHECK(hits == 3);
}

TEST_CASE("HTTP generator recovers when a retry succeeds") {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/second", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 2) {
      res.status = 500;
    } else {
      res.set_content(R"({"choices":[{"text":"y < 2"}]})", "application/json");
    }
  });
  mock.start();

  HttpGenerator::Options opt;
  opt.endpoint = mock.endpoint("/second");
  opt.retry.max_attempts = 3;
  opt.retry.backoff_base_ms = 1;
  HttpGenerator gen(opt);
  GenerationResult out = gen.generate("y", 1, 0);
  REQUIRE(out.texts.size() == 1);
  CHECK(out.texts[0] == "y < 2");
}

TEST_CASE("HTTP generator reports malformed responses") {
  MockServer mock;
  mock.server.Post("/bad", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"no_choices": true})", "application/json");
  });
  mock.start();

  HttpGenerator::Options opt;
  opt.endpoint = mock.endpoint("/bad");
  opt.retry.backoff_base_ms = 1;
  HttpGenerator gen(opt);
  CHECK_THROWS_AS(gen.generate("x", 1, 0), HttpError);
}

TEST_CASE("HTTP generator times out and retries on a hanging endpoint") {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/slow", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    res.set_content(R"({"choices":[{"text":"late"}]})", "application/json");
  });
  mock.start();

  HttpGenerator::Options opt;
  opt.endpoint = mock.endpoint("/slow");
  opt.retry.max_attempts = 3;
  opt.retry.backoff_base_ms = 1;
  opt.retry.timeout_ms = 50;
  HttpGenerator gen(opt);
  CHECK_THROWS_AS(gen.generate("x", 1, 0), HttpError);
  CHECK(hits >= 3);
}

TEST_CASE("HTTP encoder returns vectors and pins the dimension") {
  MockServer mock;
  mock.server.Post("/encode", [&](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body);
    std::string text = body.at("text").get<std::string>();
    nlohmann::json out;
    if (text == "short") {
      out["vector"] = {1.0, 0.0};  // wrong dimension on purpose
    } else {
      out["vector"] = {0.5, 0.5, 0.25};
    }
    res.set_content(out.dump(), "application/json");
  });
  mock.start();

  HttpEncoder::Options opt;
  opt.endpoint = mock.endpoint("/encode");
  opt.retry.backoff_base_ms = 1;
  HttpEncoder enc(opt);
  std::vector<double> v = enc.encode("a normal sentence");
  CHECK(v == std::vector<double>{0.5, 0.5, 0.25});
  CHECK(enc.dimension() == 3);
  CHECK_THROWS_AS(enc.encode("short"), HttpError);
}

TEST_CASE("HTTP encoder enforces a preconfigured dimension") {
  MockServer mock;
  mock.server.Post("/encode", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"vector":[1.0, 2.0]})", "application/json");
  });
  mock.start();

  HttpEncoder::Options opt;
  opt.endpoint = mock.endpoint("/encode");
  opt.expected_dimension = 4;
  opt.retry.backoff_base_ms = 1;
  HttpEncoder enc(opt);
  CHECK_THROWS_AS(enc.encode("anything"), HttpError);
}

TEST_CASE("grammar backend is deterministic per (x, n, seed)") {
  PolicyConfig cfg;
  cfg.variables = {"x", "y"};
  cfg.thresholds = {0, 1};
  cfg.interval_lo = {0};
  cfg.interval_width = {2};
  cfg.max_depth = 2;
  GrammarBackend backend((GrammarPolicy(cfg)));
  GenerationResult a = backend.generate("input", 5, 99);
  GenerationResult b = backend.generate("input", 5, 99);
  GenerationResult c = backend.generate("input", 5, 100);
  CHECK(a.texts == b.texts);
  CHECK(a.texts != c.texts);
  CHECK(a.texts.size() == 5);
  CHECK(a.provenance == "grammar");
}
