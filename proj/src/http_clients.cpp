#include "stlgen/http_clients.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "stlgen/errors.hpp"

namespace stlgen {

GenerationResult GrammarBackend::generate(const std::string& x, std::size_t n,
                                          std::uint64_t seed) const {
  GenerationResult out;
  out.provenance = "grammar";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) out.texts.push_back(render(policy_.sample(x, rng).formula));
  return out;
}

namespace {

struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string path = "/";
};

ParsedUrl parse_url(const std::string& url) {
  std::string rest = url;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) != 0)
    throw DataError("endpoint must start with http:// : '" + url + "'");
  rest = rest.substr(scheme.size());
  ParsedUrl out;
  std::size_t slash = rest.find('/');
  std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  std::size_t colon = hostport.find(':');
  if (colon == std::string::npos) {
    out.host = hostport;
  } else {
    out.host = hostport.substr(0, colon);
    out.port = std::stoi(hostport.substr(colon + 1));
  }
  if (out.host.empty()) throw DataError("endpoint has no host: '" + url + "'");
  return out;
}

// POSTs the body, retrying with exponential backoff. Returns the response
// body or throws HttpError after the final attempt.
std::string post_with_retry(const std::string& endpoint, const std::string& body,
                            const std::string& bearer_token, const HttpRetryOptions& retry) {
  ParsedUrl url = parse_url(endpoint);
  std::string last_error;
  for (int attempt = 0; attempt < retry.max_attempts; ++attempt) {
    if (attempt > 0) {
      int delay = retry.backoff_base_ms << (attempt - 1);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    httplib::Client client(url.host, url.port);
    client.set_connection_timeout(0, retry.timeout_ms * 1000);
    client.set_read_timeout(0, retry.timeout_ms * 1000);
    client.set_write_timeout(0, retry.timeout_ms * 1000);
    httplib::Headers headers;
    if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);
    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    return res->body;
  }
  throw HttpError("request to " + endpoint + " failed after " +
                  std::to_string(retry.max_attempts) + " attempts: " + last_error);
}

std::string apply_template(const std::string& tmpl, const std::string& input) {
  const std::string marker = "{input}";
  std::string out = tmpl;
  std::size_t pos = out.find(marker);
  if (pos == std::string::npos) return out + input;
  out.replace(pos, marker.size(), input);
  return out;
}

}  // namespace

HttpGenerator::HttpGenerator(Options options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw DataError("HTTP generator needs an endpoint");
  parse_url(options_.endpoint);
  if (options_.max_concurrency == 0) options_.max_concurrency = 1;
}

GenerationResult HttpGenerator::generate(const std::string& x, std::size_t n,
                                         std::uint64_t /*seed*/) const {
  GenerationResult out;
  out.provenance = "http:" + options_.endpoint;
  const char* token = std::getenv(options_.token_env.c_str());
  std::string bearer = token ? token : "";

  nlohmann::ordered_json req;
  req["prompt"] = apply_template(options_.prompt_template, x);
  req["n"] = 1;
  req["temperature"] = options_.temperature;
  std::string body = req.dump();

  std::vector<std::string> texts(n);
  std::vector<std::string> errors(n);
  std::vector<char> ok(n, 0);

  std::size_t workers = std::min(options_.max_concurrency, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  std::mutex next_mutex;
  std::size_t next = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(next_mutex);
          if (next >= n) return;
          i = next++;
        }
        try {
          std::string response = post_with_retry(options_.endpoint, body, bearer, options_.retry);
          nlohmann::json j = nlohmann::json::parse(response);
          if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
            throw HttpError("malformed response: missing choices");
          texts[i] = j["choices"][0].at("text").get<std::string>();
          ok[i] = 1;
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();

  for (std::size_t i = 0; i < n; ++i) {
    if (ok[i]) {
      out.texts.push_back(std::move(texts[i]));
    } else {
      out.errors.push_back(std::move(errors[i]));
    }
  }
  if (out.texts.empty() && !out.errors.empty()) throw HttpError(out.errors.front());
  return out;
}

HttpEncoder::HttpEncoder(Options options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw DataError("HTTP encoder needs an endpoint");
  parse_url(options_.endpoint);
  dimension_ = options_.expected_dimension;
}

std::vector<double> HttpEncoder::encode(const std::string& text) const {
  nlohmann::ordered_json req;
  req["text"] = text;
  std::string response = post_with_retry(options_.endpoint, req.dump(), "", options_.retry);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(response);
  } catch (const std::exception& e) {
    throw HttpError(std::string("malformed encoder response: ") + e.what());
  }
  if (!j.contains("vector") || !j["vector"].is_array())
    throw HttpError("malformed encoder response: missing vector");
  std::vector<double> v = j["vector"].get<std::vector<double>>();
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (dimension_ == 0) dimension_ = v.size();
    if (v.size() != dimension_)
      throw HttpError("encoder dimension changed from " + std::to_string(dimension_) + " to " +
                      std::to_string(v.size()) + "; the session dimension is fixed");
  }
  return v;
}

std::size_t HttpEncoder::dimension() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return dimension_;
}

}  // namespace stlgen
