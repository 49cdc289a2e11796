#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "stlgen/encoder.hpp"
#include "stlgen/policy.hpp"

namespace stlgen {

struct HttpRetryOptions {
  int max_attempts = 3;
  int backoff_base_ms = 100;  // doubles per attempt
  int timeout_ms = 5000;
};

// ── Candidate generation ────────────────────────────────────────────────────

struct GenerationResult {
  std::vector<std::string> texts;
  std::vector<std::string> errors;  // per-request failures, surfaced not dropped
  std::string provenance;
};

/// Produces up to n candidate formula strings for an input. Unparseable
/// outputs are the caller's concern; backends report transport errors only.
class GeneratorBackend {
public:
  virtual ~GeneratorBackend() = default;
  virtual GenerationResult generate(const std::string& x, std::size_t n,
                                    std::uint64_t seed) const = 0;
};

/// Samples candidates from a grammar policy; seeding is per call so the same
/// (x, n, seed) always yields the same candidates.
class GrammarBackend : public GeneratorBackend {
public:
  explicit GrammarBackend(GrammarPolicy policy) : policy_(std::move(policy)) {}
  GenerationResult generate(const std::string& x, std::size_t n,
                            std::uint64_t seed) const override;

private:
  GrammarPolicy policy_;
};

/* Client for an external completion endpoint.
 *
 *   request:  {"prompt": string, "n": int, "temperature": number}
 *   response: {"choices": [{"text": string}, ...]}
 *
 * The prompt is the configured template with "{input}" replaced by x. A
 * bearer token is read from the environment variable named by `token_env`
 * when present. Each request retries up to max_attempts with exponential
 * backoff; at most `max_concurrency` requests are in flight at once.
 */
class HttpGenerator : public GeneratorBackend {
public:
  struct Options {
    std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/completions
    std::string prompt_template = "{input}";
    double temperature = 0.7;
    std::size_t max_concurrency = 4;
    std::string token_env = "STLGEN_API_TOKEN";
    HttpRetryOptions retry;
  };

  explicit HttpGenerator(Options options);
  GenerationResult generate(const std::string& x, std::size_t n,
                            std::uint64_t seed) const override;

private:
  Options options_;
};

// ── External embedding service ──────────────────────────────────────────────

/* Encoder backed by a single HTTP endpoint:
 *
 *   request:  {"text": string}
 *   response: {"vector": [numbers]}
 *
 * The vector dimension is fixed for the session by the first response (or by
 * `expected_dimension` when non-zero); a mismatch raises HttpError. Safe for
 * concurrent encode() calls: every call uses its own connection.
 */
class HttpEncoder : public TextEncoder {
public:
  struct Options {
    std::string endpoint;
    std::size_t expected_dimension = 0;
    HttpRetryOptions retry;
  };

  explicit HttpEncoder(Options options);
  std::vector<double> encode(const std::string& text) const override;
  std::size_t dimension() const override;

private:
  Options options_;
  mutable std::mutex mutex_;
  mutable std::size_t dimension_ = 0;
};

}  // namespace stlgen
