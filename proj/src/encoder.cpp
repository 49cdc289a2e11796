#include "stlgen/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <set>

namespace stlgen {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  for (std::size_t i = n; i < a.size(); ++i) na += a[i] * a[i];
  for (std::size_t i = n; i < b.size(); ++i) nb += b[i] * b[i];
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

// FNV-1a, fixed so hashes are identical across platforms and runs.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<std::string> HashedLexicalEncoder::feature_keys(const std::string& text) {
  std::string lower;
  lower.reserve(text.size());
  for (unsigned char c : text) lower += static_cast<char>(std::tolower(c));

  std::set<std::string> keys;
  std::string word;
  for (std::size_t i = 0; i <= lower.size(); ++i) {
    unsigned char c = i < lower.size() ? static_cast<unsigned char>(lower[i]) : ' ';
    if (std::isalnum(c) || c == '_' || c == '.') {
      word += static_cast<char>(c);
    } else if (!word.empty()) {
      keys.insert("w:" + word);
      word.clear();
    }
  }
  for (std::size_t i = 0; i + 3 <= lower.size(); ++i) keys.insert("t:" + lower.substr(i, 3));
  return std::vector<std::string>(keys.begin(), keys.end());
}

std::size_t HashedLexicalEncoder::bucket_of(const std::string& key) {
  return static_cast<std::size_t>(fnv1a(key) & (kBuckets - 1));
}

double HashedLexicalEncoder::sign_of(const std::string& key) {
  return (fnv1a(key) >> 63) ? -1.0 : 1.0;
}

std::vector<double> HashedLexicalEncoder::encode(const std::string& text) const {
  std::vector<double> v(kBuckets, 0.0);
  std::vector<std::string> keys = feature_keys(text);
  for (const std::string& key : keys) {
    std::size_t b = bucket_of(key);
    v[b] += sign_of(key) * idf_[b];
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  if (norm < 1e-24) {
    if (keys.empty() && text.empty()) return v;
    // signed-hash cancellation or featureless text: fall back to a single
    // deterministic bucket so non-empty text never encodes to zero
    v.assign(kBuckets, 0.0);
    v[bucket_of("w:" + text)] = 1.0;
    return v;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

void HashedLexicalEncoder::fit_idf(const std::vector<std::string>& corpus) {
  std::vector<std::size_t> df(kBuckets, 0);
  for (const std::string& doc : corpus) {
    std::set<std::size_t> seen;
    for (const std::string& key : feature_keys(doc)) seen.insert(bucket_of(key));
    for (std::size_t b : seen) ++df[b];
  }
  const double n = static_cast<double>(corpus.size());
  for (std::size_t b = 0; b < kBuckets; ++b)
    idf_[b] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[b]))) + 1.0;
}

}  // namespace stlgen
