#pragma once

#include <string>
#include <vector>

#include "stlgen/errors.hpp"

namespace stlgen {

/// Maps text to a fixed-dimension real vector. Implementations must be safe
/// for concurrent encode() calls.
class TextEncoder {
public:
  virtual ~TextEncoder() = default;
  virtual std::vector<double> encode(const std::string& text) const = 0;
  virtual std::size_t dimension() const = 0;
};

/// Cosine similarity in [-1, 1]; 0 when either vector is all-zero.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

/// Deterministic lexical encoder: presence-weighted TF-IDF over hashed word
/// unigrams and character trigrams, 4096 buckets with signed hashing,
/// L2-normalised. IDF is uniform until fit_idf() is called on a corpus.
class HashedLexicalEncoder : public TextEncoder {
public:
  static constexpr std::size_t kBuckets = 4096;

  std::vector<double> encode(const std::string& text) const override;
  std::size_t dimension() const override { return kBuckets; }

  /// Fits smoothed inverse document frequencies on the given corpus.
  void fit_idf(const std::vector<std::string>& corpus);

  /// Distinct hashed feature keys of a text: "w:<word>" unigrams over
  /// lowercased alphanumeric runs and "t:<trigram>" over the lowercased
  /// string. Exposed for collision checks in tests.
  static std::vector<std::string> feature_keys(const std::string& text);
  static std::size_t bucket_of(const std::string& key);
  static double sign_of(const std::string& key);

private:
  std::vector<double> idf_ = std::vector<double>(kBuckets, 1.0);
};

}  // namespace stlgen
