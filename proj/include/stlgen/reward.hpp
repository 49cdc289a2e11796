#pragma once

#include <array>
#include <string>

#include "stlgen/ast.hpp"
#include "stlgen/encoder.hpp"

namespace stlgen {

/// Aggregation weights for the four metric scores plus the KL coefficient.
/// Weights are normalised to sum to one on load.
struct RewardWeights {
  double ap_alignment = 0.2;
  double nl_similarity = 0.25;
  double succinctness = 0.35;
  double stl_similarity = 0.2;
  double kl_coefficient = 0.05;

  double sum() const noexcept {
    return ap_alignment + nl_similarity + succinctness + stl_similarity;
  }
  /// Returns a copy scaled so the four weights sum to one. `warned` is set
  /// when scaling changed anything beyond rounding.
  RewardWeights normalized(bool* warned = nullptr) const;
};

/// Per-candidate scores: the four metrics, their aggregate, and the
/// KL-regularised total.
struct RewardVector {
  double ap_alignment = 0.0;
  double nl_similarity = 0.0;
  double succinctness = 0.0;
  double stl_similarity = 0.0;
  double aggregate = 0.0;
  double total = 0.0;
};

/// |A(hyp) ∩ A(ref)| / |A(ref)| over canonical atomic-proposition strings.
/// When A(ref) is empty: 1 if A(hyp) is also empty, else 0.
double metric_ap_alignment(const Formula& hyp, const Formula& ref);

/// Cosine between the encodings of x and the templated-NL rendering of hyp,
/// mapped from [-1, 1] to [0, 1]. Throws DataError on empty x.
double metric_templated_nl_similarity(const std::string& x, const Formula& hyp,
                                      const TextEncoder& encoder);

/// max(0, 1 - | |ref| - |hyp| | / |ref|) over whitespace-free canonical
/// lengths.
double metric_succinctness(const Formula& hyp, const Formula& ref);

/// ROUGE-L over tokenised canonical renderings.
double metric_stl_similarity(const Formula& hyp, const Formula& ref);

/// Weighted mean of the four scores: (Σ λ_i s_i) / (Σ λ_i).
double aggregate_reward(const std::array<double, 4>& scores, const RewardWeights& weights);

/// r_total = r_rl - η · kl.
double kl_regularize(double r_rl, double kl, double eta);

/// All four metrics plus the aggregate for a candidate; total uses kl = 0.
RewardVector score_candidate(const std::string& x, const Formula& hyp, const Formula& ref,
                             const TextEncoder& encoder, const RewardWeights& weights);

}  // namespace stlgen
