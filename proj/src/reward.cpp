#include "stlgen/reward.hpp"

#include <algorithm>
#include <cmath>

#include "stlgen/english.hpp"
#include "stlgen/parser.hpp"
#include "stlgen/text_metrics.hpp"

namespace stlgen {

RewardWeights RewardWeights::normalized(bool* warned) const {
  RewardWeights w = *this;
  double s = sum();
  if (s <= 0) throw DataError("reward weights must have a positive sum");
  if (warned) *warned = std::abs(s - 1.0) > 1e-9;
  w.ap_alignment /= s;
  w.nl_similarity /= s;
  w.succinctness /= s;
  w.stl_similarity /= s;
  return w;
}

double metric_ap_alignment(const Formula& hyp, const Formula& ref) {
  std::set<std::string> a_hyp = extract_atomic_propositions(hyp);
  std::set<std::string> a_ref = extract_atomic_propositions(ref);
  if (a_ref.empty()) return a_hyp.empty() ? 1.0 : 0.0;  // degenerate reference
  std::size_t common = 0;
  for (const std::string& ap : a_hyp) common += a_ref.count(ap);
  return static_cast<double>(common) / static_cast<double>(a_ref.size());
}

double metric_templated_nl_similarity(const std::string& x, const Formula& hyp,
                                      const TextEncoder& encoder) {
  if (x.empty()) throw DataError("empty natural-language input");
  double c = cosine(encoder.encode(x), encoder.encode(render_templated_nl(hyp)));
  return (c + 1.0) / 2.0;
}

double metric_succinctness(const Formula& hyp, const Formula& ref) {
  double ref_len = static_cast<double>(formula_length(ref));
  double hyp_len = static_cast<double>(formula_length(hyp));
  return std::max(0.0, 1.0 - std::abs(ref_len - hyp_len) / ref_len);
}

double metric_stl_similarity(const Formula& hyp, const Formula& ref) {
  return rouge_l(tokenize_texts(render(ref)), tokenize_texts(render(hyp)));
}

double aggregate_reward(const std::array<double, 4>& scores, const RewardWeights& weights) {
  double s = weights.sum();
  if (s <= 0) throw DataError("reward weights must have a positive sum");
  return (weights.ap_alignment * scores[0] + weights.nl_similarity * scores[1] +
          weights.succinctness * scores[2] + weights.stl_similarity * scores[3]) /
         s;
}

double kl_regularize(double r_rl, double kl, double eta) { return r_rl - eta * kl; }

RewardVector score_candidate(const std::string& x, const Formula& hyp, const Formula& ref,
                             const TextEncoder& encoder, const RewardWeights& weights) {
  RewardVector rv;
  rv.ap_alignment = metric_ap_alignment(hyp, ref);
  rv.nl_similarity = metric_templated_nl_similarity(x, hyp, encoder);
  rv.succinctness = metric_succinctness(hyp, ref);
  rv.stl_similarity = metric_stl_similarity(hyp, ref);
  rv.aggregate = aggregate_reward(
      {rv.ap_alignment, rv.nl_similarity, rv.succinctness, rv.stl_similarity}, weights);
  rv.total = rv.aggregate;
  return rv;
}

}  // namespace stlgen
