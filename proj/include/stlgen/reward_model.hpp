#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "stlgen/ast.hpp"
#include "stlgen/encoder.hpp"
#include "stlgen/reward.hpp"

namespace stlgen {

enum class MetricTag { ApAlignment, NlSimilarity, Succinctness, StlSimilarity };

const char* metric_tag_name(MetricTag tag) noexcept;  // "a" | "t" | "l" | "s"
MetricTag metric_tag_from_name(const std::string& name);

/// Candidate formulas generated for one input.
struct CandidateSet {
  std::string x;
  std::vector<Formula> candidates;
  std::string provenance;
};

/// One Bradley-Terry training pair. `margin` is the metric-score gap at
/// construction time, always positive. `record_index` tracks the dataset
/// record the pair came from so curricula can order whole records.
struct PreferencePair {
  std::string x;
  Formula chosen;
  Formula rejected;
  MetricTag metric = MetricTag::StlSimilarity;
  double margin = 0.0;
  std::size_t record_index = 0;
};

// ── Features ────────────────────────────────────────────────────────────────

/// Fixed-order features of (x, y). Counts are divided by fixed scale
/// constants to keep gradient magnitudes comparable across features.
inline constexpr std::size_t kFeatureDim = 15;

using FeatureVector = std::array<double, kFeatureDim>;

FeatureVector featurize(const std::string& x, const Formula& y, const TextEncoder& encoder);

/// Names of the feature slots, index-aligned with FeatureVector.
const std::array<const char*, kFeatureDim>& feature_names();

// ── Preference construction ─────────────────────────────────────────────────

/// Greedy farthest-point selection of k mutually dissimilar formulas:
/// duplicates (by canonical rendering) are collapsed first; the seed is the
/// pair with minimal ROUGE-L; then the sample minimising its maximum ROUGE-L
/// to the selected set is added repeatedly. Ties break by input order.
/// Returns fewer than k when fewer distinct samples exist.
std::vector<Formula> select_diverse_candidates(const std::vector<Formula>& samples,
                                               std::size_t k);

/// One pair per unordered candidate pair with strictly different scores under
/// the tagged metric; equal scores emit nothing.
std::vector<PreferencePair> build_preferences(const CandidateSet& cs, const Formula& ref,
                                              MetricTag tag, const TextEncoder& encoder);

// ── Bradley-Terry model ─────────────────────────────────────────────────────

/// Linear scorer over FeatureVector; score = sigmoid(w·f + b).
struct RewardModelParams {
  int schema_version = 1;
  MetricTag metric = MetricTag::StlSimilarity;
  std::array<double, kFeatureDim> weights{};
  double bias = 0.0;
};

double bt_probability(double chosen_score, double rejected_score);

/// A pre-featurised preference pair.
struct PreferenceExample {
  FeatureVector chosen;
  FeatureVector rejected;
};

PreferenceExample featurize_pair(const PreferencePair& pair, const TextEncoder& encoder);

/// Mean of -log sigmoid(score(chosen) - score(rejected)). Throws DataError on
/// an empty batch.
double bt_nll_loss(const RewardModelParams& params, const std::vector<PreferenceExample>& batch);
double bt_nll_loss(const RewardModelParams& params, const std::vector<PreferencePair>& batch,
                   const TextEncoder& encoder);

/// Analytic gradient of bt_nll_loss in the weights (the bias cancels in the
/// score difference and receives zero gradient).
std::array<double, kFeatureDim> bt_nll_gradient(const RewardModelParams& params,
                                                const std::vector<PreferenceExample>& batch);

struct RewardModelTrainConfig {
  std::size_t epochs = 5;
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

struct RewardModelTrainResult {
  RewardModelParams params;
  std::vector<double> epoch_losses;
};

/// Mini-batch gradient descent over the pairs in the given order (the
/// curriculum order is the caller's responsibility; no shuffling happens
/// here). Deterministic. Throws DataError on an empty list and diverging
/// (non-finite) loss.
RewardModelTrainResult train_reward_model(const std::vector<PreferencePair>& prefs,
                                          const RewardModelTrainConfig& cfg,
                                          const TextEncoder& encoder, MetricTag tag);
RewardModelTrainResult train_reward_model(const std::vector<PreferenceExample>& examples,
                                          const RewardModelTrainConfig& cfg, MetricTag tag);

/// sigmoid(w·featurize(x, y) + b) in (0, 1).
double reward_model_score(const RewardModelParams& params, const std::string& x,
                          const Formula& y, const TextEncoder& encoder);
double reward_model_score(const RewardModelParams& params, const FeatureVector& features);

std::string reward_model_to_json(const RewardModelParams& params);
RewardModelParams reward_model_from_json(const std::string& json_text);
void save_reward_model(const RewardModelParams& params, const std::string& path);
RewardModelParams load_reward_model(const std::string& path);

/// JSON Lines round-trip for preference datasets:
/// {"x":…, "chosen":…, "rejected":…, "metric":"a|t|l|s", "margin":…}
void save_preferences(const std::vector<PreferencePair>& prefs, const std::string& path);
std::vector<PreferencePair> load_preferences(const std::string& path);

}  // namespace stlgen
