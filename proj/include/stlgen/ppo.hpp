#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stlgen/ast.hpp"
#include "stlgen/encoder.hpp"
#include "stlgen/policy.hpp"
#include "stlgen/reward.hpp"
#include "stlgen/reward_model.hpp"

namespace stlgen {

struct PpoConfig {
  double clip_ratio = 0.2;  // ε; must lie in (0, 1) unless clipping is disabled
  double learning_rate = 0.01;
  std::size_t epochs = 4;  // inner epochs per batch
  std::size_t batch_size = 32;
  double kl_coefficient = 0.05;  // η
  double baseline_decay = 0.99;
  std::uint64_t seed = 0;
  std::size_t total_episodes = 10000;

  void validate() const;
};

/// One sampled derivation with its rewards. The stored log-probabilities are
/// the sampling-time values; ratios are taken against them during updates.
struct Trajectory {
  std::string x;
  std::vector<std::size_t> context;
  std::vector<Decision> decisions;
  Formula formula;
  RewardVector reward;
  double kl = 0.0;  // KL(policy ‖ policy0 | x) at sampling time
};

struct PpoStats {
  double mean_reward = 0.0;      // r_rl
  double mean_total = 0.0;       // r_total
  double mean_kl = 0.0;
  double clip_fraction = 0.0;
};

/// Clipped surrogate objective of a frozen batch, normalised by batch size:
/// (1/B) Σ_τ Σ_d min(ρ_d A_τ, clip(ρ_d, 1-ε, 1+ε) A_τ).
double ppo_surrogate(const GrammarPolicy& policy, const std::vector<Trajectory>& batch,
                     const std::vector<double>& advantages, double clip_ratio);

/// Analytic gradient of ppo_surrogate in the policy parameters.
std::vector<double> ppo_surrogate_gradient(const GrammarPolicy& policy,
                                           const std::vector<Trajectory>& batch,
                                           const std::vector<double>& advantages,
                                           double clip_ratio, double* clip_fraction = nullptr);

/// Gradient of (1/B) Σ_τ A_τ log p(τ) at the current parameters.
std::vector<double> vanilla_pg_gradient(const GrammarPolicy& policy,
                                        const std::vector<Trajectory>& batch,
                                        const std::vector<double>& advantages);

/// Gradient-ascent PPO step: advantage = r_total - baseline, cfg.epochs inner
/// passes over the clipped surrogate. Throws DataError on an empty batch or
/// non-finite gradients.
PpoStats ppo_update(GrammarPolicy& policy, const std::vector<Trajectory>& batch,
                    double baseline, const PpoConfig& cfg);

// ── Training loop ───────────────────────────────────────────────────────────

struct TrainExample {
  std::string x;
  Formula ref;
};

enum class RewardMode { Metric, Model };

RewardMode reward_mode_from_name(const std::string& name);
const char* reward_mode_name(RewardMode mode) noexcept;

/// Reward supervision: either the four metric functions against the
/// reference, or four trained per-metric reward models scoring (x, ŷ).
struct RewardSource {
  RewardMode mode = RewardMode::Metric;
  RewardWeights weights;
  const TextEncoder* encoder = nullptr;
  std::optional<std::array<RewardModelParams, 4>> models;
};

struct CurveRow {
  std::size_t step = 0;
  double mean_r_rl = 0.0;
  double mean_r_total = 0.0;
  double mean_kl = 0.0;
  double clip_fraction = 0.0;
};

struct TrainLoopResult {
  GrammarPolicy policy;
  std::vector<CurveRow> curve;              // one row per PPO batch
  std::vector<double> episode_r_rl;
  std::vector<double> episode_r_total;
  std::vector<char> episode_exact_match;    // canonical render equals the reference
  double final_kl = 0.0;                    // mean conditional KL over examples
};

/// Runs PPO over the dataset: cycle through examples, sample one formula per
/// episode, score it, apply r_total = r_RL - η·KL(policy ‖ policy0 | x) with
/// the KL in closed form, and update per batch.
TrainLoopResult train_ppo(const std::vector<TrainExample>& examples,
                          const GrammarPolicy& initial_policy, const RewardSource& rewards,
                          const PpoConfig& cfg);

void save_curve_csv(const std::vector<CurveRow>& curve, const std::string& path);
std::string train_summary_json(const TrainLoopResult& result, const PpoConfig& cfg);

}  // namespace stlgen
