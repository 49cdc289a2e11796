#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stlgen/curriculum.hpp"
#include "stlgen/dataset.hpp"
#include "stlgen/policy.hpp"
#include "stlgen/ppo.hpp"
#include "stlgen/reward.hpp"
#include "stlgen/reward_model.hpp"

namespace stlgen {

/* Run configuration, read from a plain-text key = value file ('#' starts a
 * comment). Recognised keys:
 *
 *   dataset, output_dir, seed
 *   lambda1 lambda2 lambda3 lambda4 eta
 *   reward_mode (metric|model), k, candidate_samples
 *   generator (grammar|http), endpoint, prompt_template, temperature
 *   curriculum_a curriculum_t curriculum_l curriculum_s (forward|reverse|shuffle)
 *   rm_epochs rm_learning_rate rm_batch_size
 *   clip_ratio learning_rate ppo_epochs batch_size total_episodes baseline_decay
 *   policy_auto (derive the grammar vocabulary from the dataset, default true)
 *   policy_variables policy_thresholds policy_interval_lo policy_interval_width
 *     (comma-separated; used when policy_auto = false or as overrides)
 *   policy_max_depth policy_context_buckets
 */
struct PipelineConfig {
  std::string dataset_path;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  RewardWeights weights;
  RewardMode reward_mode = RewardMode::Metric;
  std::size_t k = 3;
  std::size_t candidate_samples = 8;

  std::string generator = "grammar";
  bool candidate_mutations = true;
  std::string endpoint;
  std::string prompt_template = "{input}";
  double temperature = 0.7;

  std::map<MetricTag, OrderMode> curriculum_modes = {
      {MetricTag::ApAlignment, OrderMode::Forward},
      {MetricTag::NlSimilarity, OrderMode::Forward},
      {MetricTag::Succinctness, OrderMode::Forward},
      {MetricTag::StlSimilarity, OrderMode::Forward},
  };

  RewardModelTrainConfig rm;
  PpoConfig ppo;

  bool policy_auto = true;
  PolicyConfig policy;

  static PipelineConfig parse_file(const std::string& path);
  static PipelineConfig parse_text(const std::string& text, const std::string& origin);

  /// Canonical serialisation of everything that affects artifacts (the
  /// output directory is excluded); hashed into stage manifests.
  std::string signature() const;
};

struct StageStatus {
  std::string name;
  bool executed = false;  // false when resumed from a valid manifest
  std::vector<std::string> outputs;
};

struct PipelineResult {
  std::vector<StageStatus> stages;
  std::string output_dir;
};

/// Stage names in execution order.
const std::vector<std::string>& pipeline_stage_names();

/// Executes ingest → candidates → preferences → curriculum → reward-model
/// training → PPO → evaluation. Every stage writes its artifacts plus a
/// manifest {stage, inputs_hash, seed, outputs, completed}; a stage is
/// skipped when its manifest matches the current inputs and all outputs
/// exist. A failing stage throws StageError and leaves earlier manifests
/// intact. dry_run only reports the plan.
PipelineResult run_pipeline(const PipelineConfig& config, bool dry_run = false);

/// Grammar vocabulary derived from the reference formulas: distinct
/// variables, thresholds and interval bins, with defaults when absent.
PolicyConfig derive_policy_config(const std::vector<NlStlRecord>& records,
                                  const PolicyConfig& base);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace stlgen
