#include "stlgen/ppo.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "stlgen/errors.hpp"

namespace stlgen {

void PpoConfig::validate() const {
  bool clipping_disabled = std::isinf(clip_ratio);
  if (!clipping_disabled && (clip_ratio <= 0 || clip_ratio >= 1))
    throw DataError("clip ratio must lie in (0, 1)");
  if (kl_coefficient < 0) throw DataError("KL coefficient must be non-negative");
  if (batch_size == 0) throw DataError("batch size must be positive");
  if (epochs == 0) throw DataError("PPO needs at least one inner epoch");
}

RewardMode reward_mode_from_name(const std::string& name) {
  if (name == "metric") return RewardMode::Metric;
  if (name == "model") return RewardMode::Model;
  throw DataError("unknown reward mode '" + name + "' (expected metric or model)");
}

const char* reward_mode_name(RewardMode mode) noexcept {
  return mode == RewardMode::Metric ? "metric" : "model";
}

namespace {

bool decision_clipped(double ratio, double advantage, double eps) {
  return (advantage >= 0 && ratio > 1 + eps) || (advantage < 0 && ratio < 1 - eps);
}

// accumulate advantage * ratio * d(log p)/d(params) for one decision
void accumulate_softmax_grad(const GrammarPolicy& policy, const Decision& d,
                             const std::vector<std::size_t>& ctx, double scale,
                             std::vector<double>& grad) {
  std::vector<double> probs = policy.probabilities(d.slot, d.head, ctx);
  std::size_t k = probs.size();
  std::size_t base = policy.param_offset(d.slot, d.head);
  for (std::size_t i = 0; i < k; ++i) {
    double g = scale * ((i == d.category ? 1.0 : 0.0) - probs[i]);
    grad[base + i] += g;
    for (std::size_t b : ctx) grad[base + (1 + b) * k + i] += g;
  }
}

}  // namespace

double ppo_surrogate(const GrammarPolicy& policy, const std::vector<Trajectory>& batch,
                     const std::vector<double>& advantages, double clip_ratio) {
  double total = 0;
  for (std::size_t t = 0; t < batch.size(); ++t) {
    const Trajectory& traj = batch[t];
    double adv = advantages[t];
    for (const Decision& d : traj.decisions) {
      double ratio = std::exp(policy.decision_logprob(d, traj.context) - d.logprob);
      double clipped = std::clamp(ratio, 1 - clip_ratio, 1 + clip_ratio);
      total += std::min(ratio * adv, clipped * adv);
    }
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> ppo_surrogate_gradient(const GrammarPolicy& policy,
                                           const std::vector<Trajectory>& batch,
                                           const std::vector<double>& advantages,
                                           double clip_ratio, double* clip_fraction) {
  std::vector<double> grad(policy.param_count(), 0.0);
  std::size_t clipped_count = 0, decision_count = 0;
  for (std::size_t t = 0; t < batch.size(); ++t) {
    const Trajectory& traj = batch[t];
    double adv = advantages[t];
    for (const Decision& d : traj.decisions) {
      ++decision_count;
      double ratio = std::exp(policy.decision_logprob(d, traj.context) - d.logprob);
      if (decision_clipped(ratio, adv, clip_ratio)) {
        ++clipped_count;
        continue;  // the min() picks the constant clipped branch
      }
      accumulate_softmax_grad(policy, d, traj.context, adv * ratio, grad);
    }
  }
  double scale = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= scale;
  if (clip_fraction)
    *clip_fraction = decision_count == 0
                         ? 0.0
                         : static_cast<double>(clipped_count) / static_cast<double>(decision_count);
  return grad;
}

std::vector<double> vanilla_pg_gradient(const GrammarPolicy& policy,
                                        const std::vector<Trajectory>& batch,
                                        const std::vector<double>& advantages) {
  std::vector<double> grad(policy.param_count(), 0.0);
  for (std::size_t t = 0; t < batch.size(); ++t) {
    for (const Decision& d : batch[t].decisions)
      accumulate_softmax_grad(policy, d, batch[t].context, advantages[t], grad);
  }
  double scale = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= scale;
  return grad;
}

PpoStats ppo_update(GrammarPolicy& policy, const std::vector<Trajectory>& batch, double baseline,
                    const PpoConfig& cfg) {
  if (batch.empty()) throw DataError("PPO update needs a non-empty batch");
  cfg.validate();

  std::vector<double> advantages(batch.size());
  PpoStats stats;
  for (std::size_t t = 0; t < batch.size(); ++t) {
    advantages[t] = batch[t].reward.total - baseline;
    stats.mean_reward += batch[t].reward.aggregate;
    stats.mean_total += batch[t].reward.total;
    stats.mean_kl += batch[t].kl;
  }
  stats.mean_reward /= static_cast<double>(batch.size());
  stats.mean_total /= static_cast<double>(batch.size());
  stats.mean_kl /= static_cast<double>(batch.size());

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double clip_fraction = 0;
    std::vector<double> grad =
        ppo_surrogate_gradient(policy, batch, advantages, cfg.clip_ratio, &clip_fraction);
    stats.clip_fraction = clip_fraction;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (!std::isfinite(grad[i]))
        throw DataError("non-finite PPO gradient at parameter " + std::to_string(i));
      policy.params()[i] += cfg.learning_rate * grad[i];
    }
  }
  return stats;
}

// ── Training loop ───────────────────────────────────────────────────────────

namespace {

RewardVector score_trajectory(const TrainExample& ex, const Formula& hyp,
                              const RewardSource& rewards) {
  if (rewards.mode == RewardMode::Metric) {
    return score_candidate(ex.x, hyp, ex.ref, *rewards.encoder, rewards.weights);
  }
  RewardVector rv;
  const auto& models = *rewards.models;
  rv.ap_alignment = reward_model_score(models[0], ex.x, hyp, *rewards.encoder);
  rv.nl_similarity = reward_model_score(models[1], ex.x, hyp, *rewards.encoder);
  rv.succinctness = reward_model_score(models[2], ex.x, hyp, *rewards.encoder);
  rv.stl_similarity = reward_model_score(models[3], ex.x, hyp, *rewards.encoder);
  rv.aggregate = aggregate_reward(
      {rv.ap_alignment, rv.nl_similarity, rv.succinctness, rv.stl_similarity}, rewards.weights);
  rv.total = rv.aggregate;
  return rv;
}

}  // namespace

TrainLoopResult train_ppo(const std::vector<TrainExample>& examples,
                          const GrammarPolicy& initial_policy, const RewardSource& rewards,
                          const PpoConfig& cfg) {
  if (examples.empty()) throw DataError("PPO training needs a non-empty dataset");
  cfg.validate();
  if (!rewards.encoder) throw DataError("reward source needs an encoder");
  if (rewards.mode == RewardMode::Model && !rewards.models)
    throw DataError("model reward mode needs four trained reward models");

  TrainLoopResult result{initial_policy, {}, {}, {}, {}, 0.0};
  GrammarPolicy& policy = result.policy;
  std::mt19937_64 rng(cfg.seed);
  double baseline = 0.0;

  // contexts and reference renderings are fixed per example
  std::vector<std::vector<std::size_t>> contexts;
  std::vector<std::string> ref_text;
  contexts.reserve(examples.size());
  for (const TrainExample& ex : examples) {
    contexts.push_back(policy.context_of(ex.x));
    ref_text.push_back(render(ex.ref));
  }

  std::size_t episode = 0;
  std::size_t step = 0;
  while (episode < cfg.total_episodes) {
    std::size_t batch_n = std::min(cfg.batch_size, cfg.total_episodes - episode);
    std::vector<Trajectory> batch;
    batch.reserve(batch_n);
    for (std::size_t b = 0; b < batch_n; ++b, ++episode) {
      std::size_t idx = episode % examples.size();
      const TrainExample& ex = examples[idx];
      PolicySample s = policy.sample(ex.x, rng);
      Trajectory traj;
      traj.x = ex.x;
      traj.context = contexts[idx];
      traj.decisions = std::move(s.decisions);
      traj.formula = s.formula;
      traj.reward = score_trajectory(ex, s.formula, rewards);
      traj.kl = policy.kl_to(initial_policy, contexts[idx]);
      // the penalty uses the sampled estimator log π(τ) - log π0(τ), whose
      // batch mean is the KL; the closed form is constant within a batch and
      // cancels against the baseline. traj.kl keeps the closed form for
      // curves and reports.
      double kl_sample =
          s.logprob - initial_policy.derivation_logprob(traj.decisions, contexts[idx]);
      traj.reward.total =
          kl_regularize(traj.reward.aggregate, kl_sample, cfg.kl_coefficient);
      result.episode_r_rl.push_back(traj.reward.aggregate);
      result.episode_r_total.push_back(traj.reward.total);
      result.episode_exact_match.push_back(render(s.formula) == ref_text[idx]);
      batch.push_back(std::move(traj));
    }

    PpoStats stats = ppo_update(policy, batch, baseline, cfg);
    for (const Trajectory& traj : batch)
      baseline = cfg.baseline_decay * baseline + (1 - cfg.baseline_decay) * traj.reward.total;

    CurveRow row;
    row.step = step++;
    row.mean_r_rl = stats.mean_reward;
    row.mean_r_total = stats.mean_total;
    row.mean_kl = stats.mean_kl;
    row.clip_fraction = stats.clip_fraction;
    result.curve.push_back(row);
  }

  double kl_sum = 0;
  for (const auto& ctx : contexts) kl_sum += policy.kl_to(initial_policy, ctx);
  result.final_kl = kl_sum / static_cast<double>(contexts.size());
  return result;
}

void save_curve_csv(const std::vector<CurveRow>& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write reward curve to '" + path + "'");
  out << "step,mean_r_rl,mean_r_total,mean_kl,clip_fraction\n";
  for (const CurveRow& r : curve) {
    out << r.step << "," << render_number(r.mean_r_rl) << "," << render_number(r.mean_r_total)
        << "," << render_number(r.mean_kl) << "," << render_number(r.clip_fraction) << "\n";
  }
}

std::string train_summary_json(const TrainLoopResult& result, const PpoConfig& cfg) {
  nlohmann::ordered_json j;
  j["episodes"] = result.episode_r_rl.size();
  j["steps"] = result.curve.size();
  j["batch_size"] = cfg.batch_size;
  j["clip_ratio"] = cfg.clip_ratio;
  j["learning_rate"] = cfg.learning_rate;
  j["kl_coefficient"] = cfg.kl_coefficient;
  j["seed"] = cfg.seed;
  j["final_kl"] = result.final_kl;
  if (!result.curve.empty()) {
    j["first_step_r_total"] = result.curve.front().mean_r_total;
    j["last_step_r_total"] = result.curve.back().mean_r_total;
  }
  std::size_t n = result.episode_exact_match.size();
  std::size_t window = std::min<std::size_t>(500, n);
  if (window > 0) {
    std::size_t hits = 0;
    for (std::size_t i = n - window; i < n; ++i)
      if (result.episode_exact_match[i]) ++hits;
    j["final_window_exact_match"] = static_cast<double>(hits) / static_cast<double>(window);
  }
  return j.dump(2);
}

}  // namespace stlgen
