#include "stlgen/reward_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stlgen/english.hpp"
#include "stlgen/parser.hpp"
#include "stlgen/text_metrics.hpp"

namespace stlgen {

const char* metric_tag_name(MetricTag tag) noexcept {
  switch (tag) {
    case MetricTag::ApAlignment: return "a";
    case MetricTag::NlSimilarity: return "t";
    case MetricTag::Succinctness: return "l";
    case MetricTag::StlSimilarity: return "s";
  }
  return "?";
}

MetricTag metric_tag_from_name(const std::string& name) {
  if (name == "a") return MetricTag::ApAlignment;
  if (name == "t") return MetricTag::NlSimilarity;
  if (name == "l") return MetricTag::Succinctness;
  if (name == "s") return MetricTag::StlSimilarity;
  throw DataError("unknown metric tag '" + name + "' (expected a, t, l or s)");
}

// ── Features ────────────────────────────────────────────────────────────────

const std::array<const char*, kFeatureDim>& feature_names() {
  static const std::array<const char*, kFeatureDim> names = {
      "ap_count",       "count_globally",   "count_eventually", "count_until",
      "count_and",      "count_or",         "count_not",        "count_implies",
      "interval_count", "char_length",      "length_ratio",     "token_overlap",
      "encoder_cosine", "max_nesting_depth", "numeric_constants",
  };
  return names;
}

namespace {

std::set<std::string> word_set(const std::string& text) {
  std::set<std::string> words;
  std::string cur;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    unsigned char c = i < text.size() ? static_cast<unsigned char>(text[i]) : ' ';
    if (std::isalnum(c) || c == '_' || c == '.') {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      words.insert(cur);
      cur.clear();
    }
  }
  return words;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

FeatureVector featurize(const std::string& x, const Formula& y, const TextEncoder& encoder) {
  FeatureVector f{};
  OperatorCounts ops = operator_counts(y);
  std::string nl = render_templated_nl(y);
  std::set<std::string> xw = word_set(x);
  std::set<std::string> yw = word_set(nl);
  std::size_t common = 0;
  for (const std::string& w : xw) common += yw.count(w);

  f[0] = static_cast<double>(extract_atomic_propositions(y).size()) / 8.0;
  f[1] = ops.globally / 4.0;
  f[2] = ops.eventually / 4.0;
  f[3] = ops.until / 4.0;
  f[4] = ops.conjunction / 4.0;
  f[5] = ops.disjunction / 4.0;
  f[6] = ops.negation / 4.0;
  f[7] = ops.implication / 4.0;
  f[8] = static_cast<double>(collect_intervals(y).size()) / 8.0;
  f[9] = static_cast<double>(formula_length(y)) / 80.0;
  f[10] = static_cast<double>(formula_length(y)) /
          (80.0 * std::max<std::size_t>(1, word_set(x).size()));
  f[11] = xw.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(xw.size());
  f[12] = cosine(encoder.encode(x), encoder.encode(nl));
  f[13] = static_cast<double>(max_depth(y)) / 8.0;
  f[14] = static_cast<double>(numeric_constant_count(y)) / 8.0;
  return f;
}

// ── Candidate selection and pair construction ───────────────────────────────

std::vector<Formula> select_diverse_candidates(const std::vector<Formula>& samples,
                                               std::size_t k) {
  // collapse duplicates, keeping first occurrences
  std::vector<Formula> distinct;
  std::set<std::string> seen;
  for (const Formula& f : samples) {
    if (seen.insert(render(f)).second) distinct.push_back(f);
  }
  if (distinct.size() <= k) return distinct;

  std::vector<Tokens> toks;
  toks.reserve(distinct.size());
  for (const Formula& f : distinct) toks.push_back(tokenize_texts(render(f)));
  auto sim = [&](std::size_t i, std::size_t j) { return rouge_l(toks[i], toks[j]); };

  // seed: the pair with minimal similarity, first such pair in index order
  std::size_t best_i = 0, best_j = 1;
  double best = sim(0, 1);
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    for (std::size_t j = i + 1; j < distinct.size(); ++j) {
      if (sim(i, j) < best) {
        best = sim(i, j);
        best_i = i;
        best_j = j;
      }
    }
  }
  std::vector<std::size_t> selected = {best_i, best_j};
  std::vector<bool> taken(distinct.size(), false);
  taken[best_i] = taken[best_j] = true;

  while (selected.size() < k) {
    std::size_t pick = distinct.size();
    double pick_score = 2.0;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      if (taken[i]) continue;
      double max_sim = 0.0;
      for (std::size_t s : selected) max_sim = std::max(max_sim, sim(i, s));
      if (max_sim < pick_score) {
        pick_score = max_sim;
        pick = i;
      }
    }
    selected.push_back(pick);
    taken[pick] = true;
  }
  std::sort(selected.begin(), selected.end());
  std::vector<Formula> out;
  out.reserve(selected.size());
  for (std::size_t i : selected) out.push_back(distinct[i]);
  return out;
}

namespace {

double metric_value(MetricTag tag, const std::string& x, const Formula& hyp, const Formula& ref,
                    const TextEncoder& encoder) {
  switch (tag) {
    case MetricTag::ApAlignment: return metric_ap_alignment(hyp, ref);
    case MetricTag::NlSimilarity: return metric_templated_nl_similarity(x, hyp, encoder);
    case MetricTag::Succinctness: return metric_succinctness(hyp, ref);
    case MetricTag::StlSimilarity: return metric_stl_similarity(hyp, ref);
  }
  return 0.0;
}

}  // namespace

std::vector<PreferencePair> build_preferences(const CandidateSet& cs, const Formula& ref,
                                              MetricTag tag, const TextEncoder& encoder) {
  std::vector<double> scores;
  scores.reserve(cs.candidates.size());
  for (const Formula& c : cs.candidates)
    scores.push_back(metric_value(tag, cs.x, c, ref, encoder));

  std::vector<PreferencePair> pairs;
  for (std::size_t i = 0; i < cs.candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.candidates.size(); ++j) {
      if (scores[i] == scores[j]) continue;
      PreferencePair p;
      p.x = cs.x;
      p.metric = tag;
      if (scores[i] > scores[j]) {
        p.chosen = cs.candidates[i];
        p.rejected = cs.candidates[j];
        p.margin = scores[i] - scores[j];
      } else {
        p.chosen = cs.candidates[j];
        p.rejected = cs.candidates[i];
        p.margin = scores[j] - scores[i];
      }
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

// ── Bradley-Terry training ──────────────────────────────────────────────────

double bt_probability(double chosen_score, double rejected_score) {
  return sigmoid(chosen_score - rejected_score);
}

PreferenceExample featurize_pair(const PreferencePair& pair, const TextEncoder& encoder) {
  return {featurize(pair.x, pair.chosen, encoder), featurize(pair.x, pair.rejected, encoder)};
}

namespace {

double raw_score(const RewardModelParams& p, const FeatureVector& f) {
  double z = p.bias;
  for (std::size_t i = 0; i < kFeatureDim; ++i) z += p.weights[i] * f[i];
  return z;
}

}  // namespace

double bt_nll_loss(const RewardModelParams& params, const std::vector<PreferenceExample>& batch) {
  if (batch.empty()) throw DataError("empty preference batch");
  double loss = 0;
  for (const PreferenceExample& ex : batch) {
    double delta = raw_score(params, ex.chosen) - raw_score(params, ex.rejected);
    // -log sigmoid(delta), numerically stable
    loss += delta >= 0 ? std::log1p(std::exp(-delta)) : -delta + std::log1p(std::exp(delta));
  }
  return loss / static_cast<double>(batch.size());
}

double bt_nll_loss(const RewardModelParams& params, const std::vector<PreferencePair>& batch,
                   const TextEncoder& encoder) {
  std::vector<PreferenceExample> examples;
  examples.reserve(batch.size());
  for (const PreferencePair& p : batch) examples.push_back(featurize_pair(p, encoder));
  return bt_nll_loss(params, examples);
}

std::array<double, kFeatureDim> bt_nll_gradient(const RewardModelParams& params,
                                                const std::vector<PreferenceExample>& batch) {
  if (batch.empty()) throw DataError("empty preference batch");
  std::array<double, kFeatureDim> grad{};
  for (const PreferenceExample& ex : batch) {
    double delta = raw_score(params, ex.chosen) - raw_score(params, ex.rejected);
    double coeff = -sigmoid(-delta);  // d(-log σ(δ))/dδ
    for (std::size_t i = 0; i < kFeatureDim; ++i)
      grad[i] += coeff * (ex.chosen[i] - ex.rejected[i]);
  }
  for (double& g : grad) g /= static_cast<double>(batch.size());
  return grad;
}

RewardModelTrainResult train_reward_model(const std::vector<PreferenceExample>& examples,
                                          const RewardModelTrainConfig& cfg, MetricTag tag) {
  if (examples.empty()) throw DataError("cannot train a reward model on an empty pair list");
  if (cfg.batch_size == 0) throw DataError("batch size must be positive");

  RewardModelTrainResult result;
  result.params.metric = tag;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t start = 0; start < examples.size(); start += cfg.batch_size) {
      std::size_t end = std::min(examples.size(), start + cfg.batch_size);
      std::vector<PreferenceExample> batch(examples.begin() + start, examples.begin() + end);
      std::array<double, kFeatureDim> grad = bt_nll_gradient(result.params, batch);
      for (std::size_t i = 0; i < kFeatureDim; ++i)
        result.params.weights[i] -= cfg.learning_rate * grad[i];
    }
    double loss = bt_nll_loss(result.params, examples);
    if (!std::isfinite(loss))
      throw DataError("reward-model training diverged at epoch " + std::to_string(epoch) +
                      " (non-finite loss)");
    result.epoch_losses.push_back(loss);
  }
  return result;
}

RewardModelTrainResult train_reward_model(const std::vector<PreferencePair>& prefs,
                                          const RewardModelTrainConfig& cfg,
                                          const TextEncoder& encoder, MetricTag tag) {
  std::vector<PreferenceExample> examples;
  examples.reserve(prefs.size());
  for (const PreferencePair& p : prefs) examples.push_back(featurize_pair(p, encoder));
  return train_reward_model(examples, cfg, tag);
}

double reward_model_score(const RewardModelParams& params, const FeatureVector& features) {
  return sigmoid(raw_score(params, features));
}

double reward_model_score(const RewardModelParams& params, const std::string& x,
                          const Formula& y, const TextEncoder& encoder) {
  return reward_model_score(params, featurize(x, y, encoder));
}

// ── Persistence ─────────────────────────────────────────────────────────────

std::string reward_model_to_json(const RewardModelParams& params) {
  nlohmann::ordered_json j;
  j["schema_version"] = params.schema_version;
  j["metric"] = metric_tag_name(params.metric);
  j["weights"] = params.weights;
  j["bias"] = params.bias;
  return j.dump();
}

RewardModelParams reward_model_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  RewardModelParams p;
  p.schema_version = j.at("schema_version").get<int>();
  if (p.schema_version != 1)
    throw DataError("unsupported reward-model schema version " +
                    std::to_string(p.schema_version));
  p.metric = metric_tag_from_name(j.at("metric").get<std::string>());
  auto w = j.at("weights").get<std::vector<double>>();
  if (w.size() != kFeatureDim)
    throw DataError("reward-model weight vector has dimension " + std::to_string(w.size()) +
                    ", expected " + std::to_string(kFeatureDim));
  std::copy(w.begin(), w.end(), p.weights.begin());
  p.bias = j.at("bias").get<double>();
  return p;
}

void save_reward_model(const RewardModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write reward model to '" + path + "'");
  out << reward_model_to_json(params) << "\n";
}

RewardModelParams load_reward_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open reward model '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return reward_model_from_json(ss.str());
}

void save_preferences(const std::vector<PreferencePair>& prefs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write preferences to '" + path + "'");
  for (const PreferencePair& p : prefs) {
    nlohmann::ordered_json j;
    j["x"] = p.x;
    j["chosen"] = render(p.chosen);
    j["rejected"] = render(p.rejected);
    j["metric"] = metric_tag_name(p.metric);
    j["margin"] = p.margin;
    j["record"] = p.record_index;
    out << j.dump() << "\n";
  }
}

std::vector<PreferencePair> load_preferences(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open preferences '" + path + "'");
  std::vector<PreferencePair> prefs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      PreferencePair p;
      p.x = j.at("x").get<std::string>();
      p.chosen = parse(j.at("chosen").get<std::string>());
      p.rejected = parse(j.at("rejected").get<std::string>());
      p.metric = metric_tag_from_name(j.at("metric").get<std::string>());
      p.margin = j.at("margin").get<double>();
      p.record_index = j.value("record", std::size_t{0});
      prefs.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return prefs;
}

}  // namespace stlgen
