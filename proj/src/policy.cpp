#include "stlgen/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stlgen {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

// uniform double in [0, 1) with 53-bit resolution
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

constexpr std::size_t kComparatorCount = 5;

CmpOp comparator_of(std::size_t idx) {
  switch (idx) {
    case 0: return CmpOp::Gt;
    case 1: return CmpOp::Ge;
    case 2: return CmpOp::Lt;
    case 3: return CmpOp::Le;
    default: return CmpOp::Eq;
  }
}

}  // namespace

void PolicyConfig::validate() const {
  if (variables.empty()) throw DataError("policy needs at least one variable");
  if (thresholds.empty()) throw DataError("policy needs at least one threshold");
  if (interval_lo.empty() || interval_width.empty())
    throw DataError("policy needs interval bins");
  for (double lo : interval_lo)
    if (lo < 0) throw DataError("interval lower bins must be non-negative");
  for (double w : interval_width)
    if (w <= 0) throw DataError("interval width bins must be positive");
  if (context_buckets == 0) throw DataError("context_buckets must be positive");
}

std::string PolicyConfig::schema_signature() const {
  std::ostringstream ss;
  ss << "v1;vars=";
  for (const std::string& v : variables) ss << v << ",";
  ss << ";thr=";
  for (double t : thresholds) ss << render_number(t) << ",";
  ss << ";lo=";
  for (double t : interval_lo) ss << render_number(t) << ",";
  ss << ";w=";
  for (double t : interval_width) ss << render_number(t) << ",";
  ss << ";depth=" << max_depth << ";ctx=" << context_buckets;
  return ss.str();
}

GrammarPolicy::GrammarPolicy(PolicyConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  slot_count_ = (std::size_t{2} << cfg_.max_depth) - 1;  // 2^(d+1) - 1

  head_sizes_[static_cast<std::size_t>(HeadKind::Class)] = 4;
  head_sizes_[static_cast<std::size_t>(HeadKind::BinaryKind)] = 3;
  head_sizes_[static_cast<std::size_t>(HeadKind::TemporalKind)] = 3;
  head_sizes_[static_cast<std::size_t>(HeadKind::IntervalLo)] = cfg_.interval_lo.size();
  head_sizes_[static_cast<std::size_t>(HeadKind::IntervalWidth)] = cfg_.interval_width.size();
  head_sizes_[static_cast<std::size_t>(HeadKind::Variable)] = cfg_.variables.size();
  head_sizes_[static_cast<std::size_t>(HeadKind::Comparator)] = kComparatorCount;
  head_sizes_[static_cast<std::size_t>(HeadKind::Threshold)] = cfg_.thresholds.size();

  per_slot_params_ = 0;
  for (std::size_t h = 0; h < kHeadKinds; ++h) {
    head_offsets_[h] = per_slot_params_;
    per_slot_params_ += (1 + cfg_.context_buckets) * head_sizes_[h];
  }
  params_.assign(slot_count_ * per_slot_params_, 0.0);
}

std::size_t GrammarPolicy::head_categories(HeadKind head) const {
  return head_sizes_[static_cast<std::size_t>(head)];
}

std::size_t GrammarPolicy::slot_depth(std::size_t slot) const {
  std::size_t depth = 0;
  while (slot > 0) {
    slot = (slot - 1) / 2;
    ++depth;
  }
  return depth;
}

std::size_t GrammarPolicy::param_offset(std::size_t slot, HeadKind head) const {
  return slot * per_slot_params_ + head_offsets_[static_cast<std::size_t>(head)];
}

std::vector<std::size_t> GrammarPolicy::context_of(const std::string& x) const {
  std::set<std::size_t> buckets;
  std::string word;
  for (std::size_t i = 0; i <= x.size(); ++i) {
    unsigned char c = i < x.size() ? static_cast<unsigned char>(x[i]) : ' ';
    if (std::isalnum(c) || c == '_' || c == '.') {
      word += static_cast<char>(std::tolower(c));
    } else if (!word.empty()) {
      buckets.insert(static_cast<std::size_t>(fnv1a("c:" + word) % cfg_.context_buckets));
      word.clear();
    }
  }
  return std::vector<std::size_t>(buckets.begin(), buckets.end());
}

std::vector<double> GrammarPolicy::logits(std::size_t slot, HeadKind head,
                                          const std::vector<std::size_t>& ctx) const {
  std::size_t k = head_categories(head);
  std::size_t base = param_offset(slot, head);
  std::vector<double> out(params_.begin() + base, params_.begin() + base + k);
  for (std::size_t b : ctx) {
    std::size_t row = base + (1 + b) * k;
    for (std::size_t i = 0; i < k; ++i) out[i] += params_[row + i];
  }
  return out;
}

std::vector<double> GrammarPolicy::probabilities(std::size_t slot, HeadKind head,
                                                 const std::vector<std::size_t>& ctx) const {
  return softmax(logits(slot, head, ctx));
}

double GrammarPolicy::decision_logprob(const Decision& d,
                                       const std::vector<std::size_t>& ctx) const {
  std::vector<double> p = probabilities(d.slot, d.head, ctx);
  return std::log(p[d.category]);
}

// ── Sampling ────────────────────────────────────────────────────────────────

struct GrammarPolicy::SampleState {
  std::mt19937_64* rng = nullptr;   // null when decoding greedily
  std::vector<Decision>* decisions = nullptr;
  double logprob = 0.0;
};

namespace {
std::size_t pick_category(const std::vector<double>& probs, std::mt19937_64* rng) {
  if (!rng) {
    return static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
  }
  double u = uniform01(*rng);
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}
}  // namespace

Formula GrammarPolicy::expand(std::size_t slot, std::size_t depth,
                              const std::vector<std::size_t>& ctx, SampleState& state) const {
  auto choose = [&](HeadKind head) -> std::size_t {
    std::size_t k = head_categories(head);
    if (k == 1) return 0;  // forced, log-probability zero
    std::vector<double> probs = probabilities(slot, head, ctx);
    std::size_t cat = pick_category(probs, state.rng);
    double lp = std::log(probs[cat]);
    if (state.decisions)
      state.decisions->push_back({static_cast<std::uint32_t>(slot), head,
                                  static_cast<std::uint16_t>(cat), lp});
    state.logprob += lp;
    return cat;
  };

  auto make_atom = [&]() -> Formula {
    std::size_t var = choose(HeadKind::Variable);
    std::size_t cmp = choose(HeadKind::Comparator);
    std::size_t thr = choose(HeadKind::Threshold);
    return atom(make_predicate(cfg_.variables[var], comparator_of(cmp), cfg_.thresholds[thr]));
  };

  if (depth >= cfg_.max_depth) return make_atom();

  std::size_t cls = choose(HeadKind::Class);
  std::size_t left_slot = 2 * slot + 1;
  std::size_t right_slot = 2 * slot + 2;
  switch (cls) {
    case kClassAtom:
      return make_atom();
    case kClassNot:
      return negation(expand(left_slot, depth + 1, ctx, state));
    case kClassBinary: {
      std::size_t kind = choose(HeadKind::BinaryKind);
      Formula l = expand(left_slot, depth + 1, ctx, state);
      Formula r = expand(right_slot, depth + 1, ctx, state);
      if (kind == 0) return conjunction(l, r);
      if (kind == 1) return disjunction(l, r);
      return implication(l, r);
    }
    default: {
      std::size_t kind = choose(HeadKind::TemporalKind);
      std::size_t lo = choose(HeadKind::IntervalLo);
      std::size_t width = choose(HeadKind::IntervalWidth);
      Interval iv;
      iv.lo = cfg_.interval_lo[lo];
      iv.hi = cfg_.interval_lo[lo] + cfg_.interval_width[width];
      if (kind == 0) return globally(iv, expand(left_slot, depth + 1, ctx, state));
      if (kind == 1) return eventually(iv, expand(left_slot, depth + 1, ctx, state));
      Formula l = expand(left_slot, depth + 1, ctx, state);
      Formula r = expand(right_slot, depth + 1, ctx, state);
      return until(iv, l, r);
    }
  }
}

PolicySample GrammarPolicy::sample(const std::string& x, std::mt19937_64& rng) const {
  PolicySample out;
  SampleState state;
  state.rng = &rng;
  state.decisions = &out.decisions;
  std::vector<std::size_t> ctx = context_of(x);
  out.formula = expand(0, 0, ctx, state);
  out.logprob = state.logprob;
  return out;
}

Formula GrammarPolicy::decode_argmax(const std::string& x) const {
  SampleState state;
  std::vector<std::size_t> ctx = context_of(x);
  return expand(0, 0, ctx, state);
}

double GrammarPolicy::derivation_logprob(const std::vector<Decision>& decisions,
                                         const std::vector<std::size_t>& ctx) const {
  double lp = 0;
  for (const Decision& d : decisions) lp += decision_logprob(d, ctx);
  return lp;
}

// ── KL divergence ───────────────────────────────────────────────────────────

namespace {
double categorical_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return std::max(0.0, kl);
}
}  // namespace

double GrammarPolicy::kl_slot(const GrammarPolicy& ref, std::size_t slot, std::size_t depth,
                              double visit_prob, const std::vector<std::size_t>& ctx) const {
  if (visit_prob <= 0) return 0.0;
  auto head_kl = [&](HeadKind head) {
    if (head_categories(head) == 1) return 0.0;
    return categorical_kl(probabilities(slot, head, ctx), ref.probabilities(slot, head, ctx));
  };
  double leaf_kl = head_kl(HeadKind::Variable) + head_kl(HeadKind::Comparator) +
                   head_kl(HeadKind::Threshold);
  if (depth >= cfg_.max_depth) return visit_prob * leaf_kl;

  std::vector<double> cls = probabilities(slot, HeadKind::Class, ctx);
  double kl = head_kl(HeadKind::Class);
  kl += cls[kClassAtom] * leaf_kl;
  kl += cls[kClassBinary] * head_kl(HeadKind::BinaryKind);
  kl += cls[kClassTemporal] *
        (head_kl(HeadKind::TemporalKind) + head_kl(HeadKind::IntervalLo) +
         head_kl(HeadKind::IntervalWidth));
  kl *= visit_prob;

  std::vector<double> temporal = probabilities(slot, HeadKind::TemporalKind, ctx);
  double p_left =
      visit_prob * (cls[kClassNot] + cls[kClassBinary] + cls[kClassTemporal]);
  double p_right = visit_prob * (cls[kClassBinary] + cls[kClassTemporal] * temporal[2]);
  kl += kl_slot(ref, 2 * slot + 1, depth + 1, p_left, ctx);
  kl += kl_slot(ref, 2 * slot + 2, depth + 1, p_right, ctx);
  return kl;
}

double GrammarPolicy::kl_to(const GrammarPolicy& ref, const std::vector<std::size_t>& ctx) const {
  if (cfg_.schema_signature() != ref.cfg_.schema_signature())
    throw DataError("policy schema mismatch: " + cfg_.schema_signature() + " vs " +
                    ref.cfg_.schema_signature());
  return kl_slot(ref, 0, 0, 1.0, ctx);
}

// ── Persistence ─────────────────────────────────────────────────────────────

std::string GrammarPolicy::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["variables"] = cfg_.variables;
  j["thresholds"] = cfg_.thresholds;
  j["interval_lo"] = cfg_.interval_lo;
  j["interval_width"] = cfg_.interval_width;
  j["max_depth"] = cfg_.max_depth;
  j["context_buckets"] = cfg_.context_buckets;
  j["params"] = params_;
  return j.dump();
}

GrammarPolicy GrammarPolicy::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  PolicyConfig cfg;
  cfg.variables = j.at("variables").get<std::vector<std::string>>();
  cfg.thresholds = j.at("thresholds").get<std::vector<double>>();
  cfg.interval_lo = j.at("interval_lo").get<std::vector<double>>();
  cfg.interval_width = j.at("interval_width").get<std::vector<double>>();
  cfg.max_depth = j.at("max_depth").get<std::size_t>();
  cfg.context_buckets = j.at("context_buckets").get<std::size_t>();
  GrammarPolicy policy(cfg);
  auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != policy.params_.size())
    throw DataError("policy parameter vector has size " + std::to_string(params.size()) +
                    ", expected " + std::to_string(policy.params_.size()));
  policy.params_ = std::move(params);
  return policy;
}

void GrammarPolicy::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write policy to '" + path + "'");
  out << to_json() << "\n";
}

GrammarPolicy GrammarPolicy::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open policy '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace stlgen
