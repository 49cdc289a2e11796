#include "stlgen/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "stlgen/dataset.hpp"
#include "stlgen/english.hpp"
#include "stlgen/evaluate.hpp"
#include "stlgen/http_clients.hpp"
#include "stlgen/mutate.hpp"
#include "stlgen/parser.hpp"

namespace fs = std::filesystem;

namespace stlgen {

namespace {

std::uint64_t fnv1a_bytes(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<std::string> parse_string_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t a = item.find_first_not_of(" \t");
    std::size_t b = item.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a_bytes(bytes)));
  return buf;
}

// ── Config ──────────────────────────────────────────────────────────────────

PipelineConfig PipelineConfig::parse_text(const std::string& text, const std::string& origin) {
  PipelineConfig cfg;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw DataError(origin + ":" + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      std::size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw DataError(origin + ":" + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }

  try {
    auto take = [&](const char* key) -> std::optional<std::string> {
      auto it = kv.find(key);
      if (it == kv.end()) return std::nullopt;
      return it->second;
    };
    if (auto v = take("dataset")) cfg.dataset_path = *v;
    if (auto v = take("output_dir")) cfg.output_dir = *v;
    if (auto v = take("seed")) cfg.seed = std::stoull(*v);
    if (auto v = take("lambda1")) cfg.weights.ap_alignment = std::stod(*v);
    if (auto v = take("lambda2")) cfg.weights.nl_similarity = std::stod(*v);
    if (auto v = take("lambda3")) cfg.weights.succinctness = std::stod(*v);
    if (auto v = take("lambda4")) cfg.weights.stl_similarity = std::stod(*v);
    if (auto v = take("eta")) {
      cfg.weights.kl_coefficient = std::stod(*v);
      cfg.ppo.kl_coefficient = cfg.weights.kl_coefficient;
    }
    if (auto v = take("reward_mode")) cfg.reward_mode = reward_mode_from_name(*v);
    if (auto v = take("k")) cfg.k = std::stoul(*v);
    if (auto v = take("candidate_samples")) cfg.candidate_samples = std::stoul(*v);
    if (auto v = take("generator")) cfg.generator = *v;
    if (auto v = take("candidate_mutations"))
      cfg.candidate_mutations = (*v == "true" || *v == "1");
    if (auto v = take("endpoint")) cfg.endpoint = *v;
    if (auto v = take("prompt_template")) cfg.prompt_template = *v;
    if (auto v = take("temperature")) cfg.temperature = std::stod(*v);
    if (auto v = take("curriculum_a"))
      cfg.curriculum_modes[MetricTag::ApAlignment] = order_mode_from_name(*v);
    if (auto v = take("curriculum_t"))
      cfg.curriculum_modes[MetricTag::NlSimilarity] = order_mode_from_name(*v);
    if (auto v = take("curriculum_l"))
      cfg.curriculum_modes[MetricTag::Succinctness] = order_mode_from_name(*v);
    if (auto v = take("curriculum_s"))
      cfg.curriculum_modes[MetricTag::StlSimilarity] = order_mode_from_name(*v);
    if (auto v = take("rm_epochs")) cfg.rm.epochs = std::stoul(*v);
    if (auto v = take("rm_learning_rate")) cfg.rm.learning_rate = std::stod(*v);
    if (auto v = take("rm_batch_size")) cfg.rm.batch_size = std::stoul(*v);
    if (auto v = take("clip_ratio")) cfg.ppo.clip_ratio = std::stod(*v);
    if (auto v = take("learning_rate")) cfg.ppo.learning_rate = std::stod(*v);
    if (auto v = take("ppo_epochs")) cfg.ppo.epochs = std::stoul(*v);
    if (auto v = take("batch_size")) cfg.ppo.batch_size = std::stoul(*v);
    if (auto v = take("total_episodes")) cfg.ppo.total_episodes = std::stoul(*v);
    if (auto v = take("baseline_decay")) cfg.ppo.baseline_decay = std::stod(*v);
    if (auto v = take("policy_auto")) cfg.policy_auto = (*v == "true" || *v == "1");
    if (auto v = take("policy_variables")) {
      cfg.policy.variables = parse_string_list(*v);
      cfg.policy_auto = false;
    }
    if (auto v = take("policy_thresholds")) cfg.policy.thresholds = parse_double_list(*v);
    if (auto v = take("policy_interval_lo")) cfg.policy.interval_lo = parse_double_list(*v);
    if (auto v = take("policy_interval_width")) cfg.policy.interval_width = parse_double_list(*v);
    if (auto v = take("policy_max_depth")) cfg.policy.max_depth = std::stoul(*v);
    if (auto v = take("policy_context_buckets")) cfg.policy.context_buckets = std::stoul(*v);
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(origin + ": invalid config value: " + e.what());
  }

  cfg.rm.seed = cfg.seed;
  cfg.ppo.seed = cfg.seed;
  bool warned = false;
  cfg.weights = cfg.weights.normalized(&warned);
  if (warned)
    std::cerr << "warning: reward weights did not sum to 1 and were normalised\n";
  return cfg;
}

PipelineConfig PipelineConfig::parse_file(const std::string& path) {
  return parse_text(read_file(path), path);
}

std::string PipelineConfig::signature() const {
  std::ostringstream ss;
  ss << "dataset=" << dataset_path << ";seed=" << seed << ";l1=" << weights.ap_alignment
     << ";l2=" << weights.nl_similarity << ";l3=" << weights.succinctness
     << ";l4=" << weights.stl_similarity << ";eta=" << ppo.kl_coefficient
     << ";mode=" << reward_mode_name(reward_mode) << ";k=" << k
     << ";samples=" << candidate_samples << ";gen=" << generator
     << ";mut=" << candidate_mutations << ";endpoint=" << endpoint
     << ";tmpl=" << prompt_template << ";temp=" << temperature;
  for (const auto& [tag, mode] : curriculum_modes)
    ss << ";cur_" << metric_tag_name(tag) << "=" << order_mode_name(mode);
  ss << ";rm=" << rm.epochs << "," << rm.learning_rate << "," << rm.batch_size;
  ss << ";ppo=" << ppo.clip_ratio << "," << ppo.learning_rate << "," << ppo.epochs << ","
     << ppo.batch_size << "," << ppo.total_episodes << "," << ppo.baseline_decay;
  ss << ";pauto=" << policy_auto;
  if (!policy_auto) ss << ";pol=" << policy.schema_signature();
  return ss.str();
}

// ── Stage framework ─────────────────────────────────────────────────────────

const std::vector<std::string>& pipeline_stage_names() {
  static const std::vector<std::string> names = {
      "ingest", "candidates", "preferences", "curriculum",
      "reward_models", "ppo", "evaluate",
  };
  return names;
}

namespace {

struct StageContext {
  const PipelineConfig& cfg;
  fs::path out;

  std::string path(const std::string& name) const { return (out / name).string(); }

  std::string hash_outputs(const std::vector<std::string>& names) const {
    std::string acc;
    for (const std::string& n : names) acc += fnv1a_hex(read_file(path(n)));
    return acc;
  }
};

struct StageDef {
  std::string name;
  std::vector<std::string> outputs;
  // returns the concatenated upstream hashes this stage depends on
  std::function<std::string(const StageContext&)> input_hash;
  std::function<void(const StageContext&)> execute;
};

bool manifest_matches(const StageContext& ctx, const StageDef& stage,
                      const std::string& inputs_hash) {
  fs::path manifest = ctx.out / (stage.name + ".manifest.json");
  if (!fs::exists(manifest)) return false;
  try {
    nlohmann::json j = nlohmann::json::parse(read_file(manifest.string()));
    if (!j.value("completed", false)) return false;
    if (j.value("inputs_hash", "") != inputs_hash) return false;
    for (const std::string& o : stage.outputs)
      if (!fs::exists(ctx.out / o)) return false;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

void write_manifest(const StageContext& ctx, const StageDef& stage,
                    const std::string& inputs_hash) {
  nlohmann::ordered_json j;
  j["stage"] = stage.name;
  j["inputs_hash"] = inputs_hash;
  j["seed"] = ctx.cfg.seed;
  j["outputs"] = stage.outputs;
  j["completed"] = true;
  std::ofstream out(ctx.out / (stage.name + ".manifest.json"), std::ios::binary);
  out << j.dump(2) << "\n";
}

// ── Shared stage helpers ────────────────────────────────────────────────────

std::vector<NlStlRecord> load_ingested(const StageContext& ctx) {
  return load_dataset(ctx.path("records.jsonl")).records;
}

HashedLexicalEncoder corpus_encoder(const std::vector<NlStlRecord>& records) {
  HashedLexicalEncoder enc;
  std::vector<std::string> corpus;
  corpus.reserve(records.size() * 2);
  for (const NlStlRecord& r : records) {
    corpus.push_back(r.input);
    corpus.push_back(render_templated_nl(r.ref));
  }
  enc.fit_idf(corpus);
  return enc;
}

struct CandidateRow {
  std::size_t index = 0;
  std::string x;
  std::vector<Formula> candidates;
  std::string provenance;
  std::vector<std::string> unparseable;
};

std::vector<CandidateRow> load_candidates(const StageContext& ctx) {
  std::vector<CandidateRow> rows;
  std::ifstream in(ctx.path("candidates.jsonl"), std::ios::binary);
  if (!in) throw DataError("cannot open candidates.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    CandidateRow row;
    row.index = j.at("index").get<std::size_t>();
    row.x = j.at("x").get<std::string>();
    row.provenance = j.value("provenance", "");
    for (const auto& c : j.at("candidates")) row.candidates.push_back(parse(c.get<std::string>()));
    rows.push_back(std::move(row));
  }
  return rows;
}

PolicyConfig pipeline_policy_config(const StageContext& ctx,
                                    const std::vector<NlStlRecord>& records) {
  return ctx.cfg.policy_auto ? derive_policy_config(records, ctx.cfg.policy) : ctx.cfg.policy;
}

std::string prefs_file(MetricTag tag) {
  return std::string("prefs_") + metric_tag_name(tag) + ".jsonl";
}
std::string curriculum_file(MetricTag tag) {
  return std::string("curriculum_") + metric_tag_name(tag) + ".jsonl";
}
std::string rm_file(MetricTag tag) { return std::string("rm_") + metric_tag_name(tag) + ".json"; }

constexpr std::array<MetricTag, 4> kAllMetrics = {
    MetricTag::ApAlignment, MetricTag::NlSimilarity, MetricTag::Succinctness,
    MetricTag::StlSimilarity};

CurriculumTag curriculum_tag_of(MetricTag tag) {
  switch (tag) {
    case MetricTag::ApAlignment: return CurriculumTag::ApCount;
    case MetricTag::NlSimilarity: return CurriculumTag::NlSimilarity;
    case MetricTag::Succinctness: return CurriculumTag::FormulaLength;
    case MetricTag::StlSimilarity: return CurriculumTag::StlSimilarity;
  }
  return CurriculumTag::ApCount;
}

// ── Stage bodies ────────────────────────────────────────────────────────────

void stage_ingest(const StageContext& ctx) {
  DatasetLoadResult loaded = load_dataset(ctx.cfg.dataset_path);
  save_dataset(loaded.records, ctx.path("records.jsonl"));
  save_rejects(loaded.rejects, ctx.path("rejects.jsonl"));
}

void stage_candidates(const StageContext& ctx) {
  std::vector<NlStlRecord> records = load_ingested(ctx);
  std::unique_ptr<GeneratorBackend> backend;
  if (ctx.cfg.generator == "grammar") {
    backend =
        std::make_unique<GrammarBackend>(GrammarPolicy(pipeline_policy_config(ctx, records)));
  } else if (ctx.cfg.generator == "http") {
    HttpGenerator::Options opt;
    opt.endpoint = ctx.cfg.endpoint;
    opt.prompt_template = ctx.cfg.prompt_template;
    opt.temperature = ctx.cfg.temperature;
    backend = std::make_unique<HttpGenerator>(opt);
  } else {
    throw DataError("unknown generator '" + ctx.cfg.generator + "' (expected grammar or http)");
  }

  std::ofstream out(ctx.path("candidates.jsonl"), std::ios::binary);
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::uint64_t seed = fnv1a_bytes(std::to_string(ctx.cfg.seed) + ":" + std::to_string(i));
    GenerationResult gen = backend->generate(records[i].input, ctx.cfg.candidate_samples, seed);
    std::vector<Formula> parsed;
    std::vector<std::string> unparseable = gen.errors;
    for (const std::string& text : gen.texts) {
      try {
        parsed.push_back(parse(text));
      } catch (const ParseError& e) {
        unparseable.push_back(text + " :: " + e.what());
      }
    }
    if (ctx.cfg.candidate_mutations) {
      // near-miss edits of the reference give every metric score variation,
      // standing in for samples from a competent initial generator
      for (Formula& m :
           mutate_candidates(records[i].ref, ctx.cfg.candidate_samples, seed ^ 0x9e3779b9ull))
        parsed.push_back(std::move(m));
    }
    std::vector<Formula> chosen = select_diverse_candidates(parsed, ctx.cfg.k);
    nlohmann::ordered_json j;
    j["index"] = i;
    j["x"] = records[i].input;
    nlohmann::ordered_json cands = nlohmann::ordered_json::array();
    for (const Formula& f : chosen) cands.push_back(render(f));
    j["candidates"] = cands;
    j["provenance"] = gen.provenance;
    j["unparseable"] = unparseable;
    out << j.dump() << "\n";
  }
}

void stage_preferences(const StageContext& ctx) {
  std::vector<NlStlRecord> records = load_ingested(ctx);
  std::vector<CandidateRow> rows = load_candidates(ctx);
  HashedLexicalEncoder enc = corpus_encoder(records);

  for (MetricTag tag : kAllMetrics) {
    std::vector<PreferencePair> all;
    for (const CandidateRow& row : rows) {
      CandidateSet cs{row.x, row.candidates, row.provenance};
      std::vector<PreferencePair> pairs =
          build_preferences(cs, records.at(row.index).ref, tag, enc);
      for (PreferencePair& p : pairs) {
        p.record_index = row.index;
        all.push_back(std::move(p));
      }
    }
    save_preferences(all, ctx.path(prefs_file(tag)));
  }
}

void stage_curriculum(const StageContext& ctx) {
  std::vector<NlStlRecord> records = load_ingested(ctx);
  std::vector<CandidateRow> rows = load_candidates(ctx);
  HashedLexicalEncoder enc = corpus_encoder(records);

  std::map<std::size_t, const CandidateRow*> by_index;
  for (const CandidateRow& row : rows) by_index[row.index] = &row;

  for (MetricTag tag : kAllMetrics) {
    CurriculumTag ctag = curriculum_tag_of(tag);
    std::vector<CurriculumItem> items;
    items.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      double raw = 0;
      const std::vector<Formula>* cands = nullptr;
      if (auto it = by_index.find(i); it != by_index.end()) cands = &it->second->candidates;
      static const std::vector<Formula> kNone;
      switch (ctag) {
        case CurriculumTag::ApCount: raw = difficulty_ap_count(records[i].ref); break;
        case CurriculumTag::NlSimilarity:
          raw = difficulty_nl_similarity(records[i].input, cands ? *cands : kNone, enc);
          break;
        case CurriculumTag::FormulaLength: raw = difficulty_formula_length(records[i].ref); break;
        case CurriculumTag::StlSimilarity:
          raw = difficulty_stl_similarity(records[i].ref, cands ? *cands : kNone);
          break;
      }
      items.push_back({i, difficulty_from_raw(ctag, raw), ctag});
    }
    std::vector<std::size_t> perm = order(items, ctx.cfg.curriculum_modes.at(tag), ctx.cfg.seed);
    std::vector<CurriculumItem> ordered;
    ordered.reserve(items.size());
    for (std::size_t p : perm) ordered.push_back(items[p]);
    save_curriculum(ordered, ctx.path(curriculum_file(tag)));
  }
}

void stage_reward_models(const StageContext& ctx) {
  std::vector<NlStlRecord> records = load_ingested(ctx);
  HashedLexicalEncoder enc = corpus_encoder(records);

  nlohmann::ordered_json losses;
  for (MetricTag tag : kAllMetrics) {
    std::vector<PreferencePair> prefs = load_preferences(ctx.path(prefs_file(tag)));
    std::vector<CurriculumItem> ordered = load_curriculum(ctx.path(curriculum_file(tag)));

    std::map<std::size_t, std::vector<PreferencePair>> groups;
    for (PreferencePair& p : prefs) groups[p.record_index].push_back(std::move(p));
    std::vector<PreferencePair> in_order;
    in_order.reserve(prefs.size());
    for (const CurriculumItem& item : ordered) {
      auto it = groups.find(item.index);
      if (it == groups.end()) continue;
      for (PreferencePair& p : it->second) in_order.push_back(std::move(p));
    }
    if (in_order.empty())
      throw DataError(std::string("no preference pairs for metric ") + metric_tag_name(tag) +
                      "; increase candidate_samples or check the generator");

    RewardModelTrainResult trained = train_reward_model(in_order, ctx.cfg.rm, enc, tag);
    save_reward_model(trained.params, ctx.path(rm_file(tag)));
    losses[metric_tag_name(tag)] = trained.epoch_losses;
  }
  std::ofstream out(ctx.path("rm_losses.json"), std::ios::binary);
  out << losses.dump(2) << "\n";
}

void stage_ppo(const StageContext& ctx) {
  std::vector<NlStlRecord> records = load_ingested(ctx);
  HashedLexicalEncoder enc = corpus_encoder(records);

  std::vector<TrainExample> examples;
  examples.reserve(records.size());
  for (const NlStlRecord& r : records) examples.push_back({r.input, r.ref});

  GrammarPolicy policy0(pipeline_policy_config(ctx, records));

  RewardSource rewards;
  rewards.mode = ctx.cfg.reward_mode;
  rewards.weights = ctx.cfg.weights;
  rewards.encoder = &enc;
  if (rewards.mode == RewardMode::Model) {
    std::array<RewardModelParams, 4> models;
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i)
      models[i] = load_reward_model(ctx.path(rm_file(kAllMetrics[i])));
    rewards.models = models;
  }

  TrainLoopResult result = train_ppo(examples, policy0, rewards, ctx.cfg.ppo);
  result.policy.save(ctx.path("policy.json"));
  save_curve_csv(result.curve, ctx.path("reward_curve.csv"));
  std::ofstream out(ctx.path("ppo_summary.json"), std::ios::binary);
  out << train_summary_json(result, ctx.cfg.ppo) << "\n";
}

void stage_evaluate(const StageContext& ctx) {
  std::vector<NlStlRecord> records = load_ingested(ctx);
  GrammarPolicy policy = GrammarPolicy::load(ctx.path("policy.json"));

  std::ofstream pred_out(ctx.path("predictions.txt"), std::ios::binary);
  std::vector<EvalPair> pairs;
  pairs.reserve(records.size());
  for (const NlStlRecord& r : records) {
    Formula hyp = policy.decode_argmax(r.input);
    pred_out << render(hyp) << "\n";
    pairs.push_back({r.ref, hyp});
  }

  MetricReport report = evaluate_corpus(pairs);
  std::ofstream json_out(ctx.path("report.json"), std::ios::binary);
  json_out << metric_report_json(report) << "\n";
  std::ofstream text_out(ctx.path("report.txt"), std::ios::binary);
  text_out << metric_report_table(report);
  ErrorProfile errors = analyze_corpus_errors(pairs);
  std::ofstream err_out(ctx.path("errors.json"), std::ios::binary);
  err_out << error_profile_json(errors) << "\n";
}

std::vector<StageDef> build_stage_defs(const PipelineConfig& cfg) {
  auto dataset_hash = [](const StageContext& ctx) {
    return fnv1a_hex(read_file(ctx.cfg.dataset_path));
  };
  auto records_hash = [](const StageContext& ctx) {
    return ctx.hash_outputs({"records.jsonl"});
  };
  auto cand_hash = [](const StageContext& ctx) {
    return ctx.hash_outputs({"records.jsonl", "candidates.jsonl"});
  };
  auto prefs_hash = [](const StageContext& ctx) {
    std::vector<std::string> files = {"records.jsonl"};
    for (MetricTag tag : kAllMetrics) {
      files.push_back(prefs_file(tag));
      files.push_back(curriculum_file(tag));
    }
    return ctx.hash_outputs(files);
  };
  auto ppo_inputs_hash = [cfg](const StageContext& ctx) {
    std::vector<std::string> files = {"records.jsonl"};
    if (cfg.reward_mode == RewardMode::Model)
      for (MetricTag tag : kAllMetrics) files.push_back(rm_file(tag));
    return ctx.hash_outputs(files);
  };
  auto eval_hash = [](const StageContext& ctx) {
    return ctx.hash_outputs({"records.jsonl", "policy.json"});
  };

  std::vector<std::string> pref_outputs, curriculum_outputs, rm_outputs;
  for (MetricTag tag : kAllMetrics) {
    pref_outputs.push_back(prefs_file(tag));
    curriculum_outputs.push_back(curriculum_file(tag));
    rm_outputs.push_back(rm_file(tag));
  }
  rm_outputs.push_back("rm_losses.json");

  return {
      {"ingest", {"records.jsonl", "rejects.jsonl"}, dataset_hash, stage_ingest},
      {"candidates", {"candidates.jsonl"}, records_hash, stage_candidates},
      {"preferences", pref_outputs, cand_hash, stage_preferences},
      {"curriculum", curriculum_outputs, cand_hash, stage_curriculum},
      {"reward_models", rm_outputs, prefs_hash, stage_reward_models},
      {"ppo", {"policy.json", "reward_curve.csv", "ppo_summary.json"}, ppo_inputs_hash,
       stage_ppo},
      {"evaluate", {"predictions.txt", "report.json", "report.txt", "errors.json"}, eval_hash,
       stage_evaluate},
  };
}

}  // namespace

PolicyConfig derive_policy_config(const std::vector<NlStlRecord>& records,
                                  const PolicyConfig& base) {
  std::set<std::string> vars;
  std::set<double> thresholds, lows, widths;
  std::size_t depth = 1;
  for (const NlStlRecord& r : records) {
    std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
      if (!n) return;
      if (n->kind == NodeKind::Atomic) {
        for (const AffineTerm& t : n->pred.lhs)
          if (!t.var.empty()) vars.insert(t.var);
        if (n->pred.op != CmpOp::None) thresholds.insert(n->pred.rhs);
      }
      if (n->interval && !n->interval->symbolic()) {
        lows.insert(n->interval->lo);
        widths.insert(n->interval->numeric_hi() - n->interval->lo);
      }
      walk(n->left);
      walk(n->right);
    };
    walk(r.ref.ptr());
    depth = std::max(depth, max_depth(r.ref));
  }

  auto capped = [](const std::set<double>& values, std::vector<double> fallback,
                   std::size_t cap) {
    if (values.empty()) return fallback;
    std::vector<double> out(values.begin(), values.end());
    if (out.size() > cap) out.resize(cap);
    return out;
  };

  PolicyConfig cfg = base;
  if (!vars.empty()) {
    cfg.variables.assign(vars.begin(), vars.end());
    if (cfg.variables.size() > 16) cfg.variables.resize(16);
  }
  cfg.thresholds = capped(thresholds, base.thresholds, 16);
  cfg.interval_lo = capped(lows, base.interval_lo, 8);
  cfg.interval_width = capped(widths, base.interval_width, 8);
  cfg.max_depth = std::min<std::size_t>(std::max<std::size_t>(depth, 2), 4);
  return cfg;
}

PipelineResult run_pipeline(const PipelineConfig& config, bool dry_run) {
  if (config.dataset_path.empty()) throw DataError("config is missing the dataset path");
  StageContext ctx{config, fs::path(config.output_dir)};
  std::vector<StageDef> stages = build_stage_defs(config);

  PipelineResult result;
  result.output_dir = config.output_dir;
  if (dry_run) {
    for (const StageDef& s : stages) result.stages.push_back({s.name, false, s.outputs});
    return result;
  }

  fs::create_directories(ctx.out);
  for (const StageDef& s : stages) {
    std::string inputs_hash;
    try {
      inputs_hash = fnv1a_hex(config.signature() + "|" + s.input_hash(ctx));
    } catch (const std::exception& e) {
      throw StageError(s.name + ": cannot hash inputs: " + e.what());
    }
    if (manifest_matches(ctx, s, inputs_hash)) {
      result.stages.push_back({s.name, false, s.outputs});
      continue;
    }
    try {
      s.execute(ctx);
    } catch (const std::exception& e) {
      throw StageError(s.name + ": " + e.what());
    }
    write_manifest(ctx, s, inputs_hash);
    result.stages.push_back({s.name, true, s.outputs});
  }
  return result;
}

}  // namespace stlgen
