// Command-line front end: formula checking, trace monitoring, reward scoring,
// preference construction, curriculum ordering, reward-model and PPO
// training, corpus evaluation, error analysis, and the full pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "stlgen/curriculum.hpp"
#include "stlgen/dataset.hpp"
#include "stlgen/english.hpp"
#include "stlgen/evaluate.hpp"
#include "stlgen/http_clients.hpp"
#include "stlgen/mutate.hpp"
#include "stlgen/parser.hpp"
#include "stlgen/pipeline.hpp"
#include "stlgen/ppo.hpp"
#include "stlgen/reward.hpp"
#include "stlgen/reward_model.hpp"
#include "stlgen/semantics.hpp"

namespace fs = std::filesystem;
using namespace stlgen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDataError = 2;
constexpr int kExitStageFailure = 3;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
};

PipelineConfig effective_config(const GlobalOptions& global) {
  PipelineConfig cfg;
  if (!global.config_path.empty()) cfg = PipelineConfig::parse_file(global.config_path);
  if (global.seed) {
    cfg.seed = *global.seed;
    cfg.rm.seed = *global.seed;
    cfg.ppo.seed = *global.seed;
  }
  if (!global.output_dir.empty()) cfg.output_dir = global.output_dir;
  return cfg;
}

std::vector<EvalPair> pairs_from_files(const std::string& dataset_path,
                                       const std::string& predictions_path) {
  DatasetLoadResult data = load_dataset(dataset_path);
  std::ifstream pred_in(predictions_path, std::ios::binary);
  if (!pred_in) throw DataError("cannot open predictions '" + predictions_path + "'");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(pred_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (lines.size() != data.records.size())
    throw DataError("prediction count (" + std::to_string(lines.size()) +
                    ") does not match dataset record count (" +
                    std::to_string(data.records.size()) + ")");

  std::vector<EvalPair> pairs;
  pairs.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    EvalPair p;
    p.ref = data.records[i].ref;
    try {
      p.hyp = parse(lines[i]);
    } catch (const ParseError&) {
      p.hyp = std::nullopt;
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::string reward_vector_json(const RewardVector& rv) {
  nlohmann::ordered_json j;
  j["m_a"] = rv.ap_alignment;
  j["m_t"] = rv.nl_similarity;
  j["m_l"] = rv.succinctness;
  j["m_s"] = rv.stl_similarity;
  j["r_rl"] = rv.aggregate;
  j["r_total"] = rv.total;
  return j.dump(2);
}

void print_stage_plan(const PipelineResult& result, bool executed_runs) {
  for (const StageStatus& s : result.stages) {
    std::cout << (executed_runs ? (s.executed ? "ran     " : "skipped ") : "planned ") << s.name
              << " ->";
    for (const std::string& o : s.outputs) std::cout << " " << o;
    std::cout << "\n";
  }
}

// make-prefs and order-curriculum share the candidate-generation path
std::vector<CandidateSet> generate_candidate_sets(const PipelineConfig& cfg,
                                                  const std::vector<NlStlRecord>& records) {
  GrammarPolicy policy(derive_policy_config(records, cfg.policy));
  GrammarBackend backend(policy);
  std::vector<CandidateSet> sets;
  sets.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::uint64_t seed =
        std::hash<std::string>{}(std::to_string(cfg.seed) + ":" + std::to_string(i));
    GenerationResult gen = backend.generate(records[i].input, cfg.candidate_samples, seed);
    std::vector<Formula> parsed;
    for (const std::string& text : gen.texts) parsed.push_back(parse(text));
    if (cfg.candidate_mutations) {
      for (Formula& m : mutate_candidates(records[i].ref, cfg.candidate_samples, seed + 1))
        parsed.push_back(std::move(m));
    }
    sets.push_back({records[i].input, select_diverse_candidates(parsed, cfg.k), gen.provenance});
  }
  return sets;
}

HashedLexicalEncoder encoder_for(const std::vector<NlStlRecord>& records) {
  HashedLexicalEncoder enc;
  std::vector<std::string> corpus;
  for (const NlStlRecord& r : records) {
    corpus.push_back(r.input);
    corpus.push_back(render_templated_nl(r.ref));
  }
  enc.fit_idf(corpus);
  return enc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STL generation toolkit: parsing, monitoring, multi-metric rewards, "
               "preference-trained reward models, curricula and PPO"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions global;
  app.add_option("--config", global.config_path, "run configuration file (key = value)");
  app.add_option("--seed", global.seed, "override the configured seed");
  app.add_option("--output-dir", global.output_dir, "override the configured output directory");

  // parse
  auto* cmd_parse = app.add_subcommand("parse", "check a formula and print its canonical form");
  std::string parse_text_arg;
  bool parse_show_nl = false;
  cmd_parse->add_option("formula", parse_text_arg, "formula text")->required();
  cmd_parse->add_flag("--nl", parse_show_nl, "also print the templated-NL rendering");

  // monitor
  auto* cmd_monitor = app.add_subcommand("monitor", "evaluate a formula over a signal CSV");
  std::string mon_formula, mon_signal;
  std::size_t mon_at = 0;
  std::vector<std::string> mon_bindings;
  cmd_monitor->add_option("--formula", mon_formula, "formula text")->required();
  cmd_monitor->add_option("--signal", mon_signal, "CSV trace (header: time,var1,...)")->required();
  cmd_monitor->add_option("--at", mon_at, "sample index to evaluate at (default 0)");
  cmd_monitor->add_option("--bind", mon_bindings, "symbolic bound value, e.g. T=30");

  // score
  auto* cmd_score = app.add_subcommand("score", "compute the reward vector of a candidate");
  std::string score_x, score_hyp, score_ref;
  cmd_score->add_option("--input", score_x, "natural-language input x")->required();
  cmd_score->add_option("--hyp", score_hyp, "candidate formula")->required();
  cmd_score->add_option("--ref", score_ref, "reference formula")->required();

  // make-prefs
  auto* cmd_prefs = app.add_subcommand("make-prefs", "build preference pairs for all metrics");
  std::string prefs_dataset;
  cmd_prefs->add_option("--dataset", prefs_dataset, "JSON Lines dataset")->required();

  // order-curriculum
  auto* cmd_curriculum = app.add_subcommand("order-curriculum", "write a curriculum manifest");
  std::string cur_dataset, cur_metric = "s", cur_mode = "forward";
  cmd_curriculum->add_option("--dataset", cur_dataset, "JSON Lines dataset")->required();
  cmd_curriculum->add_option("--metric", cur_metric, "metric tag: a, t, l or s");
  cmd_curriculum->add_option("--mode", cur_mode, "forward, reverse or shuffle");

  // train-rm
  auto* cmd_train_rm = app.add_subcommand("train-rm", "train one preference reward model");
  std::string rm_prefs, rm_metric = "s", rm_curriculum, rm_dataset;
  cmd_train_rm->add_option("--prefs", rm_prefs, "preference JSON Lines file")->required();
  cmd_train_rm->add_option("--metric", rm_metric, "metric tag: a, t, l or s");
  cmd_train_rm->add_option("--curriculum", rm_curriculum, "curriculum manifest for ordering");
  cmd_train_rm->add_option("--dataset", rm_dataset, "dataset for encoder IDF fitting");

  // train-ppo
  auto* cmd_train_ppo = app.add_subcommand("train-ppo", "optimise the generator with PPO");
  std::string ppo_dataset, ppo_rm_dir;
  cmd_train_ppo->add_option("--dataset", ppo_dataset, "JSON Lines dataset")->required();
  cmd_train_ppo->add_option("--rm-dir", ppo_rm_dir,
                            "directory with rm_a/t/l/s.json (model reward mode)");

  // evaluate
  auto* cmd_evaluate = app.add_subcommand("evaluate", "score a prediction file against a dataset");
  std::string eval_dataset, eval_predictions;
  cmd_evaluate->add_option("--dataset", eval_dataset, "JSON Lines dataset")->required();
  cmd_evaluate->add_option("--predictions", eval_predictions, "one formula per line")->required();

  // analyze-errors
  auto* cmd_errors = app.add_subcommand("analyze-errors", "per-category error analysis");
  std::string err_dataset, err_predictions;
  cmd_errors->add_option("--dataset", err_dataset, "JSON Lines dataset")->required();
  cmd_errors->add_option("--predictions", err_predictions, "one formula per line")->required();

  // run / dry-run
  auto* cmd_run = app.add_subcommand("run", "execute the full pipeline");
  auto* cmd_dry = app.add_subcommand("dry-run", "list the planned pipeline stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_parse->parsed()) {
      Formula f = parse(parse_text_arg);
      std::cout << render(f) << "\n";
      if (parse_show_nl) std::cout << render_templated_nl(f) << "\n";
      return kExitOk;
    }

    if (cmd_monitor->parsed()) {
      Formula f = parse(mon_formula);
      Signal sig = load_signal_csv(mon_signal);
      SymbolBindings symbols;
      for (const std::string& b : mon_bindings) {
        std::size_t eq = b.find('=');
        if (eq == std::string::npos)
          throw DataError("--bind expects name=value, got '" + b + "'");
        symbols[b.substr(0, eq)] = std::stod(b.substr(eq + 1));
      }
      bool verdict = evaluate(f, sig, mon_at, symbols);
      std::cout << (verdict ? "true" : "false") << "\n";
      return kExitOk;
    }

    if (cmd_score->parsed()) {
      PipelineConfig cfg = effective_config(global);
      HashedLexicalEncoder enc;
      RewardVector rv =
          score_candidate(score_x, parse(score_hyp), parse(score_ref), enc, cfg.weights);
      std::cout << reward_vector_json(rv) << "\n";
      return kExitOk;
    }

    if (cmd_prefs->parsed()) {
      PipelineConfig cfg = effective_config(global);
      DatasetLoadResult data = load_dataset(prefs_dataset);
      HashedLexicalEncoder enc = encoder_for(data.records);
      std::vector<CandidateSet> sets = generate_candidate_sets(cfg, data.records);
      fs::create_directories(cfg.output_dir);
      for (MetricTag tag : {MetricTag::ApAlignment, MetricTag::NlSimilarity,
                            MetricTag::Succinctness, MetricTag::StlSimilarity}) {
        std::vector<PreferencePair> all;
        for (std::size_t i = 0; i < sets.size(); ++i) {
          auto pairs = build_preferences(sets[i], data.records[i].ref, tag, enc);
          for (PreferencePair& p : pairs) {
            p.record_index = i;
            all.push_back(std::move(p));
          }
        }
        std::string path =
            (fs::path(cfg.output_dir) / (std::string("prefs_") + metric_tag_name(tag) + ".jsonl"))
                .string();
        save_preferences(all, path);
        std::cout << "wrote " << all.size() << " pairs to " << path << "\n";
      }
      return kExitOk;
    }

    if (cmd_curriculum->parsed()) {
      PipelineConfig cfg = effective_config(global);
      DatasetLoadResult data = load_dataset(cur_dataset);
      HashedLexicalEncoder enc = encoder_for(data.records);
      MetricTag tag = metric_tag_from_name(cur_metric);
      OrderMode mode = order_mode_from_name(cur_mode);

      std::vector<CandidateSet> sets;
      if (tag == MetricTag::NlSimilarity || tag == MetricTag::StlSimilarity)
        sets = generate_candidate_sets(cfg, data.records);

      std::vector<CurriculumItem> items;
      for (std::size_t i = 0; i < data.records.size(); ++i) {
        CurriculumTag ctag;
        double raw = 0;
        switch (tag) {
          case MetricTag::ApAlignment:
            ctag = CurriculumTag::ApCount;
            raw = difficulty_ap_count(data.records[i].ref);
            break;
          case MetricTag::NlSimilarity:
            ctag = CurriculumTag::NlSimilarity;
            raw = difficulty_nl_similarity(data.records[i].input, sets[i].candidates, enc);
            break;
          case MetricTag::Succinctness:
            ctag = CurriculumTag::FormulaLength;
            raw = difficulty_formula_length(data.records[i].ref);
            break;
          case MetricTag::StlSimilarity:
            ctag = CurriculumTag::StlSimilarity;
            raw = difficulty_stl_similarity(data.records[i].ref, sets[i].candidates);
            break;
        }
        items.push_back({i, difficulty_from_raw(ctag, raw), ctag});
      }
      std::vector<std::size_t> perm = order(items, mode, cfg.seed);
      std::vector<CurriculumItem> ordered;
      for (std::size_t p : perm) ordered.push_back(items[p]);
      fs::create_directories(cfg.output_dir);
      std::string path = (fs::path(cfg.output_dir) /
                          (std::string("curriculum_") + metric_tag_name(tag) + ".jsonl"))
                             .string();
      save_curriculum(ordered, path);
      std::cout << "wrote " << ordered.size() << " items to " << path << "\n";
      return kExitOk;
    }

    if (cmd_train_rm->parsed()) {
      PipelineConfig cfg = effective_config(global);
      std::vector<PreferencePair> prefs = load_preferences(rm_prefs);
      MetricTag tag = metric_tag_from_name(rm_metric);
      HashedLexicalEncoder enc;
      if (!rm_dataset.empty()) enc = encoder_for(load_dataset(rm_dataset).records);
      if (!rm_curriculum.empty()) {
        std::vector<CurriculumItem> ordered = load_curriculum(rm_curriculum);
        std::map<std::size_t, std::vector<PreferencePair>> groups;
        for (PreferencePair& p : prefs) groups[p.record_index].push_back(std::move(p));
        std::vector<PreferencePair> in_order;
        for (const CurriculumItem& item : ordered) {
          auto it = groups.find(item.index);
          if (it == groups.end()) continue;
          for (PreferencePair& p : it->second) in_order.push_back(std::move(p));
        }
        prefs = std::move(in_order);
      }
      RewardModelTrainResult trained = train_reward_model(prefs, cfg.rm, enc, tag);
      fs::create_directories(cfg.output_dir);
      std::string path =
          (fs::path(cfg.output_dir) / (std::string("rm_") + metric_tag_name(tag) + ".json"))
              .string();
      save_reward_model(trained.params, path);
      std::cout << "trained on " << prefs.size() << " pairs; final loss "
                << trained.epoch_losses.back() << "; wrote " << path << "\n";
      return kExitOk;
    }

    if (cmd_train_ppo->parsed()) {
      PipelineConfig cfg = effective_config(global);
      DatasetLoadResult data = load_dataset(ppo_dataset);
      HashedLexicalEncoder enc = encoder_for(data.records);
      std::vector<TrainExample> examples;
      for (const NlStlRecord& r : data.records) examples.push_back({r.input, r.ref});
      GrammarPolicy policy0(derive_policy_config(data.records, cfg.policy));

      RewardSource rewards;
      rewards.mode = ppo_rm_dir.empty() ? cfg.reward_mode : RewardMode::Model;
      rewards.weights = cfg.weights;
      rewards.encoder = &enc;
      if (rewards.mode == RewardMode::Model) {
        if (ppo_rm_dir.empty())
          throw DataError("model reward mode needs --rm-dir with trained models");
        std::array<RewardModelParams, 4> models;
        const char* tags[4] = {"a", "t", "l", "s"};
        for (int i = 0; i < 4; ++i)
          models[i] = load_reward_model(
              (fs::path(ppo_rm_dir) / (std::string("rm_") + tags[i] + ".json")).string());
        rewards.models = models;
      }

      TrainLoopResult result = train_ppo(examples, policy0, rewards, cfg.ppo);
      fs::create_directories(cfg.output_dir);
      result.policy.save((fs::path(cfg.output_dir) / "policy.json").string());
      save_curve_csv(result.curve, (fs::path(cfg.output_dir) / "reward_curve.csv").string());
      std::ofstream summary(fs::path(cfg.output_dir) / "ppo_summary.json");
      summary << train_summary_json(result, cfg.ppo) << "\n";
      std::cout << train_summary_json(result, cfg.ppo) << "\n";
      return kExitOk;
    }

    if (cmd_evaluate->parsed()) {
      PipelineConfig cfg = effective_config(global);
      std::vector<EvalPair> pairs = pairs_from_files(eval_dataset, eval_predictions);
      MetricReport report = evaluate_corpus(pairs);
      std::cout << metric_report_table(report);
      if (!cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        std::ofstream out(fs::path(cfg.output_dir) / "report.json");
        out << metric_report_json(report) << "\n";
      }
      return kExitOk;
    }

    if (cmd_errors->parsed()) {
      std::vector<EvalPair> pairs = pairs_from_files(err_dataset, err_predictions);
      ErrorProfile profile = analyze_corpus_errors(pairs);
      std::cout << error_profile_json(profile) << "\n";
      return kExitOk;
    }

    if (cmd_run->parsed() || cmd_dry->parsed()) {
      if (global.config_path.empty()) throw DataError("run needs --config");
      PipelineConfig cfg = effective_config(global);
      PipelineResult result = run_pipeline(cfg, cmd_dry->parsed());
      print_stage_plan(result, cmd_run->parsed());
      return kExitOk;
    }
  } catch (const StageError& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return kExitStageFailure;
  } catch (const HttpError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}
