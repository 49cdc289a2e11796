#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stlgen/curriculum.hpp"
#include "stlgen/dataset.hpp"
#include "stlgen/english.hpp"
#include "stlgen/evaluate.hpp"
#include "stlgen/parser.hpp"
#include "stlgen/pipeline.hpp"
#include "stlgen/ppo.hpp"
#include "stlgen/reward.hpp"
#include "stlgen/reward_model.hpp"
#include "stlgen/semantics.hpp"

namespace py = pybind11;
using namespace stlgen;

namespace {

Signal signal_from_dict(double dt, const std::map<std::string, std::vector<double>>& channels) {
  Signal s;
  s.dt = dt;
  s.channels = channels;
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(stlgen, m) {
  m.doc() = "STL parsing, monitoring, multi-metric rewards, preference reward models, "
            "curricula and PPO over a grammar generator";

  py::register_exception<ParseError>(m, "FormulaParseError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  py::class_<Formula>(m, "Formula")
      .def("__str__", [](const Formula& f) { return render(f); })
      .def("__repr__", [](const Formula& f) { return "Formula('" + render(f) + "')"; })
      .def("__eq__", [](const Formula& a, const Formula& b) { return a == b; });

  m.def("parse", &parse, py::arg("text"), "Parse a formula string into its AST");
  m.def("render", &render, py::arg("formula"), "Canonical formula text");
  m.def("tokenize", &tokenize_texts, py::arg("text"), "Split formula text into tokens");
  m.def("to_template", &to_template, py::arg("formula"));
  m.def("render_templated_nl", &render_templated_nl, py::arg("formula"),
        "Deterministic English rendering");
  m.def("formula_length", &formula_length, py::arg("formula"));
  m.def("extract_atomic_propositions", [](const Formula& f) {
    auto aps = extract_atomic_propositions(f);
    return std::vector<std::string>(aps.begin(), aps.end());
  });

  py::class_<Signal>(m, "Signal")
      .def(py::init(&signal_from_dict), py::arg("dt"), py::arg("channels"))
      .def_readonly("dt", &Signal::dt)
      .def_property_readonly("sample_count", &Signal::sample_count);
  m.def("load_signal_csv", &load_signal_csv, py::arg("path"));
  m.def(
      "evaluate",
      [](const Formula& f, const Signal& s, std::size_t t, const SymbolBindings& symbols) {
        return evaluate(f, s, t, symbols);
      },
      py::arg("formula"), py::arg("signal"), py::arg("at") = 0,
      py::arg("symbols") = SymbolBindings{});

  m.def("formula_accuracy", &formula_accuracy, py::arg("ref"), py::arg("hyp"));
  m.def("template_accuracy", &template_accuracy, py::arg("ref"), py::arg("hyp"));
  m.def("bleu", &bleu, py::arg("ref"), py::arg("hyp"));
  m.def("rouge_l", &rouge_l, py::arg("ref"), py::arg("hyp"));

  py::class_<RewardWeights>(m, "RewardWeights")
      .def(py::init<>())
      .def_readwrite("ap_alignment", &RewardWeights::ap_alignment)
      .def_readwrite("nl_similarity", &RewardWeights::nl_similarity)
      .def_readwrite("succinctness", &RewardWeights::succinctness)
      .def_readwrite("stl_similarity", &RewardWeights::stl_similarity)
      .def_readwrite("kl_coefficient", &RewardWeights::kl_coefficient);

  py::class_<RewardVector>(m, "RewardVector")
      .def_readonly("m_a", &RewardVector::ap_alignment)
      .def_readonly("m_t", &RewardVector::nl_similarity)
      .def_readonly("m_l", &RewardVector::succinctness)
      .def_readonly("m_s", &RewardVector::stl_similarity)
      .def_readonly("r_rl", &RewardVector::aggregate)
      .def_readonly("r_total", &RewardVector::total);

  py::class_<HashedLexicalEncoder>(m, "HashedLexicalEncoder")
      .def(py::init<>())
      .def("encode", &HashedLexicalEncoder::encode)
      .def("fit_idf", &HashedLexicalEncoder::fit_idf)
      .def_property_readonly("dimension", &HashedLexicalEncoder::dimension);
  m.def("cosine", &cosine);

  m.def(
      "score",
      [](const std::string& x, const Formula& hyp, const Formula& ref,
         const HashedLexicalEncoder& enc, const RewardWeights& w) {
        return score_candidate(x, hyp, ref, enc, w);
      },
      py::arg("x"), py::arg("hyp"), py::arg("ref"),
      py::arg("encoder") = HashedLexicalEncoder{}, py::arg("weights") = RewardWeights{});
  m.def("metric_ap_alignment", &metric_ap_alignment, py::arg("hyp"), py::arg("ref"));
  m.def("metric_succinctness", &metric_succinctness, py::arg("hyp"), py::arg("ref"));
  m.def("metric_stl_similarity", &metric_stl_similarity, py::arg("hyp"), py::arg("ref"));
  m.def("kl_regularize", &kl_regularize, py::arg("r_rl"), py::arg("kl"), py::arg("eta"));

  py::enum_<OrderMode>(m, "OrderMode")
      .value("forward", OrderMode::Forward)
      .value("reverse", OrderMode::Reverse)
      .value("shuffle", OrderMode::Shuffle);

  py::class_<CurriculumItem>(m, "CurriculumItem")
      .def(py::init([](std::size_t index, double difficulty) {
             return CurriculumItem{index, difficulty, CurriculumTag::ApCount};
           }),
           py::arg("index"), py::arg("difficulty"))
      .def_readwrite("index", &CurriculumItem::index)
      .def_readwrite("difficulty", &CurriculumItem::difficulty);
  m.def("order", &order, py::arg("items"), py::arg("mode"), py::arg("seed") = 0);
  m.def("difficulty_ap_count", &difficulty_ap_count);
  m.def("difficulty_formula_length", &difficulty_formula_length);

  py::class_<PolicyConfig>(m, "PolicyConfig")
      .def(py::init<>())
      .def_readwrite("variables", &PolicyConfig::variables)
      .def_readwrite("thresholds", &PolicyConfig::thresholds)
      .def_readwrite("interval_lo", &PolicyConfig::interval_lo)
      .def_readwrite("interval_width", &PolicyConfig::interval_width)
      .def_readwrite("max_depth", &PolicyConfig::max_depth)
      .def_readwrite("context_buckets", &PolicyConfig::context_buckets);

  py::class_<GrammarPolicy>(m, "GrammarPolicy")
      .def(py::init<PolicyConfig>())
      .def("sample_formula",
           [](const GrammarPolicy& p, const std::string& x, std::uint64_t seed) {
             std::mt19937_64 rng(seed);
             return p.sample(x, rng).formula;
           })
      .def("decode_argmax", &GrammarPolicy::decode_argmax)
      .def("kl_to",
           [](const GrammarPolicy& p, const GrammarPolicy& ref, const std::string& x) {
             return p.kl_to(ref, p.context_of(x));
           },
           py::arg("ref"), py::arg("x") = std::string{})
      .def("save", &GrammarPolicy::save)
      .def_static("load", &GrammarPolicy::load);

  py::class_<PpoConfig>(m, "PpoConfig")
      .def(py::init<>())
      .def_readwrite("clip_ratio", &PpoConfig::clip_ratio)
      .def_readwrite("learning_rate", &PpoConfig::learning_rate)
      .def_readwrite("epochs", &PpoConfig::epochs)
      .def_readwrite("batch_size", &PpoConfig::batch_size)
      .def_readwrite("kl_coefficient", &PpoConfig::kl_coefficient)
      .def_readwrite("baseline_decay", &PpoConfig::baseline_decay)
      .def_readwrite("seed", &PpoConfig::seed)
      .def_readwrite("total_episodes", &PpoConfig::total_episodes);

  m.def(
      "train_ppo",
      [](const std::vector<std::pair<std::string, std::string>>& dataset,
         const GrammarPolicy& policy0, const PpoConfig& cfg, const HashedLexicalEncoder& enc,
         const RewardWeights& weights) {
        std::vector<TrainExample> examples;
        examples.reserve(dataset.size());
        for (const auto& [x, ref] : dataset) examples.push_back({x, parse(ref)});
        RewardSource rewards;
        rewards.mode = RewardMode::Metric;
        rewards.weights = weights;
        rewards.encoder = &enc;
        TrainLoopResult result = train_ppo(examples, policy0, rewards, cfg);
        py::dict summary;
        summary["final_kl"] = result.final_kl;
        summary["episodes"] = result.episode_r_rl.size();
        summary["first_r_total"] = result.curve.empty() ? 0.0 : result.curve.front().mean_r_total;
        summary["last_r_total"] = result.curve.empty() ? 0.0 : result.curve.back().mean_r_total;
        return py::make_tuple(result.policy, summary);
      },
      py::arg("dataset"), py::arg("policy0"), py::arg("config") = PpoConfig{},
      py::arg("encoder") = HashedLexicalEncoder{}, py::arg("weights") = RewardWeights{});

  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("formula_accuracy", &MetricReport::formula_accuracy)
      .def_readonly("template_accuracy", &MetricReport::template_accuracy)
      .def_readonly("bleu", &MetricReport::bleu)
      .def_readonly("exact_match_rate", &MetricReport::exact_match_rate)
      .def_readonly("sample_count", &MetricReport::sample_count)
      .def_readonly("parse_failures", &MetricReport::parse_failures);

  m.def(
      "evaluate_corpus",
      [](const std::vector<std::pair<std::string, std::string>>& pairs) {
        std::vector<EvalPair> eval_pairs;
        eval_pairs.reserve(pairs.size());
        for (const auto& [ref, hyp] : pairs) {
          EvalPair p;
          p.ref = parse(ref);
          try {
            p.hyp = parse(hyp);
          } catch (const ParseError&) {
            p.hyp = std::nullopt;
          }
          eval_pairs.push_back(std::move(p));
        }
        return evaluate_corpus(eval_pairs);
      },
      py::arg("pairs"), "Evaluate (reference, prediction) text pairs");

  m.def("analyze_errors", [](const std::string& ref, const std::string& hyp) {
    ErrorFlags flags = analyze_errors(parse(ref), parse(hyp));
    py::dict d;
    d["ap"] = flags.ap_error;
    d["operator"] = flags.operator_error;
    d["value"] = flags.value_error;
    d["redundancy"] = flags.redundancy_error;
    return d;
  });
}
