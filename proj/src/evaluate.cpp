#include "stlgen/evaluate.hpp"

#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stlgen/errors.hpp"
#include "stlgen/parser.hpp"

namespace stlgen {

MetricReport evaluate_corpus(const std::vector<EvalPair>& pairs) {
  if (pairs.empty()) throw DataError("cannot evaluate an empty corpus");
  MetricReport report;
  report.sample_count = pairs.size();
  double fa = 0, ta = 0, bl = 0;
  std::size_t exact = 0;
  for (const EvalPair& p : pairs) {
    if (!p.hyp) {
      ++report.parse_failures;
      continue;
    }
    std::string ref_text = render(p.ref);
    std::string hyp_text = render(*p.hyp);
    Tokens ref_toks = tokenize_texts(ref_text);
    Tokens hyp_toks = tokenize_texts(hyp_text);
    fa += formula_accuracy(ref_toks, hyp_toks);
    ta += template_accuracy(p.ref, *p.hyp);
    bl += bleu(ref_toks, hyp_toks);
    if (ref_text == hyp_text) ++exact;
  }
  double n = static_cast<double>(pairs.size());
  report.formula_accuracy = fa / n;
  report.template_accuracy = ta / n;
  report.bleu = bl / n;
  report.exact_match_rate = static_cast<double>(exact) / n;
  return report;
}

std::string metric_report_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["formula_accuracy"] = report.formula_accuracy;
  j["template_accuracy"] = report.template_accuracy;
  j["bleu"] = report.bleu;
  j["exact_match_rate"] = report.exact_match_rate;
  j["sample_count"] = report.sample_count;
  j["parse_failures"] = report.parse_failures;
  return j.dump(2);
}

std::string metric_report_table(const MetricReport& report) {
  std::ostringstream out;
  out << "# formula_accuracy is the corpus mean of per-pair token alignment;\n"
      << "# exact_match_rate is the fraction of exact canonical matches.\n";
  char buf[64];
  auto row = [&](const char* name, double value) {
    std::snprintf(buf, sizeof(buf), "%-18s %.4f\n", name, value);
    out << buf;
  };
  row("formula_accuracy", report.formula_accuracy);
  row("template_accuracy", report.template_accuracy);
  row("bleu", report.bleu);
  row("exact_match_rate", report.exact_match_rate);
  out << "samples            " << report.sample_count << "\n";
  out << "parse_failures     " << report.parse_failures << "\n";
  return out.str();
}

// ── Error analysis ──────────────────────────────────────────────────────────

std::string mask_numbers(const std::string& ap_text) {
  std::string out;
  TokenSequence toks = tokenize(ap_text);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += " ";
    out += toks[i].kind == TokenKind::Number ? "#" : toks[i].text;
  }
  return out;
}

namespace {

std::set<std::string> masked_ap_set(const Formula& f) {
  std::set<std::string> out;
  for (const std::string& ap : extract_atomic_propositions(f)) out.insert(mask_numbers(ap));
  return out;
}

std::set<std::string> operator_kind_set(const Formula& f) {
  std::set<std::string> out;
  OperatorCounts c = operator_counts(f);
  if (c.negation) out.insert("not");
  if (c.conjunction) out.insert("and");
  if (c.disjunction) out.insert("or");
  if (c.implication) out.insert("implies");
  if (c.globally) out.insert("globally");
  if (c.eventually) out.insert("eventually");
  if (c.until) out.insert("until");
  return out;
}

std::map<std::string, std::set<std::string>> aps_by_shape(const Formula& f) {
  std::map<std::string, std::set<std::string>> out;
  for (const std::string& ap : extract_atomic_propositions(f)) out[mask_numbers(ap)].insert(ap);
  return out;
}

std::set<std::string> interval_set(const Formula& f) {
  std::set<std::string> out;
  for (const Interval& iv : collect_intervals(f)) out.insert(iv.canonical());
  return out;
}

// Ordered embedding of `a` into `b` over operator kinds, ignoring intervals
// and predicate contents: either the roots match and the children embed
// pairwise, or `a` embeds into one of b's children.
bool embeds(const NodePtr& a, const NodePtr& b) {
  if (!a) return true;
  if (!b) return false;
  NodeKind ka = a->kind == NodeKind::Atomic ? NodeKind::Placeholder : a->kind;
  NodeKind kb = b->kind == NodeKind::Atomic ? NodeKind::Placeholder : b->kind;
  if (ka == kb && embeds(a->left, b->left) && embeds(a->right, b->right)) return true;
  return embeds(a, b->left) || embeds(a, b->right);
}

}  // namespace

ErrorFlags analyze_errors(const Formula& ref, const Formula& hyp) {
  ErrorFlags flags;
  flags.ap_error = masked_ap_set(ref) != masked_ap_set(hyp);
  flags.operator_error = operator_kind_set(ref) != operator_kind_set(hyp);

  auto ref_shapes = aps_by_shape(ref);
  auto hyp_shapes = aps_by_shape(hyp);
  for (const auto& [shape, ref_aps] : ref_shapes) {
    auto it = hyp_shapes.find(shape);
    if (it != hyp_shapes.end() && it->second != ref_aps) {
      flags.value_error = true;
      break;
    }
  }
  if (interval_set(ref) != interval_set(hyp)) flags.value_error = true;

  Formula ref_t = to_template(ref);
  Formula hyp_t = to_template(hyp);
  flags.redundancy_error =
      node_count(hyp_t) > node_count(ref_t) && embeds(ref_t.ptr(), hyp_t.ptr());
  return flags;
}

ErrorProfile analyze_corpus_errors(const std::vector<EvalPair>& pairs) {
  ErrorProfile profile;
  profile.sample_count = pairs.size();
  for (const EvalPair& p : pairs) {
    if (!p.hyp) {
      ++profile.parse_failures;
      profile.per_sample.push_back({});
      continue;
    }
    ErrorFlags flags = analyze_errors(p.ref, *p.hyp);
    profile.per_sample.push_back(flags);
    profile.ap_errors += flags.ap_error;
    profile.operator_errors += flags.operator_error;
    profile.value_errors += flags.value_error;
    profile.redundancy_errors += flags.redundancy_error;
    profile.samples_with_any += flags.any();
  }
  return profile;
}

std::string error_profile_json(const ErrorProfile& profile) {
  nlohmann::ordered_json j;
  j["ap_errors"] = profile.ap_errors;
  j["operator_errors"] = profile.operator_errors;
  j["value_errors"] = profile.value_errors;
  j["redundancy_errors"] = profile.redundancy_errors;
  j["flag_total"] = profile.flag_total();
  j["samples_with_any"] = profile.samples_with_any;
  j["parse_failures"] = profile.parse_failures;
  j["sample_count"] = profile.sample_count;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ErrorFlags& f : profile.per_sample) {
    nlohmann::ordered_json row;
    row["ap"] = f.ap_error;
    row["operator"] = f.operator_error;
    row["value"] = f.value_error;
    row["redundancy"] = f.redundancy_error;
    rows.push_back(row);
  }
  j["per_sample"] = rows;
  return j.dump(2);
}

}  // namespace stlgen
