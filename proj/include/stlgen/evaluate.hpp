#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stlgen/ast.hpp"
#include "stlgen/text_metrics.hpp"

namespace stlgen {

/// A reference with its prediction; an empty hyp records a parse failure,
/// which scores zero on every metric.
struct EvalPair {
  Formula ref;
  std::optional<Formula> hyp;
};

/// Corpus means of formula accuracy, template accuracy and BLEU over
/// canonical renderings, plus the exact-match rate. Throws DataError on an
/// empty corpus.
MetricReport evaluate_corpus(const std::vector<EvalPair>& pairs);

std::string metric_report_json(const MetricReport& report);
std::string metric_report_table(const MetricReport& report);

// ── Error analysis ──────────────────────────────────────────────────────────

/* Per-sample error flags, all independent:
 *
 *   ap:         the sets of atomic propositions differ once numeric
 *               constants are masked out
 *   operator:   the sets of operator kinds occurring in the two templates
 *               differ
 *   value:      some masked predicate shape common to both sides carries
 *               different constants, or the sets of intervals differ
 *   redundancy: the prediction's template has strictly more nodes and the
 *               reference's template embeds into it (operator kinds only)
 */
struct ErrorFlags {
  bool ap_error = false;
  bool operator_error = false;
  bool value_error = false;
  bool redundancy_error = false;

  bool any() const noexcept {
    return ap_error || operator_error || value_error || redundancy_error;
  }
};

ErrorFlags analyze_errors(const Formula& ref, const Formula& hyp);

/// Corpus-level tally. `flag_total` sums all raised flags; `samples_with_any`
/// counts samples carrying at least one flag (the two counting conventions
/// are both reported).
struct ErrorProfile {
  std::size_t ap_errors = 0;
  std::size_t operator_errors = 0;
  std::size_t value_errors = 0;
  std::size_t redundancy_errors = 0;
  std::size_t samples_with_any = 0;
  std::size_t parse_failures = 0;
  std::size_t sample_count = 0;
  std::vector<ErrorFlags> per_sample;

  std::size_t flag_total() const noexcept {
    return ap_errors + operator_errors + value_errors + redundancy_errors;
  }
};

ErrorProfile analyze_corpus_errors(const std::vector<EvalPair>& pairs);

std::string error_profile_json(const ErrorProfile& profile);

/// Canonical AP rendering with every numeric literal replaced by '#'.
std::string mask_numbers(const std::string& ap_text);

}  // namespace stlgen
