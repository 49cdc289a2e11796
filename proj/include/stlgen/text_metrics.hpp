#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stlgen/ast.hpp"

namespace stlgen {

using Tokens = std::vector<std::string>;

/// Positional token alignment: matches over indices 0..min(|ref|,|hyp|)-1,
/// divided by max(|ref|,|hyp|). Two empty sequences score 1.
double formula_accuracy(const Tokens& ref, const Tokens& hyp);

/// formula_accuracy applied to the tokenised canonical renderings of the
/// two formulas' templates.
double template_accuracy(const Formula& ref, const Formula& hyp);

/// Sentence BLEU-4: uniform quarter weights, brevity penalty, add-one
/// smoothing on orders 2..4. Returns 0 for an empty hypothesis or when no
/// unigram matches.
double bleu(const Tokens& ref, const Tokens& hyp);

/// ROUGE-L F1 (beta = 1): P = LCS/|hyp|, R = LCS/|ref|, F = 2PR/(P+R).
/// Returns 0 when either side is empty or the LCS is empty.
double rouge_l(const Tokens& ref, const Tokens& hyp);

std::size_t lcs_length(const Tokens& a, const Tokens& b);

/// Corpus evaluation summary. formula_accuracy is the corpus mean of
/// per-pair positional token alignment; exact_match_rate is the fraction of
/// pairs whose canonical renderings coincide (the two readings of a corpus
/// "formula accuracy" — both are reported).
struct MetricReport {
  double formula_accuracy = 0.0;
  double template_accuracy = 0.0;
  double bleu = 0.0;
  double exact_match_rate = 0.0;
  std::size_t sample_count = 0;
  std::size_t parse_failures = 0;
};

}  // namespace stlgen
