#include "stlgen/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stlgen/parser.hpp"

namespace stlgen {

double formula_accuracy(const Tokens& ref, const Tokens& hyp) {
  if (ref.empty() && hyp.empty()) return 1.0;
  std::size_t overlap = std::min(ref.size(), hyp.size());
  std::size_t matches = 0;
  for (std::size_t i = 0; i < overlap; ++i)
    if (ref[i] == hyp[i]) ++matches;
  return static_cast<double>(matches) / static_cast<double>(std::max(ref.size(), hyp.size()));
}

double template_accuracy(const Formula& ref, const Formula& hyp) {
  Tokens r = tokenize_texts(render(to_template(ref)));
  Tokens h = tokenize_texts(render(to_template(hyp)));
  return formula_accuracy(r, h);
}

namespace {

std::map<std::vector<std::string>, int> ngram_counts(const Tokens& toks, std::size_t n) {
  std::map<std::vector<std::string>, int> counts;
  if (toks.size() < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i)
    ++counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  return counts;
}

}  // namespace

double bleu(const Tokens& ref, const Tokens& hyp) {
  if (hyp.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto h = ngram_counts(hyp, n);
    auto r = ngram_counts(ref, n);
    std::size_t total = 0, matched = 0;
    for (const auto& [gram, count] : h) {
      total += static_cast<std::size_t>(count);
      auto it = r.find(gram);
      if (it != r.end()) matched += static_cast<std::size_t>(std::min(count, it->second));
    }
    double p;
    if (n == 1) {
      if (matched == 0) return 0.0;
      p = static_cast<double>(matched) / static_cast<double>(total);
    } else {
      p = static_cast<double>(matched + 1) / static_cast<double>(total + 1);
    }
    log_sum += std::log(p);
  }
  double bp = std::min(1.0, std::exp(1.0 - static_cast<double>(ref.size()) /
                                               static_cast<double>(hyp.size())));
  return bp * std::exp(log_sum / 4.0);
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const Tokens& ref, const Tokens& hyp) {
  if (ref.empty() || hyp.empty()) return 0.0;
  std::size_t lcs = lcs_length(ref, hyp);
  if (lcs == 0) return 0.0;
  double p = static_cast<double>(lcs) / static_cast<double>(hyp.size());
  double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
  return 2.0 * p * r / (p + r);
}

}  // namespace stlgen
