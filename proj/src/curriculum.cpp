#include "stlgen/curriculum.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "stlgen/english.hpp"
#include "stlgen/errors.hpp"
#include "stlgen/parser.hpp"
#include "stlgen/text_metrics.hpp"

namespace stlgen {

const char* curriculum_tag_name(CurriculumTag tag) noexcept {
  switch (tag) {
    case CurriculumTag::ApCount: return "ap_count";
    case CurriculumTag::NlSimilarity: return "nl_similarity";
    case CurriculumTag::FormulaLength: return "formula_length";
    case CurriculumTag::StlSimilarity: return "stl_similarity";
  }
  return "?";
}

CurriculumTag curriculum_tag_from_name(const std::string& name) {
  if (name == "ap_count") return CurriculumTag::ApCount;
  if (name == "nl_similarity") return CurriculumTag::NlSimilarity;
  if (name == "formula_length") return CurriculumTag::FormulaLength;
  if (name == "stl_similarity") return CurriculumTag::StlSimilarity;
  throw DataError("unknown curriculum tag '" + name + "'");
}

const char* order_mode_name(OrderMode mode) noexcept {
  switch (mode) {
    case OrderMode::Forward: return "forward";
    case OrderMode::Reverse: return "reverse";
    case OrderMode::Shuffle: return "shuffle";
  }
  return "?";
}

OrderMode order_mode_from_name(const std::string& name) {
  if (name == "forward") return OrderMode::Forward;
  if (name == "reverse") return OrderMode::Reverse;
  if (name == "shuffle") return OrderMode::Shuffle;
  throw DataError("unknown ordering mode '" + name + "' (expected forward, reverse or shuffle)");
}

double difficulty_ap_count(const Formula& ref) {
  return static_cast<double>(extract_atomic_propositions(ref).size());
}

double difficulty_nl_similarity(const std::string& x, const std::vector<Formula>& candidates,
                                const TextEncoder& encoder) {
  if (candidates.empty()) return 0.0;
  std::vector<double> vx = encoder.encode(x);
  double sum = 0;
  for (const Formula& c : candidates) sum += cosine(vx, encoder.encode(render_templated_nl(c)));
  return sum / static_cast<double>(candidates.size());
}

double difficulty_formula_length(const Formula& ref) {
  return static_cast<double>(formula_length(ref));
}

double difficulty_stl_similarity(const Formula& ref, const std::vector<Formula>& candidates) {
  if (candidates.empty()) return 0.0;
  Tokens ref_toks = tokenize_texts(render(ref));
  double sum = 0;
  for (const Formula& c : candidates) sum += rouge_l(ref_toks, tokenize_texts(render(c)));
  return sum / static_cast<double>(candidates.size());
}

double difficulty_from_raw(CurriculumTag tag, double raw_value) {
  switch (tag) {
    case CurriculumTag::NlSimilarity:
    case CurriculumTag::StlSimilarity:
      return 1.0 - raw_value;  // higher similarity means easier
    default:
      return raw_value;
  }
}

std::vector<std::size_t> order(const std::vector<CurriculumItem>& items, OrderMode mode,
                               std::uint64_t seed) {
  std::vector<std::size_t> perm(items.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;

  switch (mode) {
    case OrderMode::Forward:
      std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return items[a].difficulty < items[b].difficulty;
      });
      break;
    case OrderMode::Reverse:
      std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return items[a].difficulty > items[b].difficulty;
      });
      break;
    case OrderMode::Shuffle: {
      // explicit Fisher-Yates so the permutation is identical across
      // standard libraries
      std::mt19937_64 rng(seed);
      for (std::size_t i = perm.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(perm[i - 1], perm[j]);
      }
      break;
    }
  }
  return perm;
}

void save_curriculum(const std::vector<CurriculumItem>& items, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write curriculum manifest to '" + path + "'");
  for (const CurriculumItem& it : items) {
    nlohmann::ordered_json j;
    j["index"] = it.index;
    j["difficulty"] = it.difficulty;
    j["tag"] = curriculum_tag_name(it.tag);
    out << j.dump() << "\n";
  }
}

std::vector<CurriculumItem> load_curriculum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open curriculum manifest '" + path + "'");
  std::vector<CurriculumItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      CurriculumItem it;
      it.index = j.at("index").get<std::size_t>();
      it.difficulty = j.at("difficulty").get<double>();
      it.tag = curriculum_tag_from_name(j.at("tag").get<std::string>());
      items.push_back(it);
    } catch (const std::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return items;
}

}  // namespace stlgen
