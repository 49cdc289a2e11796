#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stlgen/ast.hpp"
#include "stlgen/encoder.hpp"

namespace stlgen {

/// Curriculum families, one per reward metric.
enum class CurriculumTag { ApCount, NlSimilarity, FormulaLength, StlSimilarity };

const char* curriculum_tag_name(CurriculumTag tag) noexcept;
CurriculumTag curriculum_tag_from_name(const std::string& name);

struct CurriculumItem {
  std::size_t index = 0;
  double difficulty = 0.0;
  CurriculumTag tag = CurriculumTag::ApCount;
};

enum class OrderMode { Forward, Reverse, Shuffle };

const char* order_mode_name(OrderMode mode) noexcept;
OrderMode order_mode_from_name(const std::string& name);

// ── Difficulty scorers ──────────────────────────────────────────────────────
// Each scorer returns the raw quantity its curriculum sorts on. For the two
// similarity scorers higher means easier; curriculum_items converts them to
// difficulties via 1 - value so that ascending difficulty is easy-to-hard.

/// Number of distinct atomic propositions of the reference formula.
double difficulty_ap_count(const Formula& ref);

/// Mean cosine between the encoding of x and the encodings of the candidates'
/// templated-NL renderings.
double difficulty_nl_similarity(const std::string& x, const std::vector<Formula>& candidates,
                                const TextEncoder& encoder);

/// Whitespace-free canonical length of the reference formula.
double difficulty_formula_length(const Formula& ref);

/// Mean ROUGE-L between the reference and each candidate.
double difficulty_stl_similarity(const Formula& ref, const std::vector<Formula>& candidates);

/// Applies the tag's difficulty convention to a raw scorer value.
double difficulty_from_raw(CurriculumTag tag, double raw_value);

// ── Ordering ────────────────────────────────────────────────────────────────

/// Permutation of item positions: forward = ascending difficulty, reverse =
/// descending, shuffle = seeded uniform permutation. Equal difficulties keep
/// ascending index order.
std::vector<std::size_t> order(const std::vector<CurriculumItem>& items, OrderMode mode,
                               std::uint64_t seed = 0);

/// JSON Lines manifest {index, difficulty, tag} for auditing training runs.
void save_curriculum(const std::vector<CurriculumItem>& items, const std::string& path);
std::vector<CurriculumItem> load_curriculum(const std::string& path);

}  // namespace stlgen
