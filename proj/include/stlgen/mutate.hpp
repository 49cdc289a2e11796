#pragma once

#include <random>
#include <vector>

#include "stlgen/ast.hpp"

namespace stlgen {

/* Single-edit variants of a formula: threshold bumps, comparator swaps,
 * temporal-operator swaps, interval tweaks, variable renames, dropped or
 * duplicated conjuncts. Used to seed candidate sets with near-misses of the
 * reference so every metric sees score variation.
 */
Formula mutate_formula(const Formula& f, std::mt19937_64& rng);

/// n successive single-edit variants (each mutation applied to the original).
std::vector<Formula> mutate_candidates(const Formula& f, std::size_t n, std::uint64_t seed);

}  // namespace stlgen
