#pragma once

#include <string>

#include "stlgen/ast.hpp"

namespace stlgen {

/* Deterministic English rendering of a formula, one fixed phrase per
 * constructor:
 *
 *   G[l,u] φ      "at every time from l to u, <φ>"
 *   G φ           "at every time, <φ>"
 *   F[l,u] φ      "at some time from l to u, <φ>"
 *   F φ           "at some time, <φ>"
 *   φ U[l,u] ψ    "<φ> holds until, at some time from l to u, <ψ>"
 *   φ -> ψ        "if <φ> then <ψ>"
 *   φ & ψ         "<φ> and <ψ>"
 *   φ | ψ         "<φ> or <ψ>"
 *   !φ            "it is not the case that <φ>"
 *   e > c         "<e> is greater than <c>"      (>=: at least, <: less than,
 *                                                 <=: at most, ==: equal to)
 *   bare variable "<v> holds"
 *   false         "contradiction holds"
 *
 * Equal formulas always yield the same sentence.
 */
std::string render_templated_nl(const Formula& f);

}  // namespace stlgen
