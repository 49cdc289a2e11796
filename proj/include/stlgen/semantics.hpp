#pragma once

#include <map>
#include <string>

#include "stlgen/ast.hpp"
#include "stlgen/signal.hpp"

namespace stlgen {

/// Named values for symbolic interval bounds (e.g. T = 30).
using SymbolBindings = std::map<std::string, double>;

/* Boolean evaluation over sampled traces. Quantifiers range over the sample
 * indices whose times fall in the shifted interval [t*dt + l, t*dt + u],
 * inclusive on both ends. Windows reaching past the trace are clipped; an
 * empty clipped window makes G vacuously true and F (and until) false. A
 * temporal node without an interval quantifies over [t*dt, horizon].
 *
 * Atomic predicates compare the affine expression of channel values at the
 * sample; a bare boolean variable holds iff its value is non-zero.
 */

/// Satisfaction of f at sample index t. Throws EvalError on a missing
/// channel, an unresolved symbolic bound, or t outside [0, N-1].
bool evaluate(const Formula& f, const Signal& s, std::size_t t,
              const SymbolBindings& symbols = {});

/// evaluate at t = 0.
bool check(const Formula& f, const Signal& s, const SymbolBindings& symbols = {});

}  // namespace stlgen
