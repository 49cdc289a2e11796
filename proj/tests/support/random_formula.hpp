#pragma once

// Grammar-based random formula sampler for property tests. Deliberately
// independent of GrammarPolicy: it covers bare booleans, affine left-hand
// sides, derived connectives and unbounded temporal operators.

#include <random>
#include <vector>

#include "stlgen/ast.hpp"

namespace stlgen::testing {

struct RandomFormulaOptions {
  std::size_t max_depth = 4;
  std::vector<std::string> variables = {"x", "y", "velocity", "RPM"};
  bool allow_bare_boolean = true;
  bool allow_affine = true;
  bool allow_bottom = true;
  bool allow_unbounded = true;
};

inline double pick(std::mt19937_64& rng, const std::vector<double>& values) {
  return values[rng() % values.size()];
}

inline AtomicPredicate random_predicate(std::mt19937_64& rng, const RandomFormulaOptions& opt) {
  static const std::vector<double> thresholds = {0, 1, 2, 5, 10, 40, 0.5, 2.5, 2500};
  const std::string& var = opt.variables[rng() % opt.variables.size()];
  if (opt.allow_bare_boolean && rng() % 8 == 0) return make_boolean(var);

  AtomicPredicate p;
  p.lhs = {AffineTerm{1.0, var}};
  if (opt.allow_affine && rng() % 6 == 0) {
    static const std::vector<double> coefs = {2, -1, 0.5, 3};
    const std::string& other = opt.variables[rng() % opt.variables.size()];
    p.lhs.push_back(AffineTerm{pick(rng, coefs), other});
    if (rng() % 3 == 0) p.lhs.push_back(AffineTerm{pick(rng, {1, 2, -3}), ""});
  }
  static const CmpOp ops[] = {CmpOp::Gt, CmpOp::Ge, CmpOp::Lt, CmpOp::Le, CmpOp::Eq};
  p.op = ops[rng() % 5];
  p.rhs = pick(rng, thresholds);
  return p;
}

inline Interval random_interval(std::mt19937_64& rng) {
  static const std::vector<double> lows = {0, 1, 2, 5};
  static const std::vector<double> widths = {1, 2, 3, 19};
  Interval iv;
  iv.lo = pick(rng, lows);
  iv.hi = iv.lo + pick(rng, widths);
  return iv;
}

inline std::optional<Interval> maybe_interval(std::mt19937_64& rng,
                                              const RandomFormulaOptions& opt) {
  if (opt.allow_unbounded && rng() % 4 == 0) return std::nullopt;
  return random_interval(rng);
}

inline Formula random_formula(std::mt19937_64& rng, const RandomFormulaOptions& opt,
                              std::size_t depth = 0) {
  if (depth >= opt.max_depth) return atom(random_predicate(rng, opt));
  switch (rng() % 10) {
    case 0:
    case 1:
    case 2:
      return atom(random_predicate(rng, opt));
    case 3:
      if (opt.allow_bottom && rng() % 4 == 0) return bottom();
      return negation(random_formula(rng, opt, depth + 1));
    case 4:
      return conjunction(random_formula(rng, opt, depth + 1),
                         random_formula(rng, opt, depth + 1));
    case 5:
      return disjunction(random_formula(rng, opt, depth + 1),
                         random_formula(rng, opt, depth + 1));
    case 6:
      return implication(random_formula(rng, opt, depth + 1),
                         random_formula(rng, opt, depth + 1));
    case 7:
      return globally(maybe_interval(rng, opt), random_formula(rng, opt, depth + 1));
    case 8:
      return eventually(maybe_interval(rng, opt), random_formula(rng, opt, depth + 1));
    default:
      return until(maybe_interval(rng, opt), random_formula(rng, opt, depth + 1),
                   random_formula(rng, opt, depth + 1));
  }
}

}  // namespace stlgen::testing
