#include "stlgen/semantics.hpp"

#include <cmath>
#include <unordered_map>
#include <vector>

namespace stlgen {

namespace {

struct WindowBounds {
  std::ptrdiff_t lo;
  std::ptrdiff_t hi;  // inclusive; lo > hi means empty
};

class TraceEvaluator {
public:
  TraceEvaluator(const Signal& s, const SymbolBindings& symbols)
      : signal_(s), symbols_(symbols), n_(static_cast<std::ptrdiff_t>(s.sample_count())) {}

  const std::vector<char>& satisfaction(const NodePtr& node) {
    auto it = memo_.find(node.get());
    if (it != memo_.end()) return it->second;
    std::vector<char> sat = compute(node);
    return memo_.emplace(node.get(), std::move(sat)).first->second;
  }

private:
  const Signal& signal_;
  const SymbolBindings& symbols_;
  std::ptrdiff_t n_;
  std::unordered_map<const Node*, std::vector<char>> memo_;

  double bound_value(const Interval& iv, bool upper) const {
    if (!upper) return iv.lo;
    if (!iv.symbolic()) return iv.numeric_hi();
    auto it = symbols_.find(iv.symbol());
    if (it == symbols_.end())
      throw EvalError("unresolved symbolic bound '" + iv.symbol() + "'");
    return it->second;
  }

  // Sample-index window for the interval shifted to sample t, clipped to the
  // trace. Endpoint comparisons use a 1e-9 relative tolerance in index space.
  WindowBounds window(const std::optional<Interval>& iv, std::ptrdiff_t t) const {
    if (!iv) return {t, n_ - 1};
    double lo_idx = bound_value(*iv, false) / signal_.dt;
    double hi_idx = bound_value(*iv, true) / signal_.dt;
    double tol = 1e-9 * std::max({std::abs(lo_idx), std::abs(hi_idx), 1.0});
    auto jlo = t + static_cast<std::ptrdiff_t>(std::ceil(lo_idx - tol));
    auto jhi = t + static_cast<std::ptrdiff_t>(std::floor(hi_idx + tol));
    if (jlo < 0) jlo = 0;
    if (jhi > n_ - 1) jhi = n_ - 1;
    return {jlo, jhi};
  }

  std::vector<char> atomic_satisfaction(const AtomicPredicate& pred) const {
    std::vector<const std::vector<double>*> cols;
    cols.reserve(pred.lhs.size());
    for (const AffineTerm& term : pred.lhs)
      cols.push_back(term.var.empty() ? nullptr : &signal_.channel(term.var));

    std::vector<char> sat(static_cast<std::size_t>(n_), 0);
    for (std::ptrdiff_t t = 0; t < n_; ++t) {
      double v = 0;
      for (std::size_t k = 0; k < pred.lhs.size(); ++k) {
        v += cols[k] ? pred.lhs[k].coefficient * (*cols[k])[static_cast<std::size_t>(t)]
                     : pred.lhs[k].coefficient;
      }
      bool ok = false;
      switch (pred.op) {
        case CmpOp::Gt: ok = v > pred.rhs; break;
        case CmpOp::Ge: ok = v >= pred.rhs; break;
        case CmpOp::Lt: ok = v < pred.rhs; break;
        case CmpOp::Le: ok = v <= pred.rhs; break;
        case CmpOp::Eq: ok = v == pred.rhs; break;
        case CmpOp::None: ok = v != 0.0; break;
      }
      sat[static_cast<std::size_t>(t)] = ok;
    }
    return sat;
  }

  std::vector<char> compute(const NodePtr& node) {
    const std::size_t n = static_cast<std::size_t>(n_);
    switch (node->kind) {
      case NodeKind::Atomic:
        return atomic_satisfaction(node->pred);
      case NodeKind::Placeholder:
        throw EvalError("template placeholder cannot be evaluated");
      case NodeKind::Bottom:
        return std::vector<char>(n, 0);
      case NodeKind::Not: {
        std::vector<char> sat = satisfaction(node->left);
        for (char& c : sat) c = !c;
        return sat;
      }
      case NodeKind::And:
      case NodeKind::Or:
      case NodeKind::Implies: {
        const std::vector<char>& l = satisfaction(node->left);
        const std::vector<char>& r = satisfaction(node->right);
        std::vector<char> sat(n);
        for (std::size_t t = 0; t < n; ++t) {
          switch (node->kind) {
            case NodeKind::And: sat[t] = l[t] && r[t]; break;
            case NodeKind::Or: sat[t] = l[t] || r[t]; break;
            default: sat[t] = !l[t] || r[t]; break;
          }
        }
        return sat;
      }
      case NodeKind::Globally:
      case NodeKind::Finally: {
        const std::vector<char>& child = satisfaction(node->left);
        const bool all = node->kind == NodeKind::Globally;
        std::vector<char> sat(n);
        for (std::ptrdiff_t t = 0; t < n_; ++t) {
          WindowBounds w = window(node->interval, t);
          bool value = all;  // empty window: G true, F false
          for (std::ptrdiff_t j = w.lo; j <= w.hi; ++j) {
            bool c = child[static_cast<std::size_t>(j)];
            if (all && !c) { value = false; break; }
            if (!all && c) { value = true; break; }
          }
          sat[static_cast<std::size_t>(t)] = value;
        }
        return sat;
      }
      case NodeKind::Until: {
        const std::vector<char>& l = satisfaction(node->left);
        const std::vector<char>& r = satisfaction(node->right);
        std::vector<char> sat(n, 0);
        for (std::ptrdiff_t t = 0; t < n_; ++t) {
          WindowBounds w = window(node->interval, t);
          bool value = false;
          // left must hold on every sample of [t, t']
          std::ptrdiff_t left_ok_until = t - 1;
          while (left_ok_until + 1 < n_ && l[static_cast<std::size_t>(left_ok_until + 1)])
            ++left_ok_until;
          for (std::ptrdiff_t j = std::max(w.lo, t); j <= w.hi; ++j) {
            if (j > left_ok_until) break;
            if (r[static_cast<std::size_t>(j)]) { value = true; break; }
          }
          // t' preceding t is impossible here: w.lo >= t for l >= 0, but if the
          // window was clipped up to t itself the loop above covers it.
          sat[static_cast<std::size_t>(t)] = value;
        }
        return sat;
      }
    }
    return {};
  }
};

}  // namespace

bool evaluate(const Formula& f, const Signal& s, std::size_t t, const SymbolBindings& symbols) {
  s.validate();
  if (t >= s.sample_count())
    throw EvalError("sample index " + std::to_string(t) + " outside the trace");
  TraceEvaluator ev(s, symbols);
  return ev.satisfaction(f.ptr())[t];
}

bool check(const Formula& f, const Signal& s, const SymbolBindings& symbols) {
  return evaluate(f, s, 0, symbols);
}

}  // namespace stlgen
