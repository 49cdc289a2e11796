#include "stlgen/mutate.hpp"

#include <functional>

namespace stlgen {

namespace {

std::size_t count_if_nodes(const NodePtr& node, bool (*pred)(const Node&)) {
  if (!node) return 0;
  return (pred(*node) ? 1 : 0) + count_if_nodes(node->left, pred) +
         count_if_nodes(node->right, pred);
}

// rewrite the k-th node satisfying pred (pre-order), leaving the rest shared
NodePtr rewrite_kth_matching(const NodePtr& node, std::size_t& k, bool (*pred)(const Node&),
                             const std::function<NodePtr(const Node&)>& rewrite) {
  if (!node) return nullptr;
  if (pred(*node)) {
    if (k == 0) {
      k = static_cast<std::size_t>(-1);
      return rewrite(*node);
    }
    --k;
  }
  Node copy = *node;
  copy.left = rewrite_kth_matching(node->left, k, pred, rewrite);
  copy.right = rewrite_kth_matching(node->right, k, pred, rewrite);
  return std::make_shared<const Node>(std::move(copy));
}

bool is_atomic(const Node& n) { return n.kind == NodeKind::Atomic; }
bool has_interval(const Node& n) { return n.interval.has_value() && !n.interval->symbolic(); }
bool is_unary_temporal(const Node& n) {
  return n.kind == NodeKind::Globally || n.kind == NodeKind::Finally;
}
bool is_conjunction(const Node& n) { return n.kind == NodeKind::And; }

std::vector<std::string> variables_of(const Formula& f) {
  std::vector<std::string> vars;
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
    if (!n) return;
    if (n->kind == NodeKind::Atomic) {
      for (const AffineTerm& t : n->pred.lhs)
        if (!t.var.empty()) vars.push_back(t.var);
    }
    walk(n->left);
    walk(n->right);
  };
  walk(f.ptr());
  return vars;
}

}  // namespace

Formula mutate_formula(const Formula& f, std::mt19937_64& rng) {
  const std::size_t atoms = count_if_nodes(f.ptr(), is_atomic);
  for (int attempt = 0; attempt < 8; ++attempt) {
    switch (rng() % 7) {
      case 0: {  // threshold bump
        if (atoms == 0) break;
        std::size_t k = rng() % atoms;
        double delta = (rng() % 2 == 0) ? 1.0 : -1.0;
        NodePtr out = rewrite_kth_matching(f.ptr(), k, is_atomic, [&](const Node& n) {
          Node copy = n;
          if (copy.pred.op == CmpOp::None) return std::make_shared<const Node>(std::move(copy));
          copy.pred.rhs += delta;
          return std::make_shared<const Node>(std::move(copy));
        });
        Formula g(out);
        if (!(g == f)) return g;
        break;
      }
      case 1: {  // comparator swap
        if (atoms == 0) break;
        std::size_t k = rng() % atoms;
        CmpOp target = static_cast<CmpOp>(rng() % 5);
        NodePtr out = rewrite_kth_matching(f.ptr(), k, is_atomic, [&](const Node& n) {
          Node copy = n;
          if (copy.pred.op != CmpOp::None) copy.pred.op = target;
          return std::make_shared<const Node>(std::move(copy));
        });
        Formula g(out);
        if (!(g == f)) return g;
        break;
      }
      case 2: {  // G <-> F swap
        std::size_t temporals = count_if_nodes(f.ptr(), is_unary_temporal);
        if (temporals == 0) break;
        std::size_t k = rng() % temporals;
        NodePtr out = rewrite_kth_matching(f.ptr(), k, is_unary_temporal, [&](const Node& n) {
          Node copy = n;
          copy.kind = n.kind == NodeKind::Globally ? NodeKind::Finally : NodeKind::Globally;
          return std::make_shared<const Node>(std::move(copy));
        });
        return Formula(out);
      }
      case 3: {  // interval tweak
        std::size_t intervals = count_if_nodes(f.ptr(), has_interval);
        if (intervals == 0) break;
        std::size_t k = rng() % intervals;
        double delta = 1.0 + static_cast<double>(rng() % 3);
        NodePtr out = rewrite_kth_matching(f.ptr(), k, has_interval, [&](const Node& n) {
          Node copy = n;
          Interval iv = *n.interval;
          iv.hi = iv.numeric_hi() + delta;
          copy.interval = iv;
          return std::make_shared<const Node>(std::move(copy));
        });
        return Formula(out);
      }
      case 4: {  // drop one side of a conjunction
        std::size_t ands = count_if_nodes(f.ptr(), is_conjunction);
        if (ands == 0) break;
        std::size_t k = rng() % ands;
        bool keep_left = rng() % 2 == 0;
        NodePtr out = rewrite_kth_matching(f.ptr(), k, is_conjunction, [&](const Node& n) {
          return keep_left ? n.left : n.right;
        });
        return Formula(out);
      }
      case 5: {  // duplicate as an extra conjunct (redundancy)
        return conjunction(f, f);
      }
      default: {  // variable rename
        if (atoms == 0) break;
        std::vector<std::string> vars = variables_of(f);
        if (vars.empty()) break;
        std::string replacement = vars[rng() % vars.size()] + "_alt";
        std::size_t k = rng() % atoms;
        NodePtr out = rewrite_kth_matching(f.ptr(), k, is_atomic, [&](const Node& n) {
          Node copy = n;
          if (!copy.pred.lhs.empty() && !copy.pred.lhs[0].var.empty())
            copy.pred.lhs[0].var = replacement;
          return std::make_shared<const Node>(std::move(copy));
        });
        Formula g(out);
        if (!(g == f)) return g;
        break;
      }
    }
  }
  return conjunction(f, f);  // always-distinct fallback
}

std::vector<Formula> mutate_candidates(const Formula& f, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Formula> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(mutate_formula(f, rng));
  return out;
}

}  // namespace stlgen
