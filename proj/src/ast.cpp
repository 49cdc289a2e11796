#include "stlgen/ast.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace stlgen {

const char* cmp_symbol(CmpOp op) noexcept {
  switch (op) {
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::None: return "";
  }
  return "";
}

const char* node_kind_name(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::Atomic: return "atomic";
    case NodeKind::Placeholder: return "placeholder";
    case NodeKind::Bottom: return "bottom";
    case NodeKind::Not: return "not";
    case NodeKind::And: return "and";
    case NodeKind::Or: return "or";
    case NodeKind::Implies: return "implies";
    case NodeKind::Globally: return "globally";
    case NodeKind::Finally: return "finally";
    case NodeKind::Until: return "until";
  }
  return "?";
}

bool is_temporal(NodeKind k) noexcept {
  return k == NodeKind::Globally || k == NodeKind::Finally || k == NodeKind::Until;
}

std::string render_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string AtomicPredicate::canonical() const {
  std::string out;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const AffineTerm& t = lhs[i];
    double coef = t.coefficient;
    if (i == 0) {
      if (coef < 0 && !t.var.empty()) {
        out += "-";
        coef = -coef;
      }
    } else {
      out += coef < 0 ? " - " : " + ";
      coef = std::abs(coef);
    }
    if (t.var.empty()) {
      out += render_number(i == 0 ? t.coefficient : coef);
    } else {
      if (coef != 1.0) {
        out += render_number(coef);
        out += "*";
      }
      out += t.var;
    }
  }
  if (op != CmpOp::None) {
    out += " ";
    out += cmp_symbol(op);
    out += " ";
    out += render_number(rhs);
  }
  return out;
}

AtomicPredicate make_predicate(const std::string& var, CmpOp op, double rhs) {
  AtomicPredicate p;
  p.lhs = {AffineTerm{1.0, var}};
  p.op = op;
  p.rhs = rhs;
  return p;
}

AtomicPredicate make_boolean(const std::string& var) {
  AtomicPredicate p;
  p.lhs = {AffineTerm{1.0, var}};
  p.op = CmpOp::None;
  return p;
}

std::string Interval::canonical() const {
  std::string out = "[";
  out += render_number(lo);
  out += ",";
  out += symbolic() ? symbol() : render_number(numeric_hi());
  out += "]";
  return out;
}

// ── Constructors ────────────────────────────────────────────────────────────

namespace {
NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }
}  // namespace

Formula atom(AtomicPredicate pred) {
  return Formula(make_node({NodeKind::Atomic, std::move(pred), {}, nullptr, nullptr}));
}
Formula placeholder() {
  return Formula(make_node({NodeKind::Placeholder, {}, {}, nullptr, nullptr}));
}
Formula bottom() {
  return Formula(make_node({NodeKind::Bottom, {}, {}, nullptr, nullptr}));
}
Formula truth() { return negation(bottom()); }
Formula negation(Formula child) {
  return Formula(make_node({NodeKind::Not, {}, {}, child.ptr(), nullptr}));
}
Formula conjunction(Formula l, Formula r) {
  return Formula(make_node({NodeKind::And, {}, {}, l.ptr(), r.ptr()}));
}
Formula disjunction(Formula l, Formula r) {
  return Formula(make_node({NodeKind::Or, {}, {}, l.ptr(), r.ptr()}));
}
Formula implication(Formula l, Formula r) {
  return Formula(make_node({NodeKind::Implies, {}, {}, l.ptr(), r.ptr()}));
}
Formula globally(std::optional<Interval> i, Formula child) {
  return Formula(make_node({NodeKind::Globally, {}, std::move(i), child.ptr(), nullptr}));
}
Formula eventually(std::optional<Interval> i, Formula child) {
  return Formula(make_node({NodeKind::Finally, {}, std::move(i), child.ptr(), nullptr}));
}
Formula until(std::optional<Interval> i, Formula l, Formula r) {
  return Formula(make_node({NodeKind::Until, {}, std::move(i), l.ptr(), r.ptr()}));
}

// ── Equality ────────────────────────────────────────────────────────────────

namespace {
bool nodes_equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->kind == NodeKind::Atomic && !(a->pred == b->pred)) return false;
  if (a->interval.has_value() != b->interval.has_value()) return false;
  if (a->interval && !(*a->interval == *b->interval)) return false;
  return nodes_equal(a->left, b->left) && nodes_equal(a->right, b->right);
}
}  // namespace

bool Formula::operator==(const Formula& o) const { return nodes_equal(root_, o.root_); }

// ── Canonical rendering ─────────────────────────────────────────────────────

namespace {

// Precedence for parenthesisation. Atoms are level 0 so they are always
// parenthesised as operands of a connective; keywords and temporal nodes are
// self-delimiting.
constexpr int kPrecAtom = 0;
constexpr int kPrecImplies = 1;
constexpr int kPrecOr = 2;
constexpr int kPrecAnd = 3;
constexpr int kPrecNot = 4;
constexpr int kPrecPrimary = 5;

int natural_prec(const Node& n) {
  switch (n.kind) {
    case NodeKind::Atomic: return kPrecAtom;
    case NodeKind::Implies: return kPrecImplies;
    case NodeKind::Or: return kPrecOr;
    case NodeKind::And: return kPrecAnd;
    case NodeKind::Not: return kPrecNot;
    default: return kPrecPrimary;  // bottom, placeholder, temporal
  }
}

std::string render_node(const NodePtr& n, int min_prec);

std::string render_child(const NodePtr& n, int min_prec) {
  std::string s = render_node(n, 0);
  if (natural_prec(*n) < min_prec) return "(" + s + ")";
  return s;
}

std::string temporal_op(const Node& n) {
  std::string op = n.kind == NodeKind::Globally ? "G" : n.kind == NodeKind::Finally ? "F" : "U";
  if (n.interval) op += n.interval->canonical();
  return op;
}

std::string render_node(const NodePtr& n, int min_prec) {
  switch (n->kind) {
    case NodeKind::Atomic:
      return n->pred.canonical();
    case NodeKind::Placeholder:
      return "\xCF\x86";  // φ
    case NodeKind::Bottom:
      return "false";
    case NodeKind::Not: {
      const Node& c = *n->left;
      if (natural_prec(c) == kPrecPrimary && c.kind != NodeKind::Until)
        return "!" + render_node(n->left, 0);
      return "!(" + render_node(n->left, 0) + ")";
    }
    case NodeKind::And:
      return render_child(n->left, kPrecAnd) + " & " + render_child(n->right, kPrecAnd + 1);
    case NodeKind::Or:
      return render_child(n->left, kPrecOr) + " | " + render_child(n->right, kPrecOr + 1);
    case NodeKind::Implies:
      return render_child(n->left, kPrecImplies + 1) + " -> " + render_child(n->right, kPrecImplies);
    case NodeKind::Globally:
    case NodeKind::Finally:
      return temporal_op(*n) + "(" + render_node(n->left, 0) + ")";
    case NodeKind::Until:
      return "(" + render_node(n->left, 0) + ") " + temporal_op(*n) + " (" +
             render_node(n->right, 0) + ")";
  }
  return "";
}

}  // namespace

std::string render(const Formula& f) { return render_node(f.ptr(), 0); }

// ── Structure queries ───────────────────────────────────────────────────────

namespace {
template <typename Fn>
void visit_nodes(const NodePtr& n, Fn&& fn) {
  if (!n) return;
  fn(*n);
  visit_nodes(n->left, fn);
  visit_nodes(n->right, fn);
}
}  // namespace

std::set<std::string> extract_atomic_propositions(const Formula& f) {
  std::set<std::string> out;
  visit_nodes(f.ptr(), [&](const Node& n) {
    if (n.kind == NodeKind::Atomic) out.insert(n.pred.canonical());
  });
  return out;
}

namespace {
NodePtr template_node(const NodePtr& n) {
  if (n->kind == NodeKind::Atomic) return placeholder().ptr();
  Node copy = *n;
  if (n->left) copy.left = template_node(n->left);
  if (n->right) copy.right = template_node(n->right);
  return std::make_shared<const Node>(std::move(copy));
}
}  // namespace

Formula to_template(const Formula& f) { return Formula(template_node(f.ptr())); }

std::size_t formula_length(const Formula& f) {
  std::string s = render(f);
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return c != ' '; }));
}

std::size_t node_count(const Formula& f) {
  std::size_t n = 0;
  visit_nodes(f.ptr(), [&](const Node&) { ++n; });
  return n;
}

namespace {
std::size_t depth_of(const NodePtr& n) {
  if (!n) return 0;
  return 1 + std::max(depth_of(n->left), depth_of(n->right));
}
}  // namespace

std::size_t max_depth(const Formula& f) { return depth_of(f.ptr()); }

std::size_t atomic_leaf_count(const Formula& f) {
  std::size_t n = 0;
  visit_nodes(f.ptr(), [&](const Node& node) {
    if (node.kind == NodeKind::Atomic) ++n;
  });
  return n;
}

OperatorCounts operator_counts(const Formula& f) {
  OperatorCounts c;
  visit_nodes(f.ptr(), [&](const Node& n) {
    switch (n.kind) {
      case NodeKind::Not: ++c.negation; break;
      case NodeKind::And: ++c.conjunction; break;
      case NodeKind::Or: ++c.disjunction; break;
      case NodeKind::Implies: ++c.implication; break;
      case NodeKind::Globally: ++c.globally; break;
      case NodeKind::Finally: ++c.eventually; break;
      case NodeKind::Until: ++c.until; break;
      default: break;
    }
  });
  return c;
}

std::vector<Interval> collect_intervals(const Formula& f) {
  std::vector<Interval> out;
  visit_nodes(f.ptr(), [&](const Node& n) {
    if (n.interval) out.push_back(*n.interval);
  });
  return out;
}

std::size_t numeric_constant_count(const Formula& f) {
  std::size_t n = 0;
  visit_nodes(f.ptr(), [&](const Node& node) {
    if (node.interval) {
      n += node.interval->symbolic() ? 1 : 2;
    }
    if (node.kind == NodeKind::Atomic) {
      if (node.pred.op != CmpOp::None) ++n;
      for (const AffineTerm& t : node.pred.lhs) {
        if (t.var.empty() || std::abs(t.coefficient) != 1.0) ++n;
      }
    }
  });
  return n;
}

}  // namespace stlgen
