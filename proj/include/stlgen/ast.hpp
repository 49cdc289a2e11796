#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace stlgen {

// ── Atomic predicates ───────────────────────────────────────────────────────

enum class CmpOp {
  Gt,    // >
  Ge,    // >=
  Lt,    // <
  Le,    // <=
  Eq,    // ==
  None,  // bare boolean signal, no comparison
};

const char* cmp_symbol(CmpOp op) noexcept;

/// One summand of an affine left-hand side. `var` empty means a constant term.
struct AffineTerm {
  double coefficient = 1.0;
  std::string var;

  bool operator==(const AffineTerm&) const = default;
};

/// A leaf predicate: affine expression over signal variables compared against
/// a real constant, or a bare boolean variable (op == None, rhs unused).
/// Two predicates are equal iff their canonical renderings are equal.
struct AtomicPredicate {
  std::vector<AffineTerm> lhs;
  CmpOp op = CmpOp::None;
  double rhs = 0.0;

  std::string canonical() const;
  bool operator==(const AtomicPredicate& o) const { return canonical() == o.canonical(); }
};

AtomicPredicate make_predicate(const std::string& var, CmpOp op, double rhs);
AtomicPredicate make_boolean(const std::string& var);

// ── Intervals ───────────────────────────────────────────────────────────────

/// Closed time interval [lo, hi]. The upper bound is either numeric or a
/// named symbolic horizon (e.g. T) resolved at evaluation time.
/// Invariants: lo >= 0, and lo < hi when hi is numeric.
struct Interval {
  double lo = 0.0;
  std::variant<double, std::string> hi = 0.0;

  bool symbolic() const noexcept { return std::holds_alternative<std::string>(hi); }
  double numeric_hi() const { return std::get<double>(hi); }
  const std::string& symbol() const { return std::get<std::string>(hi); }

  std::string canonical() const;
  bool operator==(const Interval& o) const { return canonical() == o.canonical(); }
};

// ── Formula AST ─────────────────────────────────────────────────────────────

enum class NodeKind {
  Atomic,
  Placeholder,  // the φ leaf of templates
  Bottom,
  Not,
  And,
  Or,
  Implies,
  Globally,
  Finally,
  Until,
};

const char* node_kind_name(NodeKind k) noexcept;
bool is_temporal(NodeKind k) noexcept;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable formula tree node. Temporal nodes may omit the interval, which
/// denotes the unbounded operator (evaluated over [0, horizon]).
struct Node {
  NodeKind kind;
  AtomicPredicate pred;              // Atomic only
  std::optional<Interval> interval;  // temporal nodes only
  NodePtr left;
  NodePtr right;                     // And/Or/Implies/Until only
};

/// Value-semantic handle to an immutable formula. Copies share structure.
class Formula {
public:
  Formula() = default;
  explicit Formula(NodePtr root) : root_(std::move(root)) {}

  bool valid() const noexcept { return root_ != nullptr; }
  const Node& node() const { return *root_; }
  const NodePtr& ptr() const noexcept { return root_; }
  NodeKind kind() const { return root_->kind; }

  Formula left() const { return Formula(root_->left); }
  Formula right() const { return Formula(root_->right); }

  /// Structural equality (same shape, same predicates, same intervals).
  bool operator==(const Formula& o) const;

private:
  NodePtr root_;
};

// Constructors.
Formula atom(AtomicPredicate pred);
Formula placeholder();
Formula bottom();
Formula truth();  // sugar: !false
Formula negation(Formula child);
Formula conjunction(Formula l, Formula r);
Formula disjunction(Formula l, Formula r);
Formula implication(Formula l, Formula r);
Formula globally(std::optional<Interval> i, Formula child);
Formula eventually(std::optional<Interval> i, Formula child);
Formula until(std::optional<Interval> i, Formula l, Formula r);

// ── Canonical text ──────────────────────────────────────────────────────────

/// Canonical rendering: single spaces around binary operators, atomic
/// predicates parenthesised when they appear as operands, minimal parentheses
/// elsewhere per precedence (! and temporal prefixes bind tighter than &,
/// then |, then ->, with -> right-associative). parse(render(f)) == f.
std::string render(const Formula& f);

/// Shortest round-trip decimal text for a numeric literal.
std::string render_number(double v);

// ── Structure queries ───────────────────────────────────────────────────────

/// Set of canonical renderings of all Atomic leaves, duplicates collapsed.
std::set<std::string> extract_atomic_propositions(const Formula& f);

/// Same formula with every Atomic leaf replaced by the placeholder φ.
/// Intervals are preserved verbatim. Idempotent.
Formula to_template(const Formula& f);

/// Number of non-whitespace characters in render(f).
std::size_t formula_length(const Formula& f);

std::size_t node_count(const Formula& f);
std::size_t max_depth(const Formula& f);
std::size_t atomic_leaf_count(const Formula& f);

/// Counts of operator occurrences, indexed by NodeKind, for Not/And/Or/
/// Implies/Globally/Finally/Until. Leaves count zero.
struct OperatorCounts {
  int negation = 0;
  int conjunction = 0;
  int disjunction = 0;
  int implication = 0;
  int globally = 0;
  int eventually = 0;
  int until = 0;

  int total() const noexcept {
    return negation + conjunction + disjunction + implication + globally + eventually + until;
  }
};

OperatorCounts operator_counts(const Formula& f);

/// All intervals appearing on temporal nodes, in pre-order.
std::vector<Interval> collect_intervals(const Formula& f);

/// Count of numeric constants: interval bounds, comparison right-hand sides,
/// and numeric coefficients other than ±1.
std::size_t numeric_constant_count(const Formula& f);

}  // namespace stlgen
