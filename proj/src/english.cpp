#include "stlgen/english.hpp"

namespace stlgen {

namespace {

std::string interval_phrase(const std::optional<Interval>& iv) {
  if (!iv) return "";
  std::string hi = iv->symbolic() ? iv->symbol() : render_number(iv->numeric_hi());
  return " from " + render_number(iv->lo) + " to " + hi;
}

std::string lhs_phrase(const AtomicPredicate& p) {
  // reuse the canonical affine rendering without the comparison
  AtomicPredicate bare = p;
  bare.op = CmpOp::None;
  return bare.canonical();
}

std::string atom_phrase(const AtomicPredicate& p) {
  switch (p.op) {
    case CmpOp::None: return lhs_phrase(p) + " holds";
    case CmpOp::Gt: return lhs_phrase(p) + " is greater than " + render_number(p.rhs);
    case CmpOp::Ge: return lhs_phrase(p) + " is at least " + render_number(p.rhs);
    case CmpOp::Lt: return lhs_phrase(p) + " is less than " + render_number(p.rhs);
    case CmpOp::Le: return lhs_phrase(p) + " is at most " + render_number(p.rhs);
    case CmpOp::Eq: return lhs_phrase(p) + " is equal to " + render_number(p.rhs);
  }
  return "";
}

std::string nl(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::Atomic: return atom_phrase(n->pred);
    case NodeKind::Placeholder: return "something holds";
    case NodeKind::Bottom: return "contradiction holds";
    case NodeKind::Not: return "it is not the case that " + nl(n->left);
    case NodeKind::And: return nl(n->left) + " and " + nl(n->right);
    case NodeKind::Or: return nl(n->left) + " or " + nl(n->right);
    case NodeKind::Implies: return "if " + nl(n->left) + " then " + nl(n->right);
    case NodeKind::Globally: return "at every time" + interval_phrase(n->interval) + ", " + nl(n->left);
    case NodeKind::Finally: return "at some time" + interval_phrase(n->interval) + ", " + nl(n->left);
    case NodeKind::Until:
      return nl(n->left) + " holds until, at some time" + interval_phrase(n->interval) + ", " +
             nl(n->right);
  }
  return "";
}

}  // namespace

std::string render_templated_nl(const Formula& f) { return nl(f.ptr()); }

}  // namespace stlgen
