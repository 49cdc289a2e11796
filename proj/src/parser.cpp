#include "stlgen/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstring>

namespace stlgen {

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '.'; }

struct UnicodeAlias {
  const char* utf8;
  const char* replacement;
  TokenKind kind;
};

constexpr UnicodeAlias kAliases[] = {
    {"\xE2\x88\xA7", "&", TokenKind::Operator},      // ∧
    {"\xE2\x88\xA8", "|", TokenKind::Operator},      // ∨
    {"\xC2\xAC", "!", TokenKind::Operator},          // ¬
    {"\xE2\x86\x92", "->", TokenKind::Operator},     // →
    {"\xE2\x89\xA5", ">=", TokenKind::Operator},     // ≥
    {"\xE2\x89\xA4", "<=", TokenKind::Operator},     // ≤
    {"\xE2\x8A\xA5", "false", TokenKind::Identifier},// ⊥
    {"\xE2\x8A\xA4", "true", TokenKind::Identifier}, // ⊤
    {"\xCF\x86", "\xCF\x86", TokenKind::Identifier}, // φ
};

bool is_temporal_name(const std::string& s) { return s == "G" || s == "F" || s == "U"; }

}  // namespace

TokenSequence tokenize(const std::string& text) {
  TokenSequence out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    bool aliased = false;
    for (const UnicodeAlias& a : kAliases) {
      std::size_t len = std::strlen(a.utf8);
      if (text.compare(i, len, a.utf8) == 0) {
        out.push_back({a.kind, a.replacement, i});
        i += len;
        aliased = true;
        break;
      }
    }
    if (aliased) continue;

    if (ident_start(c)) {
      std::size_t start = i;
      while (i < n && ident_char(static_cast<unsigned char>(text[i]))) ++i;
      std::string name = text.substr(start, i - start);
      // subscripted interval: G_[0,2] reads as G [0,2]
      if (name.size() >= 2 && name.back() == '_' && i < n && text[i] == '[' &&
          is_temporal_name(name.substr(0, name.size() - 1))) {
        name.pop_back();
      }
      out.push_back({TokenKind::Identifier, name, start});
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t start = i;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i < n && text[i] == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      }
      if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) {
          i = j;
          while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
      }
      out.push_back({TokenKind::Number, text.substr(start, i - start), start});
      continue;
    }
    switch (c) {
      case '-':
        if (i + 1 < n && text[i + 1] == '>') {
          out.push_back({TokenKind::Operator, "->", i});
          i += 2;
        } else {
          out.push_back({TokenKind::Operator, "-", i});
          ++i;
        }
        continue;
      case '>':
      case '<': {
        if (i + 1 < n && text[i + 1] == '=') {
          out.push_back({TokenKind::Operator, std::string(1, text[i]) + "=", i});
          i += 2;
        } else {
          out.push_back({TokenKind::Operator, std::string(1, text[i]), i});
          ++i;
        }
        continue;
      }
      case '=':
        if (i + 1 < n && text[i + 1] == '=') {
          out.push_back({TokenKind::Operator, "==", i});
          i += 2;
        } else {
          out.push_back({TokenKind::Operator, "=", i});
          ++i;
        }
        continue;
      case '&':
      case '|':
      case '!':
      case '+':
      case '*':
        out.push_back({TokenKind::Operator, std::string(1, text[i]), i});
        ++i;
        continue;
      case '(':
      case ')':
      case '[':
      case ']':
        out.push_back({TokenKind::Bracket, std::string(1, text[i]), i});
        ++i;
        continue;
      case ',':
        out.push_back({TokenKind::Comma, ",", i});
        ++i;
        continue;
      default:
        throw ParseError("unknown character '" + std::string(1, text[i]) + "'", i);
    }
  }
  return out;
}

std::vector<std::string> token_texts(const TokenSequence& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

std::vector<std::string> tokenize_texts(const std::string& text) {
  return token_texts(tokenize(text));
}

// ── Parser ──────────────────────────────────────────────────────────────────

namespace {

class Parser {
public:
  explicit Parser(TokenSequence tokens, std::size_t input_size)
      : tokens_(std::move(tokens)), end_pos_(input_size) {}

  Formula parse_formula() {
    Formula f = parse_implies();
    if (!at_end()) fail("unexpected trailing input");
    return f;
  }

private:
  const TokenSequence tokens_;
  std::size_t idx_ = 0;
  std::size_t end_pos_;

  bool at_end() const { return idx_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const { return tokens_[idx_ + ahead]; }
  bool has(std::size_t ahead = 0) const { return idx_ + ahead < tokens_.size(); }

  std::size_t here() const { return at_end() ? end_pos_ : peek().position; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, here()); }

  bool accept_op(const char* sym) {
    if (!at_end() && peek().kind == TokenKind::Operator && peek().text == sym) {
      ++idx_;
      return true;
    }
    return false;
  }
  bool accept_bracket(char b) {
    if (!at_end() && peek().kind == TokenKind::Bracket && peek().text[0] == b) {
      ++idx_;
      return true;
    }
    return false;
  }
  void expect_bracket(char b, const char* what) {
    if (!accept_bracket(b)) fail(std::string("expected '") + b + "' " + what);
  }

  bool peek_bracket(char b, std::size_t ahead = 0) const {
    return has(ahead) && peek(ahead).kind == TokenKind::Bracket && peek(ahead).text[0] == b;
  }

  double parse_number_value() {
    if (at_end() || peek().kind != TokenKind::Number) fail("expected a number");
    const Token& t = peek();
    double v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc{}) fail("invalid numeric literal '" + t.text + "'");
    ++idx_;
    return v;
  }

  Formula parse_implies() {
    Formula left = parse_or();
    if (accept_op("->")) {
      Formula right = parse_implies();
      return implication(left, right);
    }
    return left;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept_op("|")) f = disjunction(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept_op("&")) f = conjunction(f, parse_unary());
    return f;
  }

  // Does the identifier at `ahead` start a temporal operator application?
  bool temporal_at(std::size_t ahead) const {
    if (!has(ahead) || peek(ahead).kind != TokenKind::Identifier) return false;
    if (!is_temporal_name(peek(ahead).text)) return false;
    return peek_bracket('[', ahead + 1) || peek_bracket('(', ahead + 1);
  }

  std::optional<Interval> parse_optional_interval() {
    if (!peek_bracket('[')) return std::nullopt;
    std::size_t open_pos = here();
    expect_bracket('[', "to open an interval");
    double lo = parse_number_value();
    if (at_end() || peek().kind != TokenKind::Comma) fail("expected ',' in interval");
    ++idx_;
    Interval iv;
    iv.lo = lo;
    if (!at_end() && peek().kind == TokenKind::Identifier) {
      iv.hi = peek().text;
      ++idx_;
    } else {
      double hi = parse_number_value();
      if (lo >= hi) throw IntervalError("interval requires lo < hi", open_pos);
      iv.hi = hi;
    }
    if (iv.lo < 0) throw IntervalError("interval bound must be non-negative", open_pos);
    expect_bracket(']', "to close an interval");
    return iv;
  }

  Formula parse_paren_formula(const char* what) {
    expect_bracket('(', what);
    Formula f = parse_implies();
    expect_bracket(')', what);
    return f;
  }

  // Trailing "U" after a parenthesised formula makes it an until's left side.
  Formula maybe_until(Formula left) {
    if (temporal_at(0) && peek().text == "U") {
      ++idx_;
      std::optional<Interval> iv = parse_optional_interval();
      Formula right = parse_paren_formula("around the right operand of U");
      return until(std::move(iv), left, right);
    }
    return left;
  }

  Formula parse_unary() {
    if (at_end()) fail("unexpected end of input");
    if (accept_op("!")) return negation(parse_unary());
    if (peek_bracket('(')) {
      Formula f = parse_paren_formula("around a sub-formula");
      return maybe_until(f);
    }
    if (temporal_at(0)) {
      std::string op = peek().text;
      if (op == "U") fail("until requires a parenthesised left operand");
      ++idx_;
      std::optional<Interval> iv = parse_optional_interval();
      Formula child = parse_paren_formula("around a temporal operand");
      return op == "G" ? globally(std::move(iv), child) : eventually(std::move(iv), child);
    }
    if (peek().kind == TokenKind::Identifier) {
      if (peek().text == "false") {
        ++idx_;
        return bottom();
      }
      if (peek().text == "true") {
        ++idx_;
        return truth();
      }
      if (peek().text == "\xCF\x86") {
        ++idx_;
        return placeholder();
      }
    }
    return maybe_until(parse_atom());
  }

  // term := number "*" ident | ident "*" number | ident | number
  AffineTerm parse_term(double sign) {
    AffineTerm t;
    if (!at_end() && peek().kind == TokenKind::Number) {
      t.coefficient = sign * parse_number_value();
      if (accept_op("*")) {
        if (at_end() || peek().kind != TokenKind::Identifier) fail("expected a variable after '*'");
        t.var = peek().text;
        ++idx_;
      }
      return t;
    }
    if (!at_end() && peek().kind == TokenKind::Identifier) {
      t.var = peek().text;
      t.coefficient = sign;
      ++idx_;
      if (accept_op("*")) t.coefficient = sign * parse_number_value();
      return t;
    }
    fail("expected a variable or number");
  }

  Formula parse_atom() {
    std::vector<AffineTerm> terms;
    double lead = accept_op("-") ? -1.0 : 1.0;
    terms.push_back(parse_term(lead));
    while (true) {
      if (accept_op("+")) {
        terms.push_back(parse_term(1.0));
      } else if (accept_op("-")) {
        terms.push_back(parse_term(-1.0));
      } else {
        break;
      }
    }
    CmpOp op = CmpOp::None;
    if (!at_end() && peek().kind == TokenKind::Operator) {
      const std::string& s = peek().text;
      if (s == ">") op = CmpOp::Gt;
      else if (s == ">=") op = CmpOp::Ge;
      else if (s == "<") op = CmpOp::Lt;
      else if (s == "<=") op = CmpOp::Le;
      else if (s == "==" || s == "=") op = CmpOp::Eq;
    }
    AtomicPredicate pred;
    pred.lhs = std::move(terms);
    if (op == CmpOp::None) {
      // bare boolean: must be a single un-coefficiented variable
      if (pred.lhs.size() != 1 || pred.lhs[0].var.empty() || pred.lhs[0].coefficient != 1.0)
        fail("expected a comparison operator");
      pred.op = CmpOp::None;
      return atom(std::move(pred));
    }
    ++idx_;
    pred.op = op;
    double sign = accept_op("-") ? -1.0 : 1.0;
    pred.rhs = sign * parse_number_value();
    return atom(std::move(pred));
  }
};

}  // namespace

Formula parse(const std::string& text) {
  Parser p(tokenize(text), text.size());
  return p.parse_formula();
}

}  // namespace stlgen
