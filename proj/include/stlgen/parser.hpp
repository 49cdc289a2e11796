#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stlgen/ast.hpp"
#include "stlgen/errors.hpp"

namespace stlgen {

enum class TokenKind { Identifier, Number, Operator, Bracket, Comma };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t position = 0;

  bool operator==(const Token& o) const { return kind == o.kind && text == o.text; }
};

using TokenSequence = std::vector<Token>;

/// Splits a formula string into identifiers, numbers, multi-character
/// operators (-> >= <= ==), single-character symbols, brackets and commas.
/// Whitespace is discarded. Unicode operator aliases (∧ ∨ ¬ → ≥ ≤ ⊥ ⊤) are
/// normalised to their ASCII forms, and a subscript underscore between a
/// temporal operator and its interval (G_[l,u]) is dropped.
/// Throws ParseError on an unknown character.
TokenSequence tokenize(const std::string& text);

/// Token texts only, for sequence-level metrics.
std::vector<std::string> token_texts(const TokenSequence& tokens);

std::vector<std::string> tokenize_texts(const std::string& text);

/* Surface grammar (ASCII, whitespace-insensitive):
 *
 *   formula  := implies
 *   implies  := or ("->" implies)?              right-associative
 *   or       := and ("|" and)*
 *   and      := unary ("&" unary)*
 *   unary    := "!" unary | temporal | "(" formula ")" ["U" interval? "(" formula ")" ]
 *             | atom | "false" | "true" | "φ"
 *   temporal := ("G"|"F") interval? "(" formula ")"
 *   interval := "[" bound "," (bound | symbol) "]"
 *   atom     := expr (cmp number)?              bare expr must be a lone identifier
 *   expr     := term (("+"|"-") term)*
 *   term     := number "*" ident | ident "*" number | ident | number
 *   cmp      := ">" | ">=" | "<" | "<=" | "==" | "="
 *
 * "=" is accepted and canonicalised to "==". G/F/U act as temporal operators
 * only when followed by "[" or "(", otherwise they are ordinary identifiers.
 */
Formula parse(const std::string& text);

}  // namespace stlgen
