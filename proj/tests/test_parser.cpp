#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stlgen/parser.hpp"
#include "support/random_formula.hpp"

using namespace stlgen;

TEST_CASE("tokenize splits the worked 13-token pair") {
  auto toks = tokenize_texts("G ( x > 8 ) -> F ( y < 3 )");
  std::vector<std::string> expected = {"G", "(", "x", ">", "8", ")", "->",
                                       "F", "(", "y", "<", "3", ")"};
  CHECK(toks == expected);
  CHECK(toks.size() == 13);
}

TEST_CASE("tokenize edge cases") {
  CHECK(tokenize("").empty());
  CHECK(tokenize_texts("RPM<2500") == std::vector<std::string>{"RPM", "<", "2500"});
  CHECK(tokenize_texts("a>=1 -> b<=2") ==
        std::vector<std::string>{"a", ">=", "1", "->", "b", "<=", "2"});
  CHECK_THROWS_AS(tokenize("x @ 1"), ParseError);
}

TEST_CASE("tokenize normalises unicode aliases and subscripted intervals") {
  CHECK(tokenize_texts("a \xE2\x88\xA7 b") == std::vector<std::string>{"a", "&", "b"});
  CHECK(tokenize_texts("\xC2\xACx") == std::vector<std::string>{"!", "x"});
  CHECK(tokenize_texts("a \xE2\x86\x92 b") == std::vector<std::string>{"a", "->", "b"});
  CHECK(tokenize_texts("G_[0,2](x>1)") ==
        std::vector<std::string>{"G", "[", "0", ",", "2", "]", "(", "x", ">", "1", ")"});
}

TEST_CASE("tokenizer stability: single-space join re-tokenizes identically") {
  std::mt19937_64 rng(7);
  testing::RandomFormulaOptions opt;
  for (int i = 0; i < 300; ++i) {
    Formula f = testing::random_formula(rng, opt);
    auto toks = tokenize_texts(render(f));
    std::string joined;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      if (k) joined += " ";
      joined += toks[k];
    }
    CHECK(tokenize_texts(joined) == toks);
  }
}

TEST_CASE("parse the gear example") {
  Formula f = parse("G[0,21](velocity > 40 -> F[1,4](RPM < 2500))");
  REQUIRE(f.kind() == NodeKind::Globally);
  CHECK(f.node().interval->lo == 0);
  CHECK(f.node().interval->numeric_hi() == 21);
  Formula body = f.left();
  REQUIRE(body.kind() == NodeKind::Implies);
  CHECK(body.left().kind() == NodeKind::Atomic);
  CHECK(body.left().node().pred.canonical() == "velocity > 40");
  REQUIRE(body.right().kind() == NodeKind::Finally);
  CHECK(body.right().left().node().pred.canonical() == "RPM < 2500");
}

TEST_CASE("parse a single leaf") {
  Formula f = parse("x > 0");
  CHECK(f.kind() == NodeKind::Atomic);
  CHECK(render(f) == "x > 0");
}

TEST_CASE("interval errors") {
  CHECK_THROWS_AS(parse("G[5,3](x > 0)"), IntervalError);
  CHECK_THROWS_AS(parse("G[2,2](x > 0)"), IntervalError);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse("G[0,2](x > )");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 11);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("x > 1 y"), ParseError);
  CHECK_THROWS_AS(parse("(x > 1"), ParseError);
}

TEST_CASE("precedence: -> binds loosest and is right-associative") {
  Formula f = parse("a > 0 -> b > 0 -> c > 0");
  REQUIRE(f.kind() == NodeKind::Implies);
  CHECK(f.left().kind() == NodeKind::Atomic);
  REQUIRE(f.right().kind() == NodeKind::Implies);

  Formula g = parse("a > 0 & b > 0 | c > 0 -> d > 0");
  REQUIRE(g.kind() == NodeKind::Implies);
  REQUIRE(g.left().kind() == NodeKind::Or);
  CHECK(g.left().left().kind() == NodeKind::And);
}

TEST_CASE("negation binds tighter than conjunction") {
  Formula f = parse("!x > 0 & y > 0");
  REQUIRE(f.kind() == NodeKind::And);
  CHECK(f.left().kind() == NodeKind::Not);
}

TEST_CASE("bare boolean variables and = alias") {
  Formula f = parse("radar_rear.detect_obstacle & gear_rev = 1");
  REQUIRE(f.kind() == NodeKind::And);
  CHECK(f.left().node().pred.op == CmpOp::None);
  CHECK(f.left().node().pred.canonical() == "radar_rear.detect_obstacle");
  CHECK(f.right().node().pred.canonical() == "gear_rev == 1");
}

TEST_CASE("affine left-hand sides") {
  CHECK(render(parse("2*x + 3*y > 1")) == "2*x + 3*y > 1");
  CHECK(render(parse("x - y >= 0")) == "x - y >= 0");
  CHECK(render(parse("x + 2 < 5")) == "x + 2 < 5");
  CHECK(render(parse("-x > -5")) == "-x > -5");
  CHECK(render(parse("0.5*x <= 2.5")) == "0.5*x <= 2.5");
}

TEST_CASE("symbolic horizon parses and renders verbatim") {
  Formula f = parse("G[0,T](brake == 1)");
  REQUIRE(f.node().interval->symbolic());
  CHECK(f.node().interval->symbol() == "T");
  CHECK(render(f) == "G[0,T](brake == 1)");
}

TEST_CASE("unbounded temporal operators") {
  Formula f = parse("G ( x > 8 ) -> F ( y < 3 )");
  REQUIRE(f.kind() == NodeKind::Implies);
  CHECK(f.left().kind() == NodeKind::Globally);
  CHECK_FALSE(f.left().node().interval.has_value());
  CHECK(render(f) == "G(x > 8) -> F(y < 3)");
}

TEST_CASE("until parses with parenthesised operands") {
  Formula f = parse("(a > 0) U[0,5] (b > 0)");
  REQUIRE(f.kind() == NodeKind::Until);
  CHECK(render(f) == "(a > 0) U[0,5] (b > 0)");
  Formula g = parse("(a > 0) U (b > 0)");
  CHECK_FALSE(g.node().interval.has_value());
}

TEST_CASE("true and false keywords") {
  CHECK(parse("false").kind() == NodeKind::Bottom);
  Formula t = parse("true");
  REQUIRE(t.kind() == NodeKind::Not);
  CHECK(t.left().kind() == NodeKind::Bottom);
  CHECK(render(parse("false | x > 1")) == "false | (x > 1)");
}

TEST_CASE("canonical layout") {
  CHECK(render(conjunction(atom(make_predicate("a", CmpOp::Gt, 1)),
                           atom(make_predicate("b", CmpOp::Lt, 2)))) == "(a > 1) & (b < 2)");
  Interval iv{0, 2.0};
  CHECK(render(globally(iv, conjunction(atom(make_predicate("a", CmpOp::Gt, 1)),
                                        atom(make_predicate("b", CmpOp::Lt, 2))))) ==
        "G[0,2]((a > 1) & (b < 2))");
}

TEST_CASE("round trip: parse(render(f)) == f on grammar-sampled formulas") {
  std::mt19937_64 rng(42);
  testing::RandomFormulaOptions opt;
  for (int i = 0; i < 1000; ++i) {
    Formula f = testing::random_formula(rng, opt);
    std::string text = render(f);
    Formula reparsed = parse(text);
    CHECK(reparsed == f);
    CHECK(render(reparsed) == text);
  }
}

TEST_CASE("whitespace is insignificant") {
  CHECK(parse("G[0,21](velocity>40->F[1,4](RPM<2500))") ==
        parse("G [ 0 , 21 ] ( velocity > 40 -> F [ 1 , 4 ] ( RPM < 2500 ) )"));
}

TEST_CASE("numeric literals are canonicalised") {
  CHECK(render(parse("x > 2500")) == "x > 2500");
  CHECK(render(parse("x > 0.20")) == "x > 0.2");
  CHECK(render(parse("x > 1e3")) == "x > 1000");
}
