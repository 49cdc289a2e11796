#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stlgen/parser.hpp"
#include "stlgen/semantics.hpp"
#include "support/oracles.hpp"
#include "support/random_formula.hpp"

using namespace stlgen;

namespace {

Signal constant_signal(double dt, std::size_t n,
                       const std::map<std::string, double>& values) {
  Signal s;
  s.dt = dt;
  for (const auto& [name, v] : values) s.channels[name] = std::vector<double>(n, v);
  return s;
}

Signal random_signal(std::mt19937_64& rng, const std::vector<std::string>& vars,
                     std::size_t max_samples) {
  Signal s;
  s.dt = (rng() % 2 == 0) ? 1.0 : 0.5;
  std::size_t n = 1 + rng() % max_samples;
  for (const std::string& v : vars) {
    std::vector<double> col(n);
    for (double& x : col) x = static_cast<double>(rng() % 12) - 3.0;
    s.channels[v] = col;
  }
  return s;
}

const char* kGearFormula = "G[0,21](velocity > 40 -> F[1,4](RPM < 2500))";

}  // namespace

TEST_CASE("gear example: compliant and violating constant traces") {
  Formula f = parse(kGearFormula);
  Signal ok = constant_signal(1.0, 26, {{"velocity", 50}, {"RPM", 2000}});
  Signal bad = constant_signal(1.0, 26, {{"velocity", 50}, {"RPM", 3000}});

  // expectations established by the independent brute-force evaluator
  CHECK(testing::brute_evaluate(f, ok, 0));
  CHECK_FALSE(testing::brute_evaluate(f, bad, 0));

  CHECK(evaluate(f, ok, 0));
  CHECK_FALSE(evaluate(f, bad, 0));
}

TEST_CASE("gear example from the CSV fixtures") {
  Formula f = parse(kGearFormula);
  Signal ok = load_signal_csv(std::string(STLGEN_DATA_DIR) + "/gear_compliant.csv");
  Signal bad = load_signal_csv(std::string(STLGEN_DATA_DIR) + "/gear_violating.csv");
  CHECK(check(f, ok));
  CHECK_FALSE(check(f, bad));
}

TEST_CASE("check is evaluate at t = 0") {
  Formula taut = parse("x > 0 | !(x > 0)");
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    Signal s = random_signal(rng, {"x"}, 10);
    CHECK(check(taut, s));
    CHECK(check(taut, s) == evaluate(taut, s, 0));
  }
}

TEST_CASE("negation clause") {
  std::mt19937_64 rng(13);
  testing::RandomFormulaOptions opt;
  opt.max_depth = 3;
  opt.variables = {"x", "y"};
  opt.allow_unbounded = true;
  for (int i = 0; i < 200; ++i) {
    Formula f = testing::random_formula(rng, opt);
    Signal s = random_signal(rng, opt.variables, 12);
    std::size_t t = rng() % s.sample_count();
    CHECK(evaluate(negation(f), s, t) == !evaluate(f, s, t));
  }
}

TEST_CASE("oracle agreement on 1000 random instances") {
  std::mt19937_64 rng(1234);
  testing::RandomFormulaOptions opt;
  opt.max_depth = 4;
  opt.variables = {"x", "y"};
  std::size_t agreements = 0;
  for (int i = 0; i < 1000; ++i) {
    Formula f = testing::random_formula(rng, opt);
    Signal s = random_signal(rng, opt.variables, 20);
    std::size_t t = rng() % s.sample_count();
    if (evaluate(f, s, t) == testing::brute_evaluate(f, s, t)) ++agreements;
  }
  CHECK(agreements == 1000);
}

TEST_CASE("De Morgan, duality and until subsumption") {
  std::mt19937_64 rng(77);
  testing::RandomFormulaOptions opt;
  opt.max_depth = 2;
  opt.variables = {"x", "y"};
  for (int i = 0; i < 150; ++i) {
    Formula a = testing::random_formula(rng, opt);
    Formula b = testing::random_formula(rng, opt);
    Signal s = random_signal(rng, opt.variables, 14);
    std::size_t t = rng() % s.sample_count();

    CHECK(evaluate(negation(conjunction(a, b)), s, t) ==
          evaluate(disjunction(negation(a), negation(b)), s, t));

    Interval iv{0, 1.0 + static_cast<double>(rng() % 5)};
    CHECK(evaluate(eventually(iv, a), s, t) ==
          evaluate(negation(globally(iv, negation(a))), s, t));
    CHECK(evaluate(eventually(iv, a), s, t) == evaluate(until(iv, truth(), a), s, t));
  }
}

TEST_CASE("monotone windows: a sub-window of a holding G also holds") {
  std::mt19937_64 rng(301);
  testing::RandomFormulaOptions opt;
  opt.max_depth = 1;
  opt.variables = {"x"};
  for (int i = 0; i < 200; ++i) {
    Formula child = testing::random_formula(rng, opt);
    Signal s = random_signal(rng, opt.variables, 16);
    double lo = static_cast<double>(rng() % 3);
    double hi = lo + 1.0 + static_cast<double>(rng() % 6);
    if (!evaluate(globally(Interval{lo, hi}, child), s, 0)) continue;
    double lo2 = lo + static_cast<double>(rng() % 2);
    double hi2 = std::max(lo2 + 0.5, hi - static_cast<double>(rng() % 2));
    if (lo2 >= hi2 || hi2 > hi) continue;
    CHECK(evaluate(globally(Interval{lo2, hi2}, child), s, 0));
  }
}

TEST_CASE("window clipping conventions") {
  Signal s = constant_signal(1.0, 5, {{"x", 1.0}});  // horizon 4
  // window entirely beyond the trace: G vacuously true, F false
  CHECK(evaluate(parse("G[10,12](x > 0)"), s, 0));
  CHECK_FALSE(evaluate(parse("F[10,12](x > 0)"), s, 0));
  CHECK_FALSE(evaluate(parse("(x > 0) U[10,12] (x > 0)"), s, 0));
  // partially clipped windows quantify over the available samples
  CHECK(evaluate(parse("F[3,9](x > 0)"), s, 0));
}

TEST_CASE("unbounded operators quantify to the horizon") {
  Signal s = constant_signal(1.0, 6, {{"x", 1.0}});
  s.channels["x"][5] = -1.0;
  CHECK_FALSE(evaluate(parse("G(x > 0)"), s, 0));
  CHECK(evaluate(parse("G[0,4](x > 0)"), s, 0));
  CHECK(evaluate(parse("F(x < 0)"), s, 0));
}

TEST_CASE("symbolic bounds need bindings") {
  Formula f = parse("G[0,T](x > 0)");
  Signal s = constant_signal(1.0, 10, {{"x", 1.0}});
  CHECK_THROWS_AS(evaluate(f, s, 0), EvalError);
  CHECK(evaluate(f, s, 0, {{"T", 5.0}}));
}

TEST_CASE("error paths") {
  Signal s = constant_signal(1.0, 4, {{"x", 1.0}});
  CHECK_THROWS_AS(evaluate(parse("y > 0"), s, 0), EvalError);
  CHECK_THROWS_AS(evaluate(parse("x > 0"), s, 7), EvalError);
  CHECK_THROWS_AS(evaluate(to_template(parse("x > 0")), s, 0), EvalError);
}

TEST_CASE("fractional sampling step") {
  Signal s;
  s.dt = 0.5;
  s.channels["x"] = {0, 0, 0, 1, 0, 0, 0};
  // time 1.5 is sample 3
  CHECK(evaluate(parse("F[1,2](x > 0)"), s, 0));
  CHECK_FALSE(evaluate(parse("F[0,1](x > 0)"), s, 0));
  CHECK(evaluate(parse("G[1.5,1.6](x > 0)"), s, 0));
}

TEST_CASE("CSV loader validates uniformity") {
  CHECK_THROWS_AS(parse_signal_csv("time,x\n0,1\n1,1\n3,1\n"), DataError);
  CHECK_THROWS_AS(parse_signal_csv("time,x\n0,1\n0,1\n"), DataError);
  CHECK_THROWS_AS(parse_signal_csv("t,x\n0,1\n"), DataError);
  CHECK_THROWS_AS(parse_signal_csv("time,x\n"), DataError);
  Signal s = parse_signal_csv("time,x,y\n0,1,2\n0.5,3,4\n1.0,5,6\n");
  CHECK(s.dt == 0.5);
  CHECK(s.sample_count() == 3);
  CHECK(s.channel("y")[2] == 6);
}
