#include <gtest/gtest.h>

#include <cmath>

#include "adapt/knapsack.hpp"
#include "adapt/oracle.hpp"
#include "adapt/secular.hpp"

using namespace adapt;
using namespace adapt::oracle;

namespace {

ScalarFunction from(RealMap f) {
  ScalarFunction s;
  s.eval = std::move(f);
  return s;
}

}  // namespace

TEST(BracketScan, Sqrt2) {
  const ScanResult r = bracket_scan(from([](double x) { return x * x - 2.0; }), 0.0, 2.0, 4);
  ASSERT_EQ(r.brackets.size(), 1u);
  EXPECT_EQ(r.brackets[0].lo, 1.0);
  EXPECT_EQ(r.brackets[0].hi, 1.5);
}

TEST(BracketScan, NoRealRoot) {
  const ScanResult r = bracket_scan(from([](double x) { return x * x + 1.0; }), -2.0, 2.0, 64);
  EXPECT_TRUE(r.brackets.empty());
  EXPECT_TRUE(r.exact_roots.empty());
}

TEST(BracketScan, SecularInterlacing) {
  const secular::SecularProblem p({1.0, 1.0, 1.0}, {0.0, 1.0, 2.0});
  const ScanResult r =
      bracket_scan(from([&p](double x) { return secular::eval_f(p, x); }), 1e-9, 2.0 - 1e-9, 64);
  // Sign changes across the pole at 1 are reported separately.
  EXPECT_EQ(r.brackets.size(), 2u);
  EXPECT_EQ(r.discontinuities.size(), 1u);
  EXPECT_LT(r.brackets[0].hi, 1.0);
  EXPECT_GT(r.brackets[1].lo, 1.0);
}

TEST(BracketScan, PoleAtSampleIsSkipped) {
  const secular::SecularProblem p({1.0, 1.0}, {0.0, 1.0});
  const ScanResult r = bracket_scan(from([&p](double x) { return secular::eval_f(p, x); }), 0.0, 1.0, 8);
  // Both endpoints are poles and are retried one ulp inside. Next to the pole
  // at 0 the value overflows, so only the right end recovers.
  ASSERT_EQ(r.skipped.size(), 1u);
  EXPECT_EQ(r.skipped[0], 0.0);
  ASSERT_EQ(r.brackets.size(), 1u);
  const ScanResult r2 =
      bracket_scan(from([&p](double x) { return secular::eval_f(p, x); }), -1.0, 2.0, 3);
  EXPECT_EQ(r2.skipped.size(), 2u);
}

TEST(BracketScan, InvalidArguments) {
  auto f = from([](double x) { return x; });
  EXPECT_THROW(bracket_scan(f, 1.0, 0.0, 4), Error);
  EXPECT_THROW(bracket_scan(f, 0.0, 1.0, 1), Error);
}

TEST(Bisect, Sqrt2) {
  const BisectionResult r = bisect(from([](double x) { return x * x - 2.0; }), {1.0, 2.0}, 1e-12);
  EXPECT_NEAR(r.root, 1.414213562373, 1e-12);
  EXPECT_LE(r.width, 1e-12);
  EXPECT_GE(r.steps, static_cast<int>(std::ceil(std::log2(1.0 / 1e-12))));
}

TEST(Bisect, SecularClosedForm) {
  const secular::SecularProblem p({1.0, 1.0}, {0.0, 1.0});
  const BisectionResult r =
      bisect(from([&p](double x) { return secular::eval_f(p, x); }), {1e-9, 1.0 - 1e-9}, 1e-12);
  EXPECT_NEAR(r.root, (3.0 - std::sqrt(5.0)) / 2.0, 1e-12);
}

TEST(Bisect, SameSignAndDeterminism) {
  auto f = from([](double x) { return x * x - 2.0; });
  try {
    bisect(f, {2.0, 3.0}, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidBracket);
  }
  EXPECT_EQ(bisect(f, {0.0, 2.0}, 0.0).root, bisect(f, {0.0, 2.0}, 0.0).root);
}

TEST(VerifyRoot, AgreesAndFlags) {
  auto f = from([](double x) { return x * x - 2.0; });
  const RootReport exact = verify_root(f, std::sqrt(2.0), Interval{0.0, 2.0});
  EXPECT_LE(exact.rel_error, 1e-12);
  EXPECT_TRUE(exact.agrees);
  const RootReport off = verify_root(f, std::sqrt(2.0) + 1e-3, Interval{0.0, 2.0});
  EXPECT_FALSE(off.agrees);
  EXPECT_NEAR(off.abs_error, 1e-3, 1e-12);
}

TEST(VerifyRoot, NoRootFound) {
  auto f = from([](double x) { return x * x + 1.0; });
  try {
    verify_root(f, 0.0, Interval{-1.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoRootFound);
  }
}

TEST(VerifyRoot, KnapsackCrossModule) {
  const knapsack::KnapsackDual p({1.0, 1.0}, {1.0, 2.0}, 1.0);
  const SolverConfig cfg;
  const IterationTrace t = knapsack::solve(p, cfg);
  ASSERT_TRUE(t.converged());
  const ScalarFunction f = knapsack::dual_function(p, cfg);
  const RootReport r = verify_root(f, *t.root, Interval{1e-6, 0.5 - 1e-9});
  EXPECT_LE(r.rel_error, 1e-10);
}
