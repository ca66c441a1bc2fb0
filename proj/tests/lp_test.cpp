#include <gtest/gtest.h>

#include <random>

#include "qualprob/fourier_motzkin.hpp"
#include "qualprob/lp.hpp"

namespace qp = qualprob;
using qp::ConstraintSense;
using qp::LinearProgram;
using qp::Rational;

namespace {

LinearProgram random_system(std::mt19937_64& rng, std::size_t vars, std::size_t rows) {
  LinearProgram lp(vars);
  auto pick = [&](int lo, int hi) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)) + lo;
  };
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<Rational> a;
    for (std::size_t j = 0; j < vars; ++j) a.emplace_back(pick(-3, 3));
    auto s = static_cast<ConstraintSense>(pick(0, 5) == 0 ? 2 : pick(0, 1));
    lp.add(std::move(a), s, Rational(pick(-6, 6), pick(1, 3)));
  }
  lp.objective.clear();
  for (std::size_t j = 0; j < vars; ++j) lp.objective.emplace_back(pick(-2, 2));
  return lp;
}

}  // namespace

TEST(Solve, SingleBindingConstraint) {
  LinearProgram lp(1);
  lp.add({1}, ConstraintSense::LE, 1);
  lp.add({1}, ConstraintSense::GE, 0);
  lp.objective = {1};
  auto out = qp::solve(lp);
  auto* opt = std::get_if<qp::Optimal>(&out);
  ASSERT_NE(opt, nullptr);
  EXPECT_EQ(opt->value, Rational(1));
  EXPECT_EQ(opt->point, std::vector<Rational>{Rational(1)});
}

TEST(Solve, ContradictionHasCertificate) {
  LinearProgram lp(1);
  lp.add({1}, ConstraintSense::GE, 1);
  lp.add({1}, ConstraintSense::LE, 0);
  auto out = qp::solve(lp);
  auto* inf = std::get_if<qp::Infeasible>(&out);
  ASSERT_NE(inf, nullptr);
  EXPECT_TRUE(qp::is_farkas_certificate(lp, inf->certificate));
  EXPECT_FALSE(qp::fourier_motzkin_feasible(lp));
}

TEST(Solve, ContradictionThroughSignRestriction) {
  // x >= 0 is absorbed as a bound; the certificate must still cite it.
  LinearProgram lp(2);
  lp.add({1, 0}, ConstraintSense::GE, 0);
  lp.add({0, 1}, ConstraintSense::GE, 0);
  lp.add({1, 1}, ConstraintSense::LE, -1);
  auto out = qp::solve(lp);
  auto* inf = std::get_if<qp::Infeasible>(&out);
  ASSERT_NE(inf, nullptr);
  EXPECT_TRUE(qp::is_farkas_certificate(lp, inf->certificate));
  EXPECT_GT(inf->certificate[0].sign(), 0);
}

TEST(Solve, Unbounded) {
  LinearProgram lp(2);
  lp.add({1, -1}, ConstraintSense::LE, 1);
  lp.objective = {1, 0};
  auto out = qp::solve(lp);
  auto* ub = std::get_if<qp::Unbounded>(&out);
  ASSERT_NE(ub, nullptr);
  EXPECT_TRUE(qp::is_improving_ray(lp, ub->ray));
  EXPECT_TRUE(qp::satisfies(lp, ub->point));
}

TEST(Solve, MinimizeAndEquality) {
  // min x + y s.t. x + 2y = 4, x >= 1, y >= 0. With x = 4 - 2y the objective
  // is 4 - y, and x >= 1 caps y at 3/2.
  LinearProgram lp(2);
  lp.add({1, 2}, ConstraintSense::EQ, 4);
  lp.add({1, 0}, ConstraintSense::GE, 1);
  lp.add({0, 1}, ConstraintSense::GE, 0);
  lp.objective = {1, 1};
  lp.sense = qp::ObjectiveSense::Minimize;
  auto out = qp::solve(lp);
  auto* opt = std::get_if<qp::Optimal>(&out);
  ASSERT_NE(opt, nullptr);
  EXPECT_EQ(opt->value, Rational(5, 2));
  EXPECT_EQ(opt->point[0], Rational(1));
  EXPECT_EQ(opt->point[1], Rational(3, 2));
}

TEST(Solve, DimensionMismatch) {
  LinearProgram lp(2);
  lp.add({1}, ConstraintSense::LE, 1);
  EXPECT_THROW(qp::solve(lp), qp::Error);
  try {
    qp::solve(lp);
  } catch (const qp::Error& e) {
    EXPECT_EQ(e.code(), qp::ErrorCode::DimensionMismatch);
  }
}

TEST(Solve, PivotBudget) {
  LinearProgram lp(3);
  lp.add({1, 1, 1}, ConstraintSense::LE, 1);
  lp.add({1, 0, 0}, ConstraintSense::GE, 0);
  lp.add({0, 1, 0}, ConstraintSense::GE, 0);
  lp.add({0, 0, 1}, ConstraintSense::GE, 0);
  lp.add({1, -1, 0}, ConstraintSense::GE, Rational(1, 4));
  lp.objective = {1, 2, 3};
  qp::SolveOptions opts;
  opts.max_pivots = 1;
  try {
    qp::solve(lp, opts);
    FAIL() << "expected budget error";
  } catch (const qp::Error& e) {
    EXPECT_EQ(e.code(), qp::ErrorCode::BudgetExceeded);
  }
}

TEST(FourierMotzkin, Basics) {
  LinearProgram empty(3);
  EXPECT_TRUE(qp::fourier_motzkin_feasible(empty));

  // p1 - p2 >= e, (p2 + p3) - (p1 + p3) >= e, e >= 1: the rows cancel to 2e <= 0.
  LinearProgram additivity(4);
  additivity.add({1, -1, 0, -1}, ConstraintSense::GE, 0);
  additivity.add({-1, 1, 0, -1}, ConstraintSense::GE, 0);
  additivity.add({0, 0, 0, 1}, ConstraintSense::GE, 1);
  additivity.add({1, 1, 1, 0}, ConstraintSense::EQ, 1);
  EXPECT_FALSE(qp::fourier_motzkin_feasible(additivity));
  EXPECT_TRUE(std::holds_alternative<qp::Infeasible>(qp::solve(additivity)));
}

TEST(FourierMotzkin, SizeCap) {
  LinearProgram big(9);
  try {
    qp::fourier_motzkin_feasible(big);
    FAIL();
  } catch (const qp::Error& e) {
    EXPECT_EQ(e.code(), qp::ErrorCode::SizeCapExceeded);
  }
}

// Simplex vs elimination on seeded random systems, plus certificate checks.
TEST(Solve, AgreesWithFourierMotzkinOnRandomSystems) {
  std::mt19937_64 rng(20240611);
  int feasible = 0, infeasible = 0, unbounded = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto lp = random_system(rng, 4, 8);
    auto out = qp::solve(lp);
    bool fm = qp::fourier_motzkin_feasible(lp);
    if (auto* inf = std::get_if<qp::Infeasible>(&out)) {
      ++infeasible;
      EXPECT_FALSE(fm) << "trial " << trial;
      EXPECT_TRUE(qp::is_farkas_certificate(lp, inf->certificate));
    } else {
      EXPECT_TRUE(fm) << "trial " << trial;
      if (auto* opt = std::get_if<qp::Optimal>(&out)) {
        ++feasible;
        EXPECT_TRUE(qp::satisfies(lp, opt->point));
      } else {
        ++unbounded;
        auto& ub = std::get<qp::Unbounded>(out);
        EXPECT_TRUE(qp::is_improving_ray(lp, ub.ray));
      }
    }
  }
  EXPECT_GT(feasible + unbounded, 20);
  EXPECT_GT(infeasible, 20);
}

TEST(Solve, RowScalingKeepsOutcome) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    auto lp = random_system(rng, 3, 6);
    // Bound the region so optima exist more often.
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<Rational> a(3);
      a[j] = 1;
      lp.add(a, ConstraintSense::LE, 10);
      lp.add(a, ConstraintSense::GE, -10);
    }
    auto scaled = lp;
    for (std::size_t i = 0; i < scaled.constraints.size(); ++i) {
      Rational f(static_cast<std::int64_t>(i % 5 + 1), static_cast<std::int64_t>(i % 3 + 1));
      for (auto& v : scaled.constraints[i].coefficients) v *= f;
      scaled.constraints[i].rhs *= f;
    }
    auto a = qp::solve(lp);
    auto b = qp::solve(scaled);
    ASSERT_EQ(a.index(), b.index());
    if (auto* oa = std::get_if<qp::Optimal>(&a)) {
      EXPECT_EQ(oa->value, std::get<qp::Optimal>(b).value);
    }
  }
}
