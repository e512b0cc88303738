#include "maxwalk/renewal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace maxwalk;

namespace {

ConditionedLadderPmf make_z(std::vector<double> probs) {
  ConditionedLadderPmf z;
  z.span = 1;
  double mean = 0;
  for (size_t i = 0; i < probs.size(); ++i) mean += double(i + 1) * probs[i];
  z.probs = std::move(probs);
  z.mu = mean;
  return z;
}

}  // namespace

TEST(RenewalSequence, UnitStepCollapsesToPowers) {
  const ConditionedLadderPmf z = make_z({1.0});
  const RenewalSequence r = renewal_sequence(z, 2.0 / 3.0, 12);
  for (int n = 0; n <= 12; ++n) EXPECT_NEAR(r.u[n], std::pow(2.0 / 3.0, n), 1e-14);
}

TEST(RenewalSequence, StartsAtOne) {
  const ConditionedLadderPmf z = make_z({0.3, 0.3, 0.4});
  EXPECT_DOUBLE_EQ(renewal_sequence(z, 0.7, 0).u[0], 1.0);
}

TEST(RenewalSequence, TwoStepHandRecursion) {
  const ConditionedLadderPmf z = make_z({0.5, 0.5});
  const RenewalSequence r = renewal_sequence(z, 1.0, 2);
  EXPECT_DOUBLE_EQ(r.u[1], 0.5);
  EXPECT_DOUBLE_EQ(r.u[2], 0.75);  // f(2) + f(1) u(1)
}

TEST(RenewalSequence, TotalMassBoundedByGeometricSum) {
  const ConditionedLadderPmf z = make_z({0.2, 0.5, 0.3});
  for (double A : {0.5, 0.9}) {
    const RenewalSequence r = renewal_sequence(z, A, 400);
    double total = 0;
    for (double v : r.u) total += v;
    EXPECT_LE(total, 1.0 / (1.0 - A) + 1e-9);
    for (double v : r.u) EXPECT_GE(v, 0.0);
  }
}

TEST(BruteForceSum, UnitStepSingleTerm) {
  EXPECT_NEAR(brute_force_sum(make_z({1.0}), 0.5, 3, 3), 0.125, 1e-15);
}

TEST(BruteForceSum, ZeroAtOrigin) {
  EXPECT_DOUBLE_EQ(brute_force_sum(make_z({0.4, 0.6}), 0.8, 0, 5), 0.0);
}

TEST(BruteForceSum, TwoAtomAtTwo) {
  EXPECT_NEAR(brute_force_sum(make_z({0.5, 0.5}), 1.0, 2, 2), 0.75, 1e-15);
}

TEST(OracleEquivalence, RenewalMatchesBruteForceOnRandomLaws) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::uniform_int_distribution<int> len_d(1, 5);
  for (int trial = 0; trial < 40; ++trial) {
    const int len = len_d(rng);
    std::vector<double> probs(len);
    double total = 0;
    for (double& p : probs) {
      p = unif(rng);
      total += p;
    }
    for (double& p : probs) p /= total;
    const ConditionedLadderPmf z = make_z(std::move(probs));
    for (double A : {0.5, 0.9, 1.0}) {
      const RenewalSequence r = renewal_sequence(z, A, 30);
      for (int n = 0; n <= 30; ++n) {
        const double expect = (n == 0 ? 1.0 : 0.0) + brute_force_sum(z, A, n, n);
        EXPECT_NEAR(r.u[n], expect, 1e-12) << "n=" << n << " A=" << A;
      }
    }
  }
}

TEST(SolveLambda, UnitStepClosedForm) {
  const ConditionedLadderPmf z = make_z({1.0});
  for (int y : {1, 5, 40}) {
    const RootSolution r = solve_lambda(z, y, 2.0 / 3.0, 1.0, 1.5);
    EXPECT_NEAR(r.lambda, 1.5, 1e-13);
    EXPECT_NEAR(r.mu_y_at_lambda, 1.0, 1e-13);
    EXPECT_NEAR(r.leading_term, std::pow(2.0 / 3.0, y), 1e-12);
  }
}

TEST(SolveLambda, FullMassAtAEqualsOneGivesUnitRoot) {
  const ConditionedLadderPmf z = make_z({0.5, 0.5});
  const RootSolution r = solve_lambda(z, 2, 1.0, 1.5, 1.5);
  EXPECT_NEAR(r.lambda, 1.0, 1e-13);
  EXPECT_NEAR(r.theta, 0.0, 1e-13);
}

TEST(SolveLambda, ResidualWithinTolerance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> probs(1 + trial % 4);
    double total = 0;
    for (double& p : probs) {
      p = unif(rng);
      total += p;
    }
    for (double& p : probs) p /= total;
    const ConditionedLadderPmf z = make_z(std::move(probs));
    const double A = 0.6 + 0.4 * unif(rng);
    const int y = 5 + trial;
    const RootSolution r = solve_lambda(z, y, A, z.mean_offsets(), 2.0);
    const GenFnEval e = gen_fn(std::span<const double>(z.probs), y, r.lambda);
    EXPECT_LE(std::abs(A * e.f_y - 1.0), 1e-13);
    EXPECT_GE(r.lambda, 1.0 - 1e-15);
  }
}

TEST(SolveLambda, NoRootWhenTruncationTooSevere) {
  // all mass above the truncation level: A f_y stays below 1 everywhere
  const ConditionedLadderPmf z = make_z({0.0, 0.0, 0.0, 1.0});
  EXPECT_THROW(
      {
        try {
          solve_lambda(z, 2, 0.5, 4.0, 1.5);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), errc::no_root);
          throw;
        }
      },
      Error);
}

TEST(SolveLambda, MonotoneNonincreasingInA) {
  const ConditionedLadderPmf z = make_z({0.5, 0.5});
  double prev = 1e9;
  for (double A : {0.90, 0.93, 0.96, 0.99, 1.0}) {
    const double lam = solve_lambda(z, 25, A, 1.5, 1.5).lambda;
    EXPECT_LE(lam, prev + 1e-14);
    prev = lam;
  }
}

TEST(SolveLambda, MatchesExpansionForSmallDefect) {
  // lambda ~ exp((1-A)/(A mu)) and mu_y(lambda) ~ mu / lambda for small 1-A
  const ConditionedLadderPmf z = make_z({0.5, 0.5});
  const double A = 1.0 - 1.0 / 400.0;
  const RootSolution r = solve_lambda(z, 400, A, 1.5, 1.5);
  const double theta_pred = (1.0 - A) / (A * 1.5);
  EXPECT_NEAR(r.theta / theta_pred, 1.0, 2e-3);
  EXPECT_NEAR(r.mu_y_at_lambda * r.lambda / 1.5, 1.0, 5e-3);
}

TEST(RemainderScan, UnitStepIsExactlyZero) {
  const ConditionedLadderPmf z = make_z({1.0});
  const auto rows = remainder_scan(z, 1.0, 1.0, 1.5, {50, 100, 200}, 2.0);
  for (const RemainderRow& r : rows) {
    EXPECT_LE(r.scaled_remainder, 1e-12);
    EXPECT_TRUE(r.lemma3_ok);
  }
}

TEST(RemainderScan, TwoAtomDecaysOnDoublingGrid) {
  const ConditionedLadderPmf z = make_z({0.5, 0.5});
  const auto rows = remainder_scan(z, 1.5, 1.0, 1.5, {25, 50, 100, 200}, 2.0);
  for (size_t i = 1; i < rows.size(); ++i)
    EXPECT_LT(rows[i].scaled_remainder, rows[i - 1].scaled_remainder);
  // the high-precision internals must agree with the double-precision module
  for (const RemainderRow& r : rows) {
    const double direct = renewal_sequence(z, r.A_y, r.y).u[r.y];
    EXPECT_NEAR(r.direct, direct, 1e-11);
    const double leading = solve_lambda(z, r.y, r.A_y, 1.5, 1.5).leading_term;
    EXPECT_NEAR(r.leading, leading, 1e-11);
  }
}

TEST(RemainderScan, RejectsBadInputs) {
  const ConditionedLadderPmf z = make_z({0.5, 0.5});
  EXPECT_THROW(remainder_scan(z, 1.5, 1.0, 1.5, {1, 2}, 2.0), std::invalid_argument);
  EXPECT_THROW(remainder_scan(z, 1.5, 1.0, 1.5, {50, 40}, 2.0), std::invalid_argument);
  EXPECT_THROW(remainder_scan(z, 1.5, 1.0, 1.5, {50, 100}, 1.0), std::invalid_argument);
}
