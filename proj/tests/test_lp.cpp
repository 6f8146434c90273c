#include <gtest/gtest.h>

#include "smoothbl/lp.hpp"
#include "smoothbl/rng.hpp"

using namespace smoothbl;

TEST(Lp, SmallTextbookProblem) {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), value 36.
  Eigen::VectorXd c(2);
  c << 3, 5;
  Eigen::MatrixXd a(3, 2);
  a << 1, 0, 0, 2, 3, 2;
  Eigen::VectorXd b(3);
  b << 4, 12, 18;
  const auto r = lp::maximize(c, Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), a, b);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.x(0), 2.0, 1e-12);
  EXPECT_NEAR(r.x(1), 6.0, 1e-12);
  EXPECT_NEAR(r.objective, 36.0, 1e-12);
  // Strong duality and dual feasibility.
  EXPECT_NEAR(b.dot(r.dual_ub), 36.0, 1e-10);
  EXPECT_TRUE((r.dual_ub.array() >= -1e-12).all());
  EXPECT_TRUE(((a.transpose() * r.dual_ub - c).array() >= -1e-10).all());
}

TEST(Lp, EqualityAndNegativeRhs) {
  // max -x - y  s.t. x + y = 1, x - y <= -0.5  -> any point with x<=0.25; value -1.
  Eigen::VectorXd c(2);
  c << -1, -1;
  Eigen::MatrixXd aeq(1, 2);
  aeq << 1, 1;
  Eigen::VectorXd beq(1);
  beq << 1;
  Eigen::MatrixXd aub(1, 2);
  aub << 1, -1;
  Eigen::VectorXd bub(1);
  bub << -0.5;
  const auto r = lp::maximize(c, aeq, beq, aub, bub);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.objective, -1.0, 1e-12);
  EXPECT_LE(r.x(0) - r.x(1), -0.5 + 1e-12);
  EXPECT_NEAR(beq.dot(r.dual_eq) + bub.dot(r.dual_ub), -1.0, 1e-10);
}

TEST(Lp, InfeasibleAndUnbounded) {
  Eigen::VectorXd c(1);
  c << 1;
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;
  Eigen::VectorXd b(2);
  b << 1, -2;  // x <= 1 and x >= 2
  EXPECT_EQ(lp::maximize(c, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), a, b).status,
            lp::Status::Infeasible);
  Eigen::MatrixXd a2(1, 1);
  a2 << -1;
  Eigen::VectorXd b2(1);
  b2 << 0;
  EXPECT_EQ(lp::maximize(c, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), a2, b2).status,
            lp::Status::Unbounded);
}

TEST(Lp, NearlyParallelCutsStayFeasible) {
  // Cutting-plane masters: many almost identical rows plus rows with negative
  // right-hand sides. Any reported optimum must be primal feasible and match
  // the dual bound.
  Philox4x32 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.below(4));
    const Eigen::Index n = 2 * k + 1;
    const Eigen::Index cuts = 4 + static_cast<Eigen::Index>(rng.below(12));
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cuts + k + 1 + k, n);
    Eigen::VectorXd b(a.rows());
    Eigen::Index r = 0;
    std::vector<double> g(static_cast<std::size_t>(k));
    for (auto& v : g) v = rng.uniform();
    for (Eigen::Index j = 0; j < cuts; ++j, ++r) {
      for (Eigen::Index i = 0; i < k; ++i) a(r, i) = g[static_cast<std::size_t>(i)] + 1e-7 * rng.uniform();
      a(r, n - 1) = -1.0;
      b(r) = 1.0 + 1e-6 * rng.uniform();
    }
    for (Eigen::Index i = 0; i < k; ++i, ++r) {
      a(r, i) = 0.5 + rng.uniform();
      a(r, k + i) = -1.0;
      b(r) = -0.4 * rng.uniform();
    }
    for (Eigen::Index i = 0; i < k; ++i) a(r, k + i) = 1.0;
    b(r++) = 0.05 + rng.uniform();
    for (Eigen::Index i = 0; i < k; ++i, ++r) {
      a(r, i) = 1.0;
      b(r) = 1.0 + rng.uniform();
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(n - 1) = -1.0;
    for (Eigen::Index i = 0; i < k; ++i) c(i) = -0.1 * rng.uniform();
    const auto res = lp::maximize(c, Eigen::MatrixXd(0, n), Eigen::VectorXd(0), a, b);
    if (!res.ok()) continue;
    EXPECT_LE((a * res.x - b).maxCoeff(), 1e-9);
    EXPECT_GE(res.x.minCoeff(), 0.0);
    EXPECT_NEAR(b.dot(res.dual_ub), res.objective, 1e-7);
  }
}
