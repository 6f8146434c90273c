#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "smoothbl/gaussian.hpp"

using namespace smoothbl;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

GaussianInstance scalar(double sigma, std::vector<double> a, std::vector<double> n, std::vector<double> c) {
  GaussianInstance g{mat({{sigma}}), {}, {}, c};
  for (std::size_t j = 0; j < a.size(); ++j) {
    g.maps.push_back(mat({{a[j]}}));
    g.noise.push_back(mat({{n[j]}}));
  }
  return g;
}

// Scalar objective of F written out directly.
double scalar_f(const GaussianInstance& g, double s) {
  double v = 0.5 * std::log(2 * kPi * std::exp(1.0) * s);
  for (std::size_t j = 0; j < g.m(); ++j) {
    const double a = g.maps[j](0, 0);
    v -= g.weights[j] * 0.5 * std::log(2 * kPi * std::exp(1.0) * (a * a * s + g.noise[j](0, 0)));
  }
  return v;
}

double scalar_grid_oracle(const GaussianInstance& g, double m) {
  double best = -kInf;
  for (int i = 1; i <= 10000; ++i) best = std::max(best, scalar_f(g, m * i * 1e-4));
  return best;
}

// Direct objective for 2x2 S; S = R(theta) diag(l1, l2) R(theta)^T scaled into M.
double f2(const GaussianInstance& g, const Eigen::MatrixXd& mh, double theta, double l1, double l2) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const Eigen::Matrix2d t = r * Eigen::Vector2d(l1, l2).asDiagonal() * r.transpose();
  const Eigen::MatrixXd s = mh * t * mh;
  double v = 0.5 * (2 * std::log(2 * kPi * std::exp(1.0)) + std::log(s.determinant()));
  for (std::size_t j = 0; j < g.m(); ++j) {
    const Eigen::MatrixXd o = g.maps[j] * s * g.maps[j].transpose() + g.noise[j];
    v -= g.weights[j] * 0.5 * (static_cast<double>(o.rows()) * std::log(2 * kPi * std::exp(1.0)) +
                               std::log(o.determinant()));
  }
  return v;
}

// Zooming grid search over (theta, l1, l2) in [0, pi) x (0, 1]^2.
double eigen_grid_oracle(const GaussianInstance& g, const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::MatrixXd mh =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  double ct = kPi / 2, c1 = 0.5, c2 = 0.5, wt = kPi / 2, w1 = 0.5, w2 = 0.5;
  double best = -kInf;
  for (int level = 0; level < 14; ++level) {
    double bt = ct, b1 = c1, b2 = c2;
    const int n = 40;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) {
          const double th = ct - wt + 2 * wt * i / n;
          const double l1 = std::clamp(c1 - w1 + 2 * w1 * j / n, 1e-9, 1.0);
          const double l2 = std::clamp(c2 - w2 + 2 * w2 * k / n, 1e-9, 1.0);
          const double v = f2(g, mh, th, l1, l2);
          if (v > best) {
            best = v;
            bt = th;
            b1 = l1;
            b2 = l2;
          }
        }
    ct = bt, c1 = b1, c2 = b2;
    wt *= 0.3, w1 *= 0.3, w2 *= 0.3;
  }
  return best;
}

}  // namespace

TEST(GaussianEntropy, Examples) {
  EXPECT_NEAR(gaussian_entropy(mat({{1.0}})), 1.4189385332046727, 1e-14);
  const auto c = mat({{2.0, 0.3}, {0.3, 1.0}});
  EXPECT_NEAR(gaussian_entropy(3.5 * c), gaussian_entropy(c) + std::log(3.5), 1e-13);
  EXPECT_NEAR(gaussian_entropy(mat({{1.0, 0.0}, {0.0, 4.0}})),
              0.5 * std::log(std::pow(2 * kPi * std::exp(1.0), 2) * 4.0), 1e-13);
  EXPECT_EQ(gaussian_entropy(mat({{1.0, 1.0}, {1.0, 1.0}})), -kInf);
  EXPECT_THROW(gaussian_entropy(mat({{1.0, 0.5}, {0.0, 1.0}})), DomainError);
}

TEST(GaussianF, ScalarClosedFormAndGrid) {
  for (double m : {0.5, 1.0, 3.0}) {
    for (double s2 : {0.1, 1.0}) {
      const auto g = scalar(1.0, {1.0}, {s2}, {1.0});
      const auto r = gaussian_F(mat({{m}}), g);
      EXPECT_FALSE(r.diverged());
      EXPECT_NEAR(r.value, 0.5 * std::log(m / (m + s2)), 1e-9);
      EXPECT_NEAR(r.value, scalar_grid_oracle(g, m), 1e-6);
    }
  }
  // Two outputs with an interior optimum.
  const auto g = scalar(1.0, {1.0, 2.0}, {0.2, 1.5}, {0.4, 1.1});
  const auto r = gaussian_F(mat({{2.0}}), g);
  EXPECT_NEAR(r.value, scalar_grid_oracle(g, 2.0), 1e-6);
  EXPECT_LT(r.optimal_cov(0, 0), 2.0 - 1e-3);
}

TEST(GaussianF, EigenGridOracleTwoDimensional) {
  GaussianInstance g{mat({{1.0, 0.4}, {0.4, 2.0}}),
                     {mat({{1.0, 0.5}}), mat({{0.2, 1.0}}), mat({{1.0, -1.0}})},
                     {mat({{0.3}}), mat({{0.5}}), mat({{0.05}})},
                     {0.9, 0.8, 0.6}};
  for (const auto& m : {g.sigma, mat({{0.7, 0.1}, {0.1, 0.3}})}) {
    const auto r = gaussian_F(m, g);
    ASSERT_FALSE(r.diverged());
    EXPECT_NEAR(r.value, eigen_grid_oracle(g, m), 1e-6);
    // Feasibility: 0 <= S <= M.
    EXPECT_GE(detail::sym_eigenvalues(r.optimal_cov).minCoeff(), 0.0);
    EXPECT_GE(detail::sym_eigenvalues(m - r.optimal_cov).minCoeff(), -1e-12);
  }
}

TEST(GaussianF, ScalingIdentityForCoordinateOutputs) {
  for (const auto& [sigma, c] : std::vector<std::pair<Eigen::MatrixXd, std::vector<double>>>{
           {mat({{1.0, 0.5}, {0.5, 1.0}}), {0.6, 0.7}},
           {mat({{2.0, 0.3, 0.1}, {0.3, 1.0, -0.2}, {0.1, -0.2, 0.5}}), {0.5, 0.9, 0.3}},
           {mat({{1.0}}), {1.0}}}) {
    const auto g = GaussianInstance::coordinates(sigma, c);
    const double base = gaussian_F(sigma, g).value;
    double sum_c = 0.0;
    for (double v : c) sum_c += v;
    const double m = static_cast<double>(c.size());
    for (double eps : {0.01, 0.1}) {
      const double scaled = gaussian_F((1.0 + eps) * sigma, g).value;
      EXPECT_NEAR(scaled - base, 0.5 * std::log(1.0 + eps) * (m - sum_c), 1e-8);
    }
  }
}

TEST(GaussianF, DivergesWhenWeightsExceedDimension) {
  const auto one = GaussianInstance::coordinates(mat({{1.0}}), {1.5});
  const auto r = gaussian_F(one.sigma, one);
  EXPECT_TRUE(r.diverged());
  EXPECT_EQ(r.value, kInf);
  EXPECT_EQ(gaussian_dstar(one), kInf);
  const auto two = GaussianInstance::coordinates(mat({{1.0, 0.3}, {0.3, 1.0}}), {1.2, 0.9});
  EXPECT_EQ(gaussian_dstar(two), kInf);
  // Noisy outputs keep the constant finite.
  EXPECT_FALSE(gaussian_F(mat({{1.0}}), scalar(1.0, {1.0}, {0.5}, {1.5})).diverged());
}

TEST(GaussianF, MonotoneInM) {
  const auto g = scalar(1.0, {1.0, 2.0}, {0.2, 1.5}, {0.4, 1.1});
  double prev = -kInf;
  for (double m : {0.1, 0.3, 1.0, 2.0, 5.0}) {
    const double v = gaussian_F(mat({{m}}), g).value;
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
  GaussianInstance g2{mat({{1.0, 0.4}, {0.4, 2.0}}), {mat({{1.0, 0.5}})}, {mat({{0.3}})}, {1.4}};
  const auto m1 = mat({{0.5, 0.1}, {0.1, 0.4}});
  EXPECT_LE(gaussian_F(m1, g2).value, gaussian_F(m1 + mat({{0.2, 0.0}, {0.0, 0.1}}), g2).value + 1e-12);
}

TEST(GaussianC, Examples) {
  EXPECT_NEAR(gaussian_C(scalar(1.0, {1.0}, {1.0}, {1.0})), 0.5 * std::log(2.0), 1e-14);
  GaussianInstance g{mat({{1.0, 0.2}, {0.2, 0.5}}),
                     {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)},
                     {mat({{0.3, 0.0}, {0.0, 0.3}}), mat({{0.3, 0.0}, {0.0, 0.3}})},
                     {1.0, 1.0}};
  EXPECT_NEAR(gaussian_C(g), 2 * gaussian_entropy(g.sigma + g.noise[0]) - gaussian_entropy(g.sigma), 1e-13);
  // Joint rescaling of source and noise shifts C by (sum c_j k_j - k)/2 log s.
  auto s = g;
  s.sigma *= 3.0;
  for (auto& n : s.noise) n *= 3.0;
  EXPECT_NEAR(gaussian_C(s) - gaussian_C(g), 0.5 * (4.0 - 2.0) * std::log(3.0), 1e-12);
}

TEST(GaussianDstar, DataProcessingZero) {
  Philox4x32 rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto g = scalar(0.2 + 3 * rng.uniform(), {rng.normal()}, {0.05 + rng.uniform()}, {1.0});
    EXPECT_NEAR(gaussian_dstar(g), 0.0, 1e-8);
  }
}

TEST(GaussianDstar, CorrelationGridOracle) {
  // U jointly Gaussian with X; s = Var(X|U) = 1 - rho^2 for unit variance.
  for (double c : {0.5, 3.0}) {
    const auto g = scalar(1.0, {1.0}, {1.0}, {c});
    double best = -kInf;
    for (int i = 0; i < 100000; ++i) {
      const double rho = i * 1e-5;
      const double s = 1.0 - rho * rho;
      best = std::max(best, c * 0.5 * std::log(2.0 / (s + 1.0)) - 0.5 * std::log(1.0 / s));
    }
    EXPECT_NEAR(gaussian_dstar(g), best, 1e-6);
  }
  EXPECT_GT(gaussian_dstar(scalar(1.0, {1.0}, {1.0}, {3.0})), 0.08);
}

TEST(VarianceV, TrivialAndAdditive) {
  EXPECT_NEAR(variance_V(GaussianInstance::coordinates(mat({{2.0}}), {1.0})), 0.0, 1e-14);
  const auto a = GaussianInstance::coordinates(mat({{2.0}}), {2.0});
  EXPECT_NEAR(variance_V(a), 0.5, 1e-13);
  const auto b = scalar(0.7, {1.3}, {0.3}, {0.5});
  GaussianInstance ab{mat({{2.0, 0.0}, {0.0, 0.7}}), {mat({{1.0, 0.0}}), mat({{0.0, 1.3}})},
                      {mat({{0.0}}), mat({{0.3}})}, {2.0, 0.5}};
  EXPECT_NEAR(variance_V(ab), variance_V(a) + variance_V(b), 1e-12);
}

TEST(VarianceV, MonteCarlo) {
  // Standard Gaussian X = Y, c = 2: statistic 2 log q(X) - log q(X) = log q(X).
  const auto g = GaussianInstance::coordinates(mat({{1.0}}), {2.0});
  const double v = variance_V(g);
  Philox4x32 rng(11);
  const int n = 1000000;
  std::vector<double> z(n);
  double mean = 0.0;
  for (auto& s : z) {
    const double x = rng.normal();
    s = -0.5 * std::log(2 * kPi) - 0.5 * x * x;
    mean += s;
  }
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double s : z) {
    const double d = (s - mean) * (s - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  const double se = std::sqrt((m4 - m2 * m2) / n);
  EXPECT_NEAR(m2, v, 3 * se);
}
