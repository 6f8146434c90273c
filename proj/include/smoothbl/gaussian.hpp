#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smoothbl/core.hpp"
#include "smoothbl/rng.hpp"

// Gaussian sources with Lebesgue reference measures: Y_j = A_j X + Z_j with
// X ~ N(0, Sigma), Z_j ~ N(0, N_j). N_j may be singular (including zero, the
// Y^m = X configuration); Sigma must be positive definite.

namespace smoothbl {

inline constexpr double kLog2PiE = 2.8378770664093454836;  // log(2 pi e)

struct GaussianInstance {
  Eigen::MatrixXd sigma;
  std::vector<Eigen::MatrixXd> maps;
  std::vector<Eigen::MatrixXd> noise;
  std::vector<double> weights;

  Eigen::Index dim() const noexcept { return sigma.rows(); }
  std::size_t m() const noexcept { return maps.size(); }

  /// Covariance of Y_j under the source.
  Eigen::MatrixXd output_cov(std::size_t j) const {
    return maps[j] * sigma * maps[j].transpose() + noise[j];
  }

  void validate() const;

  /// X = (Y_1, ..., Y_m) with scalar blocks: A_j = e_j^T, N_j = 0, c_j = c[j].
  static GaussianInstance coordinates(const Eigen::MatrixXd& sigma, const std::vector<double>& c) {
    GaussianInstance g{sigma, {}, {}, c};
    for (Eigen::Index j = 0; j < sigma.rows(); ++j) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, sigma.rows());
      a(0, j) = 1.0;
      g.maps.push_back(a);
      g.noise.push_back(Eigen::MatrixXd::Zero(1, 1));
    }
    return g;
  }
};

namespace detail {

inline double sym_tolerance(const Eigen::MatrixXd& a) {
  return 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

inline void require_symmetric(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionError(std::string(what) + ": matrix must be square");
  if (!a.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > sym_tolerance(a))
    throw DomainError(std::string(what) + ": matrix must be symmetric");
}

inline Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd s = 0.5 * (a + a.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues();
}

// log det of a symmetric PSD matrix; -inf when numerically singular.
inline double logdet_psd(const Eigen::MatrixXd& a) {
  const Eigen::VectorXd ev = sym_eigenvalues(a);
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) <= 1e-13 * top) return -kInf;
    s += std::log(ev(i));
  }
  return s;
}

inline Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

inline void GaussianInstance::validate() const {
  detail::require_symmetric(sigma, "GaussianInstance sigma");
  if (detail::sym_eigenvalues(sigma).minCoeff() <= 0.0)
    throw DomainError("GaussianInstance: sigma must be positive definite");
  if (maps.empty()) throw DomainError("GaussianInstance: need at least one output");
  if (noise.size() != maps.size() || weights.size() != maps.size())
    throw DimensionError("GaussianInstance: maps, noise and weights must have equal length");
  for (std::size_t j = 0; j < maps.size(); ++j) {
    if (maps[j].cols() != dim() || maps[j].rows() == 0)
      throw DimensionError("GaussianInstance: map " + std::to_string(j) + " has wrong shape");
    detail::require_symmetric(noise[j], "GaussianInstance noise");
    if (noise[j].rows() != maps[j].rows())
      throw DimensionError("GaussianInstance: noise " + std::to_string(j) + " has wrong shape");
    if (detail::sym_eigenvalues(noise[j]).minCoeff() < -detail::sym_tolerance(noise[j]))
      throw DomainError("GaussianInstance: noise must be positive semidefinite");
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]))
      throw DomainError("GaussianInstance: weights must be positive");
  }
}

/// Differential entropy (nats) of N(0, cov); -inf for singular cov.
inline double gaussian_entropy(const Eigen::MatrixXd& cov) {
  detail::require_symmetric(cov, "gaussian_entropy");
  const Eigen::VectorXd ev = detail::sym_eigenvalues(cov);
  if (ev.minCoeff() < -detail::sym_tolerance(cov)) throw DomainError("gaussian_entropy: covariance is not PSD");
  const double ld = detail::logdet_psd(cov);
  if (ld == -kInf) return -kInf;
  return 0.5 * (static_cast<double>(cov.rows()) * kLog2PiE + ld);
}

struct GaussianOptions {
  int restarts = 4;
  std::uint64_t seed = 0;
  int max_iterations = 20000;
  double tolerance = 1e-15;
  double eig_floor = 1e-10;  ///< eigenvalues of T = M^{-1/2} S M^{-1/2} live in [eig_floor, 1]
  double cap_nats = 50.0;
  Eigen::Index max_dim = 8;
};

struct GaussianFResult {
  double value = -kInf;
  Eigen::MatrixXd optimal_cov;
  std::optional<std::string> diverged_reason;

  bool diverged() const noexcept { return diverged_reason.has_value(); }
};

namespace detail {

// F restricted to constant U as a function of T, where S = M^{1/2} T M^{1/2}.
class LogDetProblem {
 public:
  LogDetProblem(const Eigen::MatrixXd& m, const GaussianInstance& g) : g_(g), mh_(sym_sqrt(m)) {
    const double k = static_cast<double>(m.rows());
    constant_ = 0.5 * (k * kLog2PiE + logdet_psd(m));
    for (std::size_t j = 0; j < g.m(); ++j) {
      b_.push_back(g.maps[j] * mh_);
      constant_ -= 0.5 * g.weights[j] * static_cast<double>(g.maps[j].rows()) * kLog2PiE;
    }
  }

  Eigen::Index dim() const { return mh_.rows(); }
  Eigen::MatrixXd cov(const Eigen::MatrixXd& t) const { return mh_ * t * mh_; }

  double value(const Eigen::MatrixXd& t) const {
    double v = constant_ + 0.5 * logdet_psd(t);
    for (std::size_t j = 0; j < b_.size(); ++j) {
      const double ld = logdet_psd(b_[j] * t * b_[j].transpose() + g_.noise[j]);
      if (ld == -kInf) return kInf;
      v -= 0.5 * g_.weights[j] * ld;
    }
    return v;
  }

  // Euclidean gradient in T.
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& t) const {
    Eigen::MatrixXd grad = 0.5 * t.inverse();
    for (std::size_t j = 0; j < b_.size(); ++j) {
      const Eigen::MatrixXd out = b_[j] * t * b_[j].transpose() + g_.noise[j];
      grad -= 0.5 * g_.weights[j] * b_[j].transpose() * out.inverse() * b_[j];
    }
    return 0.5 * (grad + grad.transpose());
  }

  // d/d(log a) of the objective when the eigen-directions in `p` are scaled by a.
  double shrink_slope(const Eigen::MatrixXd& t, const Eigen::MatrixXd& p) const {
    const Eigen::MatrixXd tp = p * t * p;
    double s = 0.5 * p.trace();
    for (std::size_t j = 0; j < b_.size(); ++j) {
      const Eigen::MatrixXd out = b_[j] * t * b_[j].transpose() + g_.noise[j];
      s -= 0.5 * g_.weights[j] * (out.ldlt().solve(b_[j] * tp * b_[j].transpose())).trace();
    }
    return s;
  }

 private:
  const GaussianInstance& g_;
  Eigen::MatrixXd mh_;
  std::vector<Eigen::MatrixXd> b_;
  double constant_ = 0.0;
};

inline Eigen::MatrixXd clip_eigen(const Eigen::MatrixXd& t, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(lo).cwiseMin(hi);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// Projected ascent with the step direction T G T (scale-free for log det terms).
inline std::pair<Eigen::MatrixXd, double> ascend_logdet(const LogDetProblem& prob, Eigen::MatrixXd t,
                                                       const GaussianOptions& opts) {
  t = clip_eigen(t, opts.eig_floor, 1.0);
  double f = prob.value(t);
  double step = 1.0;
  int quiet = 0;
  for (int it = 0; it < opts.max_iterations && f < opts.cap_nats; ++it) {
    const Eigen::MatrixXd g = prob.gradient(t);
    const Eigen::MatrixXd dir = t * g * t;
    bool moved = false;
    while (step > 1e-16) {
      const Eigen::MatrixXd cand = clip_eigen(t + step * dir, opts.eig_floor, 1.0);
      const double fc = prob.value(cand);
      if (fc > f) {
        quiet = fc - f <= opts.tolerance * (1.0 + std::abs(f)) ? quiet + 1 : 0;
        t = cand;
        f = fc;
        step = std::min(step * 2.0, 1e6);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved || quiet >= 20) break;
  }
  return {t, f};
}

}  // namespace detail

/// F(M): sup over 0 <= S <= M of h(X) - sum_j c_j h(Y_j) for X ~ N(0, S).
inline GaussianFResult gaussian_F(const Eigen::MatrixXd& m, const GaussianInstance& inst,
                                  const GaussianOptions& opts = {}) {
  inst.validate();
  detail::require_symmetric(m, "gaussian_F");
  if (m.rows() != inst.dim()) throw DimensionError("gaussian_F: M has the wrong dimension");
  if (detail::sym_eigenvalues(m).minCoeff() <= 0.0) throw DomainError("gaussian_F: M must be positive definite");
  if (inst.dim() > opts.max_dim) throw ResourceCapError("gaussian_F: dimension exceeds max_dim");

  const detail::LogDetProblem prob(m, inst);
  const Eigen::Index k = prob.dim();
  std::vector<Eigen::MatrixXd> starts{Eigen::MatrixXd::Identity(k, k), 0.5 * Eigen::MatrixXd::Identity(k, k),
                                      1e-3 * Eigen::MatrixXd::Identity(k, k)};
  Philox4x32 rng(opts.seed, 0x6a55);
  for (int r = 0; r < opts.restarts; ++r) {
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) a(i, j) = rng.normal();
    Eigen::MatrixXd w = a * a.transpose();
    starts.push_back(w / (detail::sym_eigenvalues(w).maxCoeff() + 1e-12));
  }

  GaussianFResult res;
  Eigen::MatrixXd best_t;
  for (const auto& s : starts) {
    auto [t, f] = detail::ascend_logdet(prob, s, opts);
    if (best_t.size() == 0 || f > res.value) {
      res.value = f;
      best_t = t;
    }
  }
  res.optimal_cov = prob.cov(best_t);

  if (res.value == kInf) {
    res.diverged_reason = "an output covariance is singular for every feasible S";
  } else if (res.value >= opts.cap_nats) {
    res.diverged_reason = "objective exceeded the divergence cap";
  } else {
    // Eigen-directions stuck at the floor: if shrinking them further still
    // increases the objective at a nonvanishing log-rate, the sup is infinite.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(best_t);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      if (es.eigenvalues()(i) <= 10.0 * opts.eig_floor)
        p += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
    if (p.trace() > 0.5 && prob.shrink_slope(best_t, p) < -1e-6)
      res.diverged_reason = "objective grows without bound as part of S shrinks to zero";
  }
  if (res.diverged_reason) res.value = kInf;
  return res;
}

/// C = sum_j c_j h(Y_j) - h(X).
inline double gaussian_C(const GaussianInstance& inst) {
  inst.validate();
  double c = -gaussian_entropy(inst.sigma);
  for (std::size_t j = 0; j < inst.m(); ++j) {
    const double h = gaussian_entropy(inst.output_cov(j));
    if (h == -kInf) return -kInf;
    c += inst.weights[j] * h;
  }
  return c;
}

/// d* for a Gaussian source: F(Sigma) + C.
inline double gaussian_dstar(const GaussianInstance& inst, const GaussianOptions& opts = {}) {
  const auto f = gaussian_F(inst.sigma, inst, opts);
  if (f.diverged()) return kInf;
  return f.value + gaussian_C(inst);
}

/// Var( sum_j c_j log q_{Y_j}(Y_j) - log q_X(X) ) with Lebesgue references.
inline double variance_V(const GaussianInstance& inst) {
  inst.validate();
  // W = (X, Z_1, ..., Z_m) is centred Gaussian with block-diagonal covariance;
  // the statistic is (1/2) W^T B W plus a constant.
  const Eigen::Index k = inst.dim();
  Eigen::Index total = k;
  for (const auto& n : inst.noise) total += n.rows();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(total, total);
  omega.topLeftCorner(k, k) = inst.sigma;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(total, total);
  b.topLeftCorner(k, k) = inst.sigma.inverse();
  Eigen::Index off = k;
  for (std::size_t j = 0; j < inst.m(); ++j) {
    const Eigen::Index kj = inst.noise[j].rows();
    omega.block(off, off, kj, kj) = inst.noise[j];
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(kj, total);
    l.leftCols(k) = inst.maps[j];
    l.block(0, off, kj, kj) = Eigen::MatrixXd::Identity(kj, kj);
    const Eigen::MatrixXd cov = inst.output_cov(j);
    if (detail::logdet_psd(cov) == -kInf) throw DomainError("variance_V: degenerate output covariance");
    b -= inst.weights[j] * l.transpose() * cov.inverse() * l;
    off += kj;
  }
  // Var((1/2) W^T B W) = (1/2) tr((B Omega)^2).
  const Eigen::MatrixXd bo = b * omega;
  return 0.5 * (bo * bo).trace();
}

}  // namespace smoothbl
