#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "smoothbl/core.hpp"

// Dense two-phase tableau simplex for the small linear programs that appear
// in envelope and cutting-plane computations (a handful of rows or columns).
//
//   maximize    c^T x
//   subject to  A_eq x  = b_eq
//               A_ub x <= b_ub
//               x >= 0
//
// Dual values are returned for both constraint blocks (dual_ub >= 0) unless
// want_duals is false.

namespace smoothbl::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  double objective = -kInf;
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd dual_ub;

  bool ok() const noexcept { return status == Status::Optimal; }
};

namespace detail {

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)) {}

  Eigen::MatrixXd& m() { return t_; }
  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& rhs(Eigen::Index r) { return t_(r, cols()); }
  double& obj(Eigen::Index c) { return t_(rows(), c); }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
  }

 private:
  Eigen::MatrixXd t_;
};

// Objective row stores reduced costs as (z_j - c_j); optimal when all >= -tol
// over the allowed columns.
inline Status run(Tableau& tab, std::vector<Eigen::Index>& basis, const std::vector<bool>& allowed,
                  double tol, int max_iter) {
  int degenerate_streak = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    const bool bland = degenerate_streak > 50;
    Eigen::Index enter = -1;
    double best = -tol;
    for (Eigen::Index j = 0; j < tab.cols(); ++j) {
      if (!allowed[static_cast<std::size_t>(j)]) continue;
      const double rc = tab.obj(j);
      if (rc < best) {
        enter = j;
        if (bland) break;
        best = rc;
      }
    }
    if (enter < 0) return Status::Optimal;

    // Two-pass ratio test: find the minimum ratio with a small allowance, then
    // take the largest pivot element among the rows that attain it.
    const double piv_tol = 1e-9;
    double ratio = kInf;
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      const double a = tab.m()(i, enter);
      if (a > piv_tol) ratio = std::min(ratio, (std::max(0.0, tab.rhs(i)) + 1e-12) / a);
    }
    Eigen::Index leave = -1;
    double best_a = 0.0;
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      const double a = tab.m()(i, enter);
      if (a > piv_tol && std::max(0.0, tab.rhs(i)) / a <= ratio) {
        const bool better = bland ? (leave < 0 || basis[static_cast<std::size_t>(i)] <
                                                      basis[static_cast<std::size_t>(leave)])
                                  : a > best_a;
        if (better) {
          best_a = a;
          leave = i;
        }
      }
    }
    if (leave < 0) return Status::Unbounded;
    degenerate_streak = tab.rhs(leave) / best_a <= tol ? degenerate_streak + 1 : 0;
    tab.pivot(leave, enter);
    // Clean up small negative drift so the basis stays primal feasible.
    for (Eigen::Index i = 0; i < tab.rows(); ++i)
      if (tab.rhs(i) < 0.0 && tab.rhs(i) > -1e-9) tab.rhs(i) = 0.0;
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  return Status::IterationLimit;
}

}  // namespace detail

inline Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_eq,
                       const Eigen::VectorXd& b_eq, const Eigen::MatrixXd& a_ub,
                       const Eigen::VectorXd& b_ub, double tol = 1e-10, int max_iter = 50000,
                       bool want_duals = true) {
  const Eigen::Index n = c.size();
  const Eigen::Index q = b_eq.size();
  const Eigen::Index p = b_ub.size();
  if ((q > 0 && a_eq.cols() != n) || a_eq.rows() != q || (p > 0 && a_ub.cols() != n) ||
      a_ub.rows() != p) {
    throw DimensionError("lp::maximize: inconsistent constraint shapes");
  }
  const Eigen::Index rows = q + p;

  // Standard form columns: [x (n) | slacks (p) | artificials (na)].
  std::vector<double> sign(static_cast<std::size_t>(rows), 1.0);
  std::vector<Eigen::Index> needs_art;
  for (Eigen::Index i = 0; i < q; ++i) {
    if (b_eq(i) < 0) sign[static_cast<std::size_t>(i)] = -1.0;
    needs_art.push_back(i);
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    if (b_ub(i) < 0) {
      sign[static_cast<std::size_t>(q + i)] = -1.0;
      needs_art.push_back(q + i);
    }
  }
  const Eigen::Index na = static_cast<Eigen::Index>(needs_art.size());
  const Eigen::Index cols = n + p + na;

  Eigen::MatrixXd std_a = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd std_b(rows);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double s = sign[static_cast<std::size_t>(i)];
    std_a.row(i).head(n) = s * a_eq.row(i);
    std_b(i) = s * b_eq(i);
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    const double s = sign[static_cast<std::size_t>(q + i)];
    std_a.row(q + i).head(n) = s * a_ub.row(i);
    std_a(q + i, n + i) = s;
    std_b(q + i) = s * b_ub(i);
  }
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows), -1);
  for (Eigen::Index k = 0; k < na; ++k) {
    std_a(needs_art[static_cast<std::size_t>(k)], n + p + k) = 1.0;
    basis[static_cast<std::size_t>(needs_art[static_cast<std::size_t>(k)])] = n + p + k;
  }
  for (Eigen::Index i = 0; i < p; ++i)
    if (basis[static_cast<std::size_t>(q + i)] < 0) basis[static_cast<std::size_t>(q + i)] = n + i;

  detail::Tableau tab(rows, cols);
  tab.m().topLeftCorner(rows, cols) = std_a;
  tab.m().col(cols).head(rows) = std_b;

  Result res;
  std::vector<bool> allowed(static_cast<std::size_t>(cols), true);

  // Phase I: maximize -sum(artificials).
  if (na > 0) {
    for (Eigen::Index k = 0; k < na; ++k) tab.obj(n + p + k) = 1.0;
    for (Eigen::Index k = 0; k < na; ++k) {
      tab.m().row(rows) -= tab.m().row(needs_art[static_cast<std::size_t>(k)]);
    }
    const Status s1 = detail::run(tab, basis, allowed, tol, max_iter);
    if (s1 == Status::IterationLimit) {
      res.status = s1;
      return res;
    }
    const double infeas = tab.m()(rows, cols);  // equals -(sum of artificials)
    if (infeas < -1e-8 * std::max(1.0, std_b.cwiseAbs().maxCoeff())) {
      res.status = Status::Infeasible;
      return res;
    }
    // Drive remaining zero-level artificials out of the basis where possible,
    // pivoting on the largest available entry.
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (basis[static_cast<std::size_t>(i)] < n + p) continue;
      Eigen::Index jbest = -1;
      double abest = 1e-7;
      for (Eigen::Index j = 0; j < n + p; ++j) {
        const double a = std::abs(tab.m()(i, j));
        if (a > abest) {
          abest = a;
          jbest = j;
        }
      }
      if (jbest < 0) continue;
      tab.rhs(i) = 0.0;
      tab.pivot(i, jbest);
      basis[static_cast<std::size_t>(i)] = jbest;
    }
    for (Eigen::Index k = 0; k < na; ++k) allowed[static_cast<std::size_t>(n + p + k)] = false;
  }

  // Phase II objective row: z_j - c_j in terms of the current basis.
  Eigen::VectorXd c_std = Eigen::VectorXd::Zero(cols);
  c_std.head(n) = c;
  tab.m().row(rows).setZero();
  for (Eigen::Index j = 0; j < cols; ++j) tab.obj(j) = -c_std(j);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double cb = c_std(basis[static_cast<std::size_t>(i)]);
    if (cb != 0.0) tab.m().row(rows) += cb * tab.m().row(i);
  }
  const Status s2 = detail::run(tab, basis, allowed, tol, max_iter);
  res.status = s2;
  if (s2 != Status::Optimal) return res;

  Eigen::VectorXd x_std = Eigen::VectorXd::Zero(cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    x_std(basis[static_cast<std::size_t>(i)]) = std::max(0.0, tab.rhs(i));
  res.x = x_std.head(n);
  res.objective = c.dot(res.x);

  // Accumulated round-off can still leave a vertex that is not feasible for
  // the original system; report that rather than a wrong optimum.
  const double scale = 1.0 + res.x.cwiseAbs().maxCoeff();
  const double feas_tol = 1e-7 * scale;
  if ((p > 0 && ((a_ub * res.x - b_ub).maxCoeff() > feas_tol)) ||
      (q > 0 && ((a_eq * res.x - b_eq).cwiseAbs().maxCoeff() > feas_tol))) {
    res.status = Status::IterationLimit;
    return res;
  }

  // Duals from B^T y = c_B on the sign-adjusted system.
  if (want_duals && rows > 0) {
    Eigen::MatrixXd bmat(rows, rows);
    Eigen::VectorXd cb(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      bmat.col(i) = std_a.col(basis[static_cast<std::size_t>(i)]);
      cb(i) = c_std(basis[static_cast<std::size_t>(i)]);
    }
    const Eigen::VectorXd y = bmat.transpose().fullPivLu().solve(cb);
    res.dual_eq.resize(q);
    res.dual_ub.resize(p);
    for (Eigen::Index i = 0; i < q; ++i) res.dual_eq(i) = y(i) * sign[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < p; ++i)
      res.dual_ub(i) = y(q + i) * sign[static_cast<std::size_t>(q + i)];
  }
  return res;
}

}  // namespace smoothbl::lp
