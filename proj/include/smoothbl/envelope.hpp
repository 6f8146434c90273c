#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "smoothbl/core.hpp"
#include "smoothbl/gbll.hpp"
#include "smoothbl/lp.hpp"
#include "smoothbl/measures.hpp"
#include "smoothbl/rng.hpp"

// Auxiliary-variable constant
//   d*(Q_X, c) = sup_{P_{U|X}} sum_l c_l I(U;Y_l) - I(U;X),
// which is the upper concave envelope at Q_X of
//   sigma(P) = sum_l c_l D(P Q_l || Q_{Y_l}) - D(P || Q_X),
// and the cost-constrained single-letter value g(1).

namespace smoothbl {

/// Mixture of distributions on X with weights over an auxiliary alphabet U.
struct AuxDecomposition {
  std::vector<double> u_weights;
  std::vector<FiniteMeasure> components;

  std::size_t size() const noexcept { return u_weights.size(); }

  FiniteMeasure barycenter() const {
    if (components.empty()) throw DomainError("AuxDecomposition: empty");
    std::vector<double> b(components.front().size(), 0.0);
    for (std::size_t u = 0; u < size(); ++u)
      for (std::size_t x = 0; x < b.size(); ++x) b[x] += u_weights[u] * components[u][x];
    return FiniteMeasure(std::move(b));
  }

  /// Throws unless the weights are a probability vector, components are
  /// distributions, |U| <= cap and the barycenter matches target within 1e-10.
  void validate(const FiniteMeasure& target, std::size_t cap) const {
    require_same_size(u_weights.size(), components.size(), "AuxDecomposition");
    if (size() == 0 || size() > cap) throw DomainError("AuxDecomposition: |U| outside [1, cap]");
    double t = 0.0;
    for (double w : u_weights) {
      if (!(w >= 0.0)) throw DomainError("AuxDecomposition: negative weight");
      t += w;
    }
    if (std::abs(t - 1.0) > 1e-10) throw DomainError("AuxDecomposition: weights must sum to 1");
    for (const auto& c : components) {
      require_same_size(c.size(), target.size(), "AuxDecomposition component");
      if (std::abs(c.total() - 1.0) > 1e-10) throw DomainError("AuxDecomposition: component not a distribution");
    }
    const auto b = barycenter();
    for (std::size_t x = 0; x < target.size(); ++x)
      if (std::abs(b[x] - target[x]) > 1e-10) throw DomainError("AuxDecomposition: barycenter mismatch");
  }
};

/// Cost tau over X (entries may be +inf) with threshold epsilon (+inf = inactive).
struct CostFunction {
  std::vector<double> values;
  double epsilon = 0.0;

  void validate(std::size_t x_size) const {
    require_same_size(values.size(), x_size, "CostFunction");
    bool ok = false;
    for (double v : values) {
      if (std::isnan(v) || v == -kInf) throw DomainError("CostFunction: values must be real or +inf");
      ok = ok || (v != kInf && v <= epsilon);
    }
    if (std::isnan(epsilon)) throw DomainError("CostFunction: epsilon is NaN");
    if (!ok) throw DomainError("CostFunction: no symbol has finite cost <= epsilon");
  }
};

/// Singleton indicator-ratio costs tau_x(x') = 1{x'=x}/Q(x) - 1 with threshold eps;
/// at eps = 0 they force P_X = Q_X. Null symbols get tau = +inf on themselves.
inline std::vector<CostFunction> indicator_ratio_costs(const FiniteMeasure& q, double eps) {
  std::vector<CostFunction> out;
  for (std::size_t x = 0; x < q.size(); ++x) {
    CostFunction c{std::vector<double>(q.size(), 0.0), eps};
    if (q[x] > 0.0) {
      for (std::size_t z = 0; z < q.size(); ++z) c.values[z] = (z == x ? 1.0 / q[x] : 0.0) - 1.0;
    } else {
      c.values[x] = kInf;
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace detail {

inline void check_star_inputs(const FiniteMeasure& q, const std::vector<Channel>& channels,
                              const std::vector<double>& weights) {
  if (!q.is_probability()) throw DomainError("Q_X must be a probability distribution");
  if (channels.empty()) throw DomainError("need at least one channel");
  require_same_size(weights.size(), channels.size(), "weights vs channels");
  for (std::size_t j = 0; j < channels.size(); ++j) {
    require_same_size(channels[j].inputs(), q.size(), "channel input");
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) throw DomainError("weights must be >= 0");
  }
}

}  // namespace detail

/// Instance with mu = Q_X and nu_j = Q_X Q_j.
inline GbllInstance star_instance(const FiniteMeasure& q, const std::vector<Channel>& channels,
                                  const std::vector<double>& weights) {
  detail::check_star_inputs(q, channels, weights);
  GbllInstance inst{q, channels, {}, weights};
  for (const auto& ch : channels) inst.nus.push_back(push_forward(q, ch));
  return inst;
}

/// sigma(P) for P << Q_X; weights may be zero here.
inline double sigma(const FiniteMeasure& q, const std::vector<Channel>& channels,
                    const std::vector<double>& weights, const FiniteMeasure& p) {
  const auto inst = star_instance(q, channels, weights);
  require_same_size(p.size(), q.size(), "sigma");
  if (!p.absolutely_continuous_wrt(q)) throw DomainError("sigma: P is not dominated by Q_X");
  const detail::GbllProblem prob(inst.mu, inst.channels, inst.nus, inst.weights);
  std::vector<double> ps;
  for (std::size_t x : prob.support()) ps.push_back(p[x]);
  return prob.objective(ps);
}

struct DstarOptions {
  std::size_t u_cap = 0;  ///< 0 means |X| + 1
  int restarts = 32;
  std::uint64_t seed = 0;
  double tolerance = 1e-14;
  int max_iterations = 20000;
};

struct DstarResult {
  double value = 0.0;
  AuxDecomposition decomposition;
};

namespace detail {

// State of the alternating ascent for d*: the conditional r(u|x) on supp Q.
class StarAscent {
 public:
  StarAscent(const FiniteMeasure& q, const std::vector<Channel>& channels,
             const std::vector<double>& weights)
      : prob_(q, channels, push_all(q, channels), weights), q_(q) {
    for (std::size_t x : prob_.support()) qs_.push_back(q[x]);
  }

  std::size_t s() const { return prob_.s(); }
  const GbllProblem& problem() const { return prob_; }

  /// Decomposition (p(u), p(x|u)) on support coordinates, dropping empty u.
  void decompose(const std::vector<std::vector<double>>& r, std::vector<double>& pu,
                 std::vector<std::vector<double>>& comp) const {
    pu.clear();
    comp.clear();
    const std::size_t nu = r.front().size();
    for (std::size_t u = 0; u < nu; ++u) {
      double w = 0.0;
      for (std::size_t i = 0; i < s(); ++i) w += qs_[i] * r[i][u];
      if (w <= 0.0) continue;
      std::vector<double> c(s());
      for (std::size_t i = 0; i < s(); ++i) c[i] = qs_[i] * r[i][u] / w;
      pu.push_back(w);
      comp.push_back(std::move(c));
    }
  }

  double value(const std::vector<std::vector<double>>& r) const {
    std::vector<double> pu;
    std::vector<std::vector<double>> comp;
    decompose(r, pu, comp);
    double v = 0.0;
    for (std::size_t u = 0; u < pu.size(); ++u) v += pu[u] * prob_.objective(comp[u]);
    return v;
  }

  // r(u|x) <- p(u) exp(sum_l c_l sum_y Q_l(x,y) log p_l(y|u)) / Z(x)
  void step(std::vector<std::vector<double>>& r) const {
    const std::size_t nu = r.front().size();
    std::vector<double> pu(nu, 0.0);
    for (std::size_t i = 0; i < s(); ++i)
      for (std::size_t u = 0; u < nu; ++u) pu[u] += qs_[i] * r[i][u];
    // log p_l(y|u)
    std::vector<std::vector<std::vector<double>>> lp(prob_.m());
    for (std::size_t l = 0; l < prob_.m(); ++l) {
      lp[l].assign(nu, std::vector<double>(prob_.out_size(l), 0.0));
      for (std::size_t i = 0; i < s(); ++i)
        for (const auto& e : prob_.row(l, i))
          for (std::size_t u = 0; u < nu; ++u) lp[l][u][e.col] += qs_[i] * r[i][u] * e.value;
      for (std::size_t u = 0; u < nu; ++u)
        for (auto& v : lp[l][u]) v = pu[u] > 0.0 ? safe_log(v / pu[u]) : -kInf;
    }
    std::vector<double> lw(nu);
    for (std::size_t i = 0; i < s(); ++i) {
      for (std::size_t u = 0; u < nu; ++u) {
        if (pu[u] <= 0.0) {
          lw[u] = -kInf;
          continue;
        }
        double acc = std::log(pu[u]);
        for (std::size_t l = 0; l < prob_.m() && acc > -kInf; ++l) {
          if (prob_.weight(l) == 0.0) continue;
          for (const auto& e : prob_.row(l, i)) {
            if (lp[l][u][e.col] == -kInf) {
              acc = -kInf;
              break;
            }
            acc += prob_.weight(l) * e.value * lp[l][u][e.col];
          }
        }
        lw[u] = acc;
      }
      const double z = log_sum_exp(lw);
      for (std::size_t u = 0; u < nu; ++u) r[i][u] = std::exp(lw[u] - z);
    }
  }

  double ascend(std::vector<std::vector<double>>& r, double tol, int max_iter) const {
    double val = value(r);
    for (int it = 0; it < max_iter; ++it) {
      auto next = r;
      step(next);
      const double nv = value(next);
      if (!(nv >= val - 1e-13)) break;
      r.swap(next);
      const double gain = nv - val;
      val = nv;
      if (gain < tol) break;
    }
    return val;
  }

  AuxDecomposition to_decomposition(const std::vector<std::vector<double>>& r) const {
    std::vector<double> pu;
    std::vector<std::vector<double>> comp;
    decompose(r, pu, comp);
    AuxDecomposition out;
    for (std::size_t u = 0; u < pu.size(); ++u) {
      out.u_weights.push_back(pu[u]);
      out.components.push_back(prob_.embed(comp[u]));
    }
    return out;
  }

 private:
  static std::vector<FiniteMeasure> push_all(const FiniteMeasure& q, const std::vector<Channel>& chs) {
    std::vector<FiniteMeasure> out;
    for (const auto& ch : chs) out.push_back(push_forward(q, ch));
    return out;
  }

  GbllProblem prob_;
  FiniteMeasure q_;
  std::vector<double> qs_;
};

}  // namespace detail

/**
 * d* by alternating maximization over r(u|x) (an information-bottleneck style
 * iteration that never decreases sum_l c_l I(U;Y_l) - I(U;X)). Starts: constant U,
 * U = X when the cap allows, random hard assignments and Dirichlet rows.
 */
inline DstarResult dstar(const FiniteMeasure& q, const std::vector<Channel>& channels,
                         const std::vector<double>& weights, const DstarOptions& opts = {}) {
  detail::check_star_inputs(q, channels, weights);
  const std::size_t cap = opts.u_cap == 0 ? q.size() + 1 : opts.u_cap;
  const detail::StarAscent star(q, channels, weights);
  const std::size_t s = star.s();

  DstarResult best;
  best.value = 0.0;
  best.decomposition = {{1.0}, {q}};
  if (cap == 1 || s == 1) return best;

  std::vector<std::vector<std::vector<double>>> starts;
  if (cap >= s) {
    std::vector<std::vector<double>> r(s, std::vector<double>(cap, 0.0));
    for (std::size_t i = 0; i < s; ++i) r[i][i] = 1.0;
    starts.push_back(std::move(r));
  }
  Philox4x32 rng(opts.seed, 0xd57a);
  for (int k = 0; k < opts.restarts; ++k) {
    std::vector<std::vector<double>> r(s);
    if (k % 2 == 0) {
      // Nearly hard assignment, so that boundary optima are reachable.
      for (auto& row : r) {
        row.assign(cap, 1e-3 / static_cast<double>(cap));
        row[rng.below(cap)] += 1.0 - 1e-3;
      }
    } else {
      for (auto& row : r) row = rng.dirichlet1(cap);
    }
    starts.push_back(std::move(r));
  }
  for (auto& r : starts) {
    const double v = star.ascend(r, opts.tolerance, opts.max_iterations);
    if (v > best.value) {
      best.value = v;
      best.decomposition = star.to_decomposition(r);
    }
  }
  return best;
}

/// d* for u_cap = 1 .. max_cap, reported to show how the value settles.
inline std::vector<std::pair<std::size_t, double>> dstar_cap_sensitivity(
    const FiniteMeasure& q, const std::vector<Channel>& channels, const std::vector<double>& weights,
    std::size_t max_cap, DstarOptions opts = {}) {
  std::vector<std::pair<std::size_t, double>> out;
  double running = 0.0;
  for (std::size_t k = 1; k <= max_cap; ++k) {
    opts.u_cap = k;
    // A larger cap contains every smaller-cap decomposition.
    running = std::max(running, dstar(q, channels, weights, opts).value);
    out.emplace_back(k, running);
  }
  return out;
}

/**
 * Upper concave envelope of sigma at Q_X from sigma sampled on a simplex grid
 * over supp(Q_X), via the LP  max sum_i w_i sigma(P_i)  s.t.  sum_i w_i P_i = Q_X.
 * grid_step = 0 picks 1e-3 for a binary support and 2e-2 for a ternary one.
 */
inline double envelope_at(const FiniteMeasure& q, const std::vector<Channel>& channels,
                          const std::vector<double>& weights, double grid_step = 0.0) {
  detail::check_star_inputs(q, channels, weights);
  const auto supp = q.support();
  const std::size_t k = supp.size();
  if (k > 3) throw DomainError("envelope_at: support larger than 3 is too large for the grid");
  if (k == 1) return 0.0;
  if (grid_step == 0.0) grid_step = k == 2 ? 1e-3 : 2e-2;
  if (!(grid_step > 0.0) || grid_step > 0.5) throw DomainError("envelope_at: bad grid step");
  const int n = static_cast<int>(std::lround(1.0 / grid_step));

  const auto inst = star_instance(q, channels, weights);
  const detail::GbllProblem prob(inst.mu, inst.channels, inst.nus, inst.weights);
  std::vector<std::vector<double>> pts;
  if (k == 2) {
    for (int a = 0; a <= n; ++a) pts.push_back({double(a) / n, double(n - a) / n});
  } else {
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) pts.push_back({double(a) / n, double(b) / n, double(n - a - b) / n});
  }
  // Q itself is always a column, so the envelope is never below sigma(Q) = 0.
  std::vector<double> qs;
  for (std::size_t x : supp) qs.push_back(q[x]);
  pts.push_back(std::move(qs));
  const auto cols = static_cast<Eigen::Index>(pts.size());
  Eigen::VectorXd c(cols);
  Eigen::MatrixXd a_eq(static_cast<Eigen::Index>(k), cols);
  Eigen::VectorXd b_eq(static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < cols; ++j) {
    c(j) = prob.objective(pts[static_cast<std::size_t>(j)]);
    for (std::size_t i = 0; i < k; ++i) a_eq(static_cast<Eigen::Index>(i), j) = pts[static_cast<std::size_t>(j)][i];
  }
  for (std::size_t i = 0; i < k; ++i) b_eq(static_cast<Eigen::Index>(i)) = q[supp[i]];
  const auto res = lp::maximize(c, a_eq, b_eq, Eigen::MatrixXd(0, cols), Eigen::VectorXd(0));
  if (!res.ok()) throw Error("envelope_at: LP did not reach an optimum");
  return res.objective;
}

struct ConstrainedOptions {
  std::size_t u_cap = 0;  ///< 0 means |X| + 1
  OptimizerOptions inner;
  double tolerance = 1e-8;
  int max_iterations = 200;
  double multiplier_bound = 1e4;
};

struct ConstrainedResult {
  double value = -kInf;        ///< min over evaluated multipliers of the dual function
  double lower_bound = -kInf;  ///< value of the mixture below (costs met within 1e-10)
  AuxDecomposition witness;
  std::vector<double> multipliers;
  int iterations = 0;
};

/**
 * g(1) = sup over P_{UX} with E[tau_a(X)] <= eps_a of
 *        sum_j c_j D(P_{Y_j|U} || nu_j | P_U) - D(P_{X|U} || mu | P_U).
 *
 * This is the concave envelope problem without a barycenter, so it has the
 * Lagrangian dual  min_{lambda >= 0} d(mu e^{-lambda.tau}) + lambda.eps,
 * minimized here by Kelley's cutting-plane method. The primal mixture over the
 * maximizers collected along the way gives the lower bound and the witness.
 */
inline ConstrainedResult constrained_single_letter(const GbllInstance& inst,
                                                   const std::vector<CostFunction>& costs,
                                                   const ConstrainedOptions& opts = {}) {
  inst.validate();
  const std::size_t nx = inst.mu.size();
  const std::size_t cap = opts.u_cap == 0 ? nx + 1 : opts.u_cap;
  if (cap < 1) throw DomainError("constrained_single_letter: u_cap < 1");

  // Hard exclusions from infinite costs; infinite thresholds drop the constraint.
  std::vector<double> base = inst.mu.vec();
  std::vector<const CostFunction*> active;
  for (const auto& c : costs) {
    c.validate(nx);
    if (c.epsilon == kInf) continue;
    for (std::size_t x = 0; x < nx; ++x)
      if (c.values[x] == kInf) base[x] = 0.0;
    active.push_back(&c);
  }
  if (std::all_of(base.begin(), base.end(), [](double v) { return v == 0.0; }))
    throw DomainError("constrained_single_letter: infeasible costs");
  const std::size_t na = active.size();
  auto tau = [&](std::size_t a, std::size_t x) { return base[x] > 0.0 ? active[a]->values[x] : 0.0; };

  GbllInstance work = inst;
  work.mu = FiniteMeasure(base);
  ConstrainedResult res;
  if (na == 0) {
    const auto r = gbll_constant(work, opts.inner);
    res.value = res.lower_bound = r.constant_d;
    res.witness = {{1.0}, {r.maximizer}};
    return res;
  }

  struct Cut {
    double value;
    std::vector<double> cost;  // E_P[tau_a]
    FiniteMeasure point;
  };
  std::vector<Cut> cuts;
  auto make_cut = [&](const FiniteMeasure& p) {
    Cut cut{gbll_objective(work, p), std::vector<double>(na, 0.0), p};
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t x = 0; x < nx; ++x)
        if (p[x] > 0.0) cut.cost[a] += p[x] * tau(a, x);
    return cut;
  };

  const auto supp = work.mu.support();
  {
    // Feasibility: some P on the allowed support with all expected costs <= eps.
    const auto ns = static_cast<Eigen::Index>(supp.size());
    Eigen::MatrixXd a_eq = Eigen::MatrixXd::Ones(1, ns);
    Eigen::MatrixXd a_ub(static_cast<Eigen::Index>(na), ns);
    Eigen::VectorXd b_ub(static_cast<Eigen::Index>(na));
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t i = 0; i < supp.size(); ++i)
        a_ub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = tau(a, supp[i]);
      b_ub(static_cast<Eigen::Index>(a)) = active[a]->epsilon;
    }
    const auto f = lp::maximize(Eigen::VectorXd::Zero(ns), a_eq, Eigen::VectorXd::Ones(1), a_ub, b_ub);
    if (!f.ok()) throw DomainError("constrained_single_letter: infeasible costs");
    // The feasible point seeds the primal master so it always has a solution.
    std::vector<double> p0(nx, 0.0);
    for (std::size_t i = 0; i < supp.size(); ++i) p0[supp[i]] = f.x(static_cast<Eigen::Index>(i));
    cuts.push_back(make_cut(FiniteMeasure(std::move(p0)).normalized()));
  }

  std::vector<double> lambda(na, 0.0);
  double ub = kInf;
  OptimizerOptions inner = opts.inner;

  auto evaluate = [&](const std::vector<double>& lam) {
    // log of the tilted mu, shifted to avoid overflow; d(s mu) = d(mu) + log s.
    std::vector<double> lt(nx, -kInf);
    double shift = -kInf;
    for (std::size_t x = 0; x < nx; ++x) {
      if (base[x] == 0.0) continue;
      double e = 0.0;
      for (std::size_t a = 0; a < na; ++a) e += lam[a] * tau(a, x);
      lt[x] = std::log(base[x]) - e;
      shift = std::max(shift, lt[x]);
    }
    std::vector<double> tilted(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x) tilted[x] = std::exp(lt[x] - shift);
    GbllInstance t = work;
    t.mu = FiniteMeasure(std::move(tilted));
    auto r = gbll_constant(t, inner);
    r.constant_d += shift;
    // Objective under the original mu (the dual function subtracts the penalty).
    Cut cut = make_cut(r.maximizer);
    double h = r.constant_d;
    for (std::size_t a = 0; a < na; ++a) h += lam[a] * active[a]->epsilon;
    inner.warm_starts = {r.maximizer};
    return std::make_pair(h, std::move(cut));
  };

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    auto [h, cut] = evaluate(lambda);
    if (h == kInf) {
      res.value = kInf;
      return res;
    }
    if (h < ub) {
      ub = h;
      res.multipliers = lambda;
    }
    cuts.push_back(std::move(cut));

    // Primal master: best feasible mixture of the collected points.
    const auto nc = static_cast<Eigen::Index>(cuts.size());
    Eigen::VectorXd obj(nc);
    Eigen::MatrixXd a_ub(static_cast<Eigen::Index>(na), nc);
    Eigen::VectorXd b_ub(static_cast<Eigen::Index>(na));
    for (Eigen::Index k = 0; k < nc; ++k) {
      const auto& ck = cuts[static_cast<std::size_t>(k)];
      obj(k) = ck.value;
      for (std::size_t a = 0; a < na; ++a) a_ub(static_cast<Eigen::Index>(a), k) = ck.cost[a];
    }
    // Costs are met up to rounding (1e-10) by the mixture.
    for (std::size_t a = 0; a < na; ++a) b_ub(static_cast<Eigen::Index>(a)) = active[a]->epsilon + 1e-10;
    const auto prim = lp::maximize(obj, Eigen::MatrixXd::Ones(1, nc), Eigen::VectorXd::Ones(1), a_ub, b_ub);
    if (prim.ok() && prim.objective > res.lower_bound) {
      res.lower_bound = prim.objective;
      res.witness = {};
      for (Eigen::Index k = 0; k < nc; ++k) {
        if (prim.x(k) <= 1e-14) continue;
        res.witness.u_weights.push_back(prim.x(k));
        res.witness.components.push_back(cuts[static_cast<std::size_t>(k)].point);
      }
      double t = 0.0;
      for (double w : res.witness.u_weights) t += w;
      for (double& w : res.witness.u_weights) w /= t;
    }
    if (ub - res.lower_bound < opts.tolerance) break;

    // Dual master: min t s.t. t >= f_k + lambda.(eps - cost_k), 0 <= lambda <= bound.
    // Variables [lambda (na), t+, t-].
    const auto nv = static_cast<Eigen::Index>(na + 2);
    Eigen::VectorXd cm = Eigen::VectorXd::Zero(nv);
    cm(nv - 2) = -1.0;
    cm(nv - 1) = 1.0;
    Eigen::MatrixXd am = Eigen::MatrixXd::Zero(nc + static_cast<Eigen::Index>(na), nv);
    Eigen::VectorXd bm(nc + static_cast<Eigen::Index>(na));
    for (Eigen::Index k = 0; k < nc; ++k) {
      const auto& ck = cuts[static_cast<std::size_t>(k)];
      for (std::size_t a = 0; a < na; ++a)
        am(k, static_cast<Eigen::Index>(a)) = active[a]->epsilon - ck.cost[a];
      am(k, nv - 2) = -1.0;
      am(k, nv - 1) = 1.0;
      bm(k) = -ck.value;
    }
    for (std::size_t a = 0; a < na; ++a) {
      am(nc + static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = 1.0;
      bm(nc + static_cast<Eigen::Index>(a)) = opts.multiplier_bound;
    }
    const auto dual = lp::maximize(cm, Eigen::MatrixXd(0, nv), Eigen::VectorXd(0), am, bm);
    if (!dual.ok()) break;
    for (std::size_t a = 0; a < na; ++a) lambda[a] = dual.x(static_cast<Eigen::Index>(a));
  }
  res.value = ub;
  return res;
}

}  // namespace smoothbl
