#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "smoothbl/core.hpp"
#include "smoothbl/envelope.hpp"
#include "smoothbl/gbll.hpp"
#include "smoothbl/lp.hpp"
#include "smoothbl/measures.hpp"

// Smoothed best constant
//   d_delta(Q_X, nu, c) = inf_{mu : E_1(Q_X || mu) <= delta} d(mu, nu, c),
// searched over mass-cutting measures mu = s . Q_X.
//
// d is nondecreasing in mu (only -D(P||mu) depends on mu), so raising s above 1
// never lowers the constant, and points outside supp(Q_X) are never charged.
// In t = log s the constant d(e^t . Q) is a supremum of affine functions of t,
// hence convex; the budget sum_x Q(x) min(e^{t(x)}, 1) >= 1 - delta is not.
// Small alphabets enumerate the vertices of the budget polytope in s (maximal
// cut sets plus one fractional point), larger ones cut greedily; the best
// candidates are then refined by sequential convex programming on t.

namespace smoothbl {

struct SmoothOptions {
  OptimizerOptions inner;  ///< final evaluation of the chosen measures
  int search_restarts = 4;
  std::size_t exhaustive_limit = 12;  ///< |supp Q| up to this size enumerates cut patterns
  /// Upper bound on s(x). Values > 1 allow inflation above Q_X (never useful, see above).
  double inflation_cap = 1.0;
  bool refine = true;
  std::size_t refine_candidates = 3;
  std::size_t refine_limit = 64;  ///< skip refinement above this support size
  int refine_iterations = 25;
  int kelley_iterations = 12;  ///< model solves per trust-region step
};

struct SmoothResult {
  double value = kInf;
  FiniteMeasure smoothing_measure;  ///< unnormalized
  double e1_used = 0.0;
  GbllResult inner;
  bool used_inflation = false;
  bool exhaustive = false;  ///< cut patterns were enumerated
  std::size_t candidates = 0;
};

namespace detail {

class SmoothSearch {
 public:
  SmoothSearch(const FiniteMeasure& q, const std::vector<Channel>& channels,
               const std::vector<FiniteMeasure>& nus, const std::vector<double>& weights,
               double delta, const SmoothOptions& opts)
      : base_{q, channels, nus, weights}, delta_(delta), opts_(opts), supp_(q.support()) {
    base_.validate();
    search_ = opts.inner;
    search_.restarts = opts.search_restarts;
    search_.include_vertices = supp_.size() <= opts.refine_limit;
  }

  const GbllInstance& base() const { return base_; }
  const std::vector<std::size_t>& support() const { return supp_; }

  FiniteMeasure measure(const std::vector<double>& s) const {
    std::vector<double> w(base_.mu.size(), 0.0);
    for (std::size_t i = 0; i < supp_.size(); ++i) w[supp_[i]] = s[i] * base_.mu[supp_[i]];
    return FiniteMeasure(std::move(w));
  }

  double e1(const std::vector<double>& s) const {
    long double acc = 0;
    for (std::size_t i = 0; i < supp_.size(); ++i)
      if (s[i] < 1.0) acc += static_cast<long double>(base_.mu[supp_[i]]) * (1.0 - s[i]);
    return static_cast<double>(acc);
  }

  /// Cheap evaluation with warm starts; records the maximizer for later starts.
  GbllResult quick(const std::vector<double>& s) {
    GbllInstance inst = base_;
    inst.mu = measure(s);
    OptimizerOptions o = search_;
    o.warm_starts = warm_;
    auto r = gbll_constant(inst, o);
    remember(r.maximizer);
    ++evaluations_;
    return r;
  }

  GbllResult full(const std::vector<double>& s) const {
    GbllInstance inst = base_;
    inst.mu = measure(s);
    OptimizerOptions o = opts_.inner;
    o.warm_starts = warm_;
    return gbll_constant(inst, o);
  }

  void remember(const FiniteMeasure& p) {
    warm_.insert(warm_.begin(), p);
    if (warm_.size() > 4) warm_.pop_back();
  }

  /// f(P) with mu = Q_X, so that d(s . Q) >= f(P) + sum_x P(x) log s(x).
  double base_value(const FiniteMeasure& p) const { return gbll_objective(base_, p); }

  std::size_t evaluations() const { return evaluations_; }

  // Vertices of {s in [0,1]^N : sum Q s >= 1 - delta}: maximal cut sets C
  // (Q(C) <= delta, no further point fits) with one point partially cut.
  std::vector<std::vector<double>> vertex_candidates() const {
    const std::size_t n = supp_.size();
    std::vector<double> qs(n);
    for (std::size_t i = 0; i < n; ++i) qs[i] = base_.mu[supp_[i]];
    std::vector<std::vector<double>> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      long double cut = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) cut += qs[i];
      if (cut > delta_ || cut >= 1.0L) continue;
      const double left = static_cast<double>(delta_ - cut);
      bool maximal = true;
      for (std::size_t i = 0; i < n && maximal; ++i)
        if (!(mask >> i & 1) && qs[i] <= left) maximal = false;
      if (!maximal) continue;
      for (std::size_t f = 0; f < n; ++f) {
        if (mask >> f & 1) continue;
        std::vector<double> s(n, 1.0);
        for (std::size_t i = 0; i < n; ++i)
          if (mask >> i & 1) s[i] = 0.0;
        s[f] = 1.0 - left / qs[f];
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  // Repeatedly cut the point with the largest P*(x)/mu(x).
  std::vector<double> greedy() {
    const std::size_t n = supp_.size();
    std::vector<double> s(n, 1.0);
    double budget = delta_;
    while (budget > 0.0) {
      const auto r = quick(s);
      std::size_t pick = n;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] <= 0.0) continue;
        const double ratio = r.maximizer[supp_[i]] / (s[i] * base_.mu[supp_[i]]);
        if (ratio > best) {
          best = ratio;
          pick = i;
        }
      }
      if (pick == n) break;
      const double mass = s[pick] * base_.mu[supp_[pick]];
      if (mass <= budget) {
        s[pick] = 0.0;
        budget -= mass;
      } else {
        s[pick] -= budget / base_.mu[supp_[pick]];
        budget = 0.0;
      }
    }
    return s;
  }

  struct Cut {
    double value;            // f(P)
    std::vector<double> p;   // P on the refined coordinates
  };

  // Sequential convex programming in t = log s over the coordinates with s > 0.
  // Each subproblem minimizes the convex d(t) under the linearized budget
  //   sum_x min(Q(x), Q(x) e^{t0(x)} (1 + t(x) - t0(x))) >= 1 - delta,
  // an inner approximation (e^t >= its tangent), inside a box trust region,
  // by Kelley's method on cuts f(P) + P.t. Iterates stay feasible and the
  // objective never increases.
  std::pair<std::vector<double>, double> refine(std::vector<double> s, double value) {
    const std::size_t n = supp_.size();
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < n; ++i)
      if (s[i] > 0.0) act.push_back(i);
    const std::size_t k = act.size();
    const double t_max = std::log(opts_.inflation_cap);
    std::vector<double> t0(k);
    for (std::size_t a = 0; a < k; ++a) t0[a] = std::log(s[act[a]]);

    std::vector<Cut> cuts;
    auto add_cut = [&](const FiniteMeasure& p) {
      Cut c{base_value(p), std::vector<double>(k)};
      for (std::size_t a = 0; a < k; ++a) c.p[a] = p[supp_[act[a]]];
      if (!std::isfinite(c.value)) return;
      for (const auto& old : cuts)
        if (l1_distance(old.p, c.p) < 1e-9) return;
      // Old cuts are still valid minorants; dropping them only loosens the model.
      if (cuts.size() >= 120) cuts.erase(cuts.begin());
      cuts.push_back(std::move(c));
    };
    auto eval_t = [&](const std::vector<double>& t) {
      std::vector<double> ss(n, 0.0);
      for (std::size_t a = 0; a < k; ++a) ss[act[a]] = std::exp(t[a]);
      auto r = quick(ss);
      for (std::size_t j = 0; j < std::min<std::size_t>(2, r.local_maxima.size()); ++j)
        add_cut(r.local_maxima[j].second);
      return std::make_pair(r.constant_d, ss);
    };
    {
      auto r = eval_t(t0);
      value = std::min(value, r.first);
    }

    double rho = 1.0;
    for (int it = 0; it < opts_.refine_iterations && rho > 1e-5; ++it) {
      std::vector<double> best_t = t0;
      double best_v = value;
      for (int inner = 0; inner < opts_.kelley_iterations; ++inner) {
        const auto sol = solve_model(cuts, t0, rho, t_max, act);
        if (!sol) break;
        const auto& [t_new, model] = *sol;
        auto [v, ss] = eval_t(t_new);
        if (v < best_v) {
          best_v = v;
          best_t = t_new;
        }
        if (best_v - model < 1e-10 * (1.0 + std::abs(best_v))) break;
      }
      if (best_v < value - 1e-12) {
        value = best_v;
        t0 = best_t;
        rho = std::min(2.0 * rho, 8.0);
      } else {
        rho *= 0.25;
      }
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t a = 0; a < k; ++a) out[act[a]] = std::exp(t0[a]);
    return {out, value};
  }

 private:
  // Variables: z = t - (t0 - rho) in [0, ub], y >= 0 (Q - y <= linearized mass),
  // and tau = tau+ - tau- for the model value.
  std::optional<std::pair<std::vector<double>, double>> solve_model(
      const std::vector<Cut>& cuts, const std::vector<double>& t0, double rho, double t_max,
      const std::vector<std::size_t>& act) const {
    const auto k = static_cast<Eigen::Index>(t0.size());
    const auto nc = static_cast<Eigen::Index>(cuts.size());
    const Eigen::Index nv = 2 * k + 2;
    const Eigen::Index nr = nc + k + 1 + k;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
    c(2 * k) = -1.0;
    c(2 * k + 1) = 1.0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nr, nv);
    Eigen::VectorXd b(nr);
    Eigen::Index r = 0;
    for (const auto& cut : cuts) {
      double shift = cut.value;
      for (Eigen::Index i = 0; i < k; ++i) {
        a(r, i) = cut.p[static_cast<std::size_t>(i)];
        shift += cut.p[static_cast<std::size_t>(i)] * (t0[static_cast<std::size_t>(i)] - rho);
      }
      a(r, 2 * k) = -1.0;
      a(r, 2 * k + 1) = 1.0;
      b(r++) = -shift;
    }
    double qa = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double q = base_.mu[supp_[act[static_cast<std::size_t>(i)]]];
      const double w = q * std::exp(t0[static_cast<std::size_t>(i)]);
      qa += q;
      // Q - y <= w (1 - rho + z)
      a(r, i) = -w;
      a(r, k + i) = -1.0;
      b(r++) = w * (1.0 - rho) - q;
    }
    // 1e-13 absorbs rounding when the current point sits exactly on the budget.
    for (Eigen::Index i = 0; i < k; ++i) a(r, k + i) = 1.0;
    b(r++) = qa - (1.0 - delta_) + 1e-13;
    for (Eigen::Index i = 0; i < k; ++i) {
      a(r, i) = 1.0;
      b(r++) = std::max(0.0, std::min(2.0 * rho, t_max - t0[static_cast<std::size_t>(i)] + rho));
    }
    const auto res = lp::maximize(c, Eigen::MatrixXd(0, nv), Eigen::VectorXd(0), a, b, 1e-10, 50000, false);
    if (!res.ok() || !res.x.allFinite()) return std::nullopt;
    std::vector<double> t(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) t[static_cast<std::size_t>(i)] = t0[static_cast<std::size_t>(i)] - rho + res.x(i);
    return std::make_pair(std::move(t), -res.objective);
  }

  GbllInstance base_;
  double delta_;
  SmoothOptions opts_;
  OptimizerOptions search_;
  std::vector<std::size_t> supp_;
  std::vector<FiniteMeasure> warm_;
  std::size_t evaluations_ = 0;
};

}  // namespace detail

/// delta-smooth constant over mass-cutting measures; value is the best (lowest) found.
inline SmoothResult smooth_constant(const FiniteMeasure& q, const std::vector<Channel>& channels,
                                    const std::vector<FiniteMeasure>& nus,
                                    const std::vector<double>& weights, double delta,
                                    const SmoothOptions& opts = {}) {
  if (!q.is_probability()) throw DomainError("smooth_constant: Q_X must be a probability distribution");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("smooth_constant: delta must lie in [0, 1)");
  if (!(opts.inflation_cap >= 1.0)) throw DomainError("smooth_constant: inflation_cap must be >= 1");
  SmoothResult res;
  const GbllInstance inst{q, channels, nus, weights};
  if (delta == 0.0) {
    res.inner = gbll_constant(inst, opts.inner);
    res.value = res.inner.constant_d;
    res.smoothing_measure = q;
    return res;
  }

  detail::SmoothSearch search(q, channels, nus, weights, delta, opts);
  const std::size_t n = search.support().size();
  const std::vector<double> ones(n, 1.0);
  search.remember(search.full(ones).maximizer);

  std::vector<std::pair<double, std::vector<double>>> ranked;
  if (n <= opts.exhaustive_limit) {
    res.exhaustive = true;
    for (auto& s : search.vertex_candidates()) {
      const double v = search.quick(s).constant_d;
      ranked.emplace_back(v, std::move(s));
    }
  } else {
    auto s = search.greedy();
    const double v = search.quick(s).constant_d;
    ranked.emplace_back(v, std::move(s));
  }
  res.candidates = ranked.size();
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (ranked.size() > std::max<std::size_t>(1, opts.refine_candidates)) ranked.resize(std::max<std::size_t>(1, opts.refine_candidates));
  if (ranked.empty()) ranked.emplace_back(kInf, ones);

  if (opts.refine && n <= opts.refine_limit) {
    // Starts with every point alive, so refinement can reach interior optima
    // (e.g. water-filling profiles) that no cut pattern represents.
    std::vector<std::vector<double>> alive{std::vector<double>(n, 1.0 - delta)};
    {
      std::vector<double> lifted = ranked.front().second;
      for (double& v : lifted) v = std::max(v, 1e-2);
      alive.push_back(std::move(lifted));
    }
    for (auto& s : alive) {
      const double v = search.quick(s).constant_d;
      ranked.emplace_back(v, std::move(s));
    }
    for (auto& [v, s] : ranked) {
      if (v == kInf) continue;
      auto [s2, v2] = search.refine(s, v);
      if (v2 < v) {
        v = v2;
        s = std::move(s2);
      }
    }
  }

  // Full-effort evaluation of the surviving candidates.
  for (const auto& [v, s] : ranked) {
    auto r = search.full(s);
    if (r.constant_d < res.value || res.inner.maximizer.size() == 0) {
      res.value = r.constant_d;
      res.inner = std::move(r);
      res.smoothing_measure = search.measure(s);
      res.e1_used = search.e1(s);
      res.used_inflation = std::any_of(s.begin(), s.end(), [](double x) { return x > 1.0; });
    }
  }
  return res;
}

inline SmoothResult smooth_constant(const GbllInstance& inst, double delta, const SmoothOptions& opts = {}) {
  return smooth_constant(inst.mu, inst.channels, inst.nus, inst.weights, delta, opts);
}

/// Restriction of Q_X^n to the cost- and information-density-typical sequences.
struct TypicalRestriction {
  FiniteMeasure base;
  std::vector<std::size_t> kept_set;  ///< indices into X^n, first letter most significant
  double retained_mass = 0.0;

  FiniteMeasure measure() const {
    std::vector<double> w(base.size(), 0.0);
    for (std::size_t i : kept_set) w[i] = base[i];
    return FiniteMeasure(std::move(w));
  }
};

/**
 * Keeps x^n with (1/n) sum_i tau_a(x_i) <= eps1 for every cost (eps1 replaces
 * each cost's own threshold) and
 *   (1/n) sum_i [ i_{Q||mu}(x_i) - sum_j c_j E[i_{Q_{Y_j}||nu_j}(Y_j) | X = x_i] ] <= C + eps2,
 * where C = D(Q||mu) - sum_j c_j D(Q_{Y_j}||nu_j) is the per-letter mean. mu defaults to Q_X.
 */
inline TypicalRestriction typical_restriction(const FiniteMeasure& q, const std::vector<Channel>& channels,
                                              const std::vector<FiniteMeasure>& nus,
                                              const std::vector<double>& weights, std::size_t n,
                                              double eps1, double eps2,
                                              const std::vector<CostFunction>& costs,
                                              const std::optional<FiniteMeasure>& mu = std::nullopt) {
  if (!q.is_probability()) throw DomainError("typical_restriction: Q_X must be a probability distribution");
  if (n == 0) throw DomainError("typical_restriction: n must be >= 1");
  const GbllInstance inst{mu.value_or(q), channels, nus, weights};
  inst.validate();
  require_same_size(inst.mu.size(), q.size(), "typical_restriction mu");
  const std::size_t k = q.size();
  const std::size_t total = checked_power(k, n, 1'000'000);
  for (const auto& c : costs) require_same_size(c.values.size(), k, "typical_restriction cost");

  // Per-letter information-density statistic and its Q-mean.
  std::vector<double> stat(k, 0.0);
  double mean = 0.0;
  const bool use_density = eps2 != kInf;
  if (use_density) {
    std::vector<FiniteMeasure> qy;
    for (const auto& ch : channels) qy.push_back(push_forward(q, ch));
    for (std::size_t x = 0; x < k; ++x) {
      if (q[x] == 0.0) continue;
      double v = inst.mu[x] > 0.0 ? std::log(q[x] / inst.mu[x]) : kInf;
      for (std::size_t j = 0; j < channels.size() && v != kInf; ++j)
        for (std::size_t y = 0; y < channels[j].outputs(); ++y) {
          const double kxy = channels[j](x, y);
          if (kxy == 0.0) continue;
          // Q_Y(y) > 0 here since Q(x) > 0; a nu-null output makes the density +inf.
          if (nus[j][y] == 0.0) {
            v = -kInf;
            break;
          }
          v -= weights[j] * kxy * std::log(qy[j][y] / nus[j][y]);
        }
      stat[x] = v;
    }
    mean = rel_entropy(q, inst.mu);
    for (std::size_t j = 0; j < channels.size(); ++j) mean -= weights[j] * rel_entropy(qy[j], nus[j]);
  }

  TypicalRestriction out{tensor_power(q, n), {}, 0.0};
  long double kept = 0;
  const double nd = static_cast<double>(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (out.base[idx] == 0.0) continue;
    const auto xs = digits_of(idx, k, n);
    bool ok = true;
    if (eps1 != kInf) {
      for (const auto& c : costs) {
        double s = 0.0;
        for (std::size_t x : xs) s += c.values[x];
        if (!(s / nd <= eps1)) {
          ok = false;
          break;
        }
      }
    }
    if (ok && use_density) {
      double s = 0.0;
      for (std::size_t x : xs) s += stat[x];
      // Small slack so sequences exactly at the threshold are not lost to rounding.
      ok = s / nd <= mean + eps2 + 1e-12;
    }
    if (ok) {
      out.kept_set.push_back(idx);
      kept += out.base[idx];
    }
  }
  out.retained_mass = static_cast<double>(kept);
  return out;
}

struct SmoothRatePoint {
  std::size_t n = 0;
  double value = 0.0;  ///< smooth constant of the n-fold product, divided by n
  double slack = 0.0;  ///< max(0, d* - value)
};

struct RateCurve {
  std::vector<SmoothRatePoint> points;
  double d = 0.0;       ///< unsmoothed single-letter constant
  double d_star = 0.0;  ///< auxiliary-variable constant
};

/// Normalized smooth constants for n = 1..n_max with nu_j = Q_{Y_j}.
inline RateCurve smooth_rate_curve(const FiniteMeasure& q, const std::vector<Channel>& channels,
                                   const std::vector<double>& weights, double delta, std::size_t n_max,
                                   const SmoothOptions& opts = {}) {
  const auto single = star_instance(q, channels, weights);
  single.validate();
  (void)checked_power(q.size(), n_max, 1'000'000);
  RateCurve out;
  out.d = gbll_constant(single, opts.inner).constant_d;
  out.d_star = dstar(q, channels, weights).value;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const auto inst = tensor_power(single, n);
    const auto r = smooth_constant(inst, delta, opts);
    const double v = r.value / static_cast<double>(n);
    out.points.push_back({n, v, std::max(0.0, out.d_star - v)});
  }
  return out;
}

}  // namespace smoothbl
