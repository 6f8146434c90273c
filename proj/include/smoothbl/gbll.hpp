#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "smoothbl/core.hpp"
#include "smoothbl/measures.hpp"
#include "smoothbl/rng.hpp"

// =============================================================================
// Best constant of the generalized Brascamp-Lieb-like inequality
//
//   d(mu, (Q_j), (nu_j), c) = sup_{P << mu} sum_j c_j D(P Q_j || nu_j) - D(P || mu)
//
// and its functional dual
//
//   log int exp(sum_j E[log f_j(Y_j)|X=.] - d) dmu <= sum_j c_j log ||f_j||_{1/c_j}.
//
// The maximization uses the variational identity
//   D(P_Y || nu) = max_R sum_y P_Y(y) log(R(y)/nu(y)),
// which turns the objective into a joint maximum over (P, R_1..R_m). Alternating
// the two closed-form block updates
//   R_j <- P Q_j,   P(x) <- mu(x) exp(sum_j c_j E[log(R_j/nu_j)(Y_j)|X=x]) / Z
// never decreases the objective. The problem is not concave, so the ascent is
// restarted from Dirichlet(1) points, the normalized mu, and every vertex.
// =============================================================================

namespace smoothbl {

struct OptimizerOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;  ///< stop when the objective gain per sweep drops below this
  int max_iterations = 20000;
  bool include_vertices = true;
  std::vector<FiniteMeasure> warm_starts;  ///< extra starting points (any alphabet-sized P)
  std::size_t keep_local_maxima = 8;
};

struct GbllResult {
  double constant_d = -kInf;
  FiniteMeasure maximizer;
  bool diverged = false;
  /// The best point puts (numerically) zero mass on part of supp(mu).
  bool on_boundary = false;
  std::vector<std::pair<int, double>> trace;  ///< (start index, final objective)
  /// Distinct local maxima found, best first (includes the maximizer).
  std::vector<std::pair<double, FiniteMeasure>> local_maxima;
};

/// Nonnegative functions f_j on the output alphabets.
struct FunctionTuple {
  std::vector<std::vector<double>> f;

  void validate(const GbllInstance& inst) const {
    require_same_size(f.size(), inst.m(), "FunctionTuple size");
    for (std::size_t j = 0; j < f.size(); ++j) {
      require_same_size(f[j].size(), inst.nus[j].size(), "FunctionTuple entry");
      bool pos = false;
      for (double v : f[j]) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("FunctionTuple: entries must be >= 0");
        pos = pos || v > 0.0;
      }
      if (!pos) throw DomainError("FunctionTuple: each f_j needs a positive entry");
    }
  }
};

namespace detail {

struct SparseEntry {
  std::size_t col;
  double value;
};

/// Instance data restricted to supp(mu), with sparse channel rows.
class GbllProblem {
 public:
  GbllProblem(const FiniteMeasure& mu, const std::vector<Channel>& channels,
              const std::vector<FiniteMeasure>& nus, std::span<const double> weights)
      : weights_(weights.begin(), weights.end()), full_size_(mu.size()) {
    support_ = mu.support();
    for (std::size_t x : support_) log_mu_.push_back(std::log(mu[x]));
    for (std::size_t j = 0; j < channels.size(); ++j) {
      std::vector<std::vector<SparseEntry>> rows;
      for (std::size_t x : support_) {
        std::vector<SparseEntry> row;
        for (std::size_t y = 0; y < channels[j].outputs(); ++y) {
          const double k = channels[j](x, y);
          if (k > 0.0) row.push_back({y, k});
        }
        rows.push_back(std::move(row));
      }
      rows_.push_back(std::move(rows));
      std::vector<double> ln(nus[j].size());
      for (std::size_t y = 0; y < ln.size(); ++y) ln[y] = safe_log(nus[j][y]);
      log_nu_.push_back(std::move(ln));
      out_sizes_.push_back(channels[j].outputs());
    }
  }

  std::size_t s() const noexcept { return support_.size(); }
  std::size_t m() const noexcept { return rows_.size(); }
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  std::size_t full_size() const noexcept { return full_size_; }
  double weight(std::size_t j) const { return weights_[j]; }
  const std::vector<SparseEntry>& row(std::size_t j, std::size_t i) const { return rows_[j][i]; }
  double log_mu(std::size_t i) const { return log_mu_[i]; }
  double log_nu(std::size_t j, std::size_t y) const { return log_nu_[j][y]; }
  std::size_t out_size(std::size_t j) const { return out_sizes_[j]; }

  /// Support index whose channel rows reach a nu_j-null output (objective = +inf), if any.
  std::optional<std::size_t> divergent_symbol() const {
    for (std::size_t i = 0; i < s(); ++i)
      for (std::size_t j = 0; j < m(); ++j) {
        if (weights_[j] <= 0.0) continue;
        for (const auto& e : rows_[j][i])
          if (log_nu_[j][e.col] == -kInf) return i;
      }
    return std::nullopt;
  }

  std::vector<double> output(std::size_t j, std::span<const double> p) const {
    std::vector<double> r(out_sizes_[j], 0.0);
    for (std::size_t i = 0; i < s(); ++i) {
      if (p[i] == 0.0) continue;
      for (const auto& e : rows_[j][i]) r[e.col] += p[i] * e.value;
    }
    return r;
  }

  /// Objective at P given on the support coordinates.
  double objective(std::span<const double> p) const {
    double val = 0.0;
    for (std::size_t j = 0; j < m(); ++j) {
      if (weights_[j] == 0.0) continue;
      const auto r = output(j, p);
      double dj = 0.0;
      for (std::size_t y = 0; y < r.size(); ++y) {
        if (r[y] <= 0.0) continue;
        if (log_nu_[j][y] == -kInf) return kInf;
        dj += r[y] * (std::log(r[y]) - log_nu_[j][y]);
      }
      val += weights_[j] * dj;
    }
    for (std::size_t i = 0; i < s(); ++i)
      if (p[i] > 0.0) val -= p[i] * (std::log(p[i]) - log_mu_[i]);
    return val;
  }

  /// sum_j E[g_j(Y_j) | X = x] for log-functions g_j (entries may be -inf).
  std::vector<double> conditional_score(const std::vector<std::vector<double>>& g) const {
    std::vector<double> sc(s(), 0.0);
    for (std::size_t i = 0; i < s(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m() && acc != -kInf; ++j) {
        for (const auto& e : rows_[j][i]) {
          if (g[j][e.col] == -kInf) {
            acc = -kInf;
            break;
          }
          acc += e.value * g[j][e.col];
        }
      }
      sc[i] = acc;
    }
    return sc;
  }

  /// P(x) proportional to mu(x) exp(score(x)); returns log normalizer.
  double tilt(std::span<const double> score, std::vector<double>& p) const {
    std::vector<double> lw(s());
    for (std::size_t i = 0; i < s(); ++i) lw[i] = log_mu_[i] + score[i];
    const double z = log_sum_exp(lw);
    p.assign(s(), 0.0);
    if (z == -kInf) return z;
    for (std::size_t i = 0; i < s(); ++i) p[i] = std::exp(lw[i] - z);
    return z;
  }

  /// One alternating sweep: R_j <- P Q_j, then P <- tilted mu.
  void sweep(std::vector<double>& p) const {
    std::vector<std::vector<double>> g(m());
    for (std::size_t j = 0; j < m(); ++j) {
      const auto r = output(j, p);
      g[j].resize(r.size());
      if (weights_[j] == 0.0) {
        std::fill(g[j].begin(), g[j].end(), 0.0);
        continue;
      }
      for (std::size_t y = 0; y < r.size(); ++y)
        g[j][y] = weights_[j] * (safe_log(r[y]) - log_nu_[j][y]);
    }
    const auto sc = conditional_score(g);
    tilt(sc, p);
  }

  FiniteMeasure embed(std::span<const double> p) const {
    std::vector<double> full(full_size_, 0.0);
    for (std::size_t i = 0; i < s(); ++i) full[support_[i]] = p[i];
    return FiniteMeasure(std::move(full));
  }

  std::vector<double> restrict_to_support(const FiniteMeasure& p) const {
    std::vector<double> r(s());
    double t = 0.0;
    for (std::size_t i = 0; i < s(); ++i) t += (r[i] = p[support_[i]]);
    if (t <= 0.0) return {};
    for (auto& v : r) v /= t;
    return r;
  }

 private:
  std::vector<double> weights_;
  std::size_t full_size_;
  std::vector<std::size_t> support_;
  std::vector<double> log_mu_;
  std::vector<std::vector<std::vector<SparseEntry>>> rows_;
  std::vector<std::vector<double>> log_nu_;
  std::vector<std::size_t> out_sizes_;
};

inline double ascend(const GbllProblem& prob, std::vector<double>& p, double tol, int max_iter) {
  double val = prob.objective(p);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> next = p;
    prob.sweep(next);
    const double nv = prob.objective(next);
    if (!(nv >= val - 1e-13)) break;  // numerical floor reached
    p.swap(next);
    const double gain = nv - val;
    val = nv;
    if (gain < tol) break;
  }
  return val;
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

/// Multi-start maximization of the objective of `prob`.
inline GbllResult maximize(const GbllProblem& prob, const OptimizerOptions& opts) {
  GbllResult res;
  if (prob.s() == 0) throw DomainError("gbll: empty support");

  if (auto bad = prob.divergent_symbol()) {
    std::vector<double> p(prob.s(), 0.0);
    p[*bad] = 1.0;
    res.constant_d = kInf;
    res.diverged = true;
    res.maximizer = prob.embed(p);
    res.on_boundary = prob.s() > 1;
    res.trace.emplace_back(0, kInf);
    res.local_maxima.emplace_back(kInf, res.maximizer);
    return res;
  }

  std::vector<std::vector<double>> starts;
  for (const auto& w : opts.warm_starts) {
    if (w.size() != prob.full_size()) continue;
    auto r = prob.restrict_to_support(w);
    if (!r.empty()) starts.push_back(std::move(r));
  }
  {
    std::vector<double> mu_n(prob.s());
    for (std::size_t i = 0; i < prob.s(); ++i) mu_n[i] = std::exp(prob.log_mu(i));
    double t = 0.0;
    for (double v : mu_n) t += v;
    for (double& v : mu_n) v /= t;
    starts.push_back(std::move(mu_n));
  }
  if (opts.include_vertices) {
    for (std::size_t i = 0; i < prob.s(); ++i) {
      std::vector<double> v(prob.s(), 0.0);
      v[i] = 1.0;
      starts.push_back(std::move(v));
    }
  }
  Philox4x32 rng(opts.seed, 0x6b11);
  for (int r = 0; r < opts.restarts; ++r) starts.push_back(rng.dirichlet1(prob.s()));

  std::vector<std::pair<double, std::vector<double>>> found;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    std::vector<double> p = starts[k];
    // The start itself is a candidate (vertices are often the maximizers).
    double v0 = prob.objective(p);
    std::vector<double> p0 = p;
    double v = ascend(prob, p, opts.tolerance, opts.max_iterations);
    if (v0 > v) {
      v = v0;
      p = std::move(p0);
    }
    res.trace.emplace_back(static_cast<int>(k), v);
    found.emplace_back(v, std::move(p));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  for (const auto& [v, p] : found) {
    bool dup = false;
    for (const auto& [v2, q] : res.local_maxima) {
      if (l1_distance(p, prob.restrict_to_support(q)) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) res.local_maxima.emplace_back(v, prob.embed(p));
    if (res.local_maxima.size() >= std::max<std::size_t>(1, opts.keep_local_maxima)) break;
  }

  const auto& best = found.front();
  res.constant_d = best.first;
  res.maximizer = prob.embed(best.second);
  res.on_boundary = std::any_of(best.second.begin(), best.second.end(),
                                [](double x) { return x < 1e-9; });
  return res;
}

}  // namespace detail

/// sum_l c_l D(P Q_l || nu_l) - D(P || mu); -inf when P is not dominated by mu.
inline double gbll_objective(const GbllInstance& inst, const FiniteMeasure& p) {
  inst.validate();
  require_same_size(p.size(), inst.mu.size(), "gbll_objective");
  if (!p.absolutely_continuous_wrt(inst.mu)) return -kInf;
  double val = 0.0;
  for (std::size_t l = 0; l < inst.m(); ++l) {
    const double d = rel_entropy(push_forward(p, inst.channels[l]), inst.nus[l]);
    if (d == kInf) return kInf;
    val += inst.weights[l] * d;
  }
  return val - rel_entropy(p, inst.mu);
}

/// Best constant d(mu, Q_j, nu_j, c). Divergence (+inf) is a result state.
inline GbllResult gbll_constant(const GbllInstance& inst, const OptimizerOptions& opts = {}) {
  inst.validate();
  const detail::GbllProblem prob(inst.mu, inst.channels, inst.nus, inst.weights);
  return detail::maximize(prob, opts);
}

/**
 * Gap of the functional inequality at constant d:
 *   log int exp(sum_j E[log f_j(Y_j)|X] - d) dmu - sum_j c_j log int f_j^{1/c_j} dnu_j.
 * Positive values mean the inequality fails for these functions.
 */
inline double gbll_functional_gap(const GbllInstance& inst, double d, const FunctionTuple& fs) {
  inst.validate();
  fs.validate(inst);
  const detail::GbllProblem prob(inst.mu, inst.channels, inst.nus, inst.weights);
  std::vector<std::vector<double>> g(inst.m());
  for (std::size_t j = 0; j < inst.m(); ++j) {
    g[j].resize(fs.f[j].size());
    for (std::size_t y = 0; y < g[j].size(); ++y) g[j][y] = safe_log(fs.f[j][y]);
  }
  const auto sc = prob.conditional_score(g);
  std::vector<double> lw(prob.s());
  for (std::size_t i = 0; i < prob.s(); ++i) lw[i] = prob.log_mu(i) + sc[i];
  const double lhs = log_sum_exp(lw) - d;
  double rhs = 0.0;
  for (std::size_t j = 0; j < inst.m(); ++j) {
    const double c = inst.weights[j];
    std::vector<double> t;
    for (std::size_t y = 0; y < g[j].size(); ++y) {
      if (inst.nus[j][y] > 0.0 && g[j][y] > -kInf) t.push_back(std::log(inst.nus[j][y]) + g[j][y] / c);
    }
    rhs += c * log_sum_exp(t);
  }
  if (lhs == -kInf) return -kInf;
  if (rhs == -kInf) return kInf;
  return lhs - rhs;
}

struct WorstCaseResult {
  FunctionTuple functions;
  double gap = -kInf;
};

namespace detail {

// Block coordinate ascent on the joint function
//   Phi(P, g) = sum_x P(x) sum_j E[g_j|x] - D(P||mu) - sum_j c_j log int e^{g_j/c_j} dnu_j,
// whose maximum over P is the functional gap (plus d). Both block maximizers
// are closed form: P is the tilted mu, g_j = c_j log(P_{Y_j}/nu_j).
inline double gap_of_logs(const GbllProblem& prob, const std::vector<std::vector<double>>& g) {
  const auto sc = prob.conditional_score(g);
  std::vector<double> lw(prob.s());
  for (std::size_t i = 0; i < prob.s(); ++i) lw[i] = prob.log_mu(i) + sc[i];
  const double lhs = log_sum_exp(lw);
  if (lhs == -kInf) return -kInf;
  double rhs = 0.0;
  for (std::size_t j = 0; j < prob.m(); ++j) {
    const double c = prob.weight(j);
    std::vector<double> t;
    for (std::size_t y = 0; y < g[j].size(); ++y)
      if (prob.log_nu(j, y) > -kInf && g[j][y] > -kInf) t.push_back(prob.log_nu(j, y) + g[j][y] / c);
    const double ls = log_sum_exp(t);
    if (ls == -kInf) return kInf;
    rhs += c * ls;
  }
  return lhs - rhs;
}

inline void g_step(const GbllProblem& prob, std::vector<std::vector<double>>& g) {
  const auto sc = prob.conditional_score(g);
  std::vector<double> p;
  prob.tilt(sc, p);
  for (std::size_t j = 0; j < prob.m(); ++j) {
    const auto r = prob.output(j, p);
    for (std::size_t y = 0; y < r.size(); ++y) {
      // nu-null outputs are unreachable here: divergent instances are screened first.
      g[j][y] = prob.weight(j) * (safe_log(r[y]) - prob.log_nu(j, y));
      if (prob.log_nu(j, y) == -kInf) g[j][y] = -kInf;
    }
  }
}

}  // namespace detail

/**
 * Searches for functions f_j = exp(g_j) maximizing the functional gap at d.
 * Starts: random Gaussian g, per-symbol probes g_j = c_j log(Q_j(x,.)/nu_j),
 * and indicator probes (1_A + nu_j(A) 1_{A^c})^{c_j} for small output alphabets.
 */
inline WorstCaseResult worst_case_functions(const GbllInstance& inst, double d,
                                            const OptimizerOptions& opts = {}) {
  inst.validate();
  const detail::GbllProblem prob(inst.mu, inst.channels, inst.nus, inst.weights);
  const std::size_t m = inst.m();
  constexpr double kFloor = -200.0;

  std::vector<std::vector<std::vector<double>>> starts;
  auto ones = [&] {
    std::vector<std::vector<double>> g(m);
    for (std::size_t j = 0; j < m; ++j) g[j].assign(inst.nus[j].size(), 0.0);
    return g;
  };
  starts.push_back(ones());
  for (std::size_t i = 0; i < prob.s(); ++i) {
    auto g = ones();
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t y = 0; y < g[j].size(); ++y) {
        const double k = inst.channels[j](prob.support()[i], y);
        g[j][y] = k > 0.0 ? inst.weights[j] * (std::log(k) - prob.log_nu(j, y)) : kFloor;
      }
    starts.push_back(std::move(g));
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t ny = inst.nus[j].size();
    if (ny > 10) continue;
    const FiniteMeasure nbar = inst.nus[j].normalized();
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << ny); ++mask) {
      double qa = 0.0;
      for (std::size_t y = 0; y < ny; ++y)
        if (mask >> y & 1) qa += nbar[y];
      if (qa <= 0.0) continue;
      auto g = ones();
      for (std::size_t y = 0; y < ny; ++y) g[j][y] = (mask >> y & 1) ? 0.0 : inst.weights[j] * std::log(qa);
      starts.push_back(std::move(g));
    }
  }
  Philox4x32 rng(opts.seed, 0xf00d);
  for (int r = 0; r < opts.restarts; ++r) {
    auto g = ones();
    for (auto& gj : g)
      for (auto& v : gj) v = 2.0 * rng.normal();
    starts.push_back(std::move(g));
  }

  WorstCaseResult best;
  std::vector<std::vector<double>> best_g;
  for (auto& g : starts) {
    double val = detail::gap_of_logs(prob, g);
    for (int it = 0; it < opts.max_iterations; ++it) {
      auto next = g;
      detail::g_step(prob, next);
      const double nv = detail::gap_of_logs(prob, next);
      if (!(nv >= val - 1e-13)) break;
      const double gain = nv - val;
      g.swap(next);
      val = nv;
      if (gain < opts.tolerance) break;
    }
    if (val > best.gap || best_g.empty()) {
      best.gap = val;
      best_g = g;
    }
  }
  best.gap -= d;
  best.functions.f.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    // Shift so the largest entry is 1; the gap is invariant under scaling.
    double hi = -kInf;
    for (double v : best_g[j]) hi = std::max(hi, v);
    best.functions.f[j].resize(best_g[j].size());
    for (std::size_t y = 0; y < best_g[j].size(); ++y)
      best.functions.f[j][y] = best_g[j][y] == -kInf ? 0.0 : std::exp(best_g[j][y] - hi);
  }
  return best;
}

}  // namespace smoothbl
