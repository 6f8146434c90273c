#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smoothbl/core.hpp"
#include "smoothbl/gaussian.hpp"
#include "smoothbl/rng.hpp"

// Converse bounds for common-randomness generation. All bounds are returned
// raw; negative values are vacuous. Use clamp_unit() for presentation.

namespace smoothbl {

/// Rates of the key K and of the messages W_j (nats per symbol).
struct RatePoint {
  double R = 0.0;
  std::vector<double> Rj;

  void validate() const {
    if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("RatePoint: R must be finite and >= 0");
    for (double r : Rj)
      if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("RatePoint: R_j must be finite and >= 0");
  }
};

struct SchemeSizes {
  std::uint64_t k_size = 1;
  std::vector<std::uint64_t> w_sizes;

  void validate() const {
    if (k_size < 1) throw DomainError("SchemeSizes: |K| must be >= 1");
    for (auto w : w_sizes)
      if (w < 1) throw DomainError("SchemeSizes: |W_j| must be >= 1");
  }
};

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/// Standard normal tail Q(x) = P[N(0,1) > x].
inline double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace detail {

inline double weight_sum(const std::vector<double>& w) {
  for (double c : w)
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("weights must be positive and finite");
  return std::accumulate(w.begin(), w.end(), 0.0);
}

}  // namespace detail

// -----------------------------------------------------------------------------
// Rate region: d* + sum_j c_j R_j >= (sum_j c_j - 1) R for every c.
// -----------------------------------------------------------------------------

inline bool region_check(const RatePoint& pt, double dstar_value, const std::vector<double>& weights) {
  pt.validate();
  require_same_size(pt.Rj.size(), weights.size(), "region_check");
  const double sc = detail::weight_sum(weights);
  double lhs = dstar_value;
  for (std::size_t j = 0; j < weights.size(); ++j) lhs += weights[j] * pt.Rj[j];
  const double rhs = (sc - 1.0) * pt.R;
  return lhs >= rhs - 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

struct RegionTracePoint {
  std::vector<double> c;
  double dstar = 0.0;
  double r_max = kInf;
};

struct RegionTrace {
  std::vector<RegionTracePoint> points;
  std::vector<std::string> notes;  ///< grid points skipped because sum c <= 1
  double r_max = kInf;             ///< pointwise minimum over the grid
};

/// R_max(c) = (d*(c) + sum_j c_j R_j) / (sum_j c_j - 1) over a grid of weight vectors.
inline RegionTrace region_trace(const std::function<double(const std::vector<double>&)>& dstar_fn,
                                const std::vector<std::vector<double>>& c_grid,
                                const std::vector<double>& rj) {
  RegionTrace out;
  for (const auto& c : c_grid) {
    require_same_size(c.size(), rj.size(), "region_trace");
    const double sc = detail::weight_sum(c);
    if (sc <= 1.0) {
      std::string s = "skipped c = (";
      for (std::size_t j = 0; j < c.size(); ++j) s += (j ? ", " : "") + std::to_string(c[j]);
      out.notes.push_back(s + "): sum of weights <= 1");
      continue;
    }
    RegionTracePoint p{c, dstar_fn(c), 0.0};
    double num = p.dstar;
    for (std::size_t j = 0; j < c.size(); ++j) num += c[j] * rj[j];
    p.r_max = num / (sc - 1.0);
    out.r_max = std::min(out.r_max, p.r_max);
    out.points.push_back(std::move(p));
  }
  return out;
}

// -----------------------------------------------------------------------------
// Single-shot bounds
// -----------------------------------------------------------------------------

struct OneCommParams {
  double delta = 0.0;
  double delta1 = 0.0;
  double delta3 = 0.0;
  double delta4 = 0.0;
  double eps = 0.0;
  double eps_prime = 0.0;
  double c = 1.0;
  double d = 0.0;
};

/// Lower bound on delta_2 (TV of K to uniform) for the one-communicator problem, m = 1.
inline double one_comm_bound(const OneCommParams& p, const SchemeSizes& sizes) {
  sizes.validate();
  if (sizes.w_sizes.size() != 1) throw DomainError("one_comm_bound: exactly one message is supported");
  auto open_unit = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError(std::string("one_comm_bound: ") + name + " must lie in (0,1)");
  };
  open_unit(p.delta3, "delta3");
  open_unit(p.delta4, "delta4");
  open_unit(p.eps, "eps");
  open_unit(p.eps_prime, "eps_prime");
  if (!(p.delta >= 0.0 && p.delta < 1.0)) throw DomainError("one_comm_bound: delta must lie in [0,1)");
  if (!(p.delta1 >= 0.0 && p.delta1 < 1.0)) throw DomainError("one_comm_bound: delta1 must lie in [0,1)");
  if (std::abs(p.delta3 * p.delta4 - (p.delta1 + p.delta)) > 1e-9)
    throw DomainError("one_comm_bound: need delta3 * delta4 = delta1 + delta");
  if (!(p.eps_prime > p.delta4)) throw DomainError("one_comm_bound: need eps_prime > delta4");
  if (!(p.c > 0.0) || !std::isfinite(p.c)) throw DomainError("one_comm_bound: c must be positive");

  const double k = static_cast<double>(sizes.k_size);
  const double w = static_cast<double>(sizes.w_sizes[0]);
  const double a = 1.0 / (p.c * (1.0 - p.eps));
  if (p.d == kInf) return -kInf;
  // Last term in the log domain: 2^{1/(1-eps)} e^{d a} |W| / ((eps'-delta4)^a |K|^{1-a}).
  const double log_last = std::log(2.0) / (1.0 - p.eps) + p.d * a + std::log(w) -
                          a * std::log(p.eps_prime - p.delta4) - (1.0 - a) * std::log(k);
  return 1.0 - p.delta - p.delta3 - 1.0 / k - std::exp(log_last);
}

/// Lower bound on (1/2)|Q_{K^m} - T_{K^m}| for omniscient-helper schemes.
inline double omni_bound(const SchemeSizes& sizes, const std::vector<double>& weights, double d, double delta) {
  sizes.validate();
  require_same_size(sizes.w_sizes.size(), weights.size(), "omni_bound");
  const double sc = detail::weight_sum(weights);
  if (d == kInf) return -kInf;
  const double k = static_cast<double>(sizes.k_size);
  double log_term = d / sc - (1.0 - 1.0 / sc) * std::log(k);
  for (std::size_t l = 0; l < weights.size(); ++l)
    log_term += weights[l] / sc * std::log(static_cast<double>(sizes.w_sizes[l]));
  return 1.0 - 1.0 / k - std::exp(log_term) - delta;
}

/// 1 - 1/M - exp(-(1-alpha) D_alpha(T || mu)), a lower bound on E_1(T || mu) for uniform T.
inline double tv_renyi_bound(std::uint64_t m, double alpha, double renyi_value) {
  if (m < 1) throw DomainError("tv_renyi_bound: M must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("tv_renyi_bound: alpha must lie in (0,1)");
  return 1.0 - 1.0 / static_cast<double>(m) - std::exp(-(1.0 - alpha) * renyi_value);
}

/// Metric translation between (delta_1, delta_2) and the joint TV delta.
struct MetricPair {
  double delta1 = 0.0;  ///< 1 - P[K = K_1 = ... = K_m]
  double delta2 = 0.0;  ///< (1/2)|Q_K - T_K|
};

inline MetricPair split_joint_tv(double delta) { return {delta, delta}; }
inline double joint_tv_from_pair(const MetricPair& p) { return p.delta1 + p.delta2; }

// -----------------------------------------------------------------------------
// Second-order machinery
// -----------------------------------------------------------------------------

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// P[lambda_max((A + A^T)/sqrt 2) <= D1], A with iid N(0,1) entries. Shards of
/// 4096 samples draw from independent Philox streams, so the estimate depends
/// only on (seed, samples).
inline McEstimate wigner_lambda_max_cdf(Eigen::Index dim, double d1, std::uint64_t samples, std::uint64_t seed) {
  if (dim < 1) throw DomainError("wigner_lambda_max_cdf: dim must be >= 1");
  if (samples < 1) throw DomainError("wigner_lambda_max_cdf: samples must be >= 1");
  constexpr std::uint64_t kShard = 4096;
  std::uint64_t hits = 0;
  Eigen::MatrixXd a(dim, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dim);
  for (std::uint64_t start = 0, shard = 0; start < samples; start += kShard, ++shard) {
    Philox4x32 rng(seed, 0x5769676e00000000ull + shard);
    const std::uint64_t end = std::min(samples, start + kShard);
    for (std::uint64_t s = start; s < end; ++s) {
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = rng.normal();
      double top;
      if (dim == 1) {
        top = std::sqrt(2.0) * a(0, 0);
      } else {
        es.compute((a + a.transpose()) / std::sqrt(2.0), Eigen::EigenvaluesOnly);
        top = es.eigenvalues()(dim - 1);
      }
      if (top <= d1) ++hits;
    }
  }
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

struct SecondOrderReport {
  double variance = 0.0;   ///< V
  McEstimate wigner;       ///< P[lambda_max(W) <= D1]
  double tail = 0.0;       ///< Q(D2 / sqrt V)
  double bound = 0.0;      ///< wigner.estimate - tail
  Eigen::Index dim = 0;
};

/// Asymptotic TV lower bound for Gaussian schemes whose rates violate the
/// second-order condition by (log e / 2)(m - sum c) D1 + D2. `dim` defaults to
/// the source dimension.
inline SecondOrderReport second_order_bound(const GaussianInstance& inst, double d1, double d2,
                                            std::uint64_t samples, std::uint64_t seed,
                                            std::optional<Eigen::Index> dim = std::nullopt) {
  if (!(d1 > 0.0 && d1 < 1.0)) throw DomainError("second_order_bound: D1 must lie in (0,1)");
  if (!(d2 > 0.0 && d2 < 1.0)) throw DomainError("second_order_bound: D2 must lie in (0,1)");
  SecondOrderReport r;
  r.variance = variance_V(inst);
  r.dim = dim.value_or(inst.dim());
  r.wigner = wigner_lambda_max_cdf(r.dim, d1, samples, seed);
  // V = 0 gives Q(+inf) = 0.
  r.tail = r.variance > 0.0 ? normal_tail(d2 / std::sqrt(r.variance)) : 0.0;
  r.bound = r.wigner.estimate - r.tail;
  return r;
}

}  // namespace smoothbl
