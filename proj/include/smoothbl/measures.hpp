#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smoothbl/core.hpp"

// =============================================================================
// Finite measures, channels and the divergences every other module consumes.
// Symbols are dense indices 0..k-1.
// =============================================================================

namespace smoothbl {

/**
 * Nonnegative weight vector over a finite alphabet. Not necessarily normalized.
 *
 * Invariants: every weight is finite and >= 0, and at least one is > 0.
 */
class FiniteMeasure {
 public:
  FiniteMeasure() = default;

  explicit FiniteMeasure(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw DomainError("FiniteMeasure: empty alphabet");
    bool any_positive = false;
    for (double x : w_) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw DomainError("FiniteMeasure: weights must be finite and nonnegative");
      }
      any_positive = any_positive || x > 0.0;
    }
    if (!any_positive) throw DomainError("FiniteMeasure: all weights are zero");
  }

  FiniteMeasure(std::initializer_list<double> weights)
      : FiniteMeasure(std::vector<double>(weights)) {}

  static FiniteMeasure uniform(std::size_t k) {
    return FiniteMeasure(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  static FiniteMeasure point_mass(std::size_t k, std::size_t at) {
    std::vector<double> w(k, 0.0);
    w.at(at) = 1.0;
    return FiniteMeasure(std::move(w));
  }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const noexcept { return w_; }
  const std::vector<double>& vec() const noexcept { return w_; }

  double total() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }
  bool is_probability() const { return std::abs(total() - 1.0) <= kProbabilityTolerance; }

  FiniteMeasure normalized() const {
    const double t = total();
    std::vector<double> w(w_);
    for (double& x : w) x /= t;
    return FiniteMeasure(std::move(w));
  }

  FiniteMeasure scaled(double s) const {
    if (!(s > 0.0)) throw DomainError("FiniteMeasure::scaled: factor must be positive");
    std::vector<double> w(w_);
    for (double& x : w) x *= s;
    return FiniteMeasure(std::move(w));
  }

  /// Indices with strictly positive weight.
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] > 0.0) s.push_back(i);
    return s;
  }

  /// True when every positive weight of this measure sits on the support of `other`.
  bool absolutely_continuous_wrt(const FiniteMeasure& other) const {
    require_same_size(size(), other.size(), "absolute continuity");
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] > 0.0 && other.w_[i] <= 0.0) return false;
    return true;
  }

  friend bool operator==(const FiniteMeasure&, const FiniteMeasure&) = default;

 private:
  std::vector<double> w_;
};

/// Row-stochastic kernel: rows are input symbols, columns output symbols.
class Channel {
 public:
  Channel() = default;

  explicit Channel(Eigen::MatrixXd kernel) : k_(std::move(kernel)) {
    if (k_.rows() == 0 || k_.cols() == 0) throw DomainError("Channel: empty kernel");
    for (Eigen::Index x = 0; x < k_.rows(); ++x) {
      double row = 0.0;
      for (Eigen::Index y = 0; y < k_.cols(); ++y) {
        const double v = k_(x, y);
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw DomainError("Channel: entries must be finite and nonnegative");
        }
        row += v;
      }
      if (std::abs(row - 1.0) > kProbabilityTolerance) {
        throw DomainError("Channel: row " + std::to_string(x) + " sums to " +
                          std::to_string(row));
      }
    }
  }

  static Channel from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DomainError("Channel: no rows");
    Eigen::MatrixXd k(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require_same_size(rows[i].size(), rows.front().size(), "Channel row length");
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return Channel(std::move(k));
  }

  static Channel identity(std::size_t k) {
    return Channel(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k),
                                             static_cast<Eigen::Index>(k)));
  }

  /// Binary symmetric channel with crossover probability p.
  static Channel bsc(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bsc: crossover outside [0,1]");
    Eigen::MatrixXd k(2, 2);
    k << 1.0 - p, p, p, 1.0 - p;
    return Channel(std::move(k));
  }

  /// Deterministic channel x -> map[x].
  static Channel deterministic(const std::vector<std::size_t>& map, std::size_t outputs) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(map.size()),
                                              static_cast<Eigen::Index>(outputs));
    for (std::size_t x = 0; x < map.size(); ++x) {
      if (map[x] >= outputs) throw DomainError("deterministic channel: output out of range");
      k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(map[x])) = 1.0;
    }
    return Channel(std::move(k));
  }

  std::size_t inputs() const noexcept { return static_cast<std::size_t>(k_.rows()); }
  std::size_t outputs() const noexcept { return static_cast<std::size_t>(k_.cols()); }
  double operator()(std::size_t x, std::size_t y) const {
    return k_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  const Eigen::MatrixXd& kernel() const noexcept { return k_; }

  friend bool operator==(const Channel& a, const Channel& b) {
    return a.k_.rows() == b.k_.rows() && a.k_.cols() == b.k_.cols() && a.k_ == b.k_;
  }

 private:
  Eigen::MatrixXd k_;
};

/**
 * The data (mu, [Q_{Y_j|X}], [nu_j], [c_j]) defining a best-constant problem.
 * mu and nu_j may be unnormalized.
 */
struct GbllInstance {
  FiniteMeasure mu;
  std::vector<Channel> channels;
  std::vector<FiniteMeasure> nus;
  std::vector<double> weights;

  std::size_t m() const noexcept { return channels.size(); }
  std::size_t input_size() const noexcept { return mu.size(); }

  void validate() const {
    if (channels.empty()) throw DomainError("GbllInstance: need at least one channel");
    require_same_size(nus.size(), channels.size(), "GbllInstance nus vs channels");
    require_same_size(weights.size(), channels.size(), "GbllInstance weights vs channels");
    for (std::size_t j = 0; j < channels.size(); ++j) {
      require_same_size(channels[j].inputs(), mu.size(), "GbllInstance channel input");
      require_same_size(channels[j].outputs(), nus[j].size(), "GbllInstance channel output");
      if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) {
        throw DomainError("GbllInstance: weights must be positive and finite");
      }
    }
  }

  friend bool operator==(const GbllInstance&, const GbllInstance&) = default;
};

// -----------------------------------------------------------------------------
// Divergences
// -----------------------------------------------------------------------------

/// D(P || mu) in nats; +inf when P is not dominated by mu. mu may be unnormalized.
inline double rel_entropy(const FiniteMeasure& p, const FiniteMeasure& mu) {
  require_same_size(p.size(), mu.size(), "rel_entropy");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = xlogx_over_y(p[i], mu[i]);
    if (t == kInf) return kInf;
    acc += t;
  }
  return acc;
}

/// Renyi divergence of order alpha: 1/(alpha-1) log sum P^alpha mu^(1-alpha).
inline double renyi_div(double alpha, const FiniteMeasure& p, const FiniteMeasure& mu) {
  require_same_size(p.size(), mu.size(), "renyi_div");
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw DomainError("renyi_div: alpha must lie in (0,1) or (1,inf)");
  }
  // Work in the log domain to survive extreme orders.
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (mu[i] <= 0.0) {
      if (alpha > 1.0) return kInf;
      continue;
    }
    terms.push_back(alpha * std::log(p[i]) + (1.0 - alpha) * std::log(mu[i]));
  }
  const double ls = log_sum_exp(terms);
  if (ls == -kInf) return kInf;  // P and mu mutually singular, alpha < 1
  return ls / (alpha - 1.0);
}

/// E_gamma(nu || mu) = sum_x (nu(x) - gamma mu(x))^+ = sup_A nu(A) - gamma mu(A).
inline double e_gamma(const FiniteMeasure& nu, const FiniteMeasure& mu, double gamma) {
  require_same_size(nu.size(), mu.size(), "e_gamma");
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw DomainError("e_gamma: gamma must be >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) acc += std::max(0.0, nu[i] - gamma * mu[i]);
  return acc;
}

/// Information density log(P(x)/mu(x)); +inf where mu vanishes, -inf where P does.
inline double info_density(const FiniteMeasure& p, const FiniteMeasure& mu, std::size_t x) {
  require_same_size(p.size(), mu.size(), "info_density");
  if (x >= p.size()) throw DimensionError("info_density: symbol out of range");
  if (p[x] <= 0.0) return mu[x] > 0.0 ? -kInf : 0.0;
  if (mu[x] <= 0.0) return kInf;
  return std::log(p[x] / mu[x]);
}

/// Output measure P^T K; total mass is preserved.
inline FiniteMeasure push_forward(const FiniteMeasure& p, const Channel& ch) {
  require_same_size(p.size(), ch.inputs(), "push_forward");
  std::vector<double> out(ch.outputs(), 0.0);
  const auto& k = ch.kernel();
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    for (std::size_t y = 0; y < out.size(); ++y)
      out[y] += p[x] * k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  return FiniteMeasure(std::move(out));
}

// -----------------------------------------------------------------------------
// Products
// -----------------------------------------------------------------------------

inline FiniteMeasure tensor(const FiniteMeasure& a, const FiniteMeasure& b) {
  std::vector<double> w(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) w[i * b.size() + j] = a[i] * b[j];
  return FiniteMeasure(std::move(w));
}

inline Channel tensor(const Channel& a, const Channel& b) {
  const auto& ka = a.kernel();
  const auto& kb = b.kernel();
  Eigen::MatrixXd k(ka.rows() * kb.rows(), ka.cols() * kb.cols());
  for (Eigen::Index i = 0; i < ka.rows(); ++i)
    for (Eigen::Index j = 0; j < ka.cols(); ++j)
      k.block(i * kb.rows(), j * kb.cols(), kb.rows(), kb.cols()) = ka(i, j) * kb;
  return Channel(std::move(k));
}

inline GbllInstance tensor(const GbllInstance& a, const GbllInstance& b) {
  a.validate();
  b.validate();
  if (a.m() != b.m()) throw DomainError("tensor: instances have different numbers of channels");
  for (std::size_t j = 0; j < a.m(); ++j) {
    if (a.weights[j] != b.weights[j]) throw DomainError("tensor: weight mismatch");
  }
  GbllInstance out{tensor(a.mu, b.mu), {}, {}, a.weights};
  for (std::size_t j = 0; j < a.m(); ++j) {
    out.channels.push_back(tensor(a.channels[j], b.channels[j]));
    out.nus.push_back(tensor(a.nus[j], b.nus[j]));
  }
  return out;
}

/// n-fold tensor power; the product alphabet size is capped at `cap`.
inline GbllInstance tensor_power(const GbllInstance& inst, std::size_t n,
                                 std::size_t cap = 1'000'000) {
  if (n == 0) throw DomainError("tensor_power: n must be >= 1");
  inst.validate();
  (void)checked_power(inst.mu.size(), n, cap);
  GbllInstance out = inst;
  for (std::size_t i = 1; i < n; ++i) out = tensor(out, inst);
  return out;
}

inline FiniteMeasure tensor_power(const FiniteMeasure& p, std::size_t n) {
  if (n == 0) throw DomainError("tensor_power: n must be >= 1");
  FiniteMeasure out = p;
  for (std::size_t i = 1; i < n; ++i) out = tensor(out, p);
  return out;
}

inline Channel tensor_power(const Channel& ch, std::size_t n) {
  if (n == 0) throw DomainError("tensor_power: n must be >= 1");
  Channel out = ch;
  for (std::size_t i = 1; i < n; ++i) out = tensor(out, ch);
  return out;
}

}  // namespace smoothbl
