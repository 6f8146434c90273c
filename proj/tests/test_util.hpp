#pragma once

// Random instance generators and brute-force oracles shared by the test suites.
// Oracles here are written independently of the library's optimization paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "smoothbl/measures.hpp"
#include "smoothbl/rng.hpp"

namespace smoothbl::test {

inline FiniteMeasure random_probability(Philox4x32& rng, std::size_t k) {
  return FiniteMeasure(rng.dirichlet1(k));
}

/// Unnormalized measure with total mass uniform in (0, max_total].
inline FiniteMeasure random_measure(Philox4x32& rng, std::size_t k, double max_total) {
  auto w = rng.dirichlet1(k);
  const double t = max_total * rng.uniform();
  for (auto& v : w) v *= t;
  return FiniteMeasure(std::move(w));
}

inline Channel random_channel(Philox4x32& rng, std::size_t in, std::size_t out) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < in; ++i) {
    auto r = rng.dirichlet1(out);
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < out; ++j) s += r[j];
    r[out - 1] = 1.0 - s;  // exact row sums
    if (r[out - 1] < 0.0) r[out - 1] = 0.0;
    rows.push_back(std::move(r));
  }
  return Channel::from_rows(rows);
}

/// sup over all subsets A of nu(A) - gamma mu(A), by enumeration.
inline double e_gamma_brute(const FiniteMeasure& nu, const FiniteMeasure& mu, double gamma) {
  const std::size_t k = nu.size();
  double best = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    double raw = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) raw += nu[i] - gamma * mu[i];
    best = std::max(best, raw);
  }
  return best;
}

/// D(P||mu) recomputed with long double, independent of the library path.
inline double rel_entropy_ld(const std::vector<double>& p, const std::vector<double>& mu) {
  long double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    if (mu[i] <= 0) return INFINITY;
    acc += static_cast<long double>(p[i]) * std::log(static_cast<long double>(p[i]) / mu[i]);
  }
  return static_cast<double>(acc);
}

inline std::vector<double> push_ld(const std::vector<double>& p, const Channel& ch) {
  std::vector<double> out(ch.outputs(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x)
    for (std::size_t y = 0; y < out.size(); ++y) out[y] += p[x] * ch(x, y);
  return out;
}

/// Objective of the best-constant problem recomputed from scratch.
inline double objective_oracle(const GbllInstance& inst, const std::vector<double>& p) {
  double v = -rel_entropy_ld(p, inst.mu.vec());
  for (std::size_t j = 0; j < inst.m(); ++j)
    v += inst.weights[j] * rel_entropy_ld(push_ld(p, inst.channels[j]), inst.nus[j].vec());
  return v;
}

/// Random instance: |X| in [2, max_x], m in [1, max_m], |Y_j| in [2, max_y].
inline GbllInstance random_instance(Philox4x32& rng, std::size_t max_x, std::size_t max_y,
                                    std::size_t max_m, bool probability_mu = false) {
  const std::size_t kx = 2 + rng.below(max_x - 1);
  const std::size_t m = 1 + rng.below(max_m);
  GbllInstance inst;
  inst.mu = probability_mu ? random_probability(rng, kx) : random_measure(rng, kx, 2.0);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t ky = 2 + rng.below(max_y - 1);
    inst.channels.push_back(random_channel(rng, kx, ky));
    auto nu = rng.dirichlet1(ky);
    for (auto& v : nu) v = 0.05 + v;  // keep nu away from zero
    inst.nus.emplace_back(std::move(nu));
    inst.weights.push_back(0.2 + 1.3 * rng.uniform());
  }
  return inst;
}

/// sigma(P) = sum c D(P Q_l || Q Q_l) - D(P || Q), recomputed in long double.
inline double sigma_oracle(const FiniteMeasure& q, const std::vector<Channel>& chs,
                           const std::vector<double>& c, const std::vector<double>& p) {
  double v = -rel_entropy_ld(p, q.vec());
  for (std::size_t l = 0; l < chs.size(); ++l)
    v += c[l] * rel_entropy_ld(push_ld(p, chs[l]), push_ld(q.vec(), chs[l]));
  return v;
}

/// Concave envelope of sigma at a binary Q by brute force over pairs of grid
/// points bracketing Q (on a segment, two points suffice).
inline double binary_envelope_oracle(const FiniteMeasure& q, const std::vector<Channel>& chs,
                                     const std::vector<double>& c, int n) {
  std::vector<double> sig(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    sig[static_cast<std::size_t>(i)] = sigma_oracle(q, chs, c, {t, 1.0 - t});
  }
  const double q0 = q[0];
  double best = 0.0;  // P = Q gives 0
  for (int i = 0; i <= n; ++i) {
    const double a = static_cast<double>(i) / n;
    if (a > q0) break;
    for (int j = n; j >= 0; --j) {
      const double b = static_cast<double>(j) / n;
      if (b < q0) break;
      if (b == a) {
        best = std::max(best, sig[static_cast<std::size_t>(i)]);
        continue;
      }
      const double lam = (b - q0) / (b - a);
      best = std::max(best, lam * sig[static_cast<std::size_t>(i)] + (1 - lam) * sig[static_cast<std::size_t>(j)]);
    }
  }
  return best;
}

/// Identity channel with c = 2: d(mu) = max_x log(mu(x)/nu(x)^2), so the best
/// mass-cutting mu = s.Q under sum Q(1-s) <= delta is a water-filling level L
/// with s(x) = min(1, L nu(x)^2/Q(x)); returns log L.
inline double identity_c2_smooth_oracle(const std::vector<double>& q, const std::vector<double>& nu,
                                        double delta) {
  auto e1 = [&](double log_l) {
    long double acc = 0;
    for (std::size_t x = 0; x < q.size(); ++x) {
      if (q[x] <= 0) continue;
      const long double s = std::min(1.0L, std::exp(static_cast<long double>(log_l)) * nu[x] * nu[x] / q[x]);
      acc += q[x] * (1 - s);
    }
    return static_cast<double>(acc);
  };
  double lo = -200.0, hi = 200.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (e1(mid) <= delta ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace smoothbl::test
