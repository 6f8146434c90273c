#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "smoothbl/bounds.hpp"
#include "smoothbl/core.hpp"
#include "smoothbl/measures.hpp"
#include "smoothbl/rng.hpp"

// Omniscient-helper common-randomness schemes at tiny blocklength. The helper
// sees the whole source sequence (Y_1..Y_m)^n, emits (K, W_1..W_m); terminal j
// sees (Y_j^n, W_j) and outputs K_j. Everything is an explicit conditional
// table, so all metrics below are exact sums.
//
// Indexing: a source letter is (y_1, ..., y_m) in mixed radix with y_1 most
// significant; sequences put the first letter most significant. This matches
// tensor_power() of omniscient_instance().

namespace smoothbl {

inline constexpr std::size_t kCrEnumerationCap = 10'000'000;

struct CrScheme {
  std::size_t n = 1;
  FiniteMeasure source;                ///< single-letter joint law of (Y_1..Y_m)
  std::vector<std::size_t> alphabets;  ///< |Y_j|
  std::size_t k_size = 1;
  std::vector<std::size_t> w_sizes;
  /// rows: source sequences; cols: (k, w_1, ..., w_m), k most significant.
  Eigen::MatrixXd encoder;
  /// decoders[j]: rows y_j^n * |W_j| + w_j, cols k.
  std::vector<Eigen::MatrixXd> decoders;

  std::size_t m() const noexcept { return alphabets.size(); }
  std::size_t letters() const {
    return std::accumulate(alphabets.begin(), alphabets.end(), std::size_t{1}, std::multiplies<>());
  }
  std::size_t sequences() const { return checked_power(letters(), n, kCrEnumerationCap); }
  std::size_t messages() const {
    return std::accumulate(w_sizes.begin(), w_sizes.end(), std::size_t{1}, std::multiplies<>());
  }

  /// y_j^n index of every source sequence.
  std::vector<std::vector<std::size_t>> projections() const {
    const std::size_t ns = sequences();
    std::vector<std::vector<std::size_t>> out(m(), std::vector<std::size_t>(ns, 0));
    for (std::size_t s = 0; s < ns; ++s) {
      const auto seq = digits_of(s, letters(), n);
      for (std::size_t j = 0; j < m(); ++j) {
        std::size_t idx = 0;
        for (std::size_t letter : seq) {
          std::size_t stride = 1;
          for (std::size_t l = j + 1; l < m(); ++l) stride *= alphabets[l];
          idx = idx * alphabets[j] + (letter / stride) % alphabets[j];
        }
        out[j][s] = idx;
      }
    }
    return out;
  }

  void validate() const;
};

namespace detail {

inline void check_stochastic_rows(const Eigen::MatrixXd& t, const std::string& what) {
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
      if (!(t(r, c) >= 0.0) || !std::isfinite(t(r, c)))
        throw DomainError(what + ": row " + std::to_string(r) + " has an invalid entry");
      s += t(r, c);
    }
    if (std::abs(s - 1.0) > 1e-9) throw DomainError(what + ": row " + std::to_string(r) + " does not sum to 1");
  }
}

}  // namespace detail

inline void CrScheme::validate() const {
  if (n < 1) throw DomainError("CrScheme: n must be >= 1");
  if (alphabets.empty()) throw DomainError("CrScheme: need at least one terminal");
  if (letters() != source.size()) throw DimensionError("CrScheme: source size does not match alphabets");
  if (!source.is_probability()) throw DomainError("CrScheme: source must be a probability distribution");
  if (k_size < 1) throw DomainError("CrScheme: |K| must be >= 1");
  if (w_sizes.size() != m()) throw DimensionError("CrScheme: need one message size per terminal");
  for (auto w : w_sizes)
    if (w < 1) throw DomainError("CrScheme: message sizes must be >= 1");
  const std::size_t ns = sequences();
  if (static_cast<std::size_t>(encoder.rows()) != ns ||
      static_cast<std::size_t>(encoder.cols()) != k_size * messages())
    throw DimensionError("CrScheme: encoder table has the wrong shape");
  detail::check_stochastic_rows(encoder, "CrScheme encoder");
  if (decoders.size() != m()) throw DimensionError("CrScheme: need one decoder per terminal");
  for (std::size_t j = 0; j < m(); ++j) {
    const std::size_t rows = checked_power(alphabets[j], n, kCrEnumerationCap) * w_sizes[j];
    if (static_cast<std::size_t>(decoders[j].rows()) != rows ||
        static_cast<std::size_t>(decoders[j].cols()) != k_size)
      throw DimensionError("CrScheme: decoder " + std::to_string(j) + " has the wrong shape");
    detail::check_stochastic_rows(decoders[j], "CrScheme decoder " + std::to_string(j));
  }
}

/// Doubly symmetric binary source: uniform bits with P[Y_1 != Y_2] = p.
inline FiniteMeasure dsbs(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("dsbs: crossover outside [0,1]");
  return FiniteMeasure({(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0});
}

/// Best-constant instance with X = (Y_1..Y_m), mu = Q, coordinate projections, nu_j = Q_{Y_j}.
inline GbllInstance omniscient_instance(const FiniteMeasure& source, const std::vector<std::size_t>& alphabets,
                                        const std::vector<double>& weights) {
  const std::size_t letters =
      std::accumulate(alphabets.begin(), alphabets.end(), std::size_t{1}, std::multiplies<>());
  require_same_size(source.size(), letters, "omniscient_instance");
  require_same_size(weights.size(), alphabets.size(), "omniscient_instance weights");
  GbllInstance inst{source, {}, {}, weights};
  std::size_t stride = letters;
  for (std::size_t j = 0; j < alphabets.size(); ++j) {
    stride /= alphabets[j];
    std::vector<std::size_t> map(letters);
    for (std::size_t x = 0; x < letters; ++x) map[x] = (x / stride) % alphabets[j];
    inst.channels.push_back(Channel::deterministic(map, alphabets[j]));
    inst.nus.push_back(push_forward(source, inst.channels.back()));
  }
  inst.validate();
  return inst;
}

struct SchemeEvaluation {
  double p_agree = 0.0;      ///< P[K = K_1 = ... = K_m]
  double tv_to_ideal = 0.0;  ///< (1/2)|Q_{K_1..K_m} - T_{K_1..K_m}|
  double tv_full = 0.0;      ///< same with K included in the tuple
  double delta1 = 0.0;       ///< 1 - p_agree
  double delta2 = 0.0;       ///< (1/2)|Q_K - uniform|
  std::vector<double> joint_k;  ///< law of (K_1..K_m), K_1 most significant
};

/// Exact evaluation by summing over sequences, encoder outputs and decoder outputs.
inline SchemeEvaluation evaluate_scheme(const CrScheme& s) {
  s.validate();
  const std::size_t ns = s.sequences();
  const std::size_t nm = s.messages();
  const std::size_t km = checked_power(s.k_size, s.m(), kCrEnumerationCap);
  const double work = static_cast<double>(ns) * static_cast<double>(s.k_size * nm) * static_cast<double>(km);
  if (work > static_cast<double>(kCrEnumerationCap))
    throw ResourceCapError("evaluate_scheme: enumeration exceeds " + std::to_string(kCrEnumerationCap));

  const auto proj = s.projections();
  const FiniteMeasure qn = tensor_power(s.source, s.n);
  std::vector<double> full(s.k_size * km, 0.0);
  std::vector<double> joint(km);
  for (std::size_t seq = 0; seq < ns; ++seq) {
    if (qn[seq] == 0.0) continue;
    for (std::size_t col = 0; col < s.k_size * nm; ++col) {
      const double pe = qn[seq] * s.encoder(static_cast<Eigen::Index>(seq), static_cast<Eigen::Index>(col));
      if (pe == 0.0) continue;
      const std::size_t k = col / nm;
      const auto w = digits_of_mixed(col % nm, s.w_sizes);
      // Decoders act independently given their inputs.
      std::fill(joint.begin(), joint.end(), 0.0);
      joint[0] = 1.0;
      std::size_t filled = 1;
      for (std::size_t j = 0; j < s.m(); ++j) {
        const auto row = static_cast<Eigen::Index>(proj[j][seq] * s.w_sizes[j] + w[j]);
        for (std::size_t i = filled; i-- > 0;) {
          const double base = joint[i];
          for (std::size_t kj = 0; kj < s.k_size; ++kj)
            joint[i * s.k_size + kj] = base * s.decoders[j](row, static_cast<Eigen::Index>(kj));
        }
        filled *= s.k_size;
      }
      for (std::size_t i = 0; i < km; ++i) full[k * km + i] += pe * joint[i];
    }
  }

  SchemeEvaluation ev;
  ev.joint_k.assign(km, 0.0);
  std::vector<double> qk(s.k_size, 0.0);
  std::size_t diag_step = 0;  // index step between (k,..,k) and (k+1,..,k+1) within K^m
  for (std::size_t j = 0; j < s.m(); ++j) diag_step = diag_step * s.k_size + 1;
  for (std::size_t k = 0; k < s.k_size; ++k)
    for (std::size_t i = 0; i < km; ++i) {
      ev.joint_k[i] += full[k * km + i];
      qk[k] += full[k * km + i];
    }
  const double t = 1.0 / static_cast<double>(s.k_size);
  for (std::size_t k = 0; k < s.k_size; ++k) ev.p_agree += full[k * km + k * diag_step];
  for (std::size_t i = 0; i < km; ++i) {
    const bool diag = i % diag_step == 0 && i / diag_step < s.k_size;
    ev.tv_to_ideal += std::abs(ev.joint_k[i] - (diag ? t : 0.0));
  }
  for (std::size_t k = 0; k < s.k_size; ++k)
    for (std::size_t i = 0; i < km; ++i)
      ev.tv_full += std::abs(full[k * km + i] - (i == k * diag_step ? t : 0.0));
  for (double v : qk) ev.delta2 += std::abs(v - t);
  ev.tv_to_ideal *= 0.5;
  ev.tv_full *= 0.5;
  ev.delta2 *= 0.5;
  ev.delta1 = 1.0 - ev.p_agree;
  return ev;
}

/// Balanced random labelling of sequences (shuffle, then label i mod size) for
/// K and each W_j; decoder j is maximum-posterior given (y_j^n, w_j).
inline CrScheme random_binning_scheme(const FiniteMeasure& source, const std::vector<std::size_t>& alphabets,
                                      std::size_t n, std::size_t k_size, const std::vector<std::size_t>& w_sizes,
                                      std::uint64_t seed) {
  CrScheme s{n, source, alphabets, k_size, w_sizes, {}, {}};
  if (k_size < 1) throw DomainError("random_binning_scheme: |K| must be >= 1");
  if (w_sizes.size() != alphabets.size()) throw DimensionError("random_binning_scheme: one size per terminal");
  for (auto w : w_sizes)
    if (w < 1) throw DomainError("random_binning_scheme: message sizes must be >= 1");
  const std::size_t ns = s.sequences();
  const std::size_t nm = s.messages();
  Philox4x32 rng(seed, 0xb1);
  auto labels = [&](std::size_t size) {
    std::vector<std::size_t> order(ns);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> lab(ns);
    for (std::size_t i = 0; i < ns; ++i) lab[order[i]] = i % size;
    return lab;
  };
  const auto kl = labels(k_size);
  std::vector<std::vector<std::size_t>> wl;
  for (auto w : w_sizes) wl.push_back(labels(w));

  s.encoder = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(k_size * nm));
  for (std::size_t seq = 0; seq < ns; ++seq) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < w_sizes.size(); ++j) w = w * w_sizes[j] + wl[j][seq];
    s.encoder(static_cast<Eigen::Index>(seq), static_cast<Eigen::Index>(kl[seq] * nm + w)) = 1.0;
  }

  const auto proj = s.projections();
  const FiniteMeasure qn = tensor_power(source, n);
  for (std::size_t j = 0; j < alphabets.size(); ++j) {
    const std::size_t rows = checked_power(alphabets[j], n, kCrEnumerationCap) * w_sizes[j];
    Eigen::MatrixXd post = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(k_size));
    for (std::size_t seq = 0; seq < ns; ++seq)
      post(static_cast<Eigen::Index>(proj[j][seq] * w_sizes[j] + wl[j][seq]), static_cast<Eigen::Index>(kl[seq])) +=
          qn[seq];
    Eigen::MatrixXd dec = Eigen::MatrixXd::Zero(post.rows(), post.cols());
    for (Eigen::Index r = 0; r < post.rows(); ++r) {
      Eigen::Index best = 0;
      post.row(r).maxCoeff(&best);  // first maximum on ties
      dec(r, best) = 1.0;
    }
    s.decoders.push_back(std::move(dec));
  }
  return s;
}

/// Mixes every encoder and decoder row with a random distribution: row <- (1-eta) row + eta Dir(1).
inline CrScheme perturbed_scheme(const CrScheme& s, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("perturbed_scheme: eta must lie in [0,1]");
  CrScheme out = s;
  Philox4x32 rng(seed, 0x9e);
  auto mix = [&](Eigen::MatrixXd& t) {
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      const auto d = rng.dirichlet1(static_cast<std::size_t>(t.cols()));
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = (1.0 - eta) * t(r, c) + eta * d[static_cast<std::size_t>(c)];
    }
  };
  mix(out.encoder);
  for (auto& d : out.decoders) mix(d);
  return out;
}

struct CertificateReport {
  double bound = 0.0;   ///< raw omniscient-helper bound
  double actual = 0.0;  ///< the scheme's tv_to_ideal
  double d = 0.0;
  double delta = 0.0;
  bool sound = true;
  bool vacuous = false;
};

/// Checks the omniscient-helper converse on one scheme: actual TV >= bound - 1e-9.
/// `d_value` must bound d(mu) for some mu with E_1(Q^n || mu) <= delta.
inline CertificateReport converse_certificate(const CrScheme& s, const std::vector<double>& weights, double d_value,
                                              double delta) {
  const auto ev = evaluate_scheme(s);
  CertificateReport r;
  r.bound = omni_bound({s.k_size, {s.w_sizes.begin(), s.w_sizes.end()}}, weights, d_value, delta);
  r.actual = ev.tv_to_ideal;
  r.d = d_value;
  r.delta = delta;
  r.vacuous = r.bound <= 0.0;
  r.sound = r.actual >= r.bound - 1e-9;
  return r;
}

}  // namespace smoothbl
