#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011). A stream is
// identified by (seed, stream id); draws depend only on (seed, stream, counter),
// so Monte Carlo shards are reproducible regardless of scheduling.

namespace smoothbl {

class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (lane_ == 2) {
      block_ = generate(counter_++);
      lane_ = 0;
    }
    const std::uint64_t lo = block_[2 * lane_];
    const std::uint64_t hi = block_[2 * lane_ + 1];
    ++lane_;
    return (hi << 32) | lo;
  }

  /// Uniform double in the open interval (0, 1), 53 random bits.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; uses one fresh pair per call.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) noexcept {
    if (n <= 1) return 0;
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t r;
    do {
      r = (*this)();
    } while (r >= limit);
    return r % n;
  }

  double exponential() noexcept { return -std::log(uniform()); }

  /// Flat Dirichlet(1,...,1) sample of dimension k.
  std::vector<double> dirichlet1(std::size_t k) noexcept {
    std::vector<double> w(k);
    double s = 0.0;
    for (auto& x : w) {
      x = exponential();
      s += x;
    }
    for (auto& x : w) x /= s;
    return w;
  }

 private:
  using Block = std::array<std::uint32_t, 4>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  Block generate(std::uint64_t counter) const noexcept {
    Block c{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return c;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Block block_{};
  int lane_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace smoothbl
