#pragma once

// Counter-based random streams. Every trajectory owns independent streams
// derived from (seed, trajectory index, stream id), so the numbers a
// trajectory consumes never depend on which worker runs it or in what order.

#include <array>
#include <cmath>
#include <cstdint>

namespace pdp {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter round(Counter c, Key k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  static constexpr Counter generate(Counter c, Key k) noexcept {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
      }
      c = round(c, k);
    }
    return c;
  }
};

enum class StreamId : std::uint32_t {
  Initial = 0,  // initial-state sampling
  Branch1 = 1,  // jump decisions of branch 1
  Branch2 = 2,  // jump decisions of branch 2
};

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t trajectory, StreamId stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        counter_{0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(trajectory),
                 static_cast<std::uint32_t>(trajectory >> 32)} {}

  std::uint64_t next_u64() noexcept {
    if (used_ == 2) refill();
    const std::uint64_t v = (std::uint64_t{block_[2 * used_]} << 32) | block_[2 * used_ + 1];
    ++used_;
    return v;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time with the given rate (> 0).
  double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

  std::uint64_t blocks_used() const noexcept { return counter_[0]; }

 private:
  void refill() noexcept {
    block_ = Philox4x32::generate(counter_, key_);
    ++counter_[0];
    used_ = 0;
  }

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter block_{};
  int used_ = 2;
};

}  // namespace pdp
