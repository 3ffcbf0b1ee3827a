#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace spontheat {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Stateless: any 128-bit counter plus 64-bit key maps to 128 random bits,
// which is what makes per-trajectory streams reproducible regardless of
// execution order or thread count.
struct Philox4x32 {
  static constexpr std::uint32_t kW32A = 0x9E3779B9u;
  static constexpr std::uint32_t kW32B = 0xBB67AE85u;
  static constexpr std::uint32_t kM4x32A = 0xD2511F53u;
  static constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

  static std::array<std::uint32_t, 4> generate(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kW32A;
      key[1] += kW32B;
    }
    return ctr;
  }
};

// Stream of standard normal deviates addressed by index. The stream is
// identified by (seed, stream_id); deviate i is a pure function of
// (seed, stream_id, i). Two deviates come out of each Philox block via
// Box-Muller, so sequential use costs one block per two normals.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        id_lo_(static_cast<std::uint32_t>(stream_id)),
        id_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

  double normal(std::uint64_t index) {
    const std::uint64_t block = index >> 1;
    if (block != cached_block_) {
      fill_block(block);
    }
    return pair_[index & 1];
  }

 private:
  void fill_block(std::uint64_t block) {
    const std::array<std::uint32_t, 4> words = Philox4x32::generate(
        {id_lo_, id_hi_, static_cast<std::uint32_t>(block),
         static_cast<std::uint32_t>(block >> 32)},
        key_);
    const std::uint64_t bits_a =
        (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    const std::uint64_t bits_b =
        (static_cast<std::uint64_t>(words[2]) << 32) | words[3];
    // u1 in (0, 1] so the log is finite; u2 in [0, 1).
    const double u1 = 1.0 - static_cast<double>(bits_a >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(bits_b >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    double s, c;
#if defined(__GNUC__)
    __builtin_sincos(theta, &s, &c);
#else
    s = std::sin(theta);
    c = std::cos(theta);
#endif
    pair_[0] = r * c;
    pair_[1] = r * s;
    cached_block_ = block;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t id_lo_, id_hi_;
  std::uint64_t cached_block_ = ~static_cast<std::uint64_t>(0);
  std::array<double, 2> pair_{};
};

}  // namespace spontheat
