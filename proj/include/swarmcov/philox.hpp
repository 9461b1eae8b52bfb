#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace swarmcov {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is
// a pure function of (key, counter), so streams can be indexed by agent and
// step without any shared state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t(kMul0) * c[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

// Stream purposes keep draws for different uses disjoint under one seed.
enum class RngStream : std::uint32_t { initial = 1, step = 2, ctmc = 3, noise = 4 };

// Four 32-bit words for (seed, stream, entity, index). `entity` < 2^48.
inline Philox4x32::Counter random_block(std::uint64_t seed, RngStream stream, std::uint64_t entity,
                                        std::uint64_t index) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                static_cast<std::uint32_t>(entity),
                                static_cast<std::uint32_t>((entity >> 32) & 0xFFFFu) |
                                    (static_cast<std::uint32_t>(stream) << 16)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Philox4x32::generate(ctr, key);
}

// Uniform in the open interval (0, 1).
inline double to_unit_open(std::uint32_t x) { return (double(x) + 0.5) * 0x1.0p-32; }

// Box-Muller pair of standard normals from two words.
inline std::array<double, 2> to_normal_pair(std::uint32_t a, std::uint32_t b) {
  const double r = std::sqrt(-2.0 * std::log(to_unit_open(a)));
  const double theta = 2.0 * std::numbers::pi * to_unit_open(b);
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace swarmcov
