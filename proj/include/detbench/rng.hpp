#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace detbench {

// Counter-based PRNG (Philox4x32-10, Salmon et al. 2011). The generator is a
// pure function of (seed, counter), so streams are reproducible bit-for-bit
// across runs and platforms and cheap to fork per task.
class Philox {
 public:
  explicit Philox(std::uint64_t seed) : key_{low32(seed), high32(seed)} {}

  std::uint32_t next_u32() {
    if (index_ == 4) {
      block_ = round10(counter_, key_);
      bump_counter();
      index_ = 0;
    }
    return block_[index_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Box-Muller transform; the paired value is cached.
  double normal(double mean, double stddev) {
    if (have_cached_) {
      have_cached_ = false;
      return mean + stddev * cached_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return mean + stddev * radius * std::cos(angle);
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::uint32_t low32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
  static std::uint32_t high32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

  static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = {high32(p1) ^ ctr[1] ^ key[0], low32(p1),
             high32(p0) ^ ctr[3] ^ key[1], low32(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

  void bump_counter() {
    for (auto& word : counter_) {
      if (++word != 0) break;
    }
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint32_t, 4> block_{};
  int index_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Stable sub-seed derivation: FNV-1a over (master seed || labels), finalized
// with a splitmix64 mix. Used to give every (image, detector) stream an
// independent seed; documented in the README so runs can be reproduced.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label_a,
                                 std::string_view label_b = {}) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  const auto mix_byte = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001B3ull;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(master >> (8 * i)));
  for (const char c : label_a) mix_byte(static_cast<unsigned char>(c));
  mix_byte(0);
  for (const char c : label_b) mix_byte(static_cast<unsigned char>(c));
  // splitmix64 finalizer
  h += 0x9E3779B97F4A7C15ull;
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ull;
  h = (h ^ (h >> 27)) * 0x94D049BB133111EBull;
  return h ^ (h >> 31);
}

}  // namespace detbench
