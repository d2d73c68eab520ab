#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace npmix {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: the i-th output is a pure function of (key, i), so
// any stream can be re-created from its key without replaying predecessors.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  // Child stream for (parent seed, index). Used for per-row and
  // per-replication splits.
  static Stream derive(std::uint64_t seed, std::uint64_t index) {
    return Stream(split_key(seed, index));
  }

  static std::uint64_t split_key(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed + kGolden) ^ mix64(index * 0xd1b54a32d192ed03ULL + 1));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() { return mix64(key_ + kGolden * ++counter_); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  double normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace npmix
