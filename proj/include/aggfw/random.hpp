#pragma once

#include <array>
#include <cstdint>

namespace aggfw {

// Philox4x32-10 (Salmon et al., Random123). A counter-based generator: the
// output is a pure function of (counter, key), so any draw can be recomputed
// from its coordinates without replaying a stream.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Independent random streams carved out of one run seed. Every consumer of
// randomness in the library uses its own tag so draws never collide.
enum class Stream : std::uint32_t {
  kBernoulli = 1,       // SFW mixing variables lambda_i^{k,j}
  kSelection = 2,       // selection method draws from a measure profile
  kStoppingTime = 3,    // stopping-time candidate draws
  kInstance = 4,        // MIQP instance generation
  kMonteCarlo = 5,      // test-kit Monte Carlo checks
};

// A keyed view on Philox: draws are addressed by (seed, stream, k, j, i).
// With k the iteration, j the candidate/draw index and i the agent, the
// lexicographic order of keys is the simulation order of the SFW method,
// while the values do not depend on the order in which they are requested.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, Stream stream) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  Stream stream() const noexcept { return stream_; }

  // Four 32-bit words for block (k, j, block).
  Philox4x32::Counter words(std::uint32_t k, std::uint32_t j,
                            std::uint32_t block) const noexcept {
    return Philox4x32::generate(
        {block, j, k, static_cast<std::uint32_t>(stream_)},
        {static_cast<std::uint32_t>(seed_),
         static_cast<std::uint32_t>(seed_ >> 32)});
  }

  // Uniform double in [0, 1) with 53 random bits for key (k, j, i).
  double uniform(std::uint32_t k, std::uint32_t j,
                 std::uint32_t i) const noexcept {
    const auto w = words(k, j, i);
    const std::uint64_t bits =
        ((std::uint64_t{w[0]} << 32) | std::uint64_t{w[1]}) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  // Uniform in [0, 1) with 32-bit resolution. Agents i = 4b..4b+3 share
  // the Philox block b, each taking its own output word.
  double uniform32(std::uint32_t k, std::uint32_t j,
                   std::uint32_t i) const noexcept {
    const auto w = words(k, j, i >> 2);
    return static_cast<double>(w[i & 3u]) * 0x1.0p-32;
  }

  // Bern(omega) for key (k, j, i). omega = 0 never fires and omega = 1
  // always fires.
  bool bernoulli(double omega, std::uint32_t k, std::uint32_t j,
                 std::uint32_t i) const noexcept {
    return uniform32(k, j, i) < omega;
  }

  // Calls fn(i) for every i < n with bernoulli(omega, k, j, i) true, in
  // increasing i. One Philox evaluation per four agents.
  template <class Fn>
  void for_each_bernoulli(double omega, std::uint32_t k, std::uint32_t j,
                          std::uint32_t n, Fn&& fn) const {
    for (std::uint32_t block = 0; 4 * block < n; ++block) {
      const auto w = words(k, j, block);
      for (std::uint32_t t = 0; t < 4 && 4 * block + t < n; ++t) {
        if (static_cast<double>(w[t]) * 0x1.0p-32 < omega) fn(4 * block + t);
      }
    }
  }

 private:
  std::uint64_t seed_;
  Stream stream_;
};

}  // namespace aggfw
