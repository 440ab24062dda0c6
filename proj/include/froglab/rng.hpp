#pragma once

#include <cstdint>
#include <limits>

namespace froglab {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Purposes for which independent streams are derived from one master seed.
enum class StreamTag : std::uint64_t {
  kWalk = 1,
  kFrog = 2,
  kEntry = 3,
  kReplicate = 4,
};

/// SplitMix64 generator. Cheap to construct, so every (seed, replicate, vertex,
/// purpose) tuple gets its own stream; this is what makes simulation results
/// independent of processing order and thread count.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t state) : state_(state) {}

  /// Stream keyed by a master seed and up to three integer coordinates.
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                    StreamTag tag = StreamTag::kReplicate) {
    std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    k = mix64(k ^ (a + 0x9e3779b97f4a7c15ULL));
    k = mix64(k ^ (b * 0xd1b54a32d192ed03ULL + 0x3c6ef372fe94f82bULL));
    k = mix64(k ^ static_cast<std::uint64_t>(tag));
    return Rng(k);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double prob) { return uniform() < prob; }

  /// Unbiased integer in [0, n), Lemire's multiply-and-reject.
  std::uint32_t below(std::uint32_t n) {
    std::uint64_t m = static_cast<std::uint64_t>(static_cast<std::uint32_t>((*this)() >> 32)) * n;
    auto low = static_cast<std::uint32_t>(m);
    if (low < n) {
      const std::uint32_t threshold = static_cast<std::uint32_t>(-n) % n;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(static_cast<std::uint32_t>((*this)() >> 32)) * n;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

 private:
  std::uint64_t state_;
};

/// Streams indexed by one coordinate under a fixed (seed, a, tag) prefix; the
/// prefix is hashed once so each member costs a single mix.
class StreamFamily {
 public:
  StreamFamily(std::uint64_t seed, std::uint64_t a, StreamTag tag)
      : key_(mix64(Rng::stream(seed, a, 0, tag)())) {}

  Rng at(std::uint64_t b) const { return Rng(mix64(key_ ^ (b * 0xd1b54a32d192ed03ULL + 0x3c6ef372fe94f82bULL))); }

 private:
  std::uint64_t key_;
};

}  // namespace froglab
