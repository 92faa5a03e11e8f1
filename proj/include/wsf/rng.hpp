#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace wsf {

namespace detail {
// SplitMix64 finalizer; the standard mixer, used only for key derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Seed with substream derivation: a 64-bit master seed plus a path of 32-bit
// labels. The stream key is the master seed run through a SplitMix64 absorb
// chain, one absorption per label, so distinct paths give uncorrelated
// streams and the derivation is platform independent. Substream labels used
// by the samplers are documented at their call sites (e.g. a combined
// ray/percolation sample draws the ray from child(0) and the percolation
// from child(1); batch replica r uses child(r)).
class RngSeed {
 public:
  explicit RngSeed(std::uint64_t master) : master_(master), key_(detail::mix64(master)) {}

  RngSeed child(std::uint32_t label) const {
    RngSeed s(*this);
    s.path_.push_back(label);
    s.key_ = detail::mix64(s.key_ ^ (0x9e3779b97f4a7c15ull + label));
    return s;
  }

  std::uint64_t master() const { return master_; }
  const std::vector<std::uint32_t>& path() const { return path_; }
  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t master_;
  std::vector<std::uint32_t> path_;
  std::uint64_t key_;
};

// Draw helpers over mt19937_64. The engine itself is fully specified by the
// standard; the standard <random> distributions are not, so every draw here
// is hand-rolled to keep output bit-identical across library implementations.
class RandomStream {
 public:
  explicit RandomStream(const RngSeed& seed) : engine_(seed.key()) {}
  explicit RandomStream(std::uint64_t raw_key) : engine_(raw_key) {}

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0,n) by the multiply-shift reduction; the bias is
  // below 2^-32 for the small n used here.
  std::uint32_t uniform_index(std::uint32_t n) {
    return std::uint32_t((std::uint64_t(std::uint32_t(engine_() >> 32)) * n) >> 32);
  }

  // Index into a cumulative weight table (strictly increasing, last = total).
  std::size_t pick_cumulative(const std::vector<double>& cumulative) {
    double u = uniform01() * cumulative.back();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wsf
