#pragma once

#include <cstdint>
#include <random>

namespace steinbias {

// A reproducible source of randomness keyed by (master seed, stream id).
// Distinct stream ids are seeded through a SplitMix64 mix so that streams do
// not overlap in practice.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t stream() const noexcept { return stream_; }

  std::mt19937_64& engine() noexcept { return engine_; }

  // Uniform on the open interval (0, 1); 53 random bits.
  double uniform();

  // Child stream for a sub-task, independent of this stream's state.
  RandomStream split(std::uint32_t child) const;

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace steinbias
