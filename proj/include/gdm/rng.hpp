#pragma once

#include <cstdint>
#include <span>

namespace gdm {

std::uint64_t mix64(std::uint64_t x);

/// Counter-based stream: the sequence depends only on (seed, stream), never
/// on which thread consumes it or in what order streams are created.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform in [0,1) with 53 random bits.
  double uniform();
  /// Index j with probability probs[j]; zero-probability entries never selected.
  int categorical(std::span<const double> probs);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gdm
