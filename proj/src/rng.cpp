#include "gdm/rng.hpp"

namespace gdm {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL))) {}

std::uint64_t StreamRng::next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

double StreamRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

int StreamRng::categorical(std::span<const double> probs) {
  double u = uniform();
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    last_positive = static_cast<int>(j);
    cumulative += probs[j];
    if (u < cumulative) return static_cast<int>(j);
  }
  // Rounding left u above the running total; fall back to the last live symbol.
  return last_positive < 0 ? 0 : last_positive;
}

}  // namespace gdm
