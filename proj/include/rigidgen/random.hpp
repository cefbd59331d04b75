#ifndef RIGIDGEN_RANDOM_HPP
#define RIGIDGEN_RANDOM_HPP

#include <cstdint>

namespace rigidgen {

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: word i of substream (seed, stream) is a pure
/// function of the three numbers, so substreams can be consumed in any order
/// or on any thread with identical results.
class CounterStream {
public:
  CounterStream(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL)))
  {}

  std::uint64_t next() { return splitmix64(key_ + counter_++ * 0x9e3779b97f4a7c15ULL); }

  unsigned __int128 next128()
  {
    const unsigned __int128 hi = next();
    return (hi << 64) | next();
  }

  /// Uniform integer in [0, bound), bound >= 1 (Lemire's rejection method).
  std::uint64_t below(std::uint64_t bound)
  {
    unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rigidgen

#endif
