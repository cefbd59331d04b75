#ifndef RIGIDGEN_COMBINATORICS_HPP
#define RIGIDGEN_COMBINATORICS_HPP

#include <cstdint>
#include <vector>

namespace rigidgen {

/// Advances a strictly increasing 1-based k-subset of {1..n} to its
/// lexicographic successor. Returns false after the last subset.
inline bool next_combination(std::vector<int>& subset, int n)
{
  const int k = static_cast<int>(subset.size());
  int i = k - 1;
  while (i >= 0 && subset[i] == n - k + i + 1) --i;
  if (i < 0) return false;
  ++subset[i];
  for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  return true;
}

inline std::vector<int> first_combination(int k)
{
  std::vector<int> subset(k);
  for (int i = 0; i < k; ++i) subset[i] = i + 1;
  return subset;
}

/// Calls fn(subset) for every k-subset of {1..n} in lexicographic order.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn)
{
  if (k < 0 || k > n) return;
  auto subset = first_combination(k);
  do {
    fn(static_cast<const std::vector<int>&>(subset));
  } while (next_combination(subset, n));
}

/// Number of k-subsets of an n-set as a 64-bit value (callers bound n).
inline std::uint64_t choose64(int n, int k)
{
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

/// Lexicographic rank of a 1-based k-subset of {1..n}.
inline std::uint64_t rank_combination(const std::vector<int>& subset, int n)
{
  const int k = static_cast<int>(subset.size());
  std::uint64_t rank = 0;
  int previous = 0;
  for (int i = 0; i < k; ++i) {
    for (int value = previous + 1; value < subset[i]; ++value) rank += choose64(n - value, k - i - 1);
    previous = subset[i];
  }
  return rank;
}

inline std::vector<int> unrank_combination(std::uint64_t rank, int n, int k)
{
  std::vector<int> subset;
  subset.reserve(k);
  int value = 1;
  for (int i = 0; i < k; ++i) {
    while (true) {
      const std::uint64_t block = choose64(n - value, k - i - 1);
      if (rank < block) break;
      rank -= block;
      ++value;
    }
    subset.push_back(value);
    ++value;
  }
  return subset;
}

inline std::uint64_t subset_mask(const std::vector<int>& subset)
{
  std::uint64_t mask = 0;
  for (int v : subset) mask |= std::uint64_t{1} << (v - 1);
  return mask;
}

}  // namespace rigidgen

#endif
