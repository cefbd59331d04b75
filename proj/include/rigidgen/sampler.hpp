#ifndef RIGIDGEN_SAMPLER_HPP
#define RIGIDGEN_SAMPLER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rigidgen/core.hpp"

namespace rigidgen::sampler {

enum class Model { bernoulli_subset, iid_multiset };

/// E[X] is not an integer vector, so X = E[X] is impossible.
class DivisibilityError : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

struct SampleConfig {
  std::uint64_t n = 1;
  std::uint64_t seed = 0;
  std::uint64_t trials = 1;
  Model model = Model::bernoulli_subset;
  /// 0 selects default_thread_count().
  unsigned threads = 0;
};

/// RIGIDGEN_THREADS when set, else the hardware concurrency.
unsigned default_thread_count();

/// Each element is kept when a 128-bit uniform word falls below
/// floor(N 2^128 / |B|), so the inclusion probability is N/|B| up to 2^-128.
/// Trial i of a seed is an independent counter-based substream.
std::vector<ElementKey> bernoulli_sample(const Instance& instance, std::uint64_t n, std::uint64_t seed,
                                         std::uint64_t trial = 0);

/// N uniform draws with replacement, sorted.
std::vector<ElementKey> iid_multiset_sample(const Instance& instance, std::uint64_t n, std::uint64_t seed,
                                            std::uint64_t trial = 0);

struct SearchResult {
  bool found = false;
  std::vector<ElementKey> subset;
  std::optional<SolutionCertificate> certificate;
  std::uint64_t attempts = 0;
  std::optional<std::uint64_t> trial_index;
  std::uint64_t seed = 0;
  double elapsed_seconds = 0.0;
};

/// Samples until phi(T) = E[X]. Throws DivisibilityError before sampling when
/// E[X] is not integral. The lowest-index successful trial wins.
SearchResult search(const Instance& instance, const SampleConfig& config);

struct SuccessEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double frequency = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// E[X] was non-integral; the probability is exactly zero and nothing was sampled.
  bool exact_zero = false;
};

struct WilsonInterval {
  double lower = 0.0;
  double upper = 0.0;
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

SuccessEstimate estimate_success_probability(const Instance& instance, std::uint64_t n, std::uint64_t trials,
                                             std::uint64_t seed, Model model = Model::bernoulli_subset,
                                             unsigned threads = 0);

}  // namespace rigidgen::sampler

#endif
