#include "rigidgen/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "rigidgen/random.hpp"

namespace rigidgen::sampler {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kTableEntryLimit = 50'000'000;
constexpr std::uint64_t kBatch = 1u << 16;

// Integer view of the instance for the sampling hot loop.
class TrialEngine {
public:
  TrialEngine(const Instance& instance, std::uint64_t n, Model model)
      : instance_(instance), n_(n), model_(model), size_(instance.ground_size()), dim_(instance.dimension())
  {
    if (n_ < 1 || n_ > size_)
      throw PreconditionError("N = " + std::to_string(n_) + " is outside [1, |B| = " + std::to_string(size_) + "]");
    require_enumerable(instance, kDefaultElementBudget, "sampling");
    const ExpectedVector expected = expected_vector(instance, n_);
    integral_ = expected.integral;
    if (integral_) {
      target_.reserve(dim_);
      for (const auto& value : expected.values) target_.push_back(to_int64(boost::multiprecision::numerator(value)));
    }
    // Partial sums are bounded by phi(B) for the nonnegative families; int64 must hold it.
    for (const BigInt& total : instance.phi_total()) (void)to_int64(total);
    full_ = n_ == size_;
    if (!full_) {
      const BigInt threshold = (BigInt(n_) << 128) / size_;
      const BigInt high = threshold >> 64;
      const BigInt low = threshold & BigInt(std::numeric_limits<std::uint64_t>::max());
      threshold_ = (static_cast<u128>(high.convert_to<std::uint64_t>()) << 64) | low.convert_to<std::uint64_t>();
    }
    if (size_ * dim_ <= kTableEntryLimit) {
      table_.resize(size_ * dim_);
      for (std::uint64_t b = 0; b < size_; ++b)
        instance.evaluate(ElementKey{b}, std::span<std::int64_t>(table_.data() + b * dim_, dim_));
    }
  }

  bool integral() const { return integral_; }

  std::vector<ElementKey> draw(std::uint64_t seed, std::uint64_t trial) const
  {
    std::vector<ElementKey> out;
    CounterStream stream(seed, trial);
    if (model_ == Model::bernoulli_subset) {
      for (std::uint64_t b = 0; b < size_; ++b)
        if (keep(stream)) out.push_back(ElementKey{b});
    } else {
      for (std::uint64_t i = 0; i < n_; ++i) out.push_back(ElementKey{stream.below(size_)});
      std::sort(out.begin(), out.end());
    }
    return out;
  }

  bool trial_succeeds(std::uint64_t seed, std::uint64_t trial, std::vector<std::int64_t>& sum,
                      std::vector<std::int64_t>& row) const
  {
    std::fill(sum.begin(), sum.end(), 0);
    CounterStream stream(seed, trial);
    auto accumulate = [&](std::uint64_t b) {
      const std::int64_t* r;
      if (!table_.empty()) {
        r = table_.data() + b * dim_;
      } else {
        instance_.evaluate(ElementKey{b}, row);
        r = row.data();
      }
      for (std::size_t a = 0; a < dim_; ++a) sum[a] += r[a];
    };
    if (model_ == Model::bernoulli_subset) {
      for (std::uint64_t b = 0; b < size_; ++b)
        if (keep(stream)) accumulate(b);
    } else {
      for (std::uint64_t i = 0; i < n_; ++i) accumulate(stream.below(size_));
    }
    return std::equal(sum.begin(), sum.end(), target_.begin());
  }

  /// Lowest successful trial index in [first, last), if any.
  std::optional<std::uint64_t> scan(std::uint64_t seed, std::uint64_t first, std::uint64_t last, unsigned threads,
                                    std::uint64_t* successes) const
  {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(1, last - first))));
    std::vector<std::uint64_t> best(threads, std::numeric_limits<std::uint64_t>::max());
    std::vector<std::uint64_t> hits(threads, 0);
    auto work = [&](unsigned worker) {
      std::vector<std::int64_t> sum(dim_), row(dim_);
      for (std::uint64_t i = first + worker; i < last; i += threads) {
        if (trial_succeeds(seed, i, sum, row)) {
          ++hits[worker];
          best[worker] = std::min(best[worker], i);
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    if (successes)
      for (auto h : hits) *successes += h;
    const std::uint64_t lowest = *std::min_element(best.begin(), best.end());
    if (lowest == std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    return lowest;
  }

private:
  bool keep(CounterStream& stream) const
  {
    if (full_) return true;
    return stream.next128() < threshold_;
  }

  const Instance& instance_;
  std::uint64_t n_;
  Model model_;
  std::uint64_t size_;
  std::size_t dim_;
  bool integral_ = false;
  bool full_ = false;
  u128 threshold_ = 0;
  std::vector<std::int64_t> target_;
  std::vector<std::int64_t> table_;
};

unsigned resolve_threads(unsigned requested)
{
  return requested ? requested : default_thread_count();
}

}  // namespace

unsigned default_thread_count()
{
  if (const char* env = std::getenv("RIGIDGEN_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ElementKey> bernoulli_sample(const Instance& instance, std::uint64_t n, std::uint64_t seed,
                                         std::uint64_t trial)
{
  return TrialEngine(instance, n, Model::bernoulli_subset).draw(seed, trial);
}

std::vector<ElementKey> iid_multiset_sample(const Instance& instance, std::uint64_t n, std::uint64_t seed,
                                            std::uint64_t trial)
{
  if (n < 1) throw PreconditionError("iid multiset sampling needs N >= 1");
  std::vector<ElementKey> out;
  out.reserve(n);
  CounterStream stream(seed, trial);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(ElementKey{stream.below(instance.ground_size())});
  std::sort(out.begin(), out.end());
  return out;
}

SearchResult search(const Instance& instance, const SampleConfig& config)
{
  const auto started = std::chrono::steady_clock::now();
  if (config.n < 1 || config.n > instance.ground_size())
    throw PreconditionError("N = " + std::to_string(config.n) + " is outside [1, |B|]");
  if (!expected_vector(instance, config.n).integral) {
    const DivisibilityReport div = check_divisibility(instance);
    throw DivisibilityError("divisibility violated: E[X] = (N/|B|) phi(B) is not integral for N = " +
                            std::to_string(config.n) + " (N must be a multiple of " + div.minimal_c0.str() + ")");
  }
  TrialEngine engine(instance, config.n, config.model);
  const unsigned threads = resolve_threads(config.threads);

  SearchResult result;
  result.seed = config.seed;
  for (std::uint64_t first = 0; first < config.trials; first += kBatch) {
    const std::uint64_t last = std::min(config.trials, first + kBatch);
    if (auto hit = engine.scan(config.seed, first, last, threads, nullptr)) {
      result.found = true;
      result.trial_index = *hit;
      result.attempts = *hit + 1;
      break;
    }
    result.attempts = last;
  }
  if (result.found) {
    result.subset = engine.draw(config.seed, *result.trial_index);
    result.certificate = verify_solution(instance, result.subset);
    if (!result.certificate->pass) throw std::logic_error("search produced a subset that fails verification");
  }
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z)
{
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (phat + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

SuccessEstimate estimate_success_probability(const Instance& instance, std::uint64_t n, std::uint64_t trials,
                                             std::uint64_t seed, Model model, unsigned threads)
{
  SuccessEstimate estimate;
  estimate.trials = trials;
  if (!expected_vector(instance, n).integral) {
    estimate.exact_zero = true;
    return estimate;
  }
  TrialEngine engine(instance, n, model);
  engine.scan(seed, 0, trials, resolve_threads(threads), &estimate.successes);
  estimate.frequency = trials ? static_cast<double>(estimate.successes) / static_cast<double>(trials) : 0.0;
  const auto interval = wilson_interval(estimate.successes, trials);
  estimate.lower = interval.lower;
  estimate.upper = interval.upper;
  return estimate;
}

}  // namespace rigidgen::sampler
