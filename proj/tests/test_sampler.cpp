#include <doctest.h>

#include "rigidgen/design.hpp"
#include "rigidgen/oa.hpp"
#include "rigidgen/sampler.hpp"

using namespace rigidgen;
using namespace rigidgen::sampler;

TEST_CASE("Bernoulli samples are reproducible and have the right density")
{
  oa::OAInstance inst({2, 6, 1});
  CHECK(bernoulli_sample(inst, 16, 3, 7) == bernoulli_sample(inst, 16, 3, 7));
  CHECK(bernoulli_sample(inst, 16, 3, 7) != bernoulli_sample(inst, 16, 3, 8));
  std::uint64_t total = 0;
  for (std::uint64_t trial = 0; trial < 2000; ++trial) total += bernoulli_sample(inst, 16, 1, trial).size();
  // Mean 16 per trial, standard error about 0.08.
  CHECK(std::abs(static_cast<double>(total) / 2000.0 - 16.0) < 0.5);
  CHECK(bernoulli_sample(inst, 64, 1).size() == 64);
}

TEST_CASE("iid multisets")
{
  oa::OAInstance inst({2, 3, 1});
  const auto draw = iid_multiset_sample(inst, 20, 4);
  CHECK(draw.size() == 20);
  CHECK(std::is_sorted(draw.begin(), draw.end()));
  for (const auto& key : draw) CHECK(inst.contains(key));
}

TEST_CASE("search rejects non-integral targets before sampling")
{
  oa::OAInstance inst({2, 2, 1});
  SampleConfig config;
  config.n = 3;
  config.trials = 10;
  CHECK_THROWS_AS(search(inst, config), DivisibilityError);
  config.n = 5;
  CHECK_THROWS_AS(search(inst, config), PreconditionError);
}

TEST_CASE("search finds and certifies small arrays deterministically")
{
  oa::OAInstance inst({2, 3, 2});
  SampleConfig config;
  config.n = 4;
  config.seed = 11;
  config.trials = 200000;
  config.threads = 1;
  const auto one = search(inst, config);
  REQUIRE(one.found);
  CHECK(one.certificate->pass);
  CHECK(one.subset.size() == 4);
  CHECK(one.attempts == *one.trial_index + 1);
  config.threads = 3;
  const auto three = search(inst, config);
  CHECK(three.trial_index == one.trial_index);
  CHECK(three.subset == one.subset);

  config.model = Model::iid_multiset;
  const auto multiset = search(inst, config);
  REQUIRE(multiset.found);
  CHECK(multiset.certificate->pass);
}

TEST_CASE("search reports exhaustion without a certificate")
{
  design::DesignInstance inst({7, 3, 2});
  SampleConfig config;
  config.n = 7;
  config.trials = 50;
  const auto result = search(inst, config);
  CHECK_FALSE(result.found);
  CHECK(result.attempts == 50);
  CHECK_FALSE(result.certificate.has_value());
}

TEST_CASE("Wilson interval")
{
  const auto interval = wilson_interval(50, 100);
  CHECK(interval.lower == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(interval.upper == doctest::Approx(0.5962).epsilon(1e-3));
  const auto zero = wilson_interval(0, 10);
  CHECK(zero.lower == 0.0);
  CHECK(zero.upper > 0.0);
}

TEST_CASE("success estimates")
{
  oa::OAInstance inst({2, 2, 1});
  const auto impossible = estimate_success_probability(inst, 3, 1000, 1);
  CHECK(impossible.exact_zero);
  CHECK(impossible.successes == 0);
  const auto estimate = estimate_success_probability(inst, 2, 20000, 1);
  CHECK(estimate.lower <= 0.125);
  CHECK(estimate.upper >= 0.125);
}
