#include <doctest.h>

#include <set>

#include "rigidgen/combinatorics.hpp"
#include "rigidgen/design.hpp"
#include "rigidgen/random.hpp"

using namespace rigidgen;
using namespace rigidgen::design;

namespace {

Block block(std::initializer_list<int> points)
{
  return Block{std::vector<int>(points)};
}

const std::vector<Block> kFano{block({1, 2, 3}), block({1, 4, 5}), block({1, 6, 7}), block({2, 4, 6}),
                               block({2, 5, 7}), block({3, 4, 7}), block({3, 5, 6})};

bool brute_force_design(const std::vector<Block>& blocks, const DesignParams& p)
{
  if (blocks.empty()) return false;
  std::set<std::uint64_t> counts;
  for_each_combination(p.v, p.t, [&](const std::vector<int>& subset) {
    std::uint64_t count = 0;
    for (const auto& b : blocks)
      count += std::includes(b.points.begin(), b.points.end(), subset.begin(), subset.end());
    counts.insert(count);
  });
  return counts.size() == 1;
}

}  // namespace

TEST_CASE("binomial identity vanishes for a > b")
{
  for (int a = 1; a <= 12; ++a)
    for (int b = 0; b < a; ++b)
      for (int c = 0; c <= 12; ++c) CHECK(binomial_identity_check(a, b, c) == 0);
  CHECK(binomial_identity_check(2, 2, 0) != 0);
}

TEST_CASE("instance shape and constants")
{
  DesignInstance inst({7, 3, 2});
  CHECK(inst.ground_size() == 35);
  CHECK(inst.dimension() == 21);
  CHECK(inst.constants().m == 6);
  CHECK(inst.constants().c0 == 21);
  CHECK(inst.verification_only());
  CHECK_FALSE(DesignInstance({7, 3, 1}).verification_only());
  CHECK(inst.phi_total() == phi_total_streaming(inst));
  CHECK(has_constant_function(inst));
  for (std::uint64_t r = 0; r < inst.ground_size(); ++r) {
    CHECK(inst.key_of(inst.block_of(ElementKey{r})) == ElementKey{r});
    CHECK(inst.parse_element(inst.element_label(ElementKey{r})) == ElementKey{r});
  }
  CHECK_THROWS_AS(validate({5, 6, 1}), PreconditionError);
}

TEST_CASE("gamma coefficients are integers")
{
  CHECK(design_gamma_coefficient({8, 5, 2}, 0) == 4 * 3 * 2 / 2);
  CHECK(design_gamma_coefficient({8, 5, 2}, 2) == 2 * 2 / 2);
}

TEST_CASE("gamma maps to m e_a on every disjoint block")
{
  for (DesignParams p : {DesignParams{5, 3, 1}, DesignParams{7, 3, 1}, DesignParams{8, 5, 2}}) {
    DesignInstance inst(p);
    std::vector<std::int64_t> row(inst.dimension());
    for (std::size_t a = 0; a < inst.dimension(); ++a) {
      const auto target = inst.basis_subset(a).points;
      for (std::uint64_t r = 0; r < inst.ground_size(); ++r) {
        const auto x = inst.block_of(ElementKey{r});
        std::vector<int> common;
        std::set_intersection(x.points.begin(), x.points.end(), target.begin(), target.end(), std::back_inserter(common));
        if (!common.empty()) continue;
        const auto gamma = design_gamma(inst, x, target);
        PhiVector image(inst.dimension(), BigInt(0));
        for (const auto& [key, coefficient] : gamma.entries()) {
          inst.evaluate(key, row);
          for (std::size_t j = 0; j < row.size(); ++j) image[j] += coefficient * row[j];
        }
        for (std::size_t j = 0; j < image.size(); ++j) CHECK(image[j] == (j == a ? inst.constants().m : BigInt(0)));
      }
    }
  }
}

TEST_CASE("gamma requires k > 2t")
{
  DesignInstance inst({7, 3, 2});
  CHECK_THROWS_AS(design_gamma(inst, block({4, 5, 6}), {1, 2}), PreconditionError);
}

TEST_CASE("isolation families verify")
{
  for (DesignParams p : {DesignParams{6, 3, 1}, DesignParams{8, 4, 1}, DesignParams{8, 5, 2}}) {
    DesignInstance inst(p);
    for (std::size_t a = 0; a < inst.dimension(); ++a) {
      const auto family = design_isolation_family(inst, a, {kDefaultElementBudget, 3});
      CHECK(verify_isolation_family(inst, family).pass());
      CHECK(BigInt(family.count()) >= design_family_lower_bound(p));
    }
  }
}

TEST_CASE("Fano plane is a 2-(7,3,1) design")
{
  const auto report = verify_design(kFano, {7, 3, 2});
  CHECK(report.pass);
  CHECK(report.lambda == 1);
  CHECK(report.simple);
  auto broken = kFano;
  broken.back() = block({4, 5, 6});
  const auto bad = verify_design(broken, {7, 3, 2});
  CHECK_FALSE(bad.pass);
  CHECK(bad.violation_count > 0);
  auto doubled = kFano;
  doubled.insert(doubled.end(), kFano.begin(), kFano.end());
  const auto twice = verify_design(doubled, {7, 3, 2});
  CHECK(twice.pass);
  CHECK(twice.lambda == 2);
  CHECK_FALSE(twice.simple);
}

TEST_CASE("verify_design agrees with brute force and verify_solution")
{
  for (DesignParams p : {DesignParams{6, 3, 1}, DesignParams{6, 3, 2}, DesignParams{7, 3, 2}, DesignParams{5, 2, 1}}) {
    DesignInstance inst(p);
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
      CounterStream stream(5, trial);
      std::set<std::uint64_t> picked;
      const std::uint64_t size = 1 + stream.below(inst.ground_size());
      while (picked.size() < size) picked.insert(stream.below(inst.ground_size()));
      std::vector<Block> blocks;
      std::vector<ElementKey> keys;
      for (auto r : picked) {
        keys.push_back(ElementKey{r});
        blocks.push_back(inst.block_of(ElementKey{r}));
      }
      const bool expected = brute_force_design(blocks, p);
      CHECK(verify_design(blocks, p).pass == expected);
      CHECK(verify_solution(inst, keys).pass == expected);
    }
  }
}

TEST_CASE("point permutations are symmetries")
{
  DesignInstance inst({6, 3, 2});
  for (const std::vector<int>& sigma : {std::vector<int>{2, 3, 4, 5, 6, 1}, std::vector<int>{2, 1, 3, 4, 5, 6}}) {
    const auto report = verify_symmetry(inst, design_symmetry_witness(inst, sigma));
    CHECK(report.pass);
    CHECK(report.tau_invertible);
  }
  CHECK_THROWS_AS(design_symmetry_witness(inst, {1, 1, 2, 3, 4, 5}), PreconditionError);
}
