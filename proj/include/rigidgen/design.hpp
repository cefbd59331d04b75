#ifndef RIGIDGEN_DESIGN_HPP
#define RIGIDGEN_DESIGN_HPP

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "rigidgen/core.hpp"

namespace rigidgen::design {

/// v points, blocks of size k, strength t, with 1 <= t <= k <= v.
struct DesignParams {
  int v = 1;
  int k = 1;
  int t = 1;
};

void validate(const DesignParams& params);

/// Sorted k-subset of {1..v}, 1-based.
struct Block {
  std::vector<int> points;
  auto operator<=>(const Block&) const = default;
};

std::string format_block(const Block& block);

/// B = k-subsets, A = t-subsets (both lexicographic), phi_a(b) = [a subset of b].
/// Instances with k <= 2t carry no isolation families.
class DesignInstance final : public Instance {
public:
  explicit DesignInstance(const DesignParams& params, std::uint64_t budget = kDefaultElementBudget);

  const DesignParams& params() const { return params_; }
  ElementKey key_of(const Block& block) const;
  Block block_of(ElementKey b) const;
  Block basis_subset(std::size_t a) const;
  std::size_t index_of(const std::vector<int>& t_subset) const;

  Family family() const override { return Family::design; }
  nlohmann::json parameters() const override;
  std::uint64_t ground_size() const override { return ground_size_; }
  std::size_t dimension() const override { return masks_.size(); }
  std::string index_label(std::size_t a) const override;
  std::string element_label(ElementKey b) const override;
  ElementKey parse_element(std::string_view text) const override;
  void evaluate(ElementKey b, std::span<std::int64_t> out) const override;
  PhiVector phi_total() const override;
  std::vector<Rational> constant_combination() const override;
  bool verification_only() const override { return params_.k <= 2 * params_.t; }
  IsolationFamily isolation_family(std::size_t a, const IsolationOptions& options) const override;

private:
  DesignParams params_;
  std::uint64_t ground_size_ = 0;
  std::vector<std::uint64_t> masks_;
};

std::unique_ptr<DesignInstance> build_design_instance(const DesignParams& params,
                                                      std::uint64_t budget = kDefaultElementBudget);

/// sum_{i=0}^{a} (-1)^i C(a,i) C(c+i,b), with C(n,m) = 0 for n < m.
BigInt binomial_identity_check(std::int64_t a, std::int64_t b, std::int64_t c);

/// Indicator of the blocks b inside a union x with |a intersect b| = j.
SparseDomainVector design_delta(const DesignInstance& instance, const Block& x, const std::vector<int>& a, int j);

/// j! (k-j-1)! / (k-t-1)!, the weight of delta_{x,a,j} in gamma_{x,a}.
BigInt design_gamma_coefficient(const DesignParams& params, int j);

/// sum_j (-1)^{t-j} j!(k-j-1)!/(k-t-1)! delta_{x,a,j}; phi(gamma) = k!/(k-t)! e_a.
SparseDomainVector design_gamma(const DesignInstance& instance, const Block& x, const std::vector<int>& a);

/// Greedy family over blocks x disjoint from a with pairwise
/// |x_i intersect x_j| <= k-2t-1, visited lexicographically from a seeded offset.
IsolationFamily design_isolation_family(const DesignInstance& instance, std::size_t a,
                                        const IsolationOptions& options = {});

/// ceil(C(v,k) / (vk)^{2t}).
BigInt design_family_lower_bound(const DesignParams& params);

struct DesignVerification {
  bool pass = false;
  /// |T| C(k,t) / C(v,t); integral whenever pass is true.
  Rational lambda = 0;
  bool simple = true;
  std::optional<std::vector<int>> first_violation;
  std::uint64_t violation_count = 0;
};

DesignVerification verify_design(const std::vector<Block>& blocks, const DesignParams& params);

/// pi permutes blocks by sigma; tau is the permutation matrix of sigma on t-subsets.
SymmetryWitness design_symmetry_witness(const DesignInstance& instance, const std::vector<int>& sigma);

}  // namespace rigidgen::design

#endif
