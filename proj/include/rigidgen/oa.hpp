#ifndef RIGIDGEN_OA_HPP
#define RIGIDGEN_OA_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rigidgen/core.hpp"

namespace rigidgen::oa {

/// Alphabet {1..q}, string length n, strength t with 1 <= t <= n.
struct OAParams {
  int q = 2;
  int n = 1;
  int t = 1;
};

void validate(const OAParams& params);

/// A string over {1..q}, stored 1-based.
struct OAElement {
  std::vector<int> symbols;
  auto operator<=>(const OAElement&) const = default;
};

/// Strictly increasing 1-based coordinate positions.
using IndexSubset = std::vector<int>;

/// (I, v): positions I with |I| <= t and values v in {1..q-1}^I.
struct OABasisIndex {
  IndexSubset positions;
  std::vector<int> values;
  auto operator<=>(const OABasisIndex&) const = default;
};

/// Sparse integer coefficients over the basis, keyed by index into A.
using IndexCombination = std::map<std::size_t, BigInt>;

std::string format_element(const OAElement& x, int q);

/// B = [q]^n, A = {(I, v)} ordered by |I|, then I, then v (all lexicographic).
/// phi_(I,v)(x) = [x_i = v_i for all i in I].
class OAInstance final : public Instance {
public:
  explicit OAInstance(const OAParams& params, std::uint64_t budget = kDefaultElementBudget);

  const OAParams& params() const { return params_; }
  const std::vector<OABasisIndex>& basis() const { return basis_; }
  std::size_t index_of(const OABasisIndex& index) const;

  ElementKey key_of(const OAElement& x) const;
  OAElement element_of(ElementKey b) const;

  Family family() const override { return Family::oa; }
  nlohmann::json parameters() const override;
  std::uint64_t ground_size() const override { return ground_size_; }
  std::size_t dimension() const override { return basis_.size(); }
  std::string index_label(std::size_t a) const override;
  std::string element_label(ElementKey b) const override;
  ElementKey parse_element(std::string_view text) const override;
  void evaluate(ElementKey b, std::span<std::int64_t> out) const override;
  PhiVector phi_total() const override;
  std::vector<Rational> constant_combination() const override;
  IsolationFamily isolation_family(std::size_t a, const IsolationOptions& options) const override;

private:
  OAParams params_;
  std::uint64_t ground_size_ = 0;
  std::vector<OABasisIndex> basis_;
  std::map<OABasisIndex, std::size_t> lookup_;
};

std::unique_ptr<OAInstance> build_oa_instance(const OAParams& params,
                                              std::uint64_t budget = kDefaultElementBudget);

/// Coefficients of f_(I,v), v in {1..q}^I, in the basis. Each symbol equal to
/// q is eliminated with f_(I,v) = f_(I minus i, v minus v_i) - sum_{s<q} f_(I, v with v_i = s).
/// The result is checked pointwise on `check_samples` seeded elements.
IndexCombination expand_indicator(const OAInstance& instance, const IndexSubset& positions,
                                  const std::vector<int>& values, int check_samples = 8);

/// delta_{x,K} = sum over J subset of K of (-1)^{|K|-|J|} e_{x padded with q on K \ J}.
SparseDomainVector oa_delta(const OAInstance& instance, const OAElement& x, const IndexSubset& positions);

/// gamma_{x,I} with phi(gamma) = e_(I, x|_I). Requires x|_I in {1..q-1}^I.
SparseDomainVector oa_gamma(const OAInstance& instance, const OAElement& x, const IndexSubset& positions);

/// (2^{t/2} (2n)^{t-|I|})^2, the inductive bound on ||gamma_{x,I}||^2.
BigInt oa_gamma_norm_bound_squared(const OAParams& params, int subset_size);

/// ceil(q^{n-t} / n^{2t}).
BigInt oa_family_lower_bound(const OAParams& params);

/// Greedy family: centers x with x|_I = v and pairwise Hamming distance at
/// least 2t+1, visited lexicographically from a seeded offset.
IsolationFamily oa_isolation_family(const OAInstance& instance, std::size_t a, const IsolationOptions& options = {});

struct OAViolation {
  IndexSubset positions;
  std::vector<int> values;
  std::uint64_t count = 0;
};

struct OAVerification {
  bool pass = false;
  std::optional<OAViolation> first_violation;
};

/// Every t-string appears |T| / q^t times on every t coordinates.
OAVerification verify_oa(const std::vector<OAElement>& rows, const OAParams& params);

/// pi(b) = b + shift coordinatewise in Z_q (symbol q is the zero), tau built
/// from expand_indicator of the shifted indicators.
SymmetryWitness oa_symmetry_witness(const OAInstance& instance, const OAElement& shift);

}  // namespace rigidgen::oa

#endif
