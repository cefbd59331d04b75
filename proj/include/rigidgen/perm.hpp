#ifndef RIGIDGEN_PERM_HPP
#define RIGIDGEN_PERM_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rigidgen/core.hpp"

namespace rigidgen::perm {

/// Bijection of {1..n} given by its images, 1-based.
struct Perm {
  std::vector<int> images;
  auto operator<=>(const Perm&) const = default;
};

bool is_valid(const Perm& p, int n);
/// (a o b)(i) = a(b(i)).
Perm compose(const Perm& a, const Perm& b);
Perm inverse(const Perm& p);
Perm identity(int n);
std::string format_perm(const Perm& p);

/// Lexicographic rank of a permutation among all n! (Lehmer code); n <= 20.
std::uint64_t rank_perm(const Perm& p);
Perm unrank_perm(std::uint64_t rank, int n);

struct TupleViolation {
  std::vector<int> from;
  std::vector<int> to;
  std::uint64_t count = 0;
};

struct TWiseVerification {
  bool pass = false;
  std::optional<TupleViolation> first_violation;
};

/// n (n-1) ... (n-t+1) * |{pi in T: pi(i) = j}| = |T| for all distinct t-tuples i, j.
TWiseVerification verify_t_wise(const std::vector<Perm>& family, int n, int t);

/// True when the set of permutations is closed under composition.
bool is_closed_under_composition(const std::vector<Perm>& family);

std::vector<Perm> cyclic_fixture(int n);
/// x -> ax + b over the field of order q (prime, or prime power through field tables).
std::vector<Perm> affine_fixture(int q);

enum class MobiusVariant { unit_determinant, nonzero_determinant };

/// x -> (ax+b)/(cx+d) on the projective line; points 1..q encode field
/// elements 0..q-1 and point q+1 encodes infinity.
std::vector<Perm> mobius_fixture(int q, MobiusVariant variant = MobiusVariant::nonzero_determinant);

std::vector<Perm> symmetric_fixture(int n);
std::vector<Perm> alternating_fixture(int n);

/// Abstract action of a finite set of group elements on points 0..points-1.
struct GroupAction {
  std::size_t elements = 0;
  std::size_t points = 0;
  std::function<std::size_t(std::size_t element, std::size_t point)> act;
};

/// Action of a permutation list on its 1..n points (indexed 0..n-1).
GroupAction action_of(const std::vector<Perm>& family);

struct XUniformVerification {
  bool pass = false;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
  std::uint64_t violation_count = 0;
};

/// |X| |{g in T: g(x) = y}| = |T| for all x, y in X.
XUniformVerification verify_x_uniform(std::span<const std::size_t> subset, const GroupAction& action);

/// B = S_n, indexed by all pairs (i, j) of distinct ordered t-tuples with
/// f_(i,j)(pi) = [pi(i) = j]. A spanning set, not a basis.
class PermInstance final : public Instance {
public:
  PermInstance(int n, int t, std::uint64_t budget = kDefaultElementBudget);

  int n() const { return n_; }
  int t() const { return t_; }
  std::uint64_t tuple_count() const { return tuples_; }
  std::uint64_t rank_tuple(const std::vector<int>& tuple) const;
  std::vector<int> unrank_tuple(std::uint64_t rank) const;
  ElementKey key_of(const Perm& p) const;
  Perm perm_of(ElementKey b) const;

  Family family() const override { return Family::perm; }
  nlohmann::json parameters() const override;
  std::uint64_t ground_size() const override { return ground_size_; }
  std::size_t dimension() const override { return static_cast<std::size_t>(tuples_ * tuples_); }
  std::string index_label(std::size_t a) const override;
  std::string element_label(ElementKey b) const override;
  ElementKey parse_element(std::string_view text) const override;
  void evaluate(ElementKey b, std::span<std::int64_t> out) const override;
  PhiVector phi_total() const override;
  std::vector<Rational> constant_combination() const override;
  bool is_basis() const override { return false; }
  bool verification_only() const override { return true; }

private:
  int n_;
  int t_;
  std::uint64_t tuples_ = 0;
  std::uint64_t ground_size_ = 0;
};

std::unique_ptr<PermInstance> build_perm_spanning_instance(int n, int t,
                                                           std::uint64_t budget = kDefaultElementBudget);

}  // namespace rigidgen::perm

#endif
