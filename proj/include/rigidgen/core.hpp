#ifndef RIGIDGEN_CORE_HPP
#define RIGIDGEN_CORE_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rigidgen/numeric.hpp"

namespace rigidgen {

inline constexpr std::uint64_t kDefaultElementBudget = 10'000'000;

/// An exhaustive operation would have to visit more elements than allowed.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The requested capability does not exist for this instance family.
class UnsupportedFeature : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A documented precondition of an operation was violated by its arguments.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Canonical encoding of one element of a ground set: its rank in the
/// family's lexicographic enumeration.
struct ElementKey {
  std::uint64_t rank = 0;
  auto operator<=>(const ElementKey&) const = default;
};

/// Exact image of an element or subset, indexed by the basis set A.
using PhiVector = std::vector<BigInt>;

/// Finitely supported integer vector over B. Zero coefficients are never stored.
class SparseDomainVector {
public:
  SparseDomainVector() = default;

  static SparseDomainVector unit(ElementKey key, const BigInt& coefficient = 1);

  void add(ElementKey key, const BigInt& coefficient);
  BigInt coefficient(ElementKey key) const;
  std::vector<ElementKey> support() const;
  std::size_t support_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<ElementKey, BigInt>& entries() const { return entries_; }
  BigInt squared_norm() const;

  SparseDomainVector& operator+=(const SparseDomainVector& other);
  SparseDomainVector& operator-=(const SparseDomainVector& other);
  SparseDomainVector& operator*=(const BigInt& scale);
  friend SparseDomainVector operator+(SparseDomainVector a, const SparseDomainVector& b) { return a += b; }
  friend SparseDomainVector operator-(SparseDomainVector a, const SparseDomainVector& b) { return a -= b; }
  friend SparseDomainVector operator*(const BigInt& s, SparseDomainVector a) { return a *= s; }
  bool operator==(const SparseDomainVector&) const = default;

private:
  std::map<ElementKey, BigInt> entries_;
};

/// The integer m, c0 and the real constants c1, c2, c3 of the framework.
/// c1 and c3 only ever enter through their squares, which are kept exact.
struct FrameworkConstants {
  BigInt m = 1;
  BigInt c0 = 1;
  Rational c1_squared = 1;
  Rational c2 = 1;
  Rational c3_squared = 1;

  double c1() const;
  double c3() const;
};

enum class Family { oa, design, perm, custom };
std::string_view to_string(Family family);

struct IsolationOptions {
  std::uint64_t candidate_budget = kDefaultElementBudget;
  std::uint64_t seed = 0;
};

struct IsolationFamily {
  std::size_t target = 0;
  BigInt modulus = 1;
  std::vector<SparseDomainVector> members;
  /// Elements around which each member was built, when the family has them.
  std::vector<ElementKey> centers;
  BigInt max_squared_norm = 0;
  /// False when the candidate budget ran out before the greedy pass finished.
  bool complete = true;

  std::size_t count() const { return members.size(); }
};

/// A finite ground set B with an integer-valued map phi: B -> Z^A.
/// Ground sets are streamed by rank and never materialised as a whole.
class Instance {
public:
  explicit Instance(FrameworkConstants constants) : constants_(std::move(constants)) {}
  virtual ~Instance() = default;
  Instance(const Instance&) = delete;
  Instance& operator=(const Instance&) = delete;

  virtual Family family() const = 0;
  virtual nlohmann::json parameters() const = 0;
  virtual std::uint64_t ground_size() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::string index_label(std::size_t a) const = 0;
  virtual std::string element_label(ElementKey b) const = 0;
  /// Inverse of element_label; throws std::invalid_argument on bad text.
  virtual ElementKey parse_element(std::string_view text) const = 0;
  /// Writes phi(b) into out, which must have length dimension().
  virtual void evaluate(ElementKey b, std::span<std::int64_t> out) const = 0;
  /// phi(B). The default streams over B under the default element budget.
  virtual PhiVector phi_total() const;
  /// Coefficients over A of a combination of basis functions that equals 1
  /// on all of B. Empty when the instance has none.
  virtual std::vector<Rational> constant_combination() const = 0;
  /// False when the functions only span V (linearly dependent).
  virtual bool is_basis() const { return true; }
  /// True when the instance supports verification and sampling only.
  virtual bool verification_only() const { return false; }
  virtual IsolationFamily isolation_family(std::size_t a, const IsolationOptions& options) const;

  const FrameworkConstants& constants() const { return constants_; }
  bool contains(ElementKey b) const { return b.rank < ground_size(); }
  PhiVector phi(ElementKey b) const;
  std::vector<std::int64_t> phi_small(ElementKey b) const;

protected:
  FrameworkConstants constants_;

private:
  mutable std::once_flag total_once_;
  mutable PhiVector total_cache_;
};

/// Throws BudgetError when |B| exceeds the budget.
void require_enumerable(const Instance& instance, std::uint64_t budget, std::string_view operation);

/// phi(B) computed by visiting every element.
PhiVector phi_total_streaming(const Instance& instance, std::uint64_t budget = kDefaultElementBudget);

/// Instance given by an explicit |B| x |A| integer table.
class TableInstance final : public Instance {
public:
  TableInstance(std::vector<std::vector<std::int64_t>> rows, FrameworkConstants constants,
                std::vector<Rational> constant_combination = {});

  Family family() const override { return Family::custom; }
  nlohmann::json parameters() const override;
  std::uint64_t ground_size() const override { return rows_.size(); }
  std::size_t dimension() const override { return dimension_; }
  std::string index_label(std::size_t a) const override;
  std::string element_label(ElementKey b) const override;
  ElementKey parse_element(std::string_view text) const override;
  void evaluate(ElementKey b, std::span<std::int64_t> out) const override;
  std::vector<Rational> constant_combination() const override { return constant_; }

private:
  std::vector<std::vector<std::int64_t>> rows_;
  std::size_t dimension_ = 0;
  std::vector<Rational> constant_;
};

/// pi: B -> B together with a rational |A| x |A| matrix tau such that
/// phi(pi(b)) = tau phi(b).
struct SymmetryWitness {
  std::function<ElementKey(ElementKey)> permutation;
  std::vector<std::vector<Rational>> tau;

  static SymmetryWitness identity(const Instance& instance);
};

struct SymmetryMode {
  enum class Kind { exhaustive, sample };
  Kind kind = Kind::exhaustive;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;

  static SymmetryMode exhaustive() { return {}; }
  static SymmetryMode sample(std::uint64_t count, std::uint64_t seed) { return {Kind::sample, count, seed}; }
};

struct SymmetryReport {
  bool pass = true;
  std::uint64_t checked = 0;
  bool tau_invertible = true;
  /// Only established in exhaustive mode.
  std::optional<bool> permutation_bijective;
  std::optional<ElementKey> first_violation;
  std::string detail;
};

struct IsolationReport {
  std::size_t target = 0;
  BigInt modulus = 1;
  bool images_ok = true;
  bool disjoint_ok = true;
  bool norms_ok = true;
  bool count_ok = true;
  std::size_t r = 0;
  BigInt required_r = 0;  // ceil(|B| / c2)
  BigInt max_squared_norm = 0;
  std::vector<std::string> failures;

  bool pass() const { return images_ok && disjoint_ok && norms_ok && count_ok; }
  bool operator==(const IsolationReport&) const = default;
};

struct SolutionCertificate {
  bool pass = false;
  std::uint64_t size = 0;
  std::optional<std::size_t> first_violation;
};

struct ExpectedVector {
  std::vector<Rational> values;
  bool integral = false;
};

struct DivisibilityReport {
  BigInt minimal_c0 = 1;
  BigInt declared_c0 = 1;
  bool divides_declared = true;
};

struct BoundednessReport {
  BigInt max_squared_norm = 0;
  double max_norm = 0.0;
  ElementKey argmax;
  BigInt bound_squared = 0;  // ceil(c1^2)
  bool pass = true;
};

/// Knobs for the unspecified Omega(1) / O(1) constants in the admissible-N window.
struct NWindowConstants {
  double lower_scale = 1.0;
  double upper_scale = 1.0;
};

struct AdmissibleN {
  BigInt divisor = 1;
  /// The three terms inside max(...) of the lower bound, before scaling.
  double lower_terms[3] = {0.0, 0.0, 0.0};
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  NWindowConstants constants;
  std::optional<BigInt> smallest;

  bool empty() const { return !smallest.has_value(); }
};

PhiVector phi_sum(const Instance& instance, std::span<const ElementKey> subset);
ExpectedVector expected_vector(const Instance& instance, const BigInt& n);
DivisibilityReport check_divisibility(const Instance& instance);
BoundednessReport check_boundedness(const Instance& instance, std::uint64_t budget = kDefaultElementBudget);
SymmetryReport verify_symmetry(const Instance& instance, const SymmetryWitness& witness,
                               const SymmetryMode& mode = SymmetryMode::exhaustive(),
                               std::uint64_t budget = kDefaultElementBudget);
IsolationReport verify_isolation_family(const Instance& instance, const IsolationFamily& family);
/// Checks |B| phi(T)_a = |T| phi(B)_a for every a. Repeated keys count with multiplicity.
SolutionCertificate verify_solution(const Instance& instance, std::span<const ElementKey> subset);
AdmissibleN admissible_N(const Instance& instance, const NWindowConstants& constants = {});

/// True when constant_combination() is nonempty and evaluates to 1 on every element.
bool has_constant_function(const Instance& instance, std::uint64_t budget = kDefaultElementBudget);

/// tau * phi(b) with exact arithmetic.
std::vector<Rational> apply(const std::vector<std::vector<Rational>>& tau, std::span<const std::int64_t> x);

}  // namespace rigidgen

#endif
