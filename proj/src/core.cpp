#include "rigidgen/core.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "rigidgen/random.hpp"

namespace rigidgen {

SparseDomainVector SparseDomainVector::unit(ElementKey key, const BigInt& coefficient)
{
  SparseDomainVector v;
  v.add(key, coefficient);
  return v;
}

void SparseDomainVector::add(ElementKey key, const BigInt& coefficient)
{
  if (coefficient == 0) return;
  auto [it, inserted] = entries_.try_emplace(key, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0) entries_.erase(it);
  }
}

BigInt SparseDomainVector::coefficient(ElementKey key) const
{
  auto it = entries_.find(key);
  return it == entries_.end() ? BigInt(0) : it->second;
}

std::vector<ElementKey> SparseDomainVector::support() const
{
  std::vector<ElementKey> keys;
  keys.reserve(entries_.size());
  for (const auto& [key, value] : entries_) keys.push_back(key);
  return keys;
}

BigInt SparseDomainVector::squared_norm() const
{
  BigInt total = 0;
  for (const auto& [key, value] : entries_) total += value * value;
  return total;
}

SparseDomainVector& SparseDomainVector::operator+=(const SparseDomainVector& other)
{
  for (const auto& [key, value] : other.entries_) add(key, value);
  return *this;
}

SparseDomainVector& SparseDomainVector::operator-=(const SparseDomainVector& other)
{
  for (const auto& [key, value] : other.entries_) add(key, -value);
  return *this;
}

SparseDomainVector& SparseDomainVector::operator*=(const BigInt& scale)
{
  if (scale == 0) {
    entries_.clear();
    return *this;
  }
  for (auto& [key, value] : entries_) value *= scale;
  return *this;
}

double FrameworkConstants::c1() const
{
  return std::sqrt(to_double(c1_squared));
}

double FrameworkConstants::c3() const
{
  return std::sqrt(to_double(c3_squared));
}

std::string_view to_string(Family family)
{
  switch (family) {
  case Family::oa: return "oa";
  case Family::design: return "design";
  case Family::perm: return "perm";
  case Family::custom: return "custom";
  }
  return "unknown";
}

PhiVector Instance::phi_total() const
{
  std::call_once(total_once_, [this] { total_cache_ = phi_total_streaming(*this); });
  return total_cache_;
}

IsolationFamily Instance::isolation_family(std::size_t, const IsolationOptions&) const
{
  throw UnsupportedFeature("isolation families are not available for " + std::string(to_string(family())) +
                           " instances");
}

PhiVector Instance::phi(ElementKey b) const
{
  auto small = phi_small(b);
  return PhiVector(small.begin(), small.end());
}

std::vector<std::int64_t> Instance::phi_small(ElementKey b) const
{
  if (!contains(b))
    throw std::domain_error("element rank " + std::to_string(b.rank) + " is not in the ground set");
  std::vector<std::int64_t> out(dimension());
  evaluate(b, out);
  return out;
}

void require_enumerable(const Instance& instance, std::uint64_t budget, std::string_view operation)
{
  if (instance.ground_size() > budget) {
    throw BudgetError(std::string(operation) + ": ground set has " + std::to_string(instance.ground_size()) +
                      " elements, over the enumeration budget of " + std::to_string(budget));
  }
}

PhiVector phi_total_streaming(const Instance& instance, std::uint64_t budget)
{
  require_enumerable(instance, budget, "phi(B)");
  const std::size_t dim = instance.dimension();
  std::vector<std::int64_t> row(dim);
  PhiVector total(dim, BigInt(0));
  for (std::uint64_t r = 0; r < instance.ground_size(); ++r) {
    instance.evaluate(ElementKey{r}, row);
    for (std::size_t a = 0; a < dim; ++a) total[a] += row[a];
  }
  return total;
}

TableInstance::TableInstance(std::vector<std::vector<std::int64_t>> rows, FrameworkConstants constants,
                             std::vector<Rational> constant_combination)
    : Instance(std::move(constants)), rows_(std::move(rows)), constant_(std::move(constant_combination))
{
  if (rows_.empty()) throw PreconditionError("table instance needs at least one element");
  dimension_ = rows_.front().size();
  if (dimension_ == 0) throw PreconditionError("table instance needs |A| >= 1");
  for (const auto& row : rows_)
    if (row.size() != dimension_) throw PreconditionError("table instance rows have unequal length");
  if (!constant_.empty() && constant_.size() != dimension_)
    throw PreconditionError("constant combination length differs from |A|");
}

nlohmann::json TableInstance::parameters() const
{
  return {{"rows", rows_.size()}, {"dimension", dimension_}};
}

std::string TableInstance::index_label(std::size_t a) const
{
  return "a" + std::to_string(a);
}

std::string TableInstance::element_label(ElementKey b) const
{
  return "b" + std::to_string(b.rank);
}

ElementKey TableInstance::parse_element(std::string_view text) const
{
  if (text.size() < 2 || text.front() != 'b') throw std::invalid_argument("bad element label: " + std::string(text));
  std::uint64_t rank = 0;
  for (char ch : text.substr(1)) {
    if (ch < '0' || ch > '9') throw std::invalid_argument("bad element label: " + std::string(text));
    rank = rank * 10 + static_cast<std::uint64_t>(ch - '0');
  }
  if (rank >= rows_.size()) throw std::invalid_argument("element out of range: " + std::string(text));
  return ElementKey{rank};
}

void TableInstance::evaluate(ElementKey b, std::span<std::int64_t> out) const
{
  const auto& row = rows_.at(b.rank);
  std::copy(row.begin(), row.end(), out.begin());
}

SymmetryWitness SymmetryWitness::identity(const Instance& instance)
{
  const std::size_t dim = instance.dimension();
  std::vector<std::vector<Rational>> tau(dim, std::vector<Rational>(dim, Rational(0)));
  for (std::size_t a = 0; a < dim; ++a) tau[a][a] = 1;
  return {[](ElementKey b) { return b; }, std::move(tau)};
}

std::vector<Rational> apply(const std::vector<std::vector<Rational>>& tau, std::span<const std::int64_t> x)
{
  std::vector<Rational> out(tau.size(), Rational(0));
  for (std::size_t i = 0; i < tau.size(); ++i) {
    Rational acc = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] != 0 && tau[i][j] != 0) acc += tau[i][j] * x[j];
    out[i] = acc;
  }
  return out;
}

PhiVector phi_sum(const Instance& instance, std::span<const ElementKey> subset)
{
  const std::size_t dim = instance.dimension();
  PhiVector total(dim, BigInt(0));
  std::vector<std::int64_t> row(dim);
  for (ElementKey key : subset) {
    if (!instance.contains(key))
      throw std::domain_error("unknown element key with rank " + std::to_string(key.rank));
    instance.evaluate(key, row);
    for (std::size_t a = 0; a < dim; ++a) total[a] += row[a];
  }
  return total;
}

ExpectedVector expected_vector(const Instance& instance, const BigInt& n)
{
  const BigInt size = instance.ground_size();
  if (n < 1 || n > size)
    throw PreconditionError("N = " + n.str() + " is outside [1, |B| = " + size.str() + "]");
  ExpectedVector result;
  result.integral = true;
  for (const BigInt& total : instance.phi_total()) {
    Rational value = Rational(total * n, size);
    result.integral = result.integral && is_integral(value);
    result.values.push_back(std::move(value));
  }
  return result;
}

DivisibilityReport check_divisibility(const Instance& instance)
{
  const BigInt size = instance.ground_size();
  DivisibilityReport report;
  report.minimal_c0 = 1;
  for (const BigInt& total : instance.phi_total()) {
    BigInt g = gcd(size, total < 0 ? BigInt(-total) : total);
    report.minimal_c0 = lcm(report.minimal_c0, size / g);
  }
  report.declared_c0 = instance.constants().c0;
  report.divides_declared = report.declared_c0 % report.minimal_c0 == 0;
  return report;
}

BoundednessReport check_boundedness(const Instance& instance, std::uint64_t budget)
{
  require_enumerable(instance, budget, "boundedness check");
  BoundednessReport report;
  report.bound_squared = ceil(instance.constants().c1_squared);
  std::vector<std::int64_t> row(instance.dimension());
  for (std::uint64_t r = 0; r < instance.ground_size(); ++r) {
    instance.evaluate(ElementKey{r}, row);
    BigInt sq = 0;
    for (std::int64_t v : row) sq += BigInt(v) * v;
    if (r == 0 || sq > report.max_squared_norm) {
      report.max_squared_norm = sq;
      report.argmax = ElementKey{r};
    }
  }
  report.max_norm = std::sqrt(to_double(report.max_squared_norm));
  report.pass = Rational(report.max_squared_norm) <= instance.constants().c1_squared;
  return report;
}

namespace {

bool rational_matrix_invertible(std::vector<std::vector<Rational>> m)
{
  const std::size_t n = m.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return false;
    std::swap(m[col], m[pivot]);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (m[i][col] == 0) continue;
      const Rational factor = m[i][col] / m[col][col];
      for (std::size_t j = col; j < n; ++j) m[i][j] -= factor * m[col][j];
    }
  }
  return true;
}

}  // namespace

SymmetryReport verify_symmetry(const Instance& instance, const SymmetryWitness& witness, const SymmetryMode& mode,
                               std::uint64_t budget)
{
  const std::size_t dim = instance.dimension();
  if (witness.tau.size() != dim)
    throw PreconditionError("symmetry witness has " + std::to_string(witness.tau.size()) + " rows, |A| = " +
                            std::to_string(dim));
  for (const auto& row : witness.tau)
    if (row.size() != dim) throw PreconditionError("symmetry witness matrix is not |A| x |A|");

  SymmetryReport report;
  report.tau_invertible = rational_matrix_invertible(witness.tau);
  if (!report.tau_invertible) {
    report.pass = false;
    report.detail = "tau is singular";
  }

  const std::uint64_t size = instance.ground_size();
  std::vector<std::int64_t> source(dim), image(dim);
  std::vector<bool> hit;
  const bool exhaustive = mode.kind == SymmetryMode::Kind::exhaustive;
  if (exhaustive) {
    require_enumerable(instance, budget, "exhaustive symmetry check");
    hit.assign(size, false);
  }
  CounterStream stream(mode.seed, 0);
  const std::uint64_t total = exhaustive ? size : mode.count;

  for (std::uint64_t i = 0; i < total; ++i) {
    const ElementKey b = exhaustive ? ElementKey{i} : ElementKey{stream.below(size)};
    const ElementKey target = witness.permutation(b);
    ++report.checked;
    if (!instance.contains(target)) {
      if (!report.first_violation) {
        report.first_violation = b;
        report.detail = "pi maps " + instance.element_label(b) + " outside the ground set";
      }
      report.pass = false;
      continue;
    }
    if (exhaustive) {
      if (hit[target.rank] && report.pass) {
        report.detail = "pi is not injective";
        report.first_violation = b;
      }
      if (hit[target.rank]) report.pass = false;
      hit[target.rank] = true;
    }
    instance.evaluate(b, source);
    instance.evaluate(target, image);
    const auto transformed = rigidgen::apply(witness.tau, source);
    for (std::size_t a = 0; a < dim; ++a) {
      if (transformed[a] != image[a]) {
        if (!report.first_violation) {
          report.first_violation = b;
          report.detail = "phi(pi(" + instance.element_label(b) + ")) differs from tau phi(b) at " +
                          instance.index_label(a);
        }
        report.pass = false;
        break;
      }
    }
  }
  if (exhaustive) {
    bool bijective = true;
    for (bool h : hit) bijective = bijective && h;
    report.permutation_bijective = bijective;
    report.pass = report.pass && bijective;
  }
  return report;
}

IsolationReport verify_isolation_family(const Instance& instance, const IsolationFamily& family)
{
  const std::size_t dim = instance.dimension();
  const auto& constants = instance.constants();
  IsolationReport report;
  report.target = family.target;
  report.modulus = family.modulus;
  report.r = family.members.size();
  report.required_r = ceil(Rational(BigInt(instance.ground_size())) / constants.c2);
  report.count_ok = BigInt(report.r) >= report.required_r;
  if (!report.count_ok)
    report.failures.push_back("r = " + std::to_string(report.r) + " below ceil(|B|/c2) = " + report.required_r.str());
  if (family.target >= dim) {
    report.images_ok = false;
    report.failures.push_back("target index out of range");
    return report;
  }

  std::vector<std::int64_t> row(dim);
  std::set<ElementKey> seen;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& gamma = family.members[i];
    PhiVector image(dim, BigInt(0));
    bool keys_ok = true;
    for (const auto& [key, coefficient] : gamma.entries()) {
      if (!instance.contains(key)) {
        keys_ok = false;
        break;
      }
      instance.evaluate(key, row);
      for (std::size_t a = 0; a < dim; ++a)
        if (row[a] != 0) image[a] += coefficient * row[a];
      if (!seen.insert(key).second) {
        if (report.disjoint_ok)
          report.failures.push_back("member " + std::to_string(i) + " shares support element " +
                                    instance.element_label(key) + " with an earlier member");
        report.disjoint_ok = false;
      }
    }
    bool image_matches = keys_ok;
    for (std::size_t a = 0; a < dim && image_matches; ++a)
      image_matches = image[a] == (a == family.target ? family.modulus : BigInt(0));
    if (!image_matches) {
      if (report.images_ok) report.failures.push_back("member " + std::to_string(i) + " does not map to m e_a");
      report.images_ok = false;
    }
    const BigInt sq = gamma.squared_norm();
    if (sq > report.max_squared_norm) report.max_squared_norm = sq;
    if (Rational(sq) > constants.c3_squared) {
      if (report.norms_ok)
        report.failures.push_back("member " + std::to_string(i) + " has squared norm " + sq.str() +
                                  " above c3^2 = " + to_string(constants.c3_squared));
      report.norms_ok = false;
    }
  }
  if (family.modulus != constants.m) {
    report.images_ok = false;
    report.failures.push_back("family modulus " + family.modulus.str() + " differs from m = " + constants.m.str());
  }
  return report;
}

SolutionCertificate verify_solution(const Instance& instance, std::span<const ElementKey> subset)
{
  if (subset.empty()) throw PreconditionError("verify_solution needs a nonempty subset");
  const PhiVector sum = phi_sum(instance, subset);
  const PhiVector total = instance.phi_total();
  const BigInt size = instance.ground_size();
  const BigInt count = subset.size();
  SolutionCertificate cert;
  cert.size = subset.size();
  cert.pass = true;
  for (std::size_t a = 0; a < sum.size(); ++a) {
    if (size * sum[a] != count * total[a]) {
      cert.pass = false;
      cert.first_violation = a;
      break;
    }
  }
  return cert;
}

AdmissibleN admissible_N(const Instance& instance, const NWindowConstants& constants)
{
  const auto& c = instance.constants();
  AdmissibleN result;
  result.constants = constants;
  result.divisor = c.c0 * c.m;

  const long double dim = static_cast<long double>(instance.dimension());
  const long double m = c.m.convert_to<long double>();
  const long double c0 = c.c0.convert_to<long double>();
  const long double c1 = std::sqrt(c.c1_squared.convert_to<long double>());
  const long double c2 = c.c2.convert_to<long double>();
  const long double c3 = std::sqrt(c.c3_squared.convert_to<long double>());
  const long double log_term = std::log(dim * m * c0 * c1 * c2 * c3);

  const long double t0 = m * m * m;
  const long double t1 = dim * dim * m * m * log_term * log_term;
  const long double t2 = std::pow(dim, 6.0L) * std::pow(c1, 6.0L) * std::pow(c2, 3.0L) * std::pow(c3, 6.0L) *
                         log_term * log_term * log_term;
  result.lower_terms[0] = static_cast<double>(t0);
  result.lower_terms[1] = static_cast<double>(t1);
  result.lower_terms[2] = static_cast<double>(t2);
  const long double lower = constants.lower_scale * std::max({t0, t1, t2});
  const long double upper = constants.upper_scale * std::sqrt(static_cast<long double>(instance.ground_size()));
  result.lower_bound = static_cast<double>(lower);
  result.upper_bound = static_cast<double>(upper);

  if (std::isfinite(static_cast<double>(lower)) && lower <= upper) {
    // Smallest multiple of the divisor that is >= max(lower, 1).
    const long double from = std::max(lower, 1.0L);
    BigInt start(static_cast<unsigned long long>(std::ceil(from)));
    BigInt candidate = (start + result.divisor - 1) / result.divisor * result.divisor;
    if (candidate.convert_to<long double>() <= upper) result.smallest = candidate;
  }
  return result;
}

bool has_constant_function(const Instance& instance, std::uint64_t budget)
{
  const auto combination = instance.constant_combination();
  if (combination.empty()) return false;
  require_enumerable(instance, budget, "constant-function check");
  std::vector<std::int64_t> row(instance.dimension());
  for (std::uint64_t r = 0; r < instance.ground_size(); ++r) {
    instance.evaluate(ElementKey{r}, row);
    Rational value = 0;
    for (std::size_t a = 0; a < row.size(); ++a) value += combination[a] * row[a];
    if (value != 1) return false;
  }
  return true;
}

}  // namespace rigidgen
