#include "rigidgen/fourier.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace rigidgen::fourier {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double log_bigint(const BigInt& value)
{
  if (value <= 0) return -std::numeric_limits<double>::infinity();
  const std::size_t bits = boost::multiprecision::msb(value);
  if (bits < 1000) return std::log(value.convert_to<double>());
  const std::size_t shift = bits - 60;
  return std::log((value >> shift).convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

// Neumaier-compensated <row, theta>.
double compensated_dot(std::span<const std::int64_t> row, std::span<const double> theta)
{
  double sum = 0.0, correction = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    if (row[a] == 0) continue;
    const double term = static_cast<double>(row[a]) * theta[a];
    const double next = sum + term;
    if (std::abs(sum) >= std::abs(term)) correction += (sum - next) + term;
    else correction += (term - next) + sum;
    sum = next;
  }
  return sum + correction;
}

std::vector<std::vector<std::int64_t>> distinct_rows(const Instance& instance, std::uint64_t budget)
{
  require_enumerable(instance, budget, "lattice enumeration");
  std::set<std::vector<std::int64_t>> rows;
  std::vector<std::int64_t> row(instance.dimension());
  for (std::uint64_t b = 0; b < instance.ground_size(); ++b) {
    instance.evaluate(ElementKey{b}, row);
    rows.insert(row);
  }
  return {rows.begin(), rows.end()};
}

bool rows_accept(const std::vector<std::vector<std::int64_t>>& rows, std::span<const std::int64_t> numerators,
                 std::int64_t m)
{
  for (const auto& row : rows) {
    __int128 acc = 0;
    for (std::size_t a = 0; a < row.size(); ++a) acc += static_cast<__int128>(row[a]) * numerators[a];
    if (acc % m != 0) return false;
  }
  return true;
}

std::uint64_t grid_size(const BigInt& m, std::size_t dim, std::uint64_t budget, const char* what)
{
  BigInt total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    total *= m;
    if (total > budget)
      throw BudgetError(std::string(what) + ": m^|A| exceeds the budget of " + std::to_string(budget));
  }
  return total.convert_to<std::uint64_t>();
}

// Advances a base-m counter; false after wrapping to zero.
bool next_numerators(std::vector<std::int64_t>& k, std::int64_t m)
{
  for (std::size_t i = k.size(); i-- > 0;) {
    if (++k[i] < m) return true;
    k[i] = 0;
  }
  return false;
}

}  // namespace

double reduce_mod1(double x)
{
  double r = x - std::floor(x + 0.5);
  if (r >= 0.5) r -= 1.0;
  return r;
}

Rational reduce_mod1(const Rational& x)
{
  return x - Rational(floor(x + Rational(1, 2)));
}

TorusPoint TorusPoint::from_real(std::vector<double> coords)
{
  for (double& c : coords) c = reduce_mod1(c);
  return {std::move(coords), std::nullopt};
}

TorusPoint TorusPoint::from_exact(const std::vector<Rational>& coords)
{
  TorusPoint point;
  std::vector<Rational> reduced;
  reduced.reserve(coords.size());
  for (const auto& c : coords) {
    reduced.push_back(reduce_mod1(c));
    point.coords.push_back(to_double(reduced.back()));
  }
  point.exact = std::move(reduced);
  return point;
}

bool CorrelationMatrix::symmetric() const
{
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (entries[i][j] != entries[j][i]) return false;
  return true;
}

bool CorrelationMatrix::positive_semidefinite() const
{
  std::vector<std::vector<Rational>> m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (const auto& v : entries[i]) m[i].emplace_back(v);
  return is_positive_semidefinite(m);
}

BigInt CorrelationMatrix::determinant() const
{
  return bareiss_determinant(entries);
}

double CorrelationMatrix::quadratic_form(std::span<const double> theta) const
{
  double total = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = 0; j < entries.size(); ++j) total += theta[i] * to_double(entries[i][j]) * theta[j];
  return total;
}

CorrelationMatrix correlation_matrix(const Instance& instance, std::uint64_t budget)
{
  require_enumerable(instance, budget, "correlation matrix");
  const std::size_t dim = instance.dimension();
  std::vector<__int128> acc(dim * dim, 0);
  std::vector<std::int64_t> row(dim);
  std::vector<std::size_t> nonzero;
  for (std::uint64_t b = 0; b < instance.ground_size(); ++b) {
    instance.evaluate(ElementKey{b}, row);
    nonzero.clear();
    for (std::size_t a = 0; a < dim; ++a)
      if (row[a]) nonzero.push_back(a);
    for (std::size_t i : nonzero)
      for (std::size_t j : nonzero) acc[i * dim + j] += static_cast<__int128>(row[i]) * row[j];
  }
  CorrelationMatrix r;
  r.entries.assign(dim, std::vector<BigInt>(dim, BigInt(0)));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const __int128 v = acc[i * dim + j];
      const bool negative = v < 0;
      unsigned __int128 mag = negative ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
      BigInt value = static_cast<std::uint64_t>(mag >> 64);
      value <<= 64;
      value += static_cast<std::uint64_t>(mag);
      r.entries[i][j] = negative ? BigInt(-value) : value;
    }
  if (!r.symmetric()) throw std::logic_error("correlation matrix is not symmetric");
  return r;
}

std::complex<double> fourier_coefficient(const Instance& instance, double p, std::span<const double> theta)
{
  if (p < 0.0 || p > 1.0) throw PreconditionError("p must lie in [0, 1]");
  if (theta.size() != instance.dimension()) throw PreconditionError("theta has the wrong dimension");
  std::vector<std::int64_t> row(instance.dimension());
  std::complex<double> product = 1.0;
  for (std::uint64_t b = 0; b < instance.ground_size(); ++b) {
    instance.evaluate(ElementKey{b}, row);
    const double phase = reduce_mod1(compensated_dot(row, theta));
    product *= std::complex<double>(1.0 - p + p * std::cos(kTwoPi * phase), p * std::sin(kTwoPi * phase));
  }
  return product;
}

Rational DistributionTable::total() const
{
  Rational sum = 0;
  for (const auto& [value, probability] : mass) sum += probability;
  return sum;
}

Rational DistributionTable::probability(const std::vector<std::int64_t>& value) const
{
  auto it = mass.find(value);
  return it == mass.end() ? Rational(0) : it->second;
}

DistributionTable exact_distribution(const Instance& instance, std::uint64_t n, std::uint64_t state_budget)
{
  const std::uint64_t size = instance.ground_size();
  if (size > 62) throw BudgetError("exact distribution needs |B| <= 62");
  if (n > size) throw PreconditionError("N exceeds |B|");
  const std::size_t dim = instance.dimension();

  // Key: X followed by |T|; value: number of subsets.
  std::map<std::vector<std::int64_t>, std::uint64_t> states;
  states.emplace(std::vector<std::int64_t>(dim + 1, 0), 1);
  std::vector<std::int64_t> row(dim);
  for (std::uint64_t b = 0; b < size; ++b) {
    instance.evaluate(ElementKey{b}, row);
    std::map<std::vector<std::int64_t>, std::uint64_t> next = states;
    for (const auto& [key, count] : states) {
      auto shifted = key;
      for (std::size_t a = 0; a < dim; ++a) shifted[a] += row[a];
      ++shifted[dim];
      next[shifted] += count;
    }
    states = std::move(next);
    if (states.size() > state_budget)
      throw BudgetError("exact distribution exceeded " + std::to_string(state_budget) + " states");
  }

  // Pr[a given subset of size k] = N^k (|B|-N)^{|B|-k} / |B|^{|B|}.
  std::vector<Rational> weight(size + 1);
  const BigInt denominator = ipow(size, size);
  for (std::uint64_t k = 0; k <= size; ++k)
    weight[k] = Rational(ipow(n, k) * ipow(size - n, size - k), denominator);

  DistributionTable table;
  for (const auto& [key, count] : states) {
    const auto k = static_cast<std::uint64_t>(key[dim]);
    if (weight[k] == 0) continue;
    std::vector<std::int64_t> value(key.begin(), key.end() - 1);
    table.mass[value] += weight[k] * count;
  }
  return table;
}

Rational exact_point_probability(const Instance& instance, std::uint64_t n, std::span<const Rational> lambda,
                                 std::uint64_t state_budget)
{
  if (lambda.size() != instance.dimension()) throw PreconditionError("lambda has the wrong dimension");
  std::vector<std::int64_t> point;
  for (const auto& v : lambda) {
    if (!is_integral(v)) return 0;
    point.push_back(to_int64(boost::multiprecision::numerator(v)));
  }
  return exact_distribution(instance, n, state_budget).probability(point);
}

double inversion_quadrature(const Instance& instance, std::uint64_t n, std::span<const Rational> lambda,
                            std::size_t grid)
{
  const std::size_t dim = instance.dimension();
  if (dim > 2) throw PreconditionError("inversion quadrature supports |A| <= 2");
  if (lambda.size() != dim) throw PreconditionError("lambda has the wrong dimension");
  if (grid == 0) throw PreconditionError("quadrature grid must be nonempty");
  const double p = static_cast<double>(n) / static_cast<double>(instance.ground_size());
  std::vector<double> target;
  for (const auto& v : lambda) target.push_back(to_double(v));

  std::size_t points = 1;
  for (std::size_t i = 0; i < dim; ++i) points *= grid;
  std::complex<double> sum = 0.0;
  std::vector<double> theta(dim);
  for (std::size_t index = 0; index < points; ++index) {
    std::size_t rest = index;
    double phase = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      theta[a] = -0.5 + static_cast<double>(rest % grid) / static_cast<double>(grid);
      rest /= grid;
      phase += target[a] * theta[a];
    }
    const double reduced = reduce_mod1(phase);
    sum += fourier_coefficient(instance, p, theta) *
           std::complex<double>(std::cos(kTwoPi * reduced), -std::sin(kTwoPi * reduced));
  }
  return sum.real() / static_cast<double>(points);
}

bool in_lattice_L(const Instance& instance, std::span<const std::int64_t> numerators, const BigInt& m)
{
  if (numerators.size() != instance.dimension()) throw PreconditionError("numerators have the wrong dimension");
  return rows_accept(distinct_rows(instance, kDefaultElementBudget), numerators, to_int64(m));
}

std::vector<TorusPoint> enumerate_lattice_L(const Instance& instance, std::uint64_t budget)
{
  const BigInt& m_big = instance.constants().m;
  const std::size_t dim = instance.dimension();
  grid_size(m_big, dim, budget, "lattice enumeration");
  const std::int64_t m = to_int64(m_big);
  const auto rows = distinct_rows(instance, kDefaultElementBudget);

  std::vector<TorusPoint> lattice;
  std::vector<std::int64_t> k(dim, 0);
  do {
    if (rows_accept(rows, k, m)) {
      std::vector<Rational> coords;
      for (std::int64_t value : k) coords.emplace_back(value, m);
      lattice.push_back(TorusPoint::from_exact(coords));
    }
  } while (next_numerators(k, m));
  return lattice;
}

double torus_distance(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) throw PreconditionError("torus points differ in dimension");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = reduce_mod1(a[i] - b[i]);
    total += d * d;
  }
  return std::sqrt(total);
}

double distance_to_set(std::span<const double> theta, const std::vector<TorusPoint>& set)
{
  if (set.empty()) throw PreconditionError("distance to an empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& point : set) best = std::min(best, torus_distance(theta, point.coords));
  return best;
}

double distance_to_M(std::span<const double> theta, const BigInt& m_big)
{
  const double m = to_double(m_big);
  double total = 0.0;
  for (double x : theta) {
    const double scaled = x * m;
    const double d = std::abs(scaled - std::round(scaled)) / m;
    total += d * d;
  }
  return std::sqrt(total);
}

double distance_to_M_minus_L(const Instance& instance, std::span<const double> theta, std::uint64_t budget)
{
  const std::size_t dim = instance.dimension();
  grid_size(instance.constants().m, dim, budget, "distance to M minus L");
  const std::int64_t m = to_int64(instance.constants().m);
  const auto rows = distinct_rows(instance, kDefaultElementBudget);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> k(dim, 0);
  std::vector<double> point(dim);
  do {
    if (rows_accept(rows, k, m)) continue;
    for (std::size_t a = 0; a < dim; ++a) point[a] = static_cast<double>(k[a]) / static_cast<double>(m);
    best = std::min(best, torus_distance(theta, point));
  } while (next_numerators(k, m));
  return best;
}

GaussianPrediction gaussian_prediction(const Instance& instance, std::uint64_t n)
{
  GaussianPrediction prediction;
  prediction.p = static_cast<double>(n) / static_cast<double>(instance.ground_size());
  prediction.det_r = correlation_matrix(instance).determinant();
  prediction.lattice_size = enumerate_lattice_L(instance).size();
  if (prediction.det_r <= 0) {
    prediction.degenerate = true;
    return prediction;
  }
  const double dim = static_cast<double>(instance.dimension());
  const double log_value = std::log(static_cast<double>(prediction.lattice_size)) -
                           0.5 * dim * std::log(4.0 * std::numbers::pi * prediction.p) -
                           0.5 * log_bigint(prediction.det_r);
  prediction.value = std::exp(log_value);
  const double log_corrected = std::log(static_cast<double>(prediction.lattice_size)) -
                               0.5 * dim * std::log(2.0 * std::numbers::pi * prediction.p * (1.0 - prediction.p)) -
                               0.5 * log_bigint(prediction.det_r);
  prediction.variance_corrected = std::exp(log_corrected);
  return prediction;
}

NearZeroReport lemma_near_zero_check(const Instance& instance, std::uint64_t n, std::span<const double> theta,
                                     const LemmaConstants& constants)
{
  const std::size_t dim = instance.dimension();
  if (theta.size() != dim) throw PreconditionError("theta has the wrong dimension");
  std::vector<double> reduced(theta.begin(), theta.end());
  for (double& x : reduced) x = reduce_mod1(x);

  NearZeroReport report;
  const double c1 = instance.constants().c1();
  const double nn = static_cast<double>(n);
  report.epsilon = torus_distance(reduced, std::vector<double>(dim, 0.0));
  report.epsilon_limit = constants.near_zero_scale / (c1 * std::cbrt(nn));
  if (report.epsilon > report.epsilon_limit)
    throw PreconditionError("||theta|| = " + std::to_string(report.epsilon) + " exceeds the near-zero radius " +
                            std::to_string(report.epsilon_limit));

  const double p = nn / static_cast<double>(instance.ground_size());
  report.coefficient = fourier_coefficient(instance, p, reduced);

  // <E[X], theta> and theta^T R theta = sum_b <phi(b), theta>^2.
  const PhiVector total = instance.phi_total();
  double mean_phase = 0.0;
  for (std::size_t a = 0; a < dim; ++a) mean_phase += p * to_double(total[a]) * reduced[a];
  double quadratic = 0.0;
  std::vector<std::int64_t> row(dim);
  for (std::uint64_t b = 0; b < instance.ground_size(); ++b) {
    instance.evaluate(ElementKey{b}, row);
    const double nu = compensated_dot(row, reduced);
    quadratic += nu * nu;
  }
  const double angle = kTwoPi * reduce_mod1(mean_phase);
  report.approximation = std::complex<double>(std::cos(angle), std::sin(angle)) *
                         std::exp(-4.0 * std::numbers::pi * std::numbers::pi * p * quadratic);
  report.delta = std::abs(report.coefficient / report.approximation - 1.0);
  report.budget = constants.error_constant *
                  (nn * nn / static_cast<double>(instance.ground_size()) + nn * c1 * c1 * c1 * std::pow(report.epsilon, 3));
  report.holds = report.delta <= report.budget;
  return report;
}

BoundReport lemma_far_from_M_check(const Instance& instance, std::uint64_t n, std::span<const double> theta)
{
  const auto& c = instance.constants();
  BoundReport report;
  report.distance = distance_to_M(theta, c.m);
  report.in_domain = report.distance > 0.0;
  const double p = static_cast<double>(n) / static_cast<double>(instance.ground_size());
  report.modulus = std::abs(fourier_coefficient(instance, p, theta));
  const double m = to_double(c.m);
  const double exponent = static_cast<double>(n) * report.distance * report.distance * m * m /
                          (static_cast<double>(instance.dimension()) * to_double(c.c2) * to_double(c.c3_squared));
  report.bound = std::exp(-exponent);
  report.holds = report.modulus <= report.bound + 1e-12;
  return report;
}

BoundReport lemma_near_M_far_L_check(const Instance& instance, std::uint64_t n, std::span<const double> theta,
                                     const LemmaConstants& constants)
{
  const auto& c = instance.constants();
  BoundReport report;
  report.distance = distance_to_M_minus_L(instance, theta);
  const double m = to_double(c.m);
  const double radius = 1.0 / (2.0 * c.c1() * m);
  report.in_domain = report.distance <= radius;
  const double p = static_cast<double>(n) / static_cast<double>(instance.ground_size());
  report.modulus = std::abs(fourier_coefficient(instance, p, theta));
  const double dim = static_cast<double>(instance.dimension());
  const double log_term = std::log(c.c1() * dim);
  report.bound = log_term > 0.0
                     ? std::exp(-static_cast<double>(n) * constants.near_m_constant / (m * m * dim * log_term))
                     : 0.0;
  report.holds = report.modulus <= report.bound + 1e-12;
  return report;
}

TaylorReport taylor_scalar_check(double p, double x, double error_constant)
{
  TaylorReport report;
  const std::complex<double> i(0.0, 1.0);
  report.value = std::exp(-i * (p * x)) * (1.0 - p + p * std::exp(i * x));
  report.gaussian = std::exp(-p * x * x);
  report.delta = std::abs(report.value / report.gaussian - 1.0);
  report.budget = error_constant * (p * p * x * x + p * std::abs(x * x * x));
  report.holds = report.delta <= report.budget;
  return report;
}

bool modulus_bound_holds(double p, double x)
{
  const double modulus = std::abs(std::complex<double>(1.0 - p + p * std::cos(kTwoPi * x), p * std::sin(kTwoPi * x)));
  return modulus <= std::exp(-p * x * x);
}

}  // namespace rigidgen::fourier
