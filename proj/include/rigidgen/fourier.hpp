#ifndef RIGIDGEN_FOURIER_HPP
#define RIGIDGEN_FOURIER_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rigidgen/core.hpp"

namespace rigidgen::fourier {

/// Reduces x modulo 1 into [-1/2, 1/2).
double reduce_mod1(double x);
Rational reduce_mod1(const Rational& x);

/// Point of the torus [-1/2, 1/2)^A. Lattice members also carry exact coordinates.
struct TorusPoint {
  std::vector<double> coords;
  std::optional<std::vector<Rational>> exact;

  static TorusPoint from_real(std::vector<double> coords);
  static TorusPoint from_exact(const std::vector<Rational>& coords);
};

/// R_{a,a'} = sum_b phi(b)_a phi(b)_a'.
struct CorrelationMatrix {
  std::vector<std::vector<BigInt>> entries;

  std::size_t size() const { return entries.size(); }
  bool symmetric() const;
  bool positive_semidefinite() const;
  BigInt determinant() const;
  /// theta^T R theta in floating point.
  double quadratic_form(std::span<const double> theta) const;
};

CorrelationMatrix correlation_matrix(const Instance& instance, std::uint64_t budget = kDefaultElementBudget);

/// prod_b (1 - p + p exp(2 pi i <phi(b), theta>)), phases accumulated with
/// compensated summation and reduced mod 1 before the exponential.
std::complex<double> fourier_coefficient(const Instance& instance, double p, std::span<const double> theta);

/// Exact law of X = phi(T) under the Bernoulli(N/|B|) model.
struct DistributionTable {
  std::map<std::vector<std::int64_t>, Rational> mass;

  Rational total() const;
  Rational probability(const std::vector<std::int64_t>& value) const;
};

inline constexpr std::uint64_t kDefaultStateBudget = 5'000'000;

/// Sequential convolution of the |B| independent two-point laws, tracking
/// (X, |T|) with exact subset counts.
DistributionTable exact_distribution(const Instance& instance, std::uint64_t n,
                                     std::uint64_t state_budget = kDefaultStateBudget);

/// Pr[X = lambda]; zero when lambda is not an integer vector or unreachable.
Rational exact_point_probability(const Instance& instance, std::uint64_t n, std::span<const Rational> lambda,
                                 std::uint64_t state_budget = kDefaultStateBudget);

/// Riemann sum of the inversion integral on a uniform grid of `grid` points
/// per coordinate. Only for |A| <= 2.
double inversion_quadrature(const Instance& instance, std::uint64_t n, std::span<const Rational> lambda,
                            std::size_t grid);

/// True when <phi(b), k/m> is an integer for all b, i.e. k/m lies in L.
bool in_lattice_L(const Instance& instance, std::span<const std::int64_t> numerators, const BigInt& m);

/// All points of L; each is tested exactly against the 1/m grid M.
std::vector<TorusPoint> enumerate_lattice_L(const Instance& instance, std::uint64_t budget = 1'000'000);

double torus_distance(std::span<const double> a, std::span<const double> b);
/// Throws PreconditionError for an empty set.
double distance_to_set(std::span<const double> theta, const std::vector<TorusPoint>& set);
/// Distance to the grid (1/m Z)^A in closed form.
double distance_to_M(std::span<const double> theta, const BigInt& m);
/// Distance to M minus L, by enumerating M; infinity when M equals L.
double distance_to_M_minus_L(const Instance& instance, std::span<const double> theta,
                             std::uint64_t budget = 1'000'000);

struct GaussianPrediction {
  BigInt det_r = 0;
  std::size_t lattice_size = 0;
  double p = 0.0;
  double value = 0.0;
  /// Same leading term with the Bernoulli covariance p(1-p) R:
  /// |L| (2 pi p (1-p))^{-|A|/2} det(R)^{-1/2}.
  double variance_corrected = 0.0;
  bool degenerate = false;
};

/// |L| (4 pi p)^{-|A|/2} det(R)^{-1/2}.
GaussianPrediction gaussian_prediction(const Instance& instance, std::uint64_t n);

/// Unstated O(1) constants of the Fourier estimates; all default to 1.
struct LemmaConstants {
  double error_constant = 1.0;     // C in |delta| <= C (N^2/|B| + N c1^3 eps^3)
  double near_zero_scale = 1.0;    // eps <= scale / (c1 N^{1/3})
  double near_m_constant = 1.0;    // O(1) in exp(-N O(1) / (m^2 |A| log(c1 |A|)))
};

struct NearZeroReport {
  double epsilon = 0.0;
  double epsilon_limit = 0.0;
  std::complex<double> coefficient;
  std::complex<double> approximation;
  double delta = 0.0;
  double budget = 0.0;
  bool holds = false;
};

/// Throws PreconditionError when ||theta|| exceeds the allowed epsilon.
NearZeroReport lemma_near_zero_check(const Instance& instance, std::uint64_t n, std::span<const double> theta,
                                     const LemmaConstants& constants = {});

struct BoundReport {
  double distance = 0.0;
  double modulus = 0.0;
  double bound = 0.0;
  bool in_domain = false;
  bool holds = false;
};

/// |X(theta)| <= exp(-N eps^2 m^2 / (|A| c2 c3^2)) with eps = d(theta, M).
BoundReport lemma_far_from_M_check(const Instance& instance, std::uint64_t n, std::span<const double> theta);

/// |X(theta)| <= exp(-N C / (m^2 |A| log(c1 |A|))) when d(theta, M \ L) <= 1/(2 c1 m).
BoundReport lemma_near_M_far_L_check(const Instance& instance, std::uint64_t n, std::span<const double> theta,
                                     const LemmaConstants& constants = {});

struct TaylorReport {
  std::complex<double> value;
  double gaussian = 0.0;
  double delta = 0.0;
  double budget = 0.0;
  bool holds = false;
};

/// f(x) = e^{-ipx}(1 - p + p e^{ix}) against e^{-p x^2}; budget C (p^2 x^2 + p |x|^3).
TaylorReport taylor_scalar_check(double p, double x, double error_constant = 10.0);

/// |1 - p + p e^{2 pi i x}| <= exp(-p x^2) for p <= 1/2, |x| <= 1/2.
bool modulus_bound_holds(double p, double x);

}  // namespace rigidgen::fourier

#endif
