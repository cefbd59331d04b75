#include <doctest.h>

#include <cmath>

#include "rigidgen/design.hpp"
#include "rigidgen/fourier.hpp"
#include "rigidgen/oa.hpp"
#include "rigidgen/random.hpp"

using namespace rigidgen;
using namespace rigidgen::fourier;

TEST_CASE("mod-1 reduction")
{
  CHECK(reduce_mod1(0.75) == doctest::Approx(-0.25));
  CHECK(reduce_mod1(-0.5) == doctest::Approx(-0.5));
  CHECK(reduce_mod1(0.5) == doctest::Approx(-0.5));
  CHECK(reduce_mod1(Rational(7, 3)) == Rational(1, 3));
  CHECK(reduce_mod1(Rational(-1, 2)) == Rational(-1, 2));
}

TEST_CASE("correlation matrix of OA(2,2,1)")
{
  oa::OAInstance inst({2, 2, 1});
  const auto r = correlation_matrix(inst);
  CHECK(r.symmetric());
  CHECK(r.positive_semidefinite());
  CHECK(r.determinant() == 4);
  CHECK(r.entries[0][0] == 4);
  CHECK(r.entries[1][1] == 2);
  const std::vector<double> theta{0.1, 0.2, -0.3};
  double direct = 0.0;
  std::vector<std::int64_t> row(3);
  for (std::uint64_t b = 0; b < inst.ground_size(); ++b) {
    inst.evaluate(ElementKey{b}, row);
    double nu = 0.0;
    for (int a = 0; a < 3; ++a) nu += row[a] * theta[a];
    direct += nu * nu;
  }
  CHECK(r.quadratic_form(theta) == doctest::Approx(direct));
}

TEST_CASE("characteristic function basics")
{
  oa::OAInstance inst({2, 3, 1});
  const std::vector<double> zero(inst.dimension(), 0.0);
  CHECK(std::abs(fourier_coefficient(inst, 0.3, zero) - 1.0) < 1e-12);
  const std::vector<double> integer_shift(inst.dimension(), 1.0);
  CHECK(std::abs(fourier_coefficient(inst, 0.3, integer_shift) - 1.0) < 1e-12);
  CHECK_THROWS_AS(fourier_coefficient(inst, 1.5, zero), PreconditionError);

  oa::OAInstance small({2, 2, 1});
  const std::vector<double> half{0.5, 0.0, 0.0};
  CHECK(std::abs(fourier_coefficient(small, 0.5, half)) < 1e-12);
  const auto taylor = taylor_scalar_check(0.3, 0.0);
  CHECK(taylor.delta == 0.0);
}

TEST_CASE("exact distribution against subset enumeration")
{
  oa::OAInstance inst({2, 2, 1});
  const auto table = exact_distribution(inst, 2);
  CHECK(table.total() == 1);
  // E[X] = (2, 1, 1); the subsets {11,22} and {12,21} hit it.
  const std::vector<Rational> lambda{2, 1, 1};
  CHECK(exact_point_probability(inst, 2, lambda) == Rational(1, 8));

  // Enumerate all 16 subsets with Bernoulli(1/2) weights.
  Rational brute = 0;
  std::vector<std::int64_t> row(3);
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<std::int64_t> sum(3, 0);
    for (unsigned b = 0; b < 4; ++b)
      if (mask >> b & 1) {
        inst.evaluate(ElementKey{b}, row);
        for (int a = 0; a < 3; ++a) sum[a] += row[a];
      }
    if (sum == std::vector<std::int64_t>{2, 1, 1}) brute += Rational(1, 16);
  }
  CHECK(brute == Rational(1, 8));
  const std::vector<Rational> fractional{Rational(1, 2), 0, 0};
  CHECK(exact_point_probability(inst, 2, fractional) == 0);
}

TEST_CASE("Fourier inversion matches the exact law")
{
  // One-dimensional walk: phi(b) = 1 on 6 elements, X ~ Binomial(6, 1/3).
  FrameworkConstants c;
  TableInstance inst(std::vector<std::vector<std::int64_t>>(6, {1}), c, {1});
  for (int k = 0; k <= 6; ++k) {
    const std::vector<Rational> lambda{k};
    const double exact = to_double(exact_point_probability(inst, 2, lambda));
    CHECK(inversion_quadrature(inst, 2, lambda, 64) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("lattice L on design(4,3,1)")
{
  design::DesignInstance inst({4, 3, 1});
  const BigInt m = inst.constants().m;
  CHECK(m == 3);
  const auto lattice = enumerate_lattice_L(inst);
  REQUIRE_FALSE(lattice.empty());
  // Every point lies on the 1/m grid and the set is closed under addition.
  for (const auto& point : lattice) {
    REQUIRE(point.exact);
    for (const auto& x : *point.exact) CHECK(is_integral(x * Rational(m)));
  }
  for (const auto& a : lattice)
    for (const auto& b : lattice) {
      std::vector<Rational> sum;
      for (std::size_t i = 0; i < a.exact->size(); ++i) sum.push_back((*a.exact)[i] + (*b.exact)[i]);
      const auto reduced = TorusPoint::from_exact(sum);
      bool found = false;
      for (const auto& p : lattice) found = found || *p.exact == *reduced.exact;
      CHECK(found);
    }
  // Shifting by a lattice point leaves the characteristic function unchanged.
  std::vector<double> theta{0.01, -0.07, 0.13, 0.02};
  const auto base = fourier_coefficient(inst, 0.25, theta);
  for (const auto& point : lattice) {
    std::vector<double> shifted(theta);
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += point.coords[i];
    CHECK(std::abs(fourier_coefficient(inst, 0.25, shifted) - base) < 1e-12);
  }
}

TEST_CASE("torus distances")
{
  const std::vector<double> a{0.45, 0.0};
  const std::vector<double> b{-0.45, 0.0};
  CHECK(torus_distance(a, b) == doctest::Approx(0.1));
  CHECK(torus_distance(std::vector<double>{0.4}, std::vector<double>{-0.4}) == doctest::Approx(0.2));
  CHECK(distance_to_M(std::vector<double>{0.3, 0.0}, 3) == doctest::Approx(1.0 / 30.0));
  CHECK_THROWS_AS(distance_to_set(a, {}), PreconditionError);
  oa::OAInstance inst({2, 2, 1});
  // m = 1, so M = L and M \ L is empty.
  CHECK(std::isinf(distance_to_M_minus_L(inst, std::vector<double>{0.1, 0.1, 0.1})));
}

TEST_CASE("Gaussian prediction for OA(2,2,1)")
{
  oa::OAInstance inst({2, 2, 1});
  const auto prediction = gaussian_prediction(inst, 2);
  CHECK(prediction.det_r == 4);
  CHECK(prediction.lattice_size == 1);
  CHECK_FALSE(prediction.degenerate);
  CHECK(prediction.value == doctest::Approx(std::pow(4.0 * std::numbers::pi * 0.5, -1.5) / 2.0));
  CHECK(prediction.variance_corrected == doctest::Approx(std::pow(2.0 * std::numbers::pi * 0.25, -1.5) / 2.0));

  // Scaling in p follows the closed form.
  oa::OAInstance larger({2, 3, 1});
  const auto at2 = gaussian_prediction(larger, 2);
  const auto at4 = gaussian_prediction(larger, 4);
  CHECK(at2.value / at4.value == doctest::Approx(std::pow(0.25 / 0.5, -2.0)));

  // A duplicated basis row makes R singular.
  FrameworkConstants c;
  TableInstance duplicated({{1, 1}, {0, 0}, {1, 1}}, c);
  CHECK(gaussian_prediction(duplicated, 1).degenerate);
}

TEST_CASE("scalar claims")
{
  for (int pi = 1; pi <= 10; ++pi) {
    const double p = 0.05 * pi;
    for (int xi = -100; xi <= 100; ++xi) {
      const double x = 0.01 * xi;
      if (std::abs(x) <= 0.5) CHECK(modulus_bound_holds(p, x));
      CHECK(taylor_scalar_check(p, x).holds);
    }
  }
}

TEST_CASE("near-zero lemma: delta shrinks as theta halves")
{
  oa::OAInstance inst({2, 3, 1});
  const std::uint64_t n = 4;
  LemmaConstants constants;
  constants.error_constant = 10.0;
  const double limit = 1.0 / (inst.constants().c1() * std::cbrt(static_cast<double>(n)));
  std::vector<double> direction{0.3, -0.5, 0.2, 0.7};
  double previous = std::numeric_limits<double>::infinity();
  for (int h = 0; h < 6; ++h) {
    std::vector<double> theta(direction);
    for (auto& x : theta) x *= 0.9 * limit / std::ldexp(1.0, h) / 1.0;
    const auto report = lemma_near_zero_check(inst, n, theta, constants);
    CHECK(report.delta < previous);
    previous = report.delta;
  }
  std::vector<double> far(4, 0.4);
  CHECK_THROWS_AS(lemma_near_zero_check(inst, n, far), PreconditionError);
}

TEST_CASE("far-from-M lemma reports a bound")
{
  oa::OAInstance inst({2, 3, 1});
  const std::vector<double> theta{0.2, 0.3, -0.1, 0.05};
  const auto report = lemma_far_from_M_check(inst, 4, theta);
  CHECK(report.in_domain);
  CHECK(report.modulus <= 1.0);
  CHECK(report.bound <= 1.0);
}
