#ifndef RIGIDGEN_NUMERIC_HPP
#define RIGIDGEN_NUMERIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rigidgen {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

BigInt binomial(std::int64_t n, std::int64_t k);
BigInt factorial(std::int64_t n);
/// n (n-1) ... (n-k+1); 1 when k == 0, 0 when k > n.
BigInt falling_factorial(std::int64_t n, std::int64_t k);
BigInt ipow(const BigInt& base, std::uint64_t exponent);

BigInt gcd(const BigInt& a, const BigInt& b);
BigInt lcm(const BigInt& a, const BigInt& b);

/// Smallest integer >= r.
BigInt ceil(const Rational& r);
/// Largest integer <= r.
BigInt floor(const Rational& r);
bool is_integral(const Rational& r);

std::string to_string(const BigInt& v);
std::string to_string(const Rational& r);
double to_double(const BigInt& v);
double to_double(const Rational& r);

/// Fraction-free Gaussian elimination; exact for any square integer matrix.
BigInt bareiss_determinant(std::vector<std::vector<BigInt>> rows);

/// Exact positive-semidefiniteness test for a symmetric rational matrix via
/// symmetric elimination: a zero pivot must come with a zero column.
bool is_positive_semidefinite(const std::vector<std::vector<Rational>>& matrix);

/// Checked conversions used at fast-path boundaries.
std::int64_t to_int64(const BigInt& v);

}  // namespace rigidgen

#endif
