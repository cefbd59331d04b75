#include "rigidgen/numeric.hpp"

#include <limits>
#include <stdexcept>
#include <utility>

namespace rigidgen {

BigInt binomial(std::int64_t n, std::int64_t k)
{
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

BigInt factorial(std::int64_t n)
{
  if (n < 0) throw std::domain_error("factorial of a negative number");
  BigInt result = 1;
  for (std::int64_t i = 2; i <= n; ++i) result *= i;
  return result;
}

BigInt falling_factorial(std::int64_t n, std::int64_t k)
{
  if (k < 0) throw std::domain_error("falling factorial with negative length");
  if (k > n) return 0;
  BigInt result = 1;
  for (std::int64_t i = 0; i < k; ++i) result *= n - i;
  return result;
}

BigInt ipow(const BigInt& base, std::uint64_t exponent)
{
  BigInt result = 1;
  BigInt b = base;
  while (exponent) {
    if (exponent & 1u) result *= b;
    exponent >>= 1u;
    if (exponent) b *= b;
  }
  return result;
}

BigInt gcd(const BigInt& a, const BigInt& b)
{
  return boost::multiprecision::gcd(a, b);
}

BigInt lcm(const BigInt& a, const BigInt& b)
{
  if (a == 0 || b == 0) return 0;
  BigInt g = gcd(a, b);
  BigInt r = a / g * b;
  return r < 0 ? BigInt(-r) : r;
}

BigInt floor(const Rational& r)
{
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;  // truncates toward zero
  if (num % den != 0 && num < 0) q -= 1;
  return q;
}

BigInt ceil(const Rational& r)
{
  return -floor(-r);
}

bool is_integral(const Rational& r)
{
  return boost::multiprecision::denominator(r) == 1;
}

std::string to_string(const BigInt& v)
{
  return v.str();
}

std::string to_string(const Rational& r)
{
  if (is_integral(r)) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

double to_double(const BigInt& v)
{
  return v.convert_to<double>();
}

double to_double(const Rational& r)
{
  return r.convert_to<double>();
}

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m)
{
  const std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return 1;

  int sign = 1;
  BigInt previous = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / previous;
      }
    }
    previous = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

bool is_positive_semidefinite(const std::vector<std::vector<Rational>>& matrix)
{
  auto m = matrix;
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Rational pivot = m[k][k];
    if (pivot < 0) return false;
    if (pivot == 0) {
      for (std::size_t j = k + 1; j < n; ++j)
        if (m[k][j] != 0 || m[j][k] != 0) return false;
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m[i][k] == 0) continue;
      const Rational factor = m[i][k] / pivot;
      for (std::size_t j = k; j < n; ++j) m[i][j] -= factor * m[k][j];
    }
  }
  return true;
}

std::int64_t to_int64(const BigInt& v)
{
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer " + v.str() + " does not fit in 64 bits");
  return v.convert_to<std::int64_t>();
}

}  // namespace rigidgen
