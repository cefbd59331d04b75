#include "rigidgen/galois.hpp"

#include <stdexcept>
#include <string>

namespace rigidgen {

bool is_prime_power(int q, int* prime, int* degree)
{
  if (q < 2) return false;
  int p = 2;
  while (p * p <= q && q % p) ++p;
  if (q % p) p = q;
  int k = 0;
  int rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++k;
  }
  if (rest != 1) return false;
  if (prime) *prime = p;
  if (degree) *degree = k;
  return true;
}

namespace {

using Poly = std::vector<int>;  // coefficients, lowest degree first

Poly poly_mod(Poly a, const Poly& m, int p)
{
  const int dm = static_cast<int>(m.size()) - 1;
  // m is monic.
  for (int i = static_cast<int>(a.size()) - 1; i >= dm; --i) {
    const int factor = a[i] % p;
    if (!factor) continue;
    for (int j = 0; j <= dm; ++j) a[i - dm + j] = ((a[i - dm + j] - factor * m[j]) % p + p) % p;
  }
  a.resize(std::min<std::size_t>(a.size(), dm));
  return a;
}

bool is_zero(const Poly& a)
{
  for (int c : a)
    if (c) return false;
  return true;
}

Poly from_index(int index, int p, int length)
{
  Poly poly(length, 0);
  for (int i = 0; i < length; ++i) {
    poly[i] = index % p;
    index /= p;
  }
  return poly;
}

bool irreducible(const Poly& m, int p)
{
  const int degree = static_cast<int>(m.size()) - 1;
  for (int d = 1; d <= degree / 2; ++d) {
    int count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (int idx = 0; idx < count; ++idx) {
      Poly divisor = from_index(idx, p, d);
      divisor.push_back(1);
      if (is_zero(poly_mod(m, divisor, p))) return false;
    }
  }
  return true;
}

}  // namespace

GaloisField::GaloisField(int q) : q_(q)
{
  int degree = 0;
  if (q > 1024 || !is_prime_power(q, &p_, &degree))
    throw std::domain_error("unsupported field size " + std::to_string(q));

  Poly modulus;
  if (degree == 1) {
    modulus = {0, 1};
  } else {
    int count = 1;
    for (int i = 0; i < degree; ++i) count *= p_;
    for (int idx = 0; idx < count; ++idx) {
      Poly candidate = from_index(idx, p_, degree);
      candidate.push_back(1);
      if (candidate[0] != 0 && irreducible(candidate, p_)) {
        modulus = candidate;
        break;
      }
    }
  }

  add_.resize(static_cast<std::size_t>(q) * q);
  mul_.resize(static_cast<std::size_t>(q) * q);
  neg_.resize(q);
  inv_.assign(q, 0);
  for (int a = 0; a < q; ++a) {
    const Poly pa = from_index(a, p_, degree);
    for (int b = 0; b < q; ++b) {
      const Poly pb = from_index(b, p_, degree);
      int sum = 0, scale = 1;
      for (int i = 0; i < degree; ++i) {
        sum += ((pa[i] + pb[i]) % p_) * scale;
        scale *= p_;
      }
      add_[a * q + b] = sum;

      Poly product(2 * degree, 0);
      for (int i = 0; i < degree; ++i)
        for (int j = 0; j < degree; ++j) product[i + j] = (product[i + j] + pa[i] * pb[j]) % p_;
      const Poly reduced = degree == 1 ? Poly{product[0]} : poly_mod(product, modulus, p_);
      int value = 0;
      scale = 1;
      for (int i = 0; i < degree; ++i) {
        value += (i < static_cast<int>(reduced.size()) ? reduced[i] : 0) * scale;
        scale *= p_;
      }
      mul_[a * q + b] = value;
    }
  }
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      if (add(a, b) == 0) neg_[a] = b;
      if (mul(a, b) == 1) inv_[a] = b;
    }
}

int GaloisField::inv(int a) const
{
  if (a == 0) throw std::domain_error("zero has no inverse");
  return inv_[a];
}

}  // namespace rigidgen
