#ifndef RIGIDGEN_GALOIS_HPP
#define RIGIDGEN_GALOIS_HPP

#include <vector>

namespace rigidgen {

/// Finite field of prime-power order q <= 1024 given by full addition and
/// multiplication tables. Elements are 0..q-1 (base-p digits of a polynomial
/// modulo the lexicographically first monic irreducible of degree k).
class GaloisField {
public:
  explicit GaloisField(int q);

  int order() const { return q_; }
  int characteristic() const { return p_; }
  int add(int a, int b) const { return add_[a * q_ + b]; }
  int sub(int a, int b) const { return add(a, neg_[b]); }
  int mul(int a, int b) const { return mul_[a * q_ + b]; }
  int neg(int a) const { return neg_[a]; }
  /// Throws std::domain_error for a == 0.
  int inv(int a) const;
  int div(int a, int b) const { return mul(a, inv(b)); }

private:
  int q_ = 0;
  int p_ = 0;
  std::vector<int> add_, mul_, neg_, inv_;
};

/// True for q = p^k with p prime and k >= 1.
bool is_prime_power(int q, int* prime = nullptr, int* degree = nullptr);

}  // namespace rigidgen

#endif
