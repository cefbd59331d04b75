#include "rigidgen/perm.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "rigidgen/galois.hpp"

namespace rigidgen::perm {

bool is_valid(const Perm& p, int n)
{
  if (static_cast<int>(p.images.size()) != n) return false;
  std::vector<bool> seen(n + 1, false);
  for (int image : p.images) {
    if (image < 1 || image > n || seen[image]) return false;
    seen[image] = true;
  }
  return true;
}

Perm compose(const Perm& a, const Perm& b)
{
  Perm out;
  out.images.reserve(b.images.size());
  for (int image : b.images) out.images.push_back(a.images[image - 1]);
  return out;
}

Perm inverse(const Perm& p)
{
  Perm out;
  out.images.assign(p.images.size(), 0);
  for (std::size_t i = 0; i < p.images.size(); ++i) out.images[p.images[i] - 1] = static_cast<int>(i) + 1;
  return out;
}

Perm identity(int n)
{
  Perm p;
  for (int i = 1; i <= n; ++i) p.images.push_back(i);
  return p;
}

std::string format_perm(const Perm& p)
{
  std::string out;
  for (std::size_t i = 0; i < p.images.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(p.images[i]);
  }
  return out;
}

std::uint64_t rank_perm(const Perm& p)
{
  const int n = static_cast<int>(p.images.size());
  if (n > 20) throw PreconditionError("permutation ranks need n <= 20");
  std::uint64_t rank = 0;
  std::uint64_t used = 0;
  for (int i = 0; i < n; ++i) {
    const int value = p.images[i];
    int smaller_unused = 0;
    for (int v = 1; v < value; ++v)
      if (!(used >> v & 1u)) ++smaller_unused;
    used |= std::uint64_t{1} << value;
    rank = rank * static_cast<std::uint64_t>(n - i) + static_cast<std::uint64_t>(smaller_unused);
  }
  return rank;
}

Perm unrank_perm(std::uint64_t rank, int n)
{
  if (n > 20) throw PreconditionError("permutation ranks need n <= 20");
  std::vector<int> digits(n);
  for (int i = n - 1; i >= 0; --i) {
    const auto radix = static_cast<std::uint64_t>(n - i);
    digits[i] = static_cast<int>(rank % radix);
    rank /= radix;
  }
  std::vector<int> pool = identity(n).images;
  Perm p;
  for (int i = 0; i < n; ++i) {
    p.images.push_back(pool[digits[i]]);
    pool.erase(pool.begin() + digits[i]);
  }
  return p;
}

namespace {

// Ranks ordered t-tuples of distinct points of {1..n} lexicographically.
class TupleIndexer {
public:
  TupleIndexer(int n, int t) : n_(n), t_(t), weights_(t)
  {
    std::uint64_t w = 1;
    for (int p = t - 1; p >= 0; --p) {
      weights_[p] = w;
      w *= static_cast<std::uint64_t>(n - p);
    }
    count_ = w;
  }

  std::uint64_t count() const { return count_; }

  std::uint64_t rank(std::span<const int> tuple) const
  {
    std::uint64_t used = 0;
    std::uint64_t r = 0;
    for (int p = 0; p < t_; ++p) {
      int smaller_unused = 0;
      for (int v = 1; v < tuple[p]; ++v)
        if (!(used >> v & 1u)) ++smaller_unused;
      used |= std::uint64_t{1} << tuple[p];
      r += static_cast<std::uint64_t>(smaller_unused) * weights_[p];
    }
    return r;
  }

  std::vector<int> unrank(std::uint64_t r) const
  {
    std::vector<int> pool(n_);
    for (int i = 0; i < n_; ++i) pool[i] = i + 1;
    std::vector<int> tuple;
    for (int p = 0; p < t_; ++p) {
      const auto digit = static_cast<std::size_t>(r / weights_[p]);
      r %= weights_[p];
      tuple.push_back(pool[digit]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return tuple;
  }

private:
  int n_;
  int t_;
  std::vector<std::uint64_t> weights_;
  std::uint64_t count_ = 1;
};

void check_family(const std::vector<Perm>& family, int n)
{
  for (std::size_t i = 0; i < family.size(); ++i)
    if (!is_valid(family[i], n))
      throw PreconditionError("entry " + std::to_string(i + 1) + " is not a permutation of 1.." + std::to_string(n));
}

std::vector<Perm> closed_group(std::vector<Perm> perms, const char* name)
{
  std::sort(perms.begin(), perms.end());
  perms.erase(std::unique(perms.begin(), perms.end()), perms.end());
  if (!is_closed_under_composition(perms))
    throw std::logic_error(std::string(name) + " fixture is not closed under composition");
  return perms;
}

}  // namespace

TWiseVerification verify_t_wise(const std::vector<Perm>& family, int n, int t)
{
  if (n < 1 || n > 60) throw PreconditionError("verify_t_wise needs 1 <= n <= 60");
  if (t < 1 || t > n) throw PreconditionError("verify_t_wise needs 1 <= t <= n");
  if (family.empty()) throw PreconditionError("verify_t_wise needs a nonempty family");
  check_family(family, n);

  TupleIndexer indexer(n, t);
  const BigInt tuples = indexer.count();
  const BigInt size = family.size();
  std::vector<std::uint64_t> counts(indexer.count());
  std::vector<int> image(t);
  TWiseVerification result;
  result.pass = true;
  for (std::uint64_t from = 0; from < indexer.count(); ++from) {
    const auto source = indexer.unrank(from);
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& p : family) {
      for (int i = 0; i < t; ++i) image[i] = p.images[source[i] - 1];
      ++counts[indexer.rank(image)];
    }
    for (std::uint64_t to = 0; to < indexer.count(); ++to) {
      if (tuples * counts[to] != size) {
        result.pass = false;
        result.first_violation = TupleViolation{source, indexer.unrank(to), counts[to]};
        return result;
      }
    }
  }
  return result;
}

bool is_closed_under_composition(const std::vector<Perm>& family)
{
  std::set<Perm> members(family.begin(), family.end());
  for (const auto& a : family)
    for (const auto& b : family)
      if (!members.count(compose(a, b))) return false;
  return true;
}

std::vector<Perm> cyclic_fixture(int n)
{
  if (n < 1) throw PreconditionError("cyclic fixture needs n >= 1");
  std::vector<Perm> perms;
  for (int shift = 0; shift < n; ++shift) {
    Perm p;
    for (int x = 0; x < n; ++x) p.images.push_back((x + shift) % n + 1);
    perms.push_back(std::move(p));
  }
  return closed_group(std::move(perms), "cyclic");
}

std::vector<Perm> affine_fixture(int q)
{
  const GaloisField field(q);
  std::vector<Perm> perms;
  for (int a = 1; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      Perm p;
      for (int x = 0; x < q; ++x) p.images.push_back(field.add(field.mul(a, x), b) + 1);
      perms.push_back(std::move(p));
    }
  }
  return closed_group(std::move(perms), "affine");
}

std::vector<Perm> mobius_fixture(int q, MobiusVariant variant)
{
  const GaloisField field(q);
  const int infinity = q;
  auto apply = [&](int a, int b, int c, int d, int x) {
    if (x == infinity) return c == 0 ? infinity : field.div(a, c);
    const int denominator = field.add(field.mul(c, x), d);
    if (denominator == 0) return infinity;
    return field.div(field.add(field.mul(a, x), b), denominator);
  };
  std::vector<Perm> perms;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c)
        for (int d = 0; d < q; ++d) {
          const int det = field.sub(field.mul(a, d), field.mul(b, c));
          if (variant == MobiusVariant::unit_determinant ? det != 1 : det == 0) continue;
          Perm p;
          for (int x = 0; x <= q; ++x) p.images.push_back(apply(a, b, c, d, x) + 1);
          perms.push_back(std::move(p));
        }
  return closed_group(std::move(perms), "mobius");
}

std::vector<Perm> symmetric_fixture(int n)
{
  if (n < 1 || n > 10) throw PreconditionError("symmetric fixture needs 1 <= n <= 10");
  std::vector<Perm> perms;
  Perm p = identity(n);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.images.begin(), p.images.end()));
  return perms;
}

std::vector<Perm> alternating_fixture(int n)
{
  std::vector<Perm> perms;
  for (const auto& p : symmetric_fixture(n)) {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += p.images[i] > p.images[j];
    if (inversions % 2 == 0) perms.push_back(p);
  }
  return closed_group(std::move(perms), "alternating");
}

GroupAction action_of(const std::vector<Perm>& family)
{
  GroupAction action;
  action.elements = family.size();
  action.points = family.empty() ? 0 : family.front().images.size();
  action.act = [family](std::size_t g, std::size_t x) {
    return static_cast<std::size_t>(family[g].images[x] - 1);
  };
  return action;
}

XUniformVerification verify_x_uniform(std::span<const std::size_t> subset, const GroupAction& action)
{
  if (subset.empty()) throw PreconditionError("verify_x_uniform needs a nonempty subset");
  const std::size_t points = action.points;
  std::vector<std::uint64_t> counts(points * points, 0);
  std::vector<bool> hit(points);
  for (std::size_t g : subset) {
    if (g >= action.elements) throw PreconditionError("group element index out of range");
    std::fill(hit.begin(), hit.end(), false);
    for (std::size_t x = 0; x < points; ++x) {
      const std::size_t y = action.act(g, x);
      if (y >= points || hit[y])
        throw PreconditionError("group element " + std::to_string(g) + " does not act bijectively");
      hit[y] = true;
      ++counts[x * points + y];
    }
  }
  XUniformVerification result;
  result.pass = true;
  for (std::size_t x = 0; x < points; ++x)
    for (std::size_t y = 0; y < points; ++y)
      if (static_cast<std::uint64_t>(points) * counts[x * points + y] != subset.size()) {
        if (result.pass) result.first_violation = std::make_pair(x, y);
        result.pass = false;
        ++result.violation_count;
      }
  return result;
}

PermInstance::PermInstance(int n, int t, std::uint64_t budget) : Instance(FrameworkConstants{}), n_(n), t_(t)
{
  if (n < 1 || n > 20) throw PreconditionError("perm instance needs 1 <= n <= 20");
  if (t < 1 || t > n) throw PreconditionError("perm instance needs 1 <= t <= n");
  const BigInt tuples = falling_factorial(n, t);
  if (tuples * tuples > budget)
    throw BudgetError("|A| = (n)_t^2 = " + BigInt(tuples * tuples).str() + " exceeds the budget");
  tuples_ = tuples.convert_to<std::uint64_t>();
  ground_size_ = factorial(n).convert_to<std::uint64_t>();
  constants_.m = 1;
  constants_.c0 = tuples;
  constants_.c1_squared = Rational(tuples);
}

std::uint64_t PermInstance::rank_tuple(const std::vector<int>& tuple) const
{
  return TupleIndexer(n_, t_).rank(tuple);
}

std::vector<int> PermInstance::unrank_tuple(std::uint64_t rank) const
{
  return TupleIndexer(n_, t_).unrank(rank);
}

ElementKey PermInstance::key_of(const Perm& p) const
{
  if (!is_valid(p, n_)) throw PreconditionError("not a permutation of 1.." + std::to_string(n_));
  return ElementKey{rank_perm(p)};
}

Perm PermInstance::perm_of(ElementKey b) const
{
  if (!contains(b)) throw std::domain_error("rank " + std::to_string(b.rank) + " outside S_n");
  return unrank_perm(b.rank, n_);
}

nlohmann::json PermInstance::parameters() const
{
  return {{"n", n_}, {"t", t_}, {"spanning_set", true}};
}

std::string PermInstance::index_label(std::size_t a) const
{
  auto tuple_text = [](const std::vector<int>& tuple) {
    std::string s = "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) s += (i ? "," : "") + std::to_string(tuple[i]);
    return s + ")";
  };
  return tuple_text(unrank_tuple(a / tuples_)) + "->" + tuple_text(unrank_tuple(a % tuples_));
}

std::string PermInstance::element_label(ElementKey b) const
{
  const Perm p = perm_of(b);
  if (n_ > 9) return format_perm(p);
  std::string out;
  for (int image : p.images) out += static_cast<char>('0' + image);
  return out;
}

ElementKey PermInstance::parse_element(std::string_view text) const
{
  Perm p;
  const bool compact = n_ <= 9 && std::all_of(text.begin(), text.end(), [](char c) {
                         return std::isdigit(static_cast<unsigned char>(c));
                       });
  if (compact) {
    for (char c : text) p.images.push_back(c - '0');
  } else {
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
      if (!std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw std::invalid_argument("bad permutation image '" + token + "'");
      p.images.push_back(std::stoi(token));
    }
  }
  if (!is_valid(p, n_)) throw std::invalid_argument("'" + std::string(text) + "' is not a permutation");
  return ElementKey{rank_perm(p)};
}

void PermInstance::evaluate(ElementKey b, std::span<std::int64_t> out) const
{
  std::fill(out.begin(), out.end(), 0);
  const Perm p = unrank_perm(b.rank, n_);
  TupleIndexer indexer(n_, t_);
  std::vector<int> image(t_);
  for (std::uint64_t from = 0; from < tuples_; ++from) {
    const auto source = indexer.unrank(from);
    for (int i = 0; i < t_; ++i) image[i] = p.images[source[i] - 1];
    out[from * tuples_ + indexer.rank(image)] = 1;
  }
}

PhiVector PermInstance::phi_total() const
{
  return PhiVector(dimension(), factorial(n_ - t_));
}

std::vector<Rational> PermInstance::constant_combination() const
{
  // For the first source tuple, exactly one target tuple matches.
  std::vector<Rational> c(dimension(), Rational(0));
  for (std::uint64_t to = 0; to < tuples_; ++to) c[to] = 1;
  return c;
}

std::unique_ptr<PermInstance> build_perm_spanning_instance(int n, int t, std::uint64_t budget)
{
  return std::make_unique<PermInstance>(n, t, budget);
}

}  // namespace rigidgen::perm
