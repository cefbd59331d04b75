#include "rigidgen/oa.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "rigidgen/combinatorics.hpp"
#include "rigidgen/random.hpp"

namespace rigidgen::oa {

namespace {

std::uint64_t checked_power(std::uint64_t base, int exponent, std::uint64_t limit, const char* what)
{
  std::uint64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > limit / base) throw BudgetError(std::string(what) + " exceeds the budget of " + std::to_string(limit));
    result *= base;
  }
  return result;
}

std::string join_ints(const std::vector<int>& values)
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

int hamming(const std::vector<int>& a, const std::vector<int>& b)
{
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

void check_positions(const OAParams& params, const IndexSubset& positions)
{
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < 1 || positions[i] > params.n)
      throw PreconditionError("position " + std::to_string(positions[i]) + " outside 1.." + std::to_string(params.n));
    if (i && positions[i] <= positions[i - 1]) throw PreconditionError("positions must be strictly increasing");
  }
  if (static_cast<int>(positions.size()) > params.t)
    throw PreconditionError("|I| = " + std::to_string(positions.size()) + " exceeds t = " + std::to_string(params.t));
}

void check_element(const OAParams& params, const OAElement& x)
{
  if (static_cast<int>(x.symbols.size()) != params.n)
    throw PreconditionError("element has length " + std::to_string(x.symbols.size()) + ", expected " +
                            std::to_string(params.n));
  for (int s : x.symbols)
    if (s < 1 || s > params.q) throw PreconditionError("symbol " + std::to_string(s) + " outside 1..q");
}

// Residue arithmetic on {1..q}, with q playing the role of zero.
int cyclic(int value, int q)
{
  int r = value % q;
  if (r <= 0) r += q;
  return r;
}

}  // namespace

void validate(const OAParams& params)
{
  if (params.q < 2) throw PreconditionError("OA alphabet size q must be at least 2");
  if (params.n < 1) throw PreconditionError("OA length n must be at least 1");
  if (params.t < 1 || params.t > params.n) throw PreconditionError("OA strength must satisfy 1 <= t <= n");
}

std::string format_element(const OAElement& x, int q)
{
  std::string out;
  for (std::size_t i = 0; i < x.symbols.size(); ++i) {
    if (q > 9 && i) out += '.';
    out += std::to_string(x.symbols[i]);
  }
  return out;
}

OAInstance::OAInstance(const OAParams& params, std::uint64_t budget)
    : Instance(FrameworkConstants{}), params_(params)
{
  validate(params_);
  ground_size_ = checked_power(static_cast<std::uint64_t>(params_.q), params_.n, budget, "|B| = q^n");

  std::uint64_t dim = 0;
  for (int s = 0; s <= params_.t; ++s)
    dim += choose64(params_.n, s) * checked_power(static_cast<std::uint64_t>(params_.q - 1), s, budget, "|A|");
  if (dim > budget) throw BudgetError("|A| = " + std::to_string(dim) + " exceeds the budget");
  basis_.reserve(dim);

  for (int s = 0; s <= params_.t; ++s) {
    for_each_combination(params_.n, s, [&](const std::vector<int>& positions) {
      std::vector<int> values(s, 1);
      while (true) {
        basis_.push_back({positions, values});
        int i = s - 1;
        while (i >= 0 && values[i] == params_.q - 1) values[i--] = 1;
        if (i < 0) break;
        ++values[i];
      }
    });
  }
  for (std::size_t a = 0; a < basis_.size(); ++a) lookup_.emplace(basis_[a], a);

  const int q = params_.q, n = params_.n, t = params_.t;
  constants_.m = 1;
  constants_.c0 = ipow(q, t);
  constants_.c1_squared = Rational(ipow(n + 1, t));
  constants_.c2 = Rational(ipow(q, t) * ipow(n, 2 * t));
  constants_.c3_squared = Rational(ipow(2, 3 * t) * ipow(n, 2 * t));
}

std::size_t OAInstance::index_of(const OABasisIndex& index) const
{
  auto it = lookup_.find(index);
  if (it == lookup_.end())
    throw PreconditionError("(" + join_ints(index.positions) + ";" + join_ints(index.values) +
                            ") is not a basis index");
  return it->second;
}

ElementKey OAInstance::key_of(const OAElement& x) const
{
  check_element(params_, x);
  std::uint64_t rank = 0;
  for (int s : x.symbols) rank = rank * static_cast<std::uint64_t>(params_.q) + static_cast<std::uint64_t>(s - 1);
  return ElementKey{rank};
}

OAElement OAInstance::element_of(ElementKey b) const
{
  if (!contains(b)) throw std::domain_error("rank " + std::to_string(b.rank) + " outside [q]^n");
  OAElement x;
  x.symbols.assign(params_.n, 1);
  std::uint64_t rank = b.rank;
  for (int i = params_.n - 1; i >= 0; --i) {
    x.symbols[i] = static_cast<int>(rank % params_.q) + 1;
    rank /= params_.q;
  }
  return x;
}

nlohmann::json OAInstance::parameters() const
{
  return {{"q", params_.q}, {"n", params_.n}, {"t", params_.t}};
}

std::string OAInstance::index_label(std::size_t a) const
{
  const auto& idx = basis_.at(a);
  return "({" + join_ints(idx.positions) + "},(" + join_ints(idx.values) + "))";
}

std::string OAInstance::element_label(ElementKey b) const
{
  return format_element(element_of(b), params_.q);
}

ElementKey OAInstance::parse_element(std::string_view text) const
{
  OAElement x;
  const bool compact = params_.q <= 9 && std::all_of(text.begin(), text.end(), [](char c) {
                         return std::isdigit(static_cast<unsigned char>(c));
                       });
  if (compact) {
    for (char c : text) x.symbols.push_back(c - '0');
  } else {
    std::string buffer(text);
    for (char& c : buffer)
      if (c == '.' || c == ',') c = ' ';
    std::istringstream in(buffer);
    std::string token;
    while (in >> token) {
      if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw std::invalid_argument("bad OA symbol '" + token + "'");
      x.symbols.push_back(std::stoi(token));
    }
  }
  try {
    return key_of(x);
  } catch (const PreconditionError& e) {
    throw std::invalid_argument("bad OA element '" + std::string(text) + "': " + e.what());
  }
}

void OAInstance::evaluate(ElementKey b, std::span<std::int64_t> out) const
{
  std::int64_t symbols[64];
  std::vector<std::int64_t> heap;
  std::int64_t* x = symbols;
  if (params_.n > 64) {
    heap.resize(params_.n);
    x = heap.data();
  }
  std::uint64_t rank = b.rank;
  for (int i = params_.n - 1; i >= 0; --i) {
    x[i] = static_cast<std::int64_t>(rank % params_.q) + 1;
    rank /= params_.q;
  }
  for (std::size_t a = 0; a < basis_.size(); ++a) {
    const auto& idx = basis_[a];
    bool match = true;
    for (std::size_t j = 0; j < idx.positions.size() && match; ++j) match = x[idx.positions[j] - 1] == idx.values[j];
    out[a] = match ? 1 : 0;
  }
}

PhiVector OAInstance::phi_total() const
{
  PhiVector total;
  total.reserve(basis_.size());
  for (const auto& idx : basis_)
    total.push_back(ipow(params_.q, static_cast<std::uint64_t>(params_.n - static_cast<int>(idx.positions.size()))));
  return total;
}

std::vector<Rational> OAInstance::constant_combination() const
{
  std::vector<Rational> c(basis_.size(), Rational(0));
  c[0] = 1;  // f_(empty, empty) is the constant 1
  return c;
}

IsolationFamily OAInstance::isolation_family(std::size_t a, const IsolationOptions& options) const
{
  return oa_isolation_family(*this, a, options);
}

std::unique_ptr<OAInstance> build_oa_instance(const OAParams& params, std::uint64_t budget)
{
  return std::make_unique<OAInstance>(params, budget);
}

namespace {

void expand_into(const OAInstance& instance, const IndexSubset& positions, const std::vector<int>& values,
                 const BigInt& sign, IndexCombination& out)
{
  const int q = instance.params().q;
  auto it = std::find(values.begin(), values.end(), q);
  if (it == values.end()) {
    const std::size_t a = instance.index_of({positions, values});
    out[a] += sign;
    if (out[a] == 0) out.erase(a);
    return;
  }
  const auto where = static_cast<std::size_t>(it - values.begin());
  IndexSubset reduced_positions = positions;
  std::vector<int> reduced_values = values;
  reduced_positions.erase(reduced_positions.begin() + static_cast<std::ptrdiff_t>(where));
  reduced_values.erase(reduced_values.begin() + static_cast<std::ptrdiff_t>(where));
  expand_into(instance, reduced_positions, reduced_values, sign, out);
  std::vector<int> replaced = values;
  for (int s = 1; s < q; ++s) {
    replaced[where] = s;
    expand_into(instance, positions, replaced, -sign, out);
  }
}

}  // namespace

IndexCombination expand_indicator(const OAInstance& instance, const IndexSubset& positions,
                                  const std::vector<int>& values, int check_samples)
{
  const auto& p = instance.params();
  check_positions(p, positions);
  if (values.size() != positions.size()) throw PreconditionError("|v| must equal |I|");
  for (int v : values)
    if (v < 1 || v > p.q) throw PreconditionError("indicator value " + std::to_string(v) + " outside 1..q");

  IndexCombination out;
  expand_into(instance, positions, values, BigInt(1), out);

  CounterStream stream(0x6f61u + positions.size(), values.empty() ? 0 : static_cast<std::uint64_t>(values[0]));
  std::vector<std::int64_t> row(instance.dimension());
  for (int s = 0; s < check_samples; ++s) {
    const ElementKey b{stream.below(instance.ground_size())};
    const OAElement x = instance.element_of(b);
    bool direct = true;
    for (std::size_t j = 0; j < positions.size(); ++j) direct = direct && x.symbols[positions[j] - 1] == values[j];
    instance.evaluate(b, row);
    BigInt combined = 0;
    for (const auto& [a, coefficient] : out) combined += coefficient * row[a];
    if (combined != (direct ? 1 : 0))
      throw std::logic_error("indicator expansion disagrees with direct evaluation at " + instance.element_label(b));
  }
  return out;
}

SparseDomainVector oa_delta(const OAInstance& instance, const OAElement& x, const IndexSubset& positions)
{
  const auto& p = instance.params();
  check_element(p, x);
  check_positions(p, positions);
  const std::size_t k = positions.size();
  SparseDomainVector delta;
  for (std::uint64_t j_mask = 0; j_mask < (std::uint64_t{1} << k); ++j_mask) {
    OAElement padded = x;
    int removed = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(j_mask >> i & 1u)) {
        padded.symbols[positions[i] - 1] = p.q;
        ++removed;
      }
    }
    delta.add(instance.key_of(padded), removed % 2 ? BigInt(-1) : BigInt(1));
  }
  return delta;
}

namespace {

SparseDomainVector gamma_recursive(const OAInstance& instance, const OAElement& x, const IndexSubset& positions,
                                   std::map<IndexSubset, SparseDomainVector>& memo)
{
  if (auto it = memo.find(positions); it != memo.end()) return it->second;
  const auto& p = instance.params();
  SparseDomainVector gamma = oa_delta(instance, x, positions);
  const int room = p.t - static_cast<int>(positions.size());
  if (room > 0) {
    // Coordinates outside I where x avoids the excluded symbol q.
    std::vector<int> extendable;
    for (int i = 1; i <= p.n; ++i)
      if (!std::binary_search(positions.begin(), positions.end(), i) && x.symbols[i - 1] != p.q)
        extendable.push_back(i);
    const int available = static_cast<int>(extendable.size());
    for (int extra = 1; extra <= std::min(room, available); ++extra) {
      for_each_combination(available, extra, [&](const std::vector<int>& chosen) {
        IndexSubset superset = positions;
        for (int c : chosen) superset.push_back(extendable[c - 1]);
        std::sort(superset.begin(), superset.end());
        gamma -= gamma_recursive(instance, x, superset, memo);
      });
    }
  }
  memo.emplace(positions, gamma);
  return gamma;
}

}  // namespace

SparseDomainVector oa_gamma(const OAInstance& instance, const OAElement& x, const IndexSubset& positions)
{
  const auto& p = instance.params();
  check_element(p, x);
  check_positions(p, positions);
  for (int i : positions)
    if (x.symbols[i - 1] == p.q)
      throw PreconditionError("x restricted to I must avoid the symbol q (coordinate " + std::to_string(i) + ")");
  std::map<IndexSubset, SparseDomainVector> memo;
  return gamma_recursive(instance, x, positions, memo);
}

BigInt oa_gamma_norm_bound_squared(const OAParams& params, int subset_size)
{
  return ipow(2, params.t) * ipow(2 * params.n, 2 * (params.t - subset_size));
}

BigInt oa_family_lower_bound(const OAParams& params)
{
  return ceil(Rational(ipow(params.q, params.n - params.t), ipow(params.n, 2 * params.t)));
}

IsolationFamily oa_isolation_family(const OAInstance& instance, std::size_t a, const IsolationOptions& options)
{
  const auto& p = instance.params();
  if (a >= instance.dimension()) throw PreconditionError("basis index out of range");
  const OABasisIndex& target = instance.basis()[a];

  std::vector<int> free_positions;
  for (int i = 1; i <= p.n; ++i)
    if (!std::binary_search(target.positions.begin(), target.positions.end(), i)) free_positions.push_back(i);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < free_positions.size(); ++i) total *= static_cast<std::uint64_t>(p.q);

  IsolationFamily family;
  family.target = a;
  family.modulus = instance.constants().m;
  const std::uint64_t offset = splitmix64(options.seed) % total;
  const std::uint64_t visits = std::min(total, options.candidate_budget);
  family.complete = visits == total;

  std::vector<OAElement> centers;
  OAElement x;
  x.symbols.assign(p.n, 1);
  for (std::size_t j = 0; j < target.positions.size(); ++j) x.symbols[target.positions[j] - 1] = target.values[j];

  for (std::uint64_t step = 0; step < visits; ++step) {
    std::uint64_t code = (offset + step) % total;
    for (auto it = free_positions.rbegin(); it != free_positions.rend(); ++it) {
      x.symbols[*it - 1] = static_cast<int>(code % p.q) + 1;
      code /= p.q;
    }
    const bool far = std::all_of(centers.begin(), centers.end(), [&](const OAElement& c) {
      return hamming(c.symbols, x.symbols) >= 2 * p.t + 1;
    });
    if (far) centers.push_back(x);
  }

  for (const auto& center : centers) {
    SparseDomainVector gamma = oa_gamma(instance, center, target.positions);
    const BigInt sq = gamma.squared_norm();
    if (sq > family.max_squared_norm) family.max_squared_norm = sq;
    family.centers.push_back(instance.key_of(center));
    family.members.push_back(std::move(gamma));
  }
  return family;
}

OAVerification verify_oa(const std::vector<OAElement>& rows, const OAParams& params)
{
  validate(params);
  if (rows.empty()) throw PreconditionError("an orthogonal array needs at least one row");
  for (const auto& row : rows) check_element(params, row);

  OAVerification result;
  result.pass = true;
  const std::uint64_t strings = ipow(params.q, params.t).convert_to<std::uint64_t>();
  const BigInt qt = strings;
  std::vector<std::uint64_t> counts(strings);
  for_each_combination(params.n, params.t, [&](const std::vector<int>& positions) {
    if (!result.pass) return;
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& row : rows) {
      std::uint64_t code = 0;
      for (int i : positions) code = code * params.q + static_cast<std::uint64_t>(row.symbols[i - 1] - 1);
      ++counts[code];
    }
    for (std::uint64_t code = 0; code < strings; ++code) {
      if (qt * counts[code] != rows.size()) {
        std::vector<int> values(params.t);
        std::uint64_t c = code;
        for (int j = params.t - 1; j >= 0; --j) {
          values[j] = static_cast<int>(c % params.q) + 1;
          c /= params.q;
        }
        result.pass = false;
        result.first_violation = OAViolation{positions, values, counts[code]};
        return;
      }
    }
  });
  return result;
}

SymmetryWitness oa_symmetry_witness(const OAInstance& instance, const OAElement& shift)
{
  const auto& p = instance.params();
  check_element(p, shift);
  const std::size_t dim = instance.dimension();
  std::vector<std::vector<Rational>> tau(dim, std::vector<Rational>(dim, Rational(0)));
  for (std::size_t a = 0; a < dim; ++a) {
    const auto& idx = instance.basis()[a];
    std::vector<int> moved(idx.values.size());
    for (std::size_t j = 0; j < idx.values.size(); ++j)
      moved[j] = cyclic(idx.values[j] - shift.symbols[idx.positions[j] - 1], p.q);
    for (const auto& [column, coefficient] : expand_indicator(instance, idx.positions, moved, 0))
      tau[a][column] = Rational(coefficient);
  }
  const OAInstance* inst = &instance;
  auto permutation = [inst, shift](ElementKey b) {
    OAElement x = inst->element_of(b);
    for (std::size_t i = 0; i < x.symbols.size(); ++i)
      x.symbols[i] = cyclic(x.symbols[i] + shift.symbols[i], inst->params().q);
    return inst->key_of(x);
  };
  return {permutation, std::move(tau)};
}

}  // namespace rigidgen::oa
