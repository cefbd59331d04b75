#include "rigidgen/design.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "rigidgen/combinatorics.hpp"
#include "rigidgen/random.hpp"

namespace rigidgen::design {

namespace {

void check_block(const DesignParams& params, const std::vector<int>& points, std::size_t expected_size,
                 const char* what)
{
  if (points.size() != expected_size)
    throw PreconditionError(std::string(what) + " has " + std::to_string(points.size()) + " points, expected " +
                            std::to_string(expected_size));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < 1 || points[i] > params.v)
      throw PreconditionError(std::string(what) + " point " + std::to_string(points[i]) + " outside 1.." +
                              std::to_string(params.v));
    if (i && points[i] <= points[i - 1])
      throw PreconditionError(std::string(what) + " must be sorted without repeats");
  }
}

std::string join_points(const std::vector<int>& points)
{
  std::string out = "{";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(points[i]);
  }
  return out + "}";
}

std::vector<int> mask_points(std::uint64_t mask)
{
  std::vector<int> points;
  while (mask) {
    points.push_back(std::countr_zero(mask) + 1);
    mask &= mask - 1;
  }
  return points;
}

}  // namespace

void validate(const DesignParams& params)
{
  if (params.v < 1) throw PreconditionError("design needs v >= 1");
  if (params.v > 64) throw PreconditionError("design supports at most 64 points");
  if (params.t < 1 || params.t > params.k || params.k > params.v)
    throw PreconditionError("design parameters must satisfy 1 <= t <= k <= v");
}

std::string format_block(const Block& block)
{
  std::string out;
  for (std::size_t i = 0; i < block.points.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(block.points[i]);
  }
  return out;
}

DesignInstance::DesignInstance(const DesignParams& params, std::uint64_t budget)
    : Instance(FrameworkConstants{}), params_(params)
{
  validate(params_);
  const BigInt blocks = binomial(params_.v, params_.k);
  const BigInt subsets = binomial(params_.v, params_.t);
  if (blocks > budget) throw BudgetError("|B| = C(v,k) = " + blocks.str() + " exceeds the budget");
  if (subsets > budget) throw BudgetError("|A| = C(v,t) = " + subsets.str() + " exceeds the budget");
  ground_size_ = blocks.convert_to<std::uint64_t>();
  masks_.reserve(subsets.convert_to<std::size_t>());
  for_each_combination(params_.v, params_.t, [&](const std::vector<int>& a) { masks_.push_back(subset_mask(a)); });

  const int v = params_.v, k = params_.k, t = params_.t;
  constants_.m = factorial(k) / factorial(k - t);
  constants_.c0 = binomial(v, t);
  constants_.c1_squared = Rational(ipow(v, t));
  constants_.c2 = Rational(ipow(BigInt(v) * k, 2 * t));
  constants_.c3_squared = Rational(ipow(2 * k, 3 * t));
}

ElementKey DesignInstance::key_of(const Block& block) const
{
  check_block(params_, block.points, params_.k, "block");
  return ElementKey{rank_combination(block.points, params_.v)};
}

Block DesignInstance::block_of(ElementKey b) const
{
  if (!contains(b)) throw std::domain_error("rank " + std::to_string(b.rank) + " outside the k-subsets");
  return Block{unrank_combination(b.rank, params_.v, params_.k)};
}

Block DesignInstance::basis_subset(std::size_t a) const
{
  return Block{mask_points(masks_.at(a))};
}

std::size_t DesignInstance::index_of(const std::vector<int>& t_subset) const
{
  check_block(params_, t_subset, params_.t, "t-subset");
  return rank_combination(t_subset, params_.v);
}

nlohmann::json DesignInstance::parameters() const
{
  return {{"v", params_.v}, {"k", params_.k}, {"t", params_.t}};
}

std::string DesignInstance::index_label(std::size_t a) const
{
  return join_points(mask_points(masks_.at(a)));
}

std::string DesignInstance::element_label(ElementKey b) const
{
  return join_points(block_of(b).points);
}

ElementKey DesignInstance::parse_element(std::string_view text) const
{
  std::string buffer(text);
  for (char& c : buffer)
    if (c == '{' || c == '}' || c == ',') c = ' ';
  std::istringstream in(buffer);
  Block block;
  std::string token;
  while (in >> token) {
    if (!std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw std::invalid_argument("bad block point '" + token + "'");
    block.points.push_back(std::stoi(token));
  }
  try {
    return key_of(block);
  } catch (const PreconditionError& e) {
    throw std::invalid_argument("bad block '" + std::string(text) + "': " + e.what());
  }
}

void DesignInstance::evaluate(ElementKey b, std::span<std::int64_t> out) const
{
  const std::uint64_t mask = subset_mask(unrank_combination(b.rank, params_.v, params_.k));
  for (std::size_t a = 0; a < masks_.size(); ++a) out[a] = (masks_[a] & mask) == masks_[a] ? 1 : 0;
}

PhiVector DesignInstance::phi_total() const
{
  return PhiVector(masks_.size(), binomial(params_.v - params_.t, params_.k - params_.t));
}

std::vector<Rational> DesignInstance::constant_combination() const
{
  return std::vector<Rational>(masks_.size(), Rational(1, binomial(params_.k, params_.t)));
}

IsolationFamily DesignInstance::isolation_family(std::size_t a, const IsolationOptions& options) const
{
  return design_isolation_family(*this, a, options);
}

std::unique_ptr<DesignInstance> build_design_instance(const DesignParams& params, std::uint64_t budget)
{
  return std::make_unique<DesignInstance>(params, budget);
}

BigInt binomial_identity_check(std::int64_t a, std::int64_t b, std::int64_t c)
{
  if (a < 0 || b < 0 || c < 0) throw PreconditionError("binomial identity needs a, b, c >= 0");
  BigInt total = 0;
  for (std::int64_t i = 0; i <= a; ++i) {
    const BigInt term = binomial(a, i) * binomial(c + i, b);
    if (i % 2) total -= term;
    else total += term;
  }
  return total;
}

namespace {

void check_gamma_inputs(const DesignInstance& instance, const Block& x, const std::vector<int>& a)
{
  const auto& p = instance.params();
  check_block(p, x.points, p.k, "x");
  check_block(p, a, p.t, "a");
  if (subset_mask(x.points) & subset_mask(a)) throw PreconditionError("x must be disjoint from a");
}

}  // namespace

SparseDomainVector design_delta(const DesignInstance& instance, const Block& x, const std::vector<int>& a, int j)
{
  check_gamma_inputs(instance, x, a);
  const auto& p = instance.params();
  if (j < 0 || j > p.t) throw PreconditionError("j must lie in 0..t");
  SparseDomainVector delta;
  for_each_combination(p.t, j, [&](const std::vector<int>& from_a) {
    for_each_combination(p.k, p.k - j, [&](const std::vector<int>& from_x) {
      Block b;
      for (int i : from_a) b.points.push_back(a[i - 1]);
      for (int i : from_x) b.points.push_back(x.points[i - 1]);
      std::sort(b.points.begin(), b.points.end());
      delta.add(instance.key_of(b), 1);
    });
  });
  return delta;
}

BigInt design_gamma_coefficient(const DesignParams& params, int j)
{
  const int k = params.k, t = params.t;
  if (j < 0 || j > t || t >= k) throw PreconditionError("coefficient needs 0 <= j <= t < k");
  const BigInt numerator = factorial(j) * factorial(k - j - 1);
  const BigInt denominator = factorial(k - t - 1);
  if (numerator % denominator != 0) throw std::logic_error("gamma coefficient is not an integer");
  return numerator / denominator;
}

SparseDomainVector design_gamma(const DesignInstance& instance, const Block& x, const std::vector<int>& a)
{
  const auto& p = instance.params();
  if (p.k <= 2 * p.t) throw PreconditionError("isolation vectors need k > 2t");
  check_gamma_inputs(instance, x, a);
  SparseDomainVector gamma;
  for (int j = 0; j <= p.t; ++j) {
    BigInt weight = design_gamma_coefficient(p, j);
    if ((p.t - j) % 2) weight = -weight;
    gamma += weight * design_delta(instance, x, a, j);
  }
  return gamma;
}

BigInt design_family_lower_bound(const DesignParams& params)
{
  return ceil(Rational(binomial(params.v, params.k), ipow(BigInt(params.v) * params.k, 2 * params.t)));
}

IsolationFamily design_isolation_family(const DesignInstance& instance, std::size_t a, const IsolationOptions& options)
{
  const auto& p = instance.params();
  if (p.k <= 2 * p.t) throw PreconditionError("isolation families need k > 2t");
  if (a >= instance.dimension()) throw PreconditionError("basis index out of range");
  const std::vector<int> target = instance.basis_subset(a).points;
  const std::uint64_t target_mask = subset_mask(target);

  std::vector<int> complement;
  for (int i = 1; i <= p.v; ++i)
    if (!(target_mask >> (i - 1) & 1u)) complement.push_back(i);
  const int free = static_cast<int>(complement.size());
  const std::uint64_t total = choose64(free, p.k);

  IsolationFamily family;
  family.target = a;
  family.modulus = instance.constants().m;
  if (total == 0) return family;
  const std::uint64_t offset = splitmix64(options.seed) % total;
  const std::uint64_t visits = std::min(total, options.candidate_budget);
  family.complete = visits == total;

  const int max_overlap = p.k - 2 * p.t - 1;
  std::vector<std::uint64_t> chosen;
  std::vector<Block> centers;
  for (std::uint64_t step = 0; step < visits; ++step) {
    const auto local = unrank_combination((offset + step) % total, free, p.k);
    Block x;
    for (int i : local) x.points.push_back(complement[i - 1]);
    const std::uint64_t mask = subset_mask(x.points);
    const bool spread = std::all_of(chosen.begin(), chosen.end(), [&](std::uint64_t c) {
      return std::popcount(c & mask) <= max_overlap;
    });
    if (spread) {
      chosen.push_back(mask);
      centers.push_back(std::move(x));
    }
  }
  for (const auto& x : centers) {
    SparseDomainVector gamma = design_gamma(instance, x, target);
    const BigInt sq = gamma.squared_norm();
    if (sq > family.max_squared_norm) family.max_squared_norm = sq;
    family.centers.push_back(instance.key_of(x));
    family.members.push_back(std::move(gamma));
  }
  return family;
}

DesignVerification verify_design(const std::vector<Block>& blocks, const DesignParams& params)
{
  validate(params);
  if (blocks.empty()) throw PreconditionError("a design needs at least one block");
  for (const auto& b : blocks) check_block(params, b.points, params.k, "block");

  DesignVerification result;
  const BigInt subsets = binomial(params.v, params.t);
  result.lambda = Rational(BigInt(blocks.size()) * binomial(params.k, params.t), subsets);

  auto sorted = blocks;
  std::sort(sorted.begin(), sorted.end());
  result.simple = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();

  std::vector<std::uint64_t> counts(subsets.convert_to<std::size_t>(), 0);
  for (const auto& b : blocks) {
    for_each_combination(params.k, params.t, [&](const std::vector<int>& pick) {
      std::vector<int> sub;
      sub.reserve(pick.size());
      for (int i : pick) sub.push_back(b.points[i - 1]);
      ++counts[rank_combination(sub, params.v)];
    });
  }
  result.pass = true;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    if (Rational(counts[a]) != result.lambda) {
      if (result.pass) result.first_violation = unrank_combination(a, params.v, params.t);
      result.pass = false;
      ++result.violation_count;
    }
  }
  return result;
}

SymmetryWitness design_symmetry_witness(const DesignInstance& instance, const std::vector<int>& sigma)
{
  const auto& p = instance.params();
  if (static_cast<int>(sigma.size()) != p.v) throw PreconditionError("sigma must have v images");
  std::vector<int> inverse(p.v + 1, 0);
  for (int i = 1; i <= p.v; ++i) {
    const int image = sigma[i - 1];
    if (image < 1 || image > p.v || inverse[image]) throw PreconditionError("sigma is not a bijection of 1..v");
    inverse[image] = i;
  }
  auto map_points = [](const std::vector<int>& points, const std::vector<int>& through) {
    std::vector<int> out;
    out.reserve(points.size());
    for (int x : points) out.push_back(through[x]);
    std::sort(out.begin(), out.end());
    return out;
  };
  std::vector<int> forward(p.v + 1, 0);
  for (int i = 1; i <= p.v; ++i) forward[i] = sigma[i - 1];

  // phi(pi(b))_a = [a subset of sigma(b)] = phi(b)_{sigma^{-1}(a)}.
  const std::size_t dim = instance.dimension();
  std::vector<std::vector<Rational>> tau(dim, std::vector<Rational>(dim, Rational(0)));
  for (std::size_t a = 0; a < dim; ++a) {
    const auto preimage = map_points(instance.basis_subset(a).points, inverse);
    tau[a][instance.index_of(preimage)] = 1;
  }
  const DesignInstance* inst = &instance;
  auto permutation = [inst, forward, map_points](ElementKey b) {
    return inst->key_of(Block{map_points(inst->block_of(b).points, forward)});
  };
  return {permutation, std::move(tau)};
}

}  // namespace rigidgen::design
