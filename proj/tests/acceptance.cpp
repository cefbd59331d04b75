// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <unistd.h>

#include "rigidgen/cli.hpp"
#include "rigidgen/combinatorics.hpp"
#include "rigidgen/design.hpp"
#include "rigidgen/formats.hpp"
#include "rigidgen/fourier.hpp"
#include "rigidgen/oa.hpp"
#include "rigidgen/perm.hpp"
#include "rigidgen/random.hpp"
#include "rigidgen/sampler.hpp"

using namespace rigidgen;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what)
  {
    if (!condition && pass) detail << "first failure: " << what << "; ";
    pass = pass && condition;
  }
};

PhiVector image_of(const Instance& instance, const SparseDomainVector& gamma)
{
  PhiVector image(instance.dimension(), BigInt(0));
  std::vector<std::int64_t> row(instance.dimension());
  for (const auto& [key, coefficient] : gamma.entries()) {
    instance.evaluate(key, row);
    for (std::size_t a = 0; a < row.size(); ++a)
      if (row[a]) image[a] += coefficient * row[a];
  }
  return image;
}

bool is_scaled_unit(const PhiVector& image, std::size_t a, const BigInt& scale)
{
  for (std::size_t j = 0; j < image.size(); ++j)
    if (image[j] != (j == a ? scale : BigInt(0))) return false;
  return true;
}

std::vector<ElementKey> random_subset(std::uint64_t size, std::uint64_t seed, std::uint64_t trial)
{
  CounterStream stream(seed, trial);
  // Mix sparse and dense subsets; small sizes make balanced objects reachable.
  const std::uint64_t target = 1 + stream.below(trial % 2 ? size : std::min<std::uint64_t>(size, 12));
  std::set<std::uint64_t> picked;
  while (picked.size() < target) picked.insert(stream.below(size));
  std::vector<ElementKey> keys;
  for (auto r : picked) keys.push_back(ElementKey{r});
  return keys;
}

// 1. OA isolation identity.
Verdict criterion_oa_isolation()
{
  Verdict v;
  std::size_t instances = 0, gammas = 0;
  for (int q : {2, 3})
    for (int n : {3, 4, 5})
      for (int t : {1, 2}) {
        const oa::OAParams p{q, n, t};
        oa::OAInstance inst(p);
        ++instances;
        const BigInt norm_bound = ipow(2, 3 * t) * ipow(n, 2 * t);
        const BigInt r_bound = oa::oa_family_lower_bound(p);
        for (std::size_t a = 0; a < inst.dimension(); ++a) {
          const auto& index = inst.basis()[a];
          for (std::uint64_t j = 0; j < 20; ++j) {
            CounterStream stream(a, j);
            auto x = inst.element_of(ElementKey{stream.below(inst.ground_size())});
            for (std::size_t i = 0; i < index.positions.size(); ++i) x.symbols[index.positions[i] - 1] = index.values[i];
            const auto gamma = oa::oa_gamma(inst, x, index.positions);
            ++gammas;
            v.require(is_scaled_unit(image_of(inst, gamma), a, 1), "phi(gamma) != e_a for " + inst.index_label(a));
            v.require(gamma.squared_norm() <= norm_bound, "norm bound at " + inst.index_label(a));
          }
          const auto family = oa::oa_isolation_family(inst, a, {kDefaultElementBudget, 1});
          const auto report = verify_isolation_family(inst, family);
          v.require(report.images_ok && report.disjoint_ok && report.norms_ok, "family checks at " + inst.index_label(a));
          v.require(BigInt(family.count()) >= r_bound,
                    "r = " + std::to_string(family.count()) + " < " + r_bound.str() + " for q=" + std::to_string(q) +
                        " n=" + std::to_string(n) + " t=" + std::to_string(t));
        }
      }
  v.detail << instances << " instances, " << gammas << " gamma vectors";
  return v;
}

// 2. Design isolation identity.
Verdict criterion_design_isolation()
{
  Verdict v;
  std::size_t instances = 0, gammas = 0;
  for (int pts = 5; pts <= 8; ++pts)
    for (int t : {1, 2})
      for (int k = 2 * t + 1; k <= pts; ++k) {
        const design::DesignParams p{pts, k, t};
        design::DesignInstance inst(p);
        ++instances;
        for (std::size_t a = 0; a < inst.dimension(); ++a) {
          const auto target = inst.basis_subset(a).points;
          const std::uint64_t mask = subset_mask(target);
          for (std::uint64_t r = 0; r < inst.ground_size(); ++r) {
            const auto x = inst.block_of(ElementKey{r});
            if (subset_mask(x.points) & mask) continue;
            const auto gamma = design::design_gamma(inst, x, target);
            ++gammas;
            v.require(is_scaled_unit(image_of(inst, gamma), a, inst.constants().m),
                      "phi(gamma) != m e_a for " + inst.index_label(a));
          }
        }
      }
  std::size_t identities = 0;
  for (int a = 1; a <= 12; ++a)
    for (int b = 0; b < a; ++b)
      for (int c = 0; c <= 12; ++c) {
        ++identities;
        v.require(design::binomial_identity_check(a, b, c) == 0, "binomial identity");
      }
  v.detail << instances << " instances, " << gammas << " gamma vectors, " << identities << " binomial identities";
  return v;
}

// 3. Verifier equivalence.
Verdict criterion_verifier_equivalence()
{
  Verdict v;
  std::size_t comparisons = 0, positives = 0;
  for (int q : {2, 3})
    for (int n : {3, 4, 5})
      for (int t : {1, 2}) {
        const oa::OAParams p{q, n, t};
        oa::OAInstance inst(p);
        for (std::uint64_t trial = 0; trial < 200; ++trial) {
          const auto keys = random_subset(inst.ground_size(), 31, trial);
          std::vector<oa::OAElement> rows;
          for (const auto& key : keys) rows.push_back(inst.element_of(key));
          const bool expected = verify_solution(inst, keys).pass;
          positives += expected;
          ++comparisons;
          v.require(oa::verify_oa(rows, p).pass == expected, "verify_oa disagrees");
        }
      }
  for (int pts = 5; pts <= 8; ++pts)
    for (int t : {1, 2})
      for (int k = t + 1; k < pts; ++k) {
        const design::DesignParams p{pts, k, t};
        design::DesignInstance inst(p);
        for (std::uint64_t trial = 0; trial < 200; ++trial) {
          const auto keys = random_subset(inst.ground_size(), 37, trial);
          std::vector<design::Block> blocks;
          for (const auto& key : keys) blocks.push_back(inst.block_of(key));
          const bool expected = verify_solution(inst, keys).pass;
          positives += expected;
          ++comparisons;
          v.require(design::verify_design(blocks, p).pass == expected, "verify_design disagrees");
        }
      }
  for (int n : {3, 4, 5})
    for (int t : {1, 2, 3}) {
      if (t > n) continue;
      perm::PermInstance inst(n, t);
      std::vector<std::vector<ElementKey>> subsets;
      for (std::uint64_t trial = 0; trial < 200; ++trial) subsets.push_back(random_subset(inst.ground_size(), 41, trial));
      for (const auto& family : {perm::cyclic_fixture(n), perm::symmetric_fixture(n), perm::alternating_fixture(n)}) {
        std::vector<ElementKey> keys;
        for (const auto& p : family) keys.push_back(inst.key_of(p));
        subsets.push_back(keys);
      }
      for (const auto& keys : subsets) {
        std::vector<perm::Perm> family;
        for (const auto& key : keys) family.push_back(inst.perm_of(key));
        const bool expected = verify_solution(inst, keys).pass;
        positives += expected;
        ++comparisons;
        v.require(perm::verify_t_wise(family, n, t).pass == expected, "verify_t_wise disagrees");
      }
    }
  v.detail << comparisons << " comparisons, " << positives << " balanced subsets";
  return v;
}

// 4. Exact probability oracle.
Verdict criterion_exact_probability()
{
  Verdict v;
  oa::OAInstance inst({2, 2, 1});
  const auto expected = expected_vector(inst, 2);
  const Rational exact = fourier::exact_point_probability(inst, 2, expected.values);
  v.require(exact == Rational(1, 8), "oracle gave " + to_string(exact));

  Rational brute = 0;
  std::vector<std::int64_t> row(inst.dimension());
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<Rational> sum(inst.dimension(), Rational(0));
    for (unsigned b = 0; b < 4; ++b)
      if (mask >> b & 1) {
        inst.evaluate(ElementKey{b}, row);
        for (std::size_t a = 0; a < row.size(); ++a) sum[a] += row[a];
      }
    if (sum == expected.values) brute += Rational(1, 16);
  }
  v.require(brute == exact, "enumeration gave " + to_string(brute));

  const auto estimate = sampler::estimate_success_probability(inst, 2, 100000, 2024);
  v.require(estimate.lower <= 0.125 && 0.125 <= estimate.upper, "1/8 outside the Wilson interval");
  v.detail << "exact " << to_string(exact) << ", enumeration " << to_string(brute) << ", sampled "
           << estimate.frequency << " in [" << estimate.lower << ", " << estimate.upper << "]";
  return v;
}

// 5. Search at desk scale, through the command-line surface.
Verdict criterion_search()
{
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path() / ("rigidgen_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);

  const auto oa_path = (dir / "oa.txt").string();
  std::ostringstream out, err;
  const int oa_code = cli::run({"oa", "search", "--q", "2", "--n", "4", "--t", "2", "--N", "8", "--trials", "1000000",
                                "--seed", "1", "--out", oa_path},
                               out, err);
  v.require(oa_code == 0, "oa search exit " + std::to_string(oa_code) + " " + err.str());
  if (oa_code == 0) {
    const auto report = nlohmann::json::parse(out.str());
    const auto file = formats::read_oa_file(oa_path);
    v.require(oa::verify_oa(file.rows, file.params).pass, "found array fails verify_oa");
    v.detail << "OA(8,4,2,2) after " << report["result"]["attempts"] << " trials; ";
  }

  design::DesignInstance inst({6, 3, 1});
  const BigInt smallest = check_divisibility(inst).minimal_c0;
  const auto design_path = (dir / "design.txt").string();
  std::ostringstream dout, derr;
  const int design_code = cli::run({"design", "search", "--v", "6", "--k", "3", "--t", "1", "--N", smallest.str(),
                                    "--trials", "1000000", "--seed", "1", "--out", design_path},
                                   dout, derr);
  v.require(design_code == 0, "design search exit " + std::to_string(design_code) + " " + derr.str());
  if (design_code == 0) {
    const auto report = nlohmann::json::parse(dout.str());
    const auto file = formats::read_design_file(design_path);
    const auto check = design::verify_design(file.blocks, file.params);
    v.require(check.pass, "found design fails verify_design");
    v.detail << "1-(6,3," << to_string(check.lambda) << ") with N=" << smallest << " after "
             << report["result"]["attempts"] << " trials";
  }
  std::filesystem::remove_all(dir);
  return v;
}

// 6. Fixture certification.
Verdict criterion_fixtures()
{
  Verdict v;
  for (int n = 1; n <= 6; ++n) v.require(perm::verify_t_wise(perm::cyclic_fixture(n), n, 1).pass, "cyclic " + std::to_string(n));
  const auto affine = perm::affine_fixture(5);
  v.require(affine.size() == 20 && perm::verify_t_wise(affine, 5, 2).pass, "affine over GF(5)");
  const auto m2 = perm::mobius_fixture(2, perm::MobiusVariant::unit_determinant);
  const auto m4 = perm::mobius_fixture(4, perm::MobiusVariant::unit_determinant);
  v.require(m2.size() == 6 && perm::verify_t_wise(m2, 3, 3).pass, "Mobius over GF(2)");
  v.require(m4.size() == 60 && perm::verify_t_wise(m4, 5, 3).pass, "Mobius over GF(4)");
  v.detail << "cyclic n<=6, affine(5) 20 perms, Mobius(2) " << m2.size() << " perms, Mobius(4) " << m4.size() << " perms";
  return v;
}

// 7. Fourier machinery.
Verdict criterion_fourier()
{
  Verdict v;
  double worst_zero = 0.0, worst_shift = 0.0;
  std::vector<std::unique_ptr<Instance>> instances;
  instances.push_back(oa::build_oa_instance({2, 2, 1}));
  instances.push_back(oa::build_oa_instance({2, 3, 1}));
  instances.push_back(oa::build_oa_instance({3, 3, 2}));
  instances.push_back(design::build_design_instance({4, 3, 1}));
  instances.push_back(design::build_design_instance({5, 3, 1}));
  instances.push_back(design::build_design_instance({4, 2, 1}));
  for (const auto& inst : instances) {
    const std::vector<double> zero(inst->dimension(), 0.0);
    worst_zero = std::max(worst_zero, std::abs(fourier::fourier_coefficient(*inst, 0.3, zero) - 1.0));
    const auto lattice = fourier::enumerate_lattice_L(*inst);
    for (std::uint64_t s = 0; s < 4; ++s) {
      CounterStream stream(7, s);
      std::vector<double> theta(inst->dimension());
      for (auto& x : theta) x = stream.uniform() - 0.5;
      const auto base = fourier::fourier_coefficient(*inst, 0.3, theta);
      for (const auto& point : lattice) {
        std::vector<double> shifted(theta);
        for (std::size_t a = 0; a < shifted.size(); ++a) shifted[a] += point.coords[a];
        worst_shift = std::max(worst_shift, std::abs(fourier::fourier_coefficient(*inst, 0.3, shifted) - base));
      }
    }
  }
  v.require(worst_zero <= 1e-12, "X(0) != 1");
  v.require(worst_shift <= 1e-12, "shift invariance");

  // L inside M and closed under addition on design(4,3,1).
  design::DesignInstance d({4, 3, 1});
  const auto lattice = fourier::enumerate_lattice_L(d);
  std::set<std::vector<Rational>> members;
  for (const auto& point : lattice) members.insert(*point.exact);
  bool contains_zero = members.count(std::vector<Rational>(d.dimension(), Rational(0))) == 1;
  bool in_m = true, closed = true;
  for (const auto& a : members) {
    for (const auto& x : a) in_m = in_m && is_integral(x * Rational(d.constants().m));
    for (const auto& b : members) {
      std::vector<Rational> sum;
      for (std::size_t i = 0; i < a.size(); ++i) sum.push_back(a[i] + b[i]);
      closed = closed && members.count(*fourier::TorusPoint::from_exact(sum).exact) == 1;
    }
  }
  v.require(contains_zero && in_m && closed, "L is not a subgroup of M");

  // Scalar claims on their grids.
  std::size_t modulus_points = 0, taylor_points = 0;
  double worst_taylor_ratio = 0.0;
  for (int pi = 1; pi <= 10; ++pi) {
    const double p = 0.05 * pi;
    for (int xi = -500; xi <= 500; xi += 10) {
      ++modulus_points;
      v.require(fourier::modulus_bound_holds(p, xi / 1000.0), "modulus claim");
    }
    for (int xi = -100; xi <= 100; ++xi) {
      const auto r = fourier::taylor_scalar_check(p, 0.01 * xi, 10.0);
      ++taylor_points;
      if (r.budget > 0) worst_taylor_ratio = std::max(worst_taylor_ratio, r.delta / r.budget);
      v.require(r.holds, "Taylor claim at p=" + std::to_string(p) + " x=" + std::to_string(0.01 * xi));
    }
  }

  // Near-zero lemma on OA(2,3,1): monotone decay under halving, budget with C = 10.
  oa::OAInstance small({2, 3, 1});
  const std::uint64_t n = 4;
  fourier::LemmaConstants constants;
  constants.error_constant = 10.0;
  const double limit = 1.0 / (small.constants().c1() * std::cbrt(static_cast<double>(n)));
  const double scales[] = {1.0, 0.5, 0.25, 0.125};
  double worst_lemma_ratio[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::uint64_t s = 0; s < 16; ++s) {
    CounterStream stream(11, s);
    std::vector<double> direction(small.dimension());
    double norm = 0.0;
    for (auto& x : direction) {
      x = stream.uniform() - 0.5;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    double previous = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      std::vector<double> theta(direction);
      for (auto& x : theta) x *= 0.95 * scales[i] * limit / norm;
      const auto r = fourier::lemma_near_zero_check(small, n, theta, constants);
      v.require(r.delta < previous, "near-zero delta not decreasing");
      v.require(r.holds, "near-zero budget with C=10 at s=" + std::to_string(scales[i]));
      worst_lemma_ratio[i] = std::max(worst_lemma_ratio[i], r.delta / r.budget);
      previous = r.delta;
    }
  }
  v.detail << "max|X(0)-1| " << worst_zero << ", max shift error " << worst_shift << ", |L| on design(4,3,1) "
           << lattice.size() << ", " << modulus_points << "+" << taylor_points << " scalar grid points (worst Taylor delta/budget "
           << worst_taylor_ratio << "), worst near-zero delta/budget at s=1,1/2,1/4,1/8: " << worst_lemma_ratio[0] << ", "
           << worst_lemma_ratio[1] << ", " << worst_lemma_ratio[2] << ", " << worst_lemma_ratio[3];
  return v;
}

// 8. Prediction sanity (exploratory).
Verdict criterion_prediction()
{
  Verdict v;
  struct Case {
    oa::OAParams params;
    std::uint64_t n;
  };
  std::vector<double> log_ratios;
  for (const Case& c : {Case{{2, 2, 1}, 2}, Case{{2, 3, 1}, 4}}) {
    oa::OAInstance inst(c.params);
    const auto prediction = fourier::gaussian_prediction(inst, c.n);
    const Rational exact = fourier::exact_point_probability(inst, c.n, expected_vector(inst, c.n).values);
    const double ratio = prediction.value / to_double(exact);
    log_ratios.push_back(std::abs(std::log(ratio)));
    v.detail << "OA(" << c.params.q << "," << c.params.n << "," << c.params.t << ") N=" << c.n << ": det(R)="
             << prediction.det_r << " |L|=" << prediction.lattice_size << " prediction=" << prediction.value
             << " exact=" << to_string(exact) << " ratio=" << ratio << " (variance-corrected ratio "
             << prediction.variance_corrected / to_double(exact) << "); ";
    if (c.params.n == 2) v.require(prediction.det_r == 4, "det(R) for OA(2,2,1)");
    v.require(!prediction.degenerate, "degenerate prediction");
  }
  v.require(log_ratios[1] < log_ratios[0], "ratio did not move toward 1");
  return v;
}

}  // namespace

int main()
{
  struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "OA isolation identity", criterion_oa_isolation},
      {2, "design isolation identity", criterion_design_isolation},
      {3, "verifier equivalence", criterion_verifier_equivalence},
      {4, "exact probability oracle", criterion_exact_probability},
      {5, "search success at desk scale", criterion_search},
      {6, "fixture certification", criterion_fixtures},
      {7, "Fourier machinery", criterion_fourier},
      {8, "prediction sanity (exploratory)", criterion_prediction},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto started = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = c.run();
    } catch (const std::exception& error) {
      verdict.pass = false;
      verdict.detail << "exception: " << error.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    failures += !verdict.pass;
    std::cout << (verdict.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << seconds
              << " s): " << verdict.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
