#include "rigidgen/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rigidgen/design.hpp"
#include "rigidgen/formats.hpp"
#include "rigidgen/fourier.hpp"
#include "rigidgen/oa.hpp"
#include "rigidgen/perm.hpp"
#include "rigidgen/random.hpp"
#include "rigidgen/sampler.hpp"

namespace rigidgen::cli {

namespace {

using json = nlohmann::json;

struct Options {
  // Shared.
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string format = "json";
  std::string out_path;
  std::string in_path;

  // Family parameters.
  std::string family;
  int q = 0, n = 0, t = 0, v = 0, k = 0;

  // Search and analysis.
  std::uint64_t big_n = 0;
  std::uint64_t trials = 1'000'000;
  std::string model = "bernoulli";
  std::optional<std::size_t> index;
  std::uint64_t samples = 16;

  // Fixtures.
  std::string kind;
  int size = 0;
  std::string variant = "nonzero";

  // Unspecified constants.
  NWindowConstants window;
  fourier::LemmaConstants lemma;
};

struct Outcome {
  bool pass = false;
  json result = json::object();
};

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

json big(const BigInt& value)
{
  static const BigInt limit = BigInt(1) << 62;
  if (value < limit && value > -limit) return value.convert_to<std::int64_t>();
  return value.str();
}

json rational(const Rational& value)
{
  if (is_integral(value)) return big(boost::multiprecision::numerator(value));
  return to_string(value);
}

json constants_json(const FrameworkConstants& c)
{
  return {{"m", big(c.m)},
          {"c0", big(c.c0)},
          {"c1_squared", rational(c.c1_squared)},
          {"c2", rational(c.c2)},
          {"c3_squared", rational(c.c3_squared)}};
}

json instance_json(const Instance& instance)
{
  return {{"family", std::string(to_string(instance.family()))},
          {"parameters", instance.parameters()},
          {"ground_size", instance.ground_size()},
          {"dimension", instance.dimension()},
          {"is_basis", instance.is_basis()},
          {"verification_only", instance.verification_only()},
          {"constants", constants_json(instance.constants())}};
}

oa::OAParams oa_params(const Options& o)
{
  return {o.q, o.n, o.t};
}

design::DesignParams design_params(const Options& o)
{
  return {o.v, o.k, o.t};
}

std::unique_ptr<Instance> make_instance(const std::string& family, const Options& o)
{
  if (family == "oa") return oa::build_oa_instance(oa_params(o));
  if (family == "design") return design::build_design_instance(design_params(o));
  if (family == "perm") return perm::build_perm_spanning_instance(o.n, o.t);
  throw UsageError("unknown family '" + family + "' (expected oa, design or perm)");
}

sampler::Model parse_model(const std::string& name)
{
  if (name == "bernoulli") return sampler::Model::bernoulli_subset;
  if (name == "iid") return sampler::Model::iid_multiset;
  throw UsageError("unknown model '" + name + "'");
}

json rows_json(const std::vector<std::vector<int>>& rows)
{
  json out = json::array();
  for (const auto& row : rows) out.push_back(row);
  return out;
}

std::string read_text(const std::string& path)
{
  if (path.empty()) throw UsageError("--in is required");
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool has_header(const std::string& text)
{
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    return line[first] == '#';
  }
  return false;
}

std::size_t count_rows(const std::string& text)
{
  std::istringstream in(text);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) ++rows;
  return rows;
}

// Files without a header take their parameters from the flags.
formats::OAFile load_oa(const Options& o)
{
  std::string text = read_text(o.in_path);
  if (!has_header(text)) {
    if (!o.q || !o.n || !o.t) throw UsageError("headerless OA file needs --q, --n and --t");
    text = "# oa q=" + std::to_string(o.q) + " n=" + std::to_string(o.n) + " t=" + std::to_string(o.t) +
           " N=" + std::to_string(count_rows(text)) + "\n" + text;
  }
  std::istringstream in(text);
  auto file = formats::read_oa(in);
  if ((o.q && o.q != file.params.q) || (o.n && o.n != file.params.n) || (o.t && o.t != file.params.t))
    throw UsageError("flags disagree with the file header");
  return file;
}

formats::DesignFile load_design(const Options& o)
{
  std::string text = read_text(o.in_path);
  if (!has_header(text)) throw PreconditionError("design files need a '# design' header");
  std::istringstream in(text);
  auto file = formats::read_design(in);
  if ((o.v && o.v != file.params.v) || (o.k && o.k != file.params.k) || (o.t && o.t != file.params.t))
    throw UsageError("flags disagree with the file header");
  return file;
}

formats::PermFile load_perm(const Options& o)
{
  std::string text = read_text(o.in_path);
  if (!has_header(text)) throw PreconditionError("permutation files need a '# perm' header");
  std::istringstream in(text);
  auto file = formats::read_perm(in);
  if (o.n && o.n != file.n) throw UsageError("flags disagree with the file header");
  if (o.t) file.t = o.t;
  if (file.t > file.n) throw UsageError("t exceeds n");
  return file;
}

void require_out_if_large(const Options& o, std::uint64_t rows)
{
  if (o.out_path.empty() && rows > 10'000)
    throw UsageError("object has " + std::to_string(rows) + " rows; pass --out to write it to a file");
}

// ---- oa ---------------------------------------------------------------------

Outcome oa_build(const Options& o)
{
  const auto instance = oa::build_oa_instance(oa_params(o));
  Outcome outcome;
  outcome.result["instance"] = instance_json(*instance);
  formats::OAFile file{oa_params(o), {}};
  for (std::uint64_t b = 0; b < instance->ground_size(); ++b) file.rows.push_back(instance->element_of(ElementKey{b}));
  const auto verification = oa::verify_oa(file.rows, file.params);
  outcome.result["complete_array_rows"] = file.rows.size();
  outcome.result["complete_array_verified"] = verification.pass;
  if (!o.out_path.empty()) {
    formats::write_oa_file(o.out_path, file);
    outcome.result["output"] = o.out_path;
  }
  outcome.pass = verification.pass;
  return outcome;
}

json isolation_json(const Instance& instance, std::size_t a, const IsolationFamily& family,
                    const IsolationReport& report)
{
  json failures = json::array();
  for (const auto& f : report.failures) failures.push_back(f);
  return {{"index", a},
          {"label", instance.index_label(a)},
          {"modulus", big(family.modulus)},
          {"r", report.r},
          {"required_r", big(report.required_r)},
          {"max_squared_norm", big(report.max_squared_norm)},
          {"complete", family.complete},
          {"images_ok", report.images_ok},
          {"disjoint_ok", report.disjoint_ok},
          {"norms_ok", report.norms_ok},
          {"count_ok", report.count_ok},
          {"pass", report.pass()},
          {"failures", failures}};
}

Outcome isolate(const Instance& instance, const Options& o, json extra)
{
  Outcome outcome;
  outcome.result["instance"] = instance_json(instance);
  for (auto& [key, value] : extra.items()) outcome.result[key] = value;
  std::vector<std::size_t> targets;
  if (o.index) {
    if (*o.index >= instance.dimension()) throw UsageError("--a is outside 0.." + std::to_string(instance.dimension() - 1));
    targets.push_back(*o.index);
  } else {
    for (std::size_t a = 0; a < instance.dimension(); ++a) targets.push_back(a);
  }
  json families = json::array();
  bool pass = true;
  for (std::size_t a : targets) {
    const auto family = instance.isolation_family(a, IsolationOptions{kDefaultElementBudget, o.seed});
    const auto report = verify_isolation_family(instance, family);
    pass = pass && report.pass();
    families.push_back(isolation_json(instance, a, family, report));
  }
  outcome.result["families"] = families;
  outcome.pass = pass;
  return outcome;
}

Outcome oa_isolate(const Options& o)
{
  const auto instance = oa::build_oa_instance(oa_params(o));
  return isolate(*instance, o, {{"family_lower_bound", big(oa::oa_family_lower_bound(oa_params(o)))}});
}

json search_json(const sampler::SearchResult& found, const Options& o)
{
  return {{"N", o.big_n},
          {"seed", found.seed},
          {"trials", o.trials},
          {"model", o.model},
          {"found", found.found},
          {"attempts", found.attempts},
          {"trial_index", found.trial_index ? json(*found.trial_index) : json(nullptr)}};
}

sampler::SearchResult run_search(const Instance& instance, const Options& o)
{
  if (o.big_n == 0) throw UsageError("--N is required");
  if (o.big_n > instance.ground_size()) throw UsageError("--N exceeds |B|");
  sampler::SampleConfig config;
  config.n = o.big_n;
  config.seed = o.seed;
  config.trials = o.trials;
  config.model = parse_model(o.model);
  config.threads = o.threads;
  return sampler::search(instance, config);
}

Outcome oa_search(const Options& o)
{
  const auto instance = oa::build_oa_instance(oa_params(o));
  const auto found = run_search(*instance, o);
  Outcome outcome;
  outcome.result = search_json(found, o);
  outcome.pass = found.found;
  if (found.found) {
    formats::OAFile file{oa_params(o), {}};
    std::vector<std::vector<int>> rows;
    for (const auto& key : found.subset) {
      file.rows.push_back(instance->element_of(key));
      rows.push_back(file.rows.back().symbols);
    }
    const auto verification = oa::verify_oa(file.rows, file.params);
    outcome.result["verified"] = verification.pass;
    outcome.pass = verification.pass;
    require_out_if_large(o, rows.size());
    if (!o.out_path.empty()) {
      formats::write_oa_file(o.out_path, file);
      outcome.result["output"] = o.out_path;
    } else {
      outcome.result["rows"] = rows_json(rows);
    }
  }
  return outcome;
}

Outcome oa_verify(const Options& o)
{
  const auto file = load_oa(o);
  const auto verification = oa::verify_oa(file.rows, file.params);
  Outcome outcome;
  outcome.pass = verification.pass;
  outcome.result = {{"q", file.params.q},
                    {"n", file.params.n},
                    {"t", file.params.t},
                    {"rows", file.rows.size()},
                    {"pass", verification.pass}};
  if (!file.rows.empty() && file.rows.size() % static_cast<std::size_t>(ipow(file.params.q, file.params.t)) == 0)
    outcome.result["index"] = file.rows.size() / static_cast<std::size_t>(ipow(file.params.q, file.params.t));
  if (verification.first_violation) {
    const auto& v = *verification.first_violation;
    outcome.result["first_violation"] = {{"positions", v.positions}, {"values", v.values}, {"count", v.count}};
  }
  return outcome;
}

// ---- design -----------------------------------------------------------------

Outcome design_build(const Options& o)
{
  const auto instance = design::build_design_instance(design_params(o));
  Outcome outcome;
  outcome.result["instance"] = instance_json(*instance);
  formats::DesignFile file{design_params(o), {}, 0};
  for (std::uint64_t b = 0; b < instance->ground_size(); ++b) file.blocks.push_back(instance->block_of(ElementKey{b}));
  const auto verification = design::verify_design(file.blocks, file.params);
  outcome.result["complete_design_blocks"] = file.blocks.size();
  outcome.result["complete_design_lambda"] = rational(verification.lambda);
  outcome.result["complete_design_verified"] = verification.pass;
  if (!o.out_path.empty()) {
    formats::write_design_file(o.out_path, file);
    outcome.result["output"] = o.out_path;
  }
  outcome.pass = verification.pass;
  return outcome;
}

Outcome design_isolate(const Options& o)
{
  const auto instance = design::build_design_instance(design_params(o));
  if (instance->verification_only())
    throw PreconditionError("isolation vectors need k > 2t; this instance is verification-only");
  return isolate(*instance, o, {{"family_lower_bound", big(design::design_family_lower_bound(design_params(o)))}});
}

Outcome design_search(const Options& o)
{
  const auto instance = design::build_design_instance(design_params(o));
  const auto found = run_search(*instance, o);
  Outcome outcome;
  outcome.result = search_json(found, o);
  outcome.pass = found.found;
  if (found.found) {
    formats::DesignFile file{design_params(o), {}, 0};
    std::vector<std::vector<int>> rows;
    for (const auto& key : found.subset) {
      file.blocks.push_back(instance->block_of(key));
      rows.push_back(file.blocks.back().points);
    }
    const auto verification = design::verify_design(file.blocks, file.params);
    outcome.result["verified"] = verification.pass;
    outcome.result["lambda"] = rational(verification.lambda);
    outcome.result["simple"] = verification.simple;
    outcome.pass = verification.pass;
    require_out_if_large(o, rows.size());
    if (!o.out_path.empty()) {
      formats::write_design_file(o.out_path, file);
      outcome.result["output"] = o.out_path;
    } else {
      outcome.result["blocks"] = rows_json(rows);
    }
  }
  return outcome;
}

Outcome design_verify(const Options& o)
{
  const auto file = load_design(o);
  const auto verification = design::verify_design(file.blocks, file.params);
  const bool declared_ok = file.lambda == verification.lambda;
  Outcome outcome;
  outcome.pass = verification.pass && declared_ok;
  outcome.result = {{"v", file.params.v},
                    {"k", file.params.k},
                    {"t", file.params.t},
                    {"blocks", file.blocks.size()},
                    {"lambda", rational(verification.lambda)},
                    {"declared_lambda", rational(file.lambda)},
                    {"declared_lambda_matches", declared_ok},
                    {"simple", verification.simple},
                    {"violation_count", verification.violation_count},
                    {"pass", verification.pass}};
  if (verification.first_violation) outcome.result["first_violation"] = *verification.first_violation;
  return outcome;
}

// ---- perm -------------------------------------------------------------------

json twise_json(const perm::TWiseVerification& verification)
{
  json out = {{"pass", verification.pass}};
  if (verification.first_violation) {
    const auto& v = *verification.first_violation;
    out["first_violation"] = {{"from", v.from}, {"to", v.to}, {"count", v.count}};
  }
  return out;
}

Outcome perm_verify(const Options& o)
{
  const auto file = load_perm(o);
  const auto verification = perm::verify_t_wise(file.perms, file.n, file.t);
  Outcome outcome;
  outcome.pass = verification.pass;
  outcome.result = {{"n", file.n}, {"t", file.t}, {"count", file.perms.size()}, {"t_wise", twise_json(verification)}};
  return outcome;
}

Outcome perm_fixture(const Options& o)
{
  if (o.size <= 0) throw UsageError("--size is required");
  std::vector<perm::Perm> family;
  int natural_t = 1;
  if (o.kind == "cyclic") {
    family = perm::cyclic_fixture(o.size);
  } else if (o.kind == "affine") {
    family = perm::affine_fixture(o.size);
    natural_t = 2;
  } else if (o.kind == "mobius") {
    if (o.variant != "unit" && o.variant != "nonzero") throw UsageError("--variant must be unit or nonzero");
    family = perm::mobius_fixture(o.size, o.variant == "unit" ? perm::MobiusVariant::unit_determinant
                                                              : perm::MobiusVariant::nonzero_determinant);
    natural_t = 3;
  } else if (o.kind == "symmetric") {
    family = perm::symmetric_fixture(o.size);
    natural_t = o.size;
  } else if (o.kind == "alternating") {
    family = perm::alternating_fixture(o.size);
    natural_t = std::max(1, o.size - 2);
  } else {
    throw UsageError("--kind must be cyclic, affine, mobius, symmetric or alternating");
  }
  const int points = family.empty() ? 0 : static_cast<int>(family.front().images.size());
  const int t = o.t ? o.t : natural_t;
  if (t > points) throw UsageError("t exceeds the number of points");
  const auto verification = perm::verify_t_wise(family, points, t);
  Outcome outcome;
  outcome.pass = verification.pass;
  outcome.result = {{"kind", o.kind},
                    {"size", o.size},
                    {"points", points},
                    {"t", t},
                    {"count", family.size()},
                    {"closed_under_composition", perm::is_closed_under_composition(family)},
                    {"t_wise", twise_json(verification)}};
  if (o.kind == "mobius") outcome.result["variant"] = o.variant;
  if (!o.out_path.empty()) {
    formats::write_perm_file(o.out_path, formats::PermFile{points, t, family});
    outcome.result["output"] = o.out_path;
  }
  return outcome;
}

// ---- analyze ----------------------------------------------------------------

std::unique_ptr<Instance> analysis_instance(const Options& o)
{
  if (o.family.empty()) throw UsageError("--family is required");
  return make_instance(o.family, o);
}

Outcome analyze_matrix(const Options& o)
{
  const auto instance = analysis_instance(o);
  const auto r = fourier::correlation_matrix(*instance);
  Outcome outcome;
  json entries = json::array();
  for (const auto& row : r.entries) {
    json values = json::array();
    for (const auto& value : row) values.push_back(big(value));
    entries.push_back(values);
  }
  outcome.result = {{"instance", instance_json(*instance)},
                    {"entries", entries},
                    {"symmetric", r.symmetric()},
                    {"positive_semidefinite", r.positive_semidefinite()},
                    {"determinant", big(r.determinant())}};
  outcome.pass = r.symmetric() && r.positive_semidefinite();
  return outcome;
}

Outcome analyze_lattice(const Options& o)
{
  const auto instance = analysis_instance(o);
  const auto lattice = fourier::enumerate_lattice_L(*instance);
  json points = json::array();
  for (const auto& point : lattice) {
    json coords = json::array();
    for (const auto& c : *point.exact) coords.push_back(to_string(c));
    points.push_back(coords);
  }
  Outcome outcome;
  outcome.result = {{"instance", instance_json(*instance)},
                    {"m", big(instance->constants().m)},
                    {"size", lattice.size()},
                    {"points", points}};
  outcome.pass = !lattice.empty();
  return outcome;
}

Outcome analyze_predict(const Options& o)
{
  const auto instance = analysis_instance(o);
  if (o.big_n == 0) throw UsageError("--N is required");
  const auto prediction = fourier::gaussian_prediction(*instance, o.big_n);
  const auto expected = expected_vector(*instance, o.big_n);
  Outcome outcome;
  outcome.result = {{"instance", instance_json(*instance)},
                    {"N", o.big_n},
                    {"p", prediction.p},
                    {"det_r", big(prediction.det_r)},
                    {"lattice_size", prediction.lattice_size},
                    {"degenerate", prediction.degenerate},
                    {"prediction", prediction.value},
                    {"variance_corrected_prediction", prediction.variance_corrected},
                    {"expected_integral", expected.integral}};
  json exact = nullptr, ratio = nullptr, corrected_ratio = nullptr;
  if (instance->ground_size() <= 62) {
    const Rational probability = fourier::exact_point_probability(*instance, o.big_n, expected.values);
    exact = {{"value", to_string(probability)}, {"approx", to_double(probability)}};
    if (probability > 0 && !prediction.degenerate) {
      ratio = prediction.value / to_double(probability);
      corrected_ratio = prediction.variance_corrected / to_double(probability);
    }
  }
  outcome.result["variance_corrected_ratio"] = corrected_ratio;
  outcome.result["exact"] = exact;
  outcome.result["ratio"] = ratio;
  outcome.pass = !prediction.degenerate;
  return outcome;
}

std::vector<double> random_direction(CounterStream& stream, std::size_t dim)
{
  std::vector<double> direction(dim);
  double norm = 0.0;
  for (auto& x : direction) {
    x = stream.uniform() - 0.5;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    direction[0] = 1.0;
    norm = 1.0;
  }
  for (auto& x : direction) x /= norm;
  return direction;
}

Outcome analyze_lemmas(const Options& o)
{
  const auto instance = analysis_instance(o);
  if (o.big_n == 0) throw UsageError("--N is required");
  const std::size_t dim = instance->dimension();
  const double m = to_double(instance->constants().m);
  const double c1 = instance->constants().c1();
  bool pass = true;

  // Near zero: one seeded direction, radius halved repeatedly.
  CounterStream stream(o.seed, 0);
  const auto direction = random_direction(stream, dim);
  const double limit = o.lemma.near_zero_scale / (c1 * std::cbrt(static_cast<double>(o.big_n)));
  json near_zero = json::array();
  double previous = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (int halving = 0; halving < 8; ++halving) {
    const double radius = 0.9 * limit / std::ldexp(1.0, halving);
    std::vector<double> theta(dim);
    for (std::size_t a = 0; a < dim; ++a) theta[a] = radius * direction[a];
    const auto report = fourier::lemma_near_zero_check(*instance, o.big_n, theta, o.lemma);
    monotone = monotone && report.delta <= previous;
    previous = report.delta;
    pass = pass && report.holds;
    near_zero.push_back({{"epsilon", report.epsilon}, {"delta", report.delta}, {"budget", report.budget},
                         {"holds", report.holds}});
  }

  // Far from M: uniform torus samples.
  json far = json::array();
  for (std::uint64_t s = 0; s < o.samples; ++s) {
    CounterStream sample(o.seed, 1 + s);
    std::vector<double> theta(dim);
    for (auto& x : theta) x = sample.uniform() - 0.5;
    const auto report = fourier::lemma_far_from_M_check(*instance, o.big_n, theta);
    pass = pass && (!report.in_domain || report.holds);
    far.push_back({{"distance", report.distance}, {"modulus", report.modulus}, {"bound", report.bound},
                   {"holds", report.holds}});
  }

  // Near M but away from L: perturb points of M \ L inside the admissible radius.
  json near_m = json::array();
  const std::int64_t mi = to_int64(instance->constants().m);
  for (std::uint64_t s = 0; s < o.samples && mi > 1; ++s) {
    CounterStream sample(o.seed, 1'000'000 + s);
    std::vector<std::int64_t> numerators(dim);
    bool found = false;
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
      for (auto& k : numerators) k = static_cast<std::int64_t>(sample.below(static_cast<std::uint64_t>(mi)));
      found = !fourier::in_lattice_L(*instance, numerators, instance->constants().m);
    }
    if (!found) break;
    const auto offset = random_direction(sample, dim);
    const double radius = sample.uniform() * 0.9 / (2.0 * c1 * m);
    std::vector<double> theta(dim);
    for (std::size_t a = 0; a < dim; ++a) theta[a] = static_cast<double>(numerators[a]) / m + radius * offset[a];
    const auto report = fourier::lemma_near_M_far_L_check(*instance, o.big_n, theta, o.lemma);
    pass = pass && (!report.in_domain || report.holds);
    near_m.push_back({{"distance", report.distance}, {"modulus", report.modulus}, {"bound", report.bound},
                      {"in_domain", report.in_domain}, {"holds", report.holds}});
  }

  Outcome outcome;
  outcome.result = {{"instance", instance_json(*instance)},
                    {"N", o.big_n},
                    {"constants",
                     {{"error_constant", o.lemma.error_constant},
                      {"near_zero_scale", o.lemma.near_zero_scale},
                      {"near_m_constant", o.lemma.near_m_constant}}},
                    {"near_zero", {{"epsilon_limit", limit}, {"monotone", monotone}, {"steps", near_zero}}},
                    {"far_from_M", far},
                    {"near_M_far_from_L", near_m}};
  outcome.pass = pass;
  return outcome;
}

// ---- check ------------------------------------------------------------------

std::vector<SymmetryWitness> generating_witnesses(const Instance& instance)
{
  std::vector<SymmetryWitness> witnesses;
  if (const auto* oa_instance = dynamic_cast<const oa::OAInstance*>(&instance)) {
    const auto& p = oa_instance->params();
    for (int i = 0; i < p.n; ++i) {
      oa::OAElement shift{std::vector<int>(p.n, p.q)};
      shift.symbols[i] = 1;
      witnesses.push_back(oa::oa_symmetry_witness(*oa_instance, shift));
    }
  } else if (const auto* design_instance = dynamic_cast<const design::DesignInstance*>(&instance)) {
    const int v = design_instance->params().v;
    std::vector<int> cycle(v), swap(v);
    for (int i = 0; i < v; ++i) {
      cycle[i] = i + 2 > v ? 1 : i + 2;
      swap[i] = i + 1;
    }
    if (v >= 2) std::swap(swap[0], swap[1]);
    witnesses.push_back(design::design_symmetry_witness(*design_instance, cycle));
    witnesses.push_back(design::design_symmetry_witness(*design_instance, swap));
  } else {
    throw UnsupportedFeature("no symmetry witnesses for this family");
  }
  return witnesses;
}

Outcome check_conditions(const Options& o)
{
  const auto instance = analysis_instance(o);
  Outcome outcome;
  json& r = outcome.result;
  r["instance"] = instance_json(*instance);

  const auto divisibility = check_divisibility(*instance);
  r["divisibility"] = {{"minimal_c0", big(divisibility.minimal_c0)},
                       {"declared_c0", big(divisibility.declared_c0)},
                       {"pass", divisibility.divides_declared}};

  const auto bounded = check_boundedness(*instance);
  r["boundedness"] = {{"max_squared_norm", big(bounded.max_squared_norm)},
                      {"max_norm", bounded.max_norm},
                      {"argmax", instance->element_label(bounded.argmax)},
                      {"bound_squared", big(bounded.bound_squared)},
                      {"pass", bounded.pass}};

  bool symmetry_pass = false;
  try {
    json witnesses = json::array();
    symmetry_pass = true;
    for (const auto& witness : generating_witnesses(*instance)) {
      const auto report = verify_symmetry(*instance, witness);
      const bool ok = report.pass && report.tau_invertible && report.permutation_bijective.value_or(false);
      symmetry_pass = symmetry_pass && ok;
      witnesses.push_back({{"pass", ok}, {"checked", report.checked}, {"detail", report.detail}});
    }
    r["symmetry"] = {{"witnesses", witnesses}, {"pass", symmetry_pass}};
  } catch (const UnsupportedFeature& error) {
    r["symmetry"] = {{"supported", false}, {"detail", error.what()}, {"pass", false}};
  }

  bool isolation_pass = false;
  if (instance->verification_only()) {
    r["isolation"] = {{"supported", false}, {"detail", "instance is verification-only"}, {"pass", false}};
  } else {
    isolation_pass = true;
    std::optional<std::size_t> min_r;
    BigInt max_norm = 0, required = 0;
    std::vector<std::size_t> failing;
    for (std::size_t a = 0; a < instance->dimension(); ++a) {
      const auto family = instance->isolation_family(a, IsolationOptions{kDefaultElementBudget, o.seed});
      const auto report = verify_isolation_family(*instance, family);
      if (!report.pass()) failing.push_back(a);
      isolation_pass = isolation_pass && report.pass();
      min_r = std::min(min_r.value_or(report.r), report.r);
      max_norm = std::max(max_norm, report.max_squared_norm);
      required = report.required_r;
    }
    r["isolation"] = {{"min_r", min_r.value_or(0)},
                      {"required_r", big(required)},
                      {"max_squared_norm", big(max_norm)},
                      {"failing_indices", failing},
                      {"pass", isolation_pass}};
  }

  const auto window = admissible_N(*instance, o.window);
  r["admissible_N"] = {{"divisor", big(window.divisor)},
                       {"lower_terms", {window.lower_terms[0], window.lower_terms[1], window.lower_terms[2]}},
                       {"lower_bound", window.lower_bound},
                       {"upper_bound", window.upper_bound},
                       {"lower_scale", o.window.lower_scale},
                       {"upper_scale", o.window.upper_scale},
                       {"smallest", window.smallest ? big(*window.smallest) : json(nullptr)}};
  r["has_constant_function"] = has_constant_function(*instance);
  outcome.pass = divisibility.divides_declared && bounded.pass && symmetry_pass && isolation_pass;
  return outcome;
}

// ---- output -----------------------------------------------------------------

void render_text(std::ostream& out, const json& value, const std::string& prefix)
{
  if (value.is_object()) {
    for (const auto& [key, child] : value.items()) render_text(out, child, prefix.empty() ? key : prefix + "." + key);
    return;
  }
  out << prefix << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
}

void emit(std::ostream& out, const std::string& format, const json& report)
{
  if (format == "text") {
    out << report["command"].get<std::string>() << ": " << report["status"].get<std::string>() << '\n';
    render_text(out, report["result"], "");
    out << "elapsed_seconds: " << report["telemetry"]["elapsed_seconds"].get<double>() << '\n';
  } else {
    out << report.dump(2) << '\n';
  }
}

using Handler = Outcome (*)(const Options&);

void add_shared(CLI::App* sub, Options& o)
{
  sub->add_option("--seed", o.seed, "Seed for all randomness");
  sub->add_option("--threads", o.threads, "Worker thread cap (0: RIGIDGEN_THREADS or hardware)");
  sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  sub->add_option("--out", o.out_path, "Output file for the produced object");
}

void add_oa_params(CLI::App* sub, Options& o, bool required)
{
  auto* q = sub->add_option("--q", o.q, "Alphabet size")->check(CLI::Range(2, 1 << 20));
  auto* n = sub->add_option("--n", o.n, "String length")->check(CLI::Range(1, 1 << 20));
  auto* t = sub->add_option("--t", o.t, "Strength")->check(CLI::Range(1, 1 << 20));
  if (required) {
    q->required();
    n->required();
    t->required();
  }
}

void add_design_params(CLI::App* sub, Options& o, bool required)
{
  auto* v = sub->add_option("--v", o.v, "Number of points")->check(CLI::Range(1, 64));
  auto* k = sub->add_option("--k", o.k, "Block size")->check(CLI::Range(1, 64));
  auto* t = sub->add_option("--t", o.t, "Strength")->check(CLI::Range(1, 64));
  if (required) {
    v->required();
    k->required();
    t->required();
  }
}

void add_search(CLI::App* sub, Options& o)
{
  sub->add_option("--N", o.big_n, "Target size")->required();
  sub->add_option("--trials", o.trials, "Maximum number of trials");
  sub->add_option("--model", o.model, "Sampling model")->check(CLI::IsMember({"bernoulli", "iid"}));
}

void add_family(CLI::App* sub, Options& o)
{
  sub->add_option("--family", o.family, "Instance family")->required()->check(CLI::IsMember({"oa", "design", "perm"}));
  sub->add_option("--q", o.q, "OA alphabet size");
  sub->add_option("--n", o.n, "OA length or permutation degree");
  sub->add_option("--t", o.t, "Strength");
  sub->add_option("--v", o.v, "Design points");
  sub->add_option("--k", o.k, "Design block size");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Find and certify rigid combinatorial structures", "rigidgen"};
  app.require_subcommand(1);
  Options o;
  std::vector<std::pair<CLI::App*, Handler>> handlers;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& description, Handler handler) {
    auto* sub = parent->add_subcommand(name, description);
    add_shared(sub, o);
    handlers.emplace_back(sub, handler);
    return sub;
  };

  auto* oa_cmd = app.add_subcommand("oa", "Orthogonal arrays")->require_subcommand(1);
  add_oa_params(leaf(oa_cmd, "build", "Build the instance and the complete array", oa_build), o, true);
  {
    auto* sub = leaf(oa_cmd, "isolate", "Construct and verify isolation families", oa_isolate);
    add_oa_params(sub, o, true);
    sub->add_option("--a", o.index, "Basis index (default: all)");
  }
  {
    auto* sub = leaf(oa_cmd, "search", "Random search for an array of size N", oa_search);
    add_oa_params(sub, o, true);
    add_search(sub, o);
  }
  {
    auto* sub = leaf(oa_cmd, "verify", "Verify an array file", oa_verify);
    add_oa_params(sub, o, false);
    sub->add_option("--in", o.in_path, "Array file")->required();
  }

  auto* design_cmd = app.add_subcommand("design", "t-designs")->require_subcommand(1);
  add_design_params(leaf(design_cmd, "build", "Build the instance and the complete design", design_build), o, true);
  {
    auto* sub = leaf(design_cmd, "isolate", "Construct and verify isolation families", design_isolate);
    add_design_params(sub, o, true);
    sub->add_option("--a", o.index, "Basis index (default: all)");
  }
  {
    auto* sub = leaf(design_cmd, "search", "Random search for a design with N blocks", design_search);
    add_design_params(sub, o, true);
    add_search(sub, o);
  }
  {
    auto* sub = leaf(design_cmd, "verify", "Verify a design file", design_verify);
    add_design_params(sub, o, false);
    sub->add_option("--in", o.in_path, "Design file")->required();
  }

  auto* perm_cmd = app.add_subcommand("perm", "t-wise permutation families")->require_subcommand(1);
  {
    auto* sub = leaf(perm_cmd, "verify", "Verify a permutation file", perm_verify);
    sub->add_option("--in", o.in_path, "Permutation file")->required();
    sub->add_option("--n", o.n, "Degree (must match the header)");
    sub->add_option("--t", o.t, "Override the strength in the header");
  }
  {
    auto* sub = leaf(perm_cmd, "fixture", "Emit and certify a group fixture", perm_fixture);
    sub->add_option("--kind", o.kind, "cyclic, affine, mobius, symmetric or alternating")->required();
    sub->add_option("--size", o.size, "n for cyclic/symmetric/alternating, q for affine/mobius")->required();
    sub->add_option("--variant", o.variant, "Mobius determinant condition")->check(CLI::IsMember({"unit", "nonzero"}));
    sub->add_option("--t", o.t, "Strength to certify (default: the fixture's natural strength)");
  }

  auto* analyze_cmd = app.add_subcommand("analyze", "Fourier analysis of an instance")->require_subcommand(1);
  add_family(leaf(analyze_cmd, "matrix", "Correlation matrix and its determinant", analyze_matrix), o);
  add_family(leaf(analyze_cmd, "lattice", "Enumerate the lattice L", analyze_lattice), o);
  {
    auto* sub = leaf(analyze_cmd, "predict", "Gaussian prediction against the exact probability", analyze_predict);
    add_family(sub, o);
    sub->add_option("--N", o.big_n, "Target size")->required();
  }
  {
    auto* sub = leaf(analyze_cmd, "lemmas", "Check the characteristic-function bounds", analyze_lemmas);
    add_family(sub, o);
    sub->add_option("--N", o.big_n, "Target size")->required();
    sub->add_option("--samples", o.samples, "Random points per region");
    sub->add_option("--error-constant", o.lemma.error_constant, "Constant of the near-zero error term");
    sub->add_option("--near-zero-scale", o.lemma.near_zero_scale, "Scale of the near-zero radius");
    sub->add_option("--near-m-constant", o.lemma.near_m_constant, "Constant of the near-M exponent");
  }

  auto* check_cmd = app.add_subcommand("check", "Framework conditions")->require_subcommand(1);
  {
    auto* sub = leaf(check_cmd, "conditions", "Run the divisibility, boundedness, symmetry and isolation checks",
                     check_conditions);
    add_family(sub, o);
    sub->add_option("--lower-scale", o.window.lower_scale, "Scale of the lower end of the N window");
    sub->add_option("--upper-scale", o.window.upper_scale, "Scale of the upper end of the N window");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  CLI::App* selected = nullptr;
  Handler handler = nullptr;
  for (const auto& [sub, h] : handlers)
    if (sub->parsed()) {
      selected = sub;
      handler = h;
    }
  if (!handler) {
    err << "no command selected\n";
    return kUsage;
  }
  const std::string command = selected->get_parent()->get_name() + " " + selected->get_name();

  const auto started = std::chrono::steady_clock::now();
  json report = {{"schema", std::string(kReportSchema)}, {"command", command}};
  int code = kUsage;
  try {
    const Outcome outcome = handler(o);
    report["status"] = outcome.pass ? "pass" : "fail";
    report["result"] = outcome.result;
    code = outcome.pass ? kPass : kFail;
  } catch (const std::exception& error) {
    report["status"] = "error";
    report["result"] = {{"message", error.what()}};
    err << "error: " << error.what() << '\n';
    code = kUsage;
  }
  report["telemetry"] = {
      {"elapsed_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()}};
  emit(out, o.format, report);
  return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  std::vector<const char*> argv{"rigidgen"};
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::vector<std::string> validate_report(const json& report)
{
  std::vector<std::string> problems;
  if (!report.is_object()) return {"report is not an object"};
  const std::vector<std::string> allowed = {"schema", "command", "status", "result", "telemetry"};
  for (const auto& [key, value] : report.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) problems.push_back("unexpected field '" + key + "'");
  if (!report.contains("schema") || report["schema"] != std::string(kReportSchema))
    problems.push_back("schema must be '" + std::string(kReportSchema) + "'");
  if (!report.contains("command") || !report["command"].is_string()) problems.push_back("command must be a string");
  if (!report.contains("status") || !report["status"].is_string() ||
      (report["status"] != "pass" && report["status"] != "fail" && report["status"] != "error"))
    problems.push_back("status must be pass, fail or error");
  if (!report.contains("result") || !report["result"].is_object()) problems.push_back("result must be an object");
  else if (report.value("status", "") == "error" &&
           (!report["result"].contains("message") || !report["result"]["message"].is_string()))
    problems.push_back("error reports need result.message");
  if (!report.contains("telemetry") || !report["telemetry"].is_object() ||
      !report["telemetry"].contains("elapsed_seconds") || !report["telemetry"]["elapsed_seconds"].is_number() ||
      report["telemetry"].size() != 1)
    problems.push_back("telemetry must hold exactly elapsed_seconds");
  return problems;
}

}  // namespace rigidgen::cli
