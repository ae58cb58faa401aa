#include "ergolab/cli.hpp"

#include <cstdio>
#include <ctime>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ergolab/asymptotics.hpp"
#include "ergolab/extensions.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/seqentropy.hpp"
#include "ergolab/serialize.hpp"
#include "ergolab/spectral.hpp"
#include "ergolab/systems.hpp"

namespace ergolab::cli {

using nlohmann::json;

namespace {

Rational rational_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number_float()) return Rational(j.get<double>());
  throw ValidationError("expected a rational (number or \"p/q\")");
}

DenseFamily family_from_json(const json& j, const SystemDescriptor& system) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "canonical") {
    const std::size_t i_max = j.value("i_max", 16u);
    return canonical_family(CellSpace(static_cast<std::uint32_t>(system.cell_count())), i_max);
  }
  if (kind == "single_coordinate") {
    if (system.kind != SystemKind::bernoulli_cyclic)
      throw ValidationError("single_coordinate family needs a bernoulli_cyclic system");
    return single_coordinate_family(system.alphabet, system.window,
                                    j.value("count", std::size_t{4}),
                                    j.value("symbol", 0u));
  }
  throw ValidationError("unknown family kind: " + kind);
}

Partition partition_from_json(const json& j, const SystemDescriptor& system) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::uint32_t n = static_cast<std::uint32_t>(system.cell_count());
  if (kind == "coordinate") return coordinate_partition(system, j.value("coord", 0u));
  if (kind == "blocks") return block_partition(CellSpace(n), j.at("classes").get<std::uint32_t>());
  if (kind == "random")
    return random_partition(CellSpace(n), j.at("classes").get<std::uint32_t>(),
                            j.value("seed", std::uint64_t{0}));
  throw ValidationError("unknown partition kind: " + kind);
}

SequenceFamily seqfamily_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "progression") return SequenceFamily::progression(j.at("length").get<std::uint32_t>());
  if (kind == "progression_growing") return SequenceFamily::progression_growing();
  if (kind == "geometric")
    return SequenceFamily::geometric(j.at("breaks").get<std::vector<std::uint32_t>>());
  if (kind == "explicit") {
    std::map<std::uint32_t, std::vector<std::int64_t>> m;
    for (const auto& [key, lags] : j.at("lags").items())
      m[static_cast<std::uint32_t>(std::stoul(key))] = lags.get<std::vector<std::int64_t>>();
    return SequenceFamily::explicit_family(std::move(m));
  }
  throw ValidationError("unknown sequence family kind: " + kind);
}

CellSet set_from_json(const json& j, std::uint32_t n) {
  const std::string kind = j.at("kind").get<std::string>();
  const CellSpace space(n);
  if (kind == "canonical_index") {
    const std::size_t i = j.at("i").get<std::size_t>();
    return canonical_family(space, i).at(i);
  }
  if (kind == "index_range")
    return CellSet::index_range(space, j.at("lo").get<std::uint64_t>(),
                                j.at("hi").get<std::uint64_t>());
  if (kind == "members")
    return CellSet(space, j.at("cells").get<std::vector<std::uint32_t>>());
  throw ValidationError("unknown set kind: " + kind);
}

AdmissibleFunction admissible_from_json(const json& j) {
  return AdmissibleFunction(j.value("theta", 0.0), j.value("coeffs", std::vector<double>{}));
}

SkewSystem skew_from_json_config(const json& j) {
  const SystemDescriptor base_desc = SystemDescriptor::parse(j.at("base").get<std::string>());
  const CellAutomorphism base = make_system(base_desc);
  const std::uint32_t fiber_n = j.at("fiber_n").get<std::uint32_t>();
  const json& fib = j.at("fibers");
  const std::string kind = fib.at("kind").get<std::string>();
  if (kind == "identity") return trivial_extension(base, fiber_n);
  if (kind == "constant") {
    const CellAutomorphism t = make_system(SystemDescriptor::parse(fib.at("system").get<std::string>()));
    if (t.space_size() != fiber_n) throw ValidationError("constant fiber size differs from fiber_n");
    return build_skew(base, std::vector<CellAutomorphism>(base.space_size(), t));
  }
  if (kind == "random" || kind == "conjugated_trivial") {
    const std::uint64_t seed = fib.value("seed", std::uint64_t{0});
    SplitMix64 gen(seed);
    std::vector<CellAutomorphism> fibers;
    fibers.reserve(base.space_size());
    for (std::uint32_t x = 0; x < base.space_size(); ++x) {
      std::vector<std::uint32_t> f(fiber_n);
      for (std::uint32_t y = 0; y < fiber_n; ++y) f[y] = y;
      for (std::uint32_t i = fiber_n; i > 1; --i)
        std::swap(f[i - 1], f[static_cast<std::uint32_t>(gen.bounded(i))]);
      fibers.emplace_back(std::move(f));
    }
    if (kind == "random") return build_skew(base, std::move(fibers));
    const SkewSystem j_sys(CellAutomorphism::identity(base.space_size()), std::move(fibers));
    return conjugate(trivial_extension(base, fiber_n), j_sys);
  }
  throw ValidationError("unknown fiber kind: " + kind);
}

std::string metadata_json_now() {
  json meta{{"tool", "ergolab"}, {"schema_version", 1},
            {"generated_at_unix", static_cast<std::int64_t>(std::time(nullptr))}};
  return meta.dump(2) + "\n";
}

RunResult run_scan(const json& cfg) {
  const SystemDescriptor desc = SystemDescriptor::parse(cfg.at("system").get<std::string>());
  const CellAutomorphism t = make_system(desc);
  const DenseFamily fam = family_from_json(cfg.at("family"), desc);
  const std::size_t n_param = cfg.at("N").get<std::size_t>();
  const std::int64_t j_min = cfg.value("j_min", std::int64_t{1});
  const std::int64_t j_max = cfg.at("j_max").get<std::int64_t>();
  const std::string fname = cfg.at("functional").get<std::string>();
  ScanFunctional functional;
  Rational a(1);
  if (fname == "mixing") functional = ScanFunctional::mixing;
  else if (fname == "rigidity") functional = ScanFunctional::rigidity;
  else if (fname == "partial_rigidity") {
    functional = ScanFunctional::partial_rigidity;
    a = rational_from_json(cfg.at("a"));
  } else throw ValidationError("unknown functional: " + fname);

  const ScanReport report = scan(t, fam, n_param, j_min, j_max, functional, a);
  std::ostringstream csv;
  csv << "j,value\n";
  for (const auto& [j, v] : report.values) csv << j << "," << format_double(to_double(v)) << "\n";
  json summary{{"experiment", "scan"},
               {"functional", fname},
               {"system", desc.to_string()},
               {"N", n_param},
               {"horizon", report.horizon},
               {"witnesses", report.witnesses},
               {"witness_threshold", "1/" + std::to_string(n_param)}};
  if (report.period) summary["period"] = *report.period;
  else summary["period_note"] = "period exceeds scan horizon";
  return {csv.str(), summary.dump(2) + "\n", metadata_json_now()};
}

RunResult run_entropy_scan(const json& cfg) {
  const SystemDescriptor desc = SystemDescriptor::parse(cfg.at("system").get<std::string>());
  const CellAutomorphism t = make_system(desc);
  const Partition xi = partition_from_json(cfg.at("partition"), desc);
  const SequenceFamily fam = seqfamily_from_json(cfg.at("family"));
  const auto j_values = cfg.at("j_values").get<std::vector<std::uint32_t>>();
  const HpEstimate est = hp_estimate(t, xi, fam, j_values);
  std::ostringstream csv;
  csv << "j,lag_count,refinement_entropy,h_j\n";
  for (const auto& row : est.rows)
    csv << row.j << "," << row.lag_count << "," << format_double(row.refinement_entropy) << ","
        << format_double(row.h_j) << "\n";
  json summary{{"experiment", "entropy_scan"},
               {"system", desc.to_string()},
               {"family", fam.description},
               {"partition_entropy", partition_entropy(xi)},
               {"estimate", est.estimate},
               {"note", est.note}};
  return {csv.str(), summary.dump(2) + "\n", metadata_json_now()};
}

RunResult run_ensemble(const json& cfg, unsigned threads) {
  EnsembleSpec spec;
  spec.base = SystemDescriptor::parse(cfg.at("base").get<std::string>());
  spec.fiber_n = cfg.at("fiber_n").get<std::uint32_t>();
  const json sampler = cfg.value("sampler", json{{"kind", "uniform"}});
  const std::string skind = sampler.at("kind").get<std::string>();
  if (skind == "uniform") spec.sampler = EnsembleSpec::Sampler::uniform_permutations;
  else if (skind == "near_identity") {
    spec.sampler = EnsembleSpec::Sampler::near_identity;
    spec.transpositions = sampler.value("transpositions", 0u);
  } else throw ValidationError("unknown sampler kind: " + skind);
  spec.trials = cfg.at("trials").get<std::uint32_t>();
  spec.master_seed = cfg.at("seed").get<std::uint64_t>();

  const std::string pname = cfg.at("property").get<std::string>();
  LiftProperty property;
  if (pname == "a_rigidity") property = LiftProperty::a_rigidity;
  else if (pname == "weak_mixing_phi") property = LiftProperty::weak_mixing_phi;
  else if (pname == "rwm") property = LiftProperty::rwm;
  else if (pname == "hp_blowup") property = LiftProperty::hp_blowup;
  else throw ValidationError("unknown ensemble property: " + pname);

  LiftParams params;
  if (cfg.contains("params")) {
    const json& p = cfg.at("params");
    params.N = p.value("N", params.N);
    if (p.contains("a")) params.a = rational_from_json(p.at("a"));
    if (p.contains("lags")) params.lags = p.at("lags").get<std::vector<std::int64_t>>();
    params.rwm_j = p.value("rwm_j", params.rwm_j);
    params.family_i_max = p.value("family_i_max", params.family_i_max);
    params.bern_k = p.value("bern_k", params.bern_k);
    params.bern_window = p.value("bern_window", params.bern_window);
    params.hp_j = p.value("hp_j", params.hp_j);
    params.hp_length = p.value("hp_length", params.hp_length);
  }

  const EnsembleReport report = lift_experiment(spec, property, params, threads);
  std::ostringstream csv;
  csv << "trial,value,witness\n";
  for (const auto& row : report.rows)
    csv << row.trial << "," << format_double(row.value) << "," << (row.witness ? 1 : 0) << "\n";
  json summary{{"experiment", "ensemble"},
               {"property", report.property},
               {"base", spec.base.to_string()},
               {"fiber_n", spec.fiber_n},
               {"trials", spec.trials},
               {"master_seed", report.master_seed},
               {"observed_fraction", report.observed_fraction},
               {"control_value", report.control_value},
               {"threshold", report.threshold_note},
               {"horizon", report.horizon_note}};
  return {csv.str(), summary.dump(2) + "\n", metadata_json_now()};
}

json verdict_to_json(const SingularityVerdict& v) {
  json rows = json::array();
  for (const auto& row : v.rows)
    rows.push_back(json{{"N", row.n_param},
                        {"P", row.p},
                        {"count", row.counts.count},
                        {"certified_out", row.counts.certified_out},
                        {"uncertified", row.counts.uncertified},
                        {"threshold_arcs", row.threshold_arcs}});
  json out{{"verdict", v.verdict_name()},
           {"margin", v.margin},
           {"error_budget", v.error_budget},
           {"rows", std::move(rows)}};
  if (v.witness) out["witness"] = {{"N", v.witness->first}, {"P", v.witness->second}};
  return out;
}

RunResult run_spectral_classify(const json& cfg) {
  const json& input = cfg.at("input");
  const std::string kind = input.at("kind").get<std::string>();
  const auto tail_of = [](const std::string& s) {
    if (s == "assume_zero") return TailMode::assume_zero;
    if (s == "worst_case") return TailMode::worst_case;
    throw ValidationError("tail must be assume_zero or worst_case");
  };
  std::optional<CorrelationSequence> corr;
  if (kind == "csv") {
    corr = load_correlation_csv(input.at("path").get<std::string>(),
                                tail_of(input.value("tail", "worst_case")));
  } else if (kind == "synthetic") {
    const std::string shape = input.at("shape").get<std::string>();
    const std::int64_t s_max = input.value("s_max", std::int64_t{1} << 18);
    const TailMode tail = tail_of(input.value("tail", "assume_zero"));
    if (shape == "dirac") corr = CorrelationSequence::dirac_at_zero(s_max, tail);
    else if (shape == "lebesgue") corr = CorrelationSequence::lebesgue(s_max, tail);
    else if (shape == "mixture")
      corr = CorrelationSequence::blend(CorrelationSequence::dirac_at_zero(s_max, tail),
                                        CorrelationSequence::lebesgue(s_max, tail),
                                        input.value("weight", 0.5), "mixture");
    else throw ValidationError("unknown synthetic shape: " + shape);
  } else if (kind == "system") {
    const SystemDescriptor desc = SystemDescriptor::parse(input.at("system").get<std::string>());
    const CellAutomorphism t = make_system(desc);
    const std::int64_t s_max = input.value("s_max", std::int64_t{4096});
    const json vec = input.value("vector", json{{"kind", "random"}, {"seed", 1}});
    const std::string vkind = vec.at("kind").get<std::string>();
    std::vector<Complex> f(t.space_size());
    if (vkind == "random") {
      SplitMix64 gen(vec.value("seed", std::uint64_t{1}));
      for (auto& z : f) z = Complex{gen.uniform01() * 2 - 1, gen.uniform01() * 2 - 1};
    } else if (vkind == "indicator") {
      const CellSet a = set_from_json(vec.at("set"), t.space_size());
      for (std::uint32_t c = 0; c < t.space_size(); ++c) f[c] = a.contains(c) ? 1.0 : 0.0;
    } else {
      throw ValidationError("unknown vector kind: " + vkind);
    }
    corr = correlation_sequence(t, normalized_complex(f, t.space_size()), s_max);
  } else {
    throw ValidationError("unknown spectral input kind: " + kind);
  }

  const auto n_schedule = cfg.at("N_schedule").get<std::vector<std::uint32_t>>();
  const auto p_schedule = cfg.at("P_schedule").get<std::vector<std::uint32_t>>();
  ClassifyPolicy policy;
  policy.degree_multiplier = cfg.value("degree_multiplier", policy.degree_multiplier);
  const SingularityVerdict verdict = classify_singular(*corr, n_schedule, p_schedule, policy);
  std::ostringstream csv;
  csv << "N,P,count,certified_out,uncertified,threshold_arcs\n";
  for (const auto& row : verdict.rows)
    csv << row.n_param << "," << row.p << "," << row.counts.count << ","
        << row.counts.certified_out << "," << row.counts.uncertified << ","
        << format_double(row.threshold_arcs) << "\n";
  json summary = verdict_to_json(verdict);
  summary["experiment"] = "spectral_classify";
  summary["source"] = corr->source();
  return {csv.str(), summary.dump(2) + "\n", metadata_json_now()};
}

RunResult run_recurrence(const json& cfg) {
  const SkewSystem skew = skew_from_json_config(cfg.at("skew"));
  const CellSet a = set_from_json(cfg.at("set"), skew.base_size());
  const auto lags = cfg.at("lags").get<std::vector<std::int64_t>>();
  const std::size_t n_param = cfg.at("N").get<std::size_t>();
  const DenseFamily fiber_fam =
      canonical_family(CellSpace(skew.fiber_size()), cfg.value("fiber_i_max", 8u));
  const Rational value = recurrence_functional(skew, a, lags, n_param, fiber_fam);
  std::ostringstream csv;
  csv << "lag_count,value\n" << lags.size() << "," << format_double(to_double(value)) << "\n";
  json summary{{"experiment", "recurrence"},
               {"value", to_double(value)},
               {"value_exact", value.str()},
               {"N", n_param},
               {"lags", lags},
               {"fiber_family_note",
                "fiber Halmos distance over the canonical family, i_max=" +
                    std::to_string(cfg.value("fiber_i_max", 8u))}};
  return {csv.str(), summary.dump(2) + "\n", metadata_json_now()};
}

RunResult run_triple(const json& cfg) {
  const SystemDescriptor desc = SystemDescriptor::parse(cfg.at("system").get<std::string>());
  const CellAutomorphism t = make_system(desc);
  const CellSet a = set_from_json(cfg.at("set"), t.space_size());
  const auto m_values = cfg.at("m_values").get<std::vector<std::int64_t>>();
  std::ostringstream csv;
  csv << "m,forward,backward,gap\n";
  for (const std::int64_t m : m_values) {
    const Rational fwd = triple_correlation(t, a, m, Direction::forward);
    const Rational bwd = triple_correlation(t, a, m, Direction::backward);
    csv << m << "," << format_double(to_double(fwd)) << "," << format_double(to_double(bwd))
        << "," << format_double(to_double(fwd - bwd)) << "\n";
  }
  json summary{{"experiment", "triple"},
               {"system", desc.to_string()},
               {"set_measure", to_double(a.measure())},
               {"reference_targets",
                {{"forward", "(mu + mu^2 + 2 mu^3)/4"}, {"backward", "mu^2"}}}};
  return {csv.str(), summary.dump(2) + "\n", metadata_json_now()};
}

RunResult run_family_profile(const json& cfg) {
  const std::uint32_t base_n = cfg.at("base_n").get<std::uint32_t>();
  const auto fiber_descs = cfg.at("block_fibers").get<std::vector<std::string>>();
  const Partition blocks = block_partition(CellSpace(base_n),
                                           static_cast<std::uint32_t>(fiber_descs.size()));
  std::vector<CellAutomorphism> fibers;
  fibers.reserve(base_n);
  for (std::uint32_t x = 0; x < base_n; ++x)
    fibers.push_back(make_system(SystemDescriptor::parse(
        fiber_descs[static_cast<std::size_t>(blocks.labels[x])])));
  const SkewSystem family(CellAutomorphism::identity(base_n), std::move(fibers));
  std::vector<AdmissibleFunction> candidates;
  for (const auto& c : cfg.at("candidates")) candidates.push_back(admissible_from_json(c));
  const auto lag_list = cfg.at("lags").get<std::vector<std::int64_t>>();
  const std::size_t n_param = cfg.value("N", std::size_t{2});
  const std::uint32_t m = family.fiber_size();
  std::vector<CellFunction> tests;
  const DenseFamily fam = canonical_family(CellSpace(m), std::max<std::size_t>(n_param, 2));
  for (std::size_t i = 1; i <= fam.size(); ++i)
    tests.push_back(CellFunction::indicator(fam.at(i)));
  const FamilyProfileReport report =
      family_profile(family, blocks, candidates, lag_list, tests, n_param);
  std::ostringstream csv;
  csv << "block,candidate,distance\n";
  for (const auto& row : report.blocks)
    for (std::size_t ci = 0; ci < row.candidate_distance.size(); ++ci)
      csv << row.block << "," << ci << "," << format_double(row.candidate_distance[ci]) << "\n";
  json jblocks = json::array();
  for (const auto& row : report.blocks)
    jblocks.push_back(json{{"block", row.block},
                           {"best_candidate", row.best_candidate},
                           {"margin", row.margin}});
  json summary{{"experiment", "family_profile"}, {"blocks", std::move(jblocks)}};
  return {csv.str(), summary.dump(2) + "\n", metadata_json_now()};
}

}  // namespace

RunResult run_experiment(const json& config, unsigned threads) {
  if (!config.is_object()) throw ValidationError("config must be a JSON object");
  const int version = config.value("schema_version", 0);
  if (version != 1) throw ValidationError("unsupported schema_version (expected 1)");
  const std::string experiment = config.at("experiment").get<std::string>();
  if (experiment == "scan") return run_scan(config);
  if (experiment == "entropy_scan") return run_entropy_scan(config);
  if (experiment == "ensemble") return run_ensemble(config, threads);
  if (experiment == "spectral_classify") return run_spectral_classify(config);
  if (experiment == "recurrence") return run_recurrence(config);
  if (experiment == "triple") return run_triple(config);
  if (experiment == "family_profile") return run_family_profile(config);
  throw ValidationError("unknown experiment kind: " + experiment);
}

int run_config_file(const std::string& path, unsigned threads) {
  try {
    const json config = load_json(path);
    const RunResult result = run_experiment(config, threads);
    // All computation precedes any file output, so failures leave nothing
    // half-written.
    const json output = config.value("output", json::object());
    if (output.contains("csv")) write_text_file(output.at("csv").get<std::string>(), result.csv_body);
    if (output.contains("summary"))
      write_text_file(output.at("summary").get<std::string>(), result.summary_json);
    if (output.contains("metadata"))
      write_text_file(output.at("metadata").get<std::string>(), result.metadata_json);
    if (!output.contains("csv") && !output.contains("summary")) std::cout << result.summary_json;
    return 0;
  } catch (const CellCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int list_systems(bool structured) {
  struct Entry {
    const char* grammar;
    const char* note;
  };
  const Entry entries[] = {
      {"identity(n)", "identity on n cells, n >= 1"},
      {"cyclic_rotation(n)", "c -> c+1 mod n; irrational rotations via denominator schedules"},
      {"odometer(b,l)", "+1 adding machine on b^l cells, b >= 2, l >= 1"},
      {"bernoulli_cyclic(k,L)",
       "cyclic coordinate shift on k^L words; product rule exact for window-disjoint lags"},
      {"random_permutation(n,seed)", "seeded Fisher-Yates over splitmix64"},
  };
  if (structured) {
    json out = json::array();
    for (const auto& e : entries) out.push_back({{"grammar", e.grammar}, {"note", e.note}});
    json doc{{"systems", std::move(out)}, {"cell_cap", cell_cap()}};
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  std::cout << "available systems (cell cap " << cell_cap() << "):\n";
  for (const auto& e : entries) std::printf("  %-28s %s\n", e.grammar, e.note);
  return 0;
}

int diag(const std::string& system, const std::string& functional, std::size_t n_param,
         const std::string& a, std::int64_t j, std::int64_t m, std::size_t family_size) {
  try {
    const SystemDescriptor desc = SystemDescriptor::parse(system);
    const CellAutomorphism t = make_system(desc);
    const CellSpace space(t.space_size());
    const DenseFamily fam = canonical_family(space, family_size);
    Rational value;
    if (functional == "phi") value = phi_mix(t, fam, n_param, j);
    else if (functional == "psi") value = psi_rigid(t, fam, n_param, j);
    else if (functional == "psi_a") value = psi_partial(t, fam, rational_from_json(json(a)), n_param, j);
    else if (functional == "triple_forward")
      value = triple_correlation(t, fam.at(2 <= fam.size() ? 2 : 1), m, Direction::forward);
    else if (functional == "triple_backward")
      value = triple_correlation(t, fam.at(2 <= fam.size() ? 2 : 1), m, Direction::backward);
    else if (functional == "gap") value = asymmetry_gap(t, fam.at(2 <= fam.size() ? 2 : 1), m);
    else {
      std::cerr << "unknown functional: " << functional << "\n";
      return 2;
    }
    std::cout << functional << "(" << desc.to_string() << ") = " << to_double(value) << "  ["
              << value.str() << "]\n";
    return 0;
  } catch (const CellCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int spectral_classify_file(const std::string& csv_path, const std::string& tail,
                           const std::string& n_schedule, const std::string& p_schedule,
                           std::uint64_t degree_multiplier, const std::string& out_path) {
  try {
    const auto parse_list = [](const std::string& text) {
      std::vector<std::uint32_t> out;
      std::stringstream ss(text);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
      return out;
    };
    const TailMode mode = tail == "zero" ? TailMode::assume_zero : TailMode::worst_case;
    const CorrelationSequence corr = load_correlation_csv(csv_path, mode);
    ClassifyPolicy policy;
    policy.degree_multiplier = degree_multiplier;
    const SingularityVerdict verdict =
        classify_singular(corr, parse_list(n_schedule), parse_list(p_schedule), policy);
    const json doc = verdict_to_json(verdict);
    if (!out_path.empty()) save_json(doc, out_path);
    std::cout << doc.dump(2) << "\n";
    return verdict.verdict == SingularityVerdict::Kind::inconclusive ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ergolab::cli
