#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ergolab/asymptotics.hpp"
#include "ergolab/cli.hpp"
#include "ergolab/extensions.hpp"
#include "ergolab/serialize.hpp"
#include "ergolab/spectral.hpp"
#include "ergolab/systems.hpp"

using namespace ergolab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("ergolab_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("automorphism documents round trip") {
  const CellAutomorphism t = make_random_automorphism(12, 5);
  const json doc = automorphism_to_json(t);
  CHECK(doc.at("n") == 12);
  CHECK(automorphism_from_json(doc) == t);
  SUBCASE("length mismatch and bad maps are rejected") {
    json bad = doc;
    bad["n"] = 11;
    CHECK_THROWS_AS(automorphism_from_json(bad), ValidationError);
    json dup = doc;
    dup["forward"][0] = dup["forward"][1];
    CHECK_THROWS_AS(automorphism_from_json(dup), ValidationError);
  }
}

TEST_CASE("skew documents round trip") {
  EnsembleSpec spec;
  spec.base = SystemDescriptor::parse("cyclic_rotation(5)");
  spec.fiber_n = 4;
  spec.trials = 1;
  spec.master_seed = 8;
  const SkewSystem skew = sample_extension(spec, 0);
  const json doc = skew_to_json(skew);
  const SkewSystem loaded = skew_from_json(doc);
  CHECK(loaded.product() == skew.product());
  CHECK(loaded.base() == skew.base());
}

TEST_CASE("scan experiment emits the documented CSV") {
  const json config{{"schema_version", 1},
                    {"experiment", "scan"},
                    {"functional", "mixing"},
                    {"system", "bernoulli_cyclic(2,10)"},
                    {"family", {{"kind", "single_coordinate"}, {"count", 4}}},
                    {"N", 4},
                    {"j_min", 1},
                    {"j_max", 12}};
  const auto result = cli::run_experiment(config);
  std::istringstream csv(result.csv_body);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "j,value");
  const CellAutomorphism t = make_bernoulli_cyclic(2, 10);
  const DenseFamily fam = single_coordinate_family(2, 10, 4);
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    const std::int64_t j = std::stoll(line.substr(0, comma));
    const double value = std::stod(line.substr(comma + 1));
    CHECK(value == to_double(phi_mix(t, fam, 4, j)));
    ++rows;
  }
  CHECK(rows == 12);
  const json summary = json::parse(result.summary_json);
  CHECK(summary.at("experiment") == "scan");
  CHECK(summary.at("period") == 10);  // scan horizon 12 passes the period
  SUBCASE("a horizon below the period leaves only the note") {
    json short_cfg = config;
    short_cfg["j_max"] = 8;
    const json short_summary = json::parse(cli::run_experiment(short_cfg).summary_json);
    CHECK_FALSE(short_summary.contains("period"));
    CHECK(short_summary.contains("period_note"));
  }
}

TEST_CASE("partial rigidity accepts exact rational a") {
  const json config{{"schema_version", 1},
                    {"experiment", "scan"},
                    {"functional", "partial_rigidity"},
                    {"a", "1/2"},
                    {"system", "bernoulli_cyclic(2,8)"},
                    {"family", {{"kind", "single_coordinate"}, {"count", 1}}},
                    {"N", 1},
                    {"j_min", 3},
                    {"j_max", 3}};
  const auto result = cli::run_experiment(config);
  CHECK(result.csv_body == "j,value\n3,0\n");
}

TEST_CASE("config validation and exit codes") {
  TempDir dir;
  SUBCASE("cap violations exit 3 and leave no partial outputs") {
    const json config{{"schema_version", 1},
                      {"experiment", "scan"},
                      {"functional", "mixing"},
                      {"system", "bernoulli_cyclic(2,30)"},  // 2^30 cells, over the cap
                      {"family", {{"kind", "canonical"}, {"i_max", 4}}},
                      {"N", 2},
                      {"j_max", 4},
                      {"output", {{"csv", dir.file("out.csv")}, {"summary", dir.file("out.json")}}}};
    const std::string cfg_path = dir.file("over_cap.json");
    save_json(config, cfg_path);
    CHECK(cli::run_config_file(cfg_path) == 3);
    CHECK_FALSE(fs::exists(dir.file("out.csv")));
    CHECK_FALSE(fs::exists(dir.file("out.json")));
  }
  SUBCASE("malformed configs exit 2") {
    const std::string cfg_path = dir.file("broken.json");
    std::ofstream(cfg_path) << "{ not json";
    CHECK(cli::run_config_file(cfg_path) == 2);
    const std::string cfg2 = dir.file("missing.json");
    save_json(json{{"schema_version", 1}, {"experiment", "scan"}}, cfg2);
    CHECK(cli::run_config_file(cfg2) == 2);
    const std::string cfg3 = dir.file("version.json");
    save_json(json{{"schema_version", 9}, {"experiment", "scan"}}, cfg3);
    CHECK(cli::run_config_file(cfg3) == 2);
  }
  SUBCASE("a successful run writes the declared artifacts") {
    const json config{{"schema_version", 1},
                      {"experiment", "triple"},
                      {"system", "bernoulli_cyclic(2,8)"},
                      {"set", {{"kind", "canonical_index"}, {"i", 2}}},
                      {"m_values", {1, 2, 3}},
                      {"output",
                       {{"csv", dir.file("triple.csv")},
                        {"summary", dir.file("triple.json")},
                        {"metadata", dir.file("meta.json")}}}};
    const std::string cfg_path = dir.file("triple_cfg.json");
    save_json(config, cfg_path);
    CHECK(cli::run_config_file(cfg_path) == 0);
    CHECK(fs::exists(dir.file("triple.csv")));
    CHECK(fs::exists(dir.file("triple.json")));
    CHECK(fs::exists(dir.file("meta.json")));
    const std::string body = read_text_file(dir.file("triple.csv"));
    CHECK(body.rfind("m,forward,backward,gap\n", 0) == 0);
  }
}

TEST_CASE("ensemble experiment is reproducible byte for byte") {
  const json config{{"schema_version", 1},
                    {"experiment", "ensemble"},
                    {"property", "a_rigidity"},
                    {"base", "cyclic_rotation(6)"},
                    {"fiber_n", 4},
                    {"sampler", {{"kind", "near_identity"}, {"transpositions", 1}}},
                    {"trials", 10},
                    {"seed", 424242},
                    {"params", {{"N", 2}, {"a", "1/2"}, {"lags", {6, 12}}, {"family_i_max", 4}}}};
  const auto first = cli::run_experiment(config, 2);
  const auto second = cli::run_experiment(config, 1);
  CHECK(first.csv_body == second.csv_body);
  CHECK(first.csv_body.rfind("trial,value,witness\n", 0) == 0);
}

TEST_CASE("spectral classify experiment consumes external csv") {
  TempDir dir;
  const std::string corr_path = dir.file("dirac.csv");
  save_correlation_csv(CorrelationSequence::dirac_at_zero(1 << 14, TailMode::worst_case),
                       corr_path);
  const json config{{"schema_version", 1},
                    {"experiment", "spectral_classify"},
                    {"input", {{"kind", "csv"}, {"path", corr_path}, {"tail", "worst_case"}}},
                    {"N_schedule", {2, 4}},
                    {"P_schedule", {8, 16, 32, 64}}};
  const auto result = cli::run_experiment(config);
  const json summary = json::parse(result.summary_json);
  CHECK(summary.at("verdict") == "singular_witnessed");
  CHECK(summary.contains("witness"));
}

TEST_CASE("spectral classify command wraps the csv loader") {
  TempDir dir;
  const std::string corr_path = dir.file("leb.csv");
  save_correlation_csv(CorrelationSequence::lebesgue(4096, TailMode::assume_zero), corr_path);
  CHECK(cli::spectral_classify_file(corr_path, "zero", "2", "8,16,64", 64,
                                    dir.file("verdict.json")) == 0);
  const json verdict = load_json(dir.file("verdict.json"));
  CHECK(verdict.at("verdict") == "not_singular_at_horizon");
  CHECK(cli::spectral_classify_file(dir.file("absent.csv"), "zero", "2", "8", 64, "") == 2);
}

TEST_CASE("entropy scan experiment") {
  const json config{{"schema_version", 1},
                    {"experiment", "entropy_scan"},
                    {"system", "bernoulli_cyclic(2,12)"},
                    {"partition", {{"kind", "coordinate"}, {"coord", 0}}},
                    {"family", {{"kind", "progression"}, {"length", 5}}},
                    {"j_values", {1, 2}}};
  const auto result = cli::run_experiment(config);
  const json summary = json::parse(result.summary_json);
  CHECK(summary.at("estimate").get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(result.csv_body.rfind("j,lag_count,refinement_entropy,h_j\n", 0) == 0);
}

}  // TEST_SUITE
