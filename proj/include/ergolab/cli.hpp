#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace ergolab::cli {

// Everything an experiment produces.  CSV bodies are deterministic functions
// of the config (including its seed); metadata carries timestamps and is kept
// out of the data files.
struct RunResult {
  std::string csv_body;
  std::string summary_json;   // serialized summary document
  std::string metadata_json;  // timestamps, version; not reproducible
};

// Validates and runs a parsed config.  threads = 0 defers to ERGOLAB_THREADS.
RunResult run_experiment(const nlohmann::json& config, unsigned threads = 0);

// Exit codes: 0 success, 2 validation error, 3 resource-cap error.
int run_config_file(const std::string& path, unsigned threads = 0);

int list_systems(bool structured);

// diag: one functional evaluated once, printed to stdout.
int diag(const std::string& system, const std::string& functional, std::size_t n_param,
         const std::string& a, std::int64_t j, std::int64_t m, std::size_t family_size);

int spectral_classify_file(const std::string& csv_path, const std::string& tail,
                           const std::string& n_schedule, const std::string& p_schedule,
                           std::uint64_t degree_multiplier, const std::string& out_path);

}  // namespace ergolab::cli
