#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ergolab/cli.hpp"
#include "ergolab/numeric.hpp"
#include "ergolab/verify.hpp"

int main(int argc, char** argv) {
  if (const char* cap = std::getenv("ERGOLAB_CELL_CAP")) {
    try {
      ergolab::set_cell_cap(std::stoull(cap));
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed ERGOLAB_CELL_CAP\n";
    }
  }

  CLI::App app{"ergolab: exact diagnostics for finite models of measure-preserving systems"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: ERGOLAB_THREADS or hardware)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment config (JSON)");
  run->add_option("--config", config_path, "config file path")->required();

  std::string list_format = "text";
  auto* list = app.add_subcommand("list-systems", "print the system inventory and grammar");
  list->add_option("--format", list_format, "text | structured")
      ->check(CLI::IsMember({"text", "structured"}));

  std::string selector = "all";
  auto* verify_cmd = app.add_subcommand("verify", "run acceptance suites");
  verify_cmd->add_option("suite", selector, "suite: all, mixing, rigidity, weaklimit, spectral, "
                                            "entropy, eq2, cocycle, rwm, triple, determinism");

  std::string diag_system, diag_functional = "phi", diag_a = "1";
  std::size_t diag_n = 2, diag_family = 8;
  std::int64_t diag_j = 1, diag_m = 1;
  auto* diag_cmd = app.add_subcommand("diag", "evaluate one functional ad hoc");
  diag_cmd->add_option("--system", diag_system, "system descriptor, e.g. cyclic_rotation(144)")
      ->required();
  diag_cmd->add_option("--functional", diag_functional,
                       "phi | psi | psi_a | triple_forward | triple_backward | gap");
  diag_cmd->add_option("--N", diag_n, "family prefix size");
  diag_cmd->add_option("--a", diag_a, "partial-rigidity parameter (number or p/q)");
  diag_cmd->add_option("--j", diag_j, "lag");
  diag_cmd->add_option("--m", diag_m, "triple-correlation lag");
  diag_cmd->add_option("--family-size", diag_family, "canonical family length");

  std::string sc_csv, sc_tail = "worst", sc_n = "2,4,8", sc_p = "8,16,32,64,128,256,512,1024";
  std::string sc_out;
  std::uint64_t sc_mult = 64;
  auto* sc_cmd = app.add_subcommand("spectral-classify",
                                    "classify an external correlation sequence (CSV s,re,im)");
  sc_cmd->add_option("--csv", sc_csv, "correlation CSV path")->required();
  sc_cmd->add_option("--tail", sc_tail, "tail semantics: worst | zero");
  sc_cmd->add_option("--N-schedule", sc_n, "comma list");
  sc_cmd->add_option("--P-schedule", sc_p, "comma list");
  sc_cmd->add_option("--degree-multiplier", sc_mult, "d = min(mult*P*N, s_max)");
  sc_cmd->add_option("--out", sc_out, "write the verdict JSON here as well");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return ergolab::cli::run_config_file(config_path, threads);
  if (list->parsed()) return ergolab::cli::list_systems(list_format == "structured");
  if (verify_cmd->parsed()) {
    try {
      const auto results = ergolab::verify::run_acceptance(selector);
      return ergolab::verify::report(results) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  if (diag_cmd->parsed())
    return ergolab::cli::diag(diag_system, diag_functional, diag_n, diag_a, diag_j, diag_m,
                              diag_family);
  if (sc_cmd->parsed())
    return ergolab::cli::spectral_classify_file(sc_csv, sc_tail, sc_n, sc_p, sc_mult, sc_out);
  return 2;
}
