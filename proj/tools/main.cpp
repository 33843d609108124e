// privaflow: key generation, simulation, benchmarks and dataset export.
//
// Exit codes: 0 success, 2 configuration error, 3 protocol error, 4 I/O error.

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "privaflow/errors.hpp"

using namespace privaflow;

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving traffic density aggregation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_file;
  std::vector<std::pair<std::string, std::optional<std::string>>> flags{
      {"seed", {}},   {"drivers", {}}, {"cells", {}},   {"k_anon", {}}, {"epochs", {}},
      {"report_probability", {}},      {"runs", {}},    {"threads", {}}, {"out", {}}};
  std::vector<std::string> overrides;

  app.add_option("--config", config_file, "key = value configuration file");
  app.add_option("--seed", flags[0].second, "seed (fallback: PRIVAFLOW_SEED)");
  app.add_option("--drivers", flags[1].second, "number of drivers");
  app.add_option("--cells", flags[2].second, "number of grid cells (near-square grid)");
  app.add_option("--k-anon", flags[3].second, "cells per report, K");
  app.add_option("--epochs", flags[4].second, "epochs to simulate");
  app.add_option("--report-prob", flags[5].second, "probability a driver reports in an epoch");
  app.add_option("--runs", flags[6].second, "seeded repetitions");
  app.add_option("--threads", flags[7].second, "worker threads (0 = all cores)");
  app.add_option("--out", flags[8].second, "output directory");
  app.add_option("--set", overrides, "extra key=value configuration, repeatable");

  auto* keygen = app.add_subcommand("keygen", "generate keys, functional key and zero pools");
  cli::SimulateOptions sim_opts;
  std::optional<std::string> keys_dir;
  auto* simulate = app.add_subcommand("simulate", "run the encrypted pipeline against ground truth");
  simulate->add_flag("--keygen", sim_opts.keygen_inline, "generate keys in memory instead of loading them");
  simulate->add_option("--keys", keys_dir, "key directory (default <out>/keys)");
  simulate->add_flag("--ground-truth", sim_opts.write_ground_truth,
                     "also write the ground-truth series (audit only: reveals every driver's cell)");
  simulate->add_flag("--ground-truth-only", sim_opts.ground_truth_only,
                     "skip encryption; write ground truth only (audit only: privacy-violating)");
  auto* bench = app.add_subcommand("bench", "time encryption vs cells and decryption vs drivers");
  cli::ExportOptions export_opts;
  std::optional<std::string> series;
  auto* exp = app.add_subcommand("export", "build forecaster windows and write the dataset");
  exp->add_option("--series", series, "density CSV with JSON sidecar (default: simulate ground truth)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    cli::ConfigBuilder builder;
    builder.load_env();
    if (config_file) builder.load_file(*config_file);
    for (const auto& [key, value] : flags) {
      if (value) builder.set(key, *value);
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      builder.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto cfg = builder.build();
    if (keys_dir) sim_opts.keys_dir = *keys_dir;
    if (series) export_opts.series_csv = *series;

    if (keygen->parsed()) return cli::cmd_keygen(cfg, std::cout);
    if (simulate->parsed()) return cli::cmd_simulate(cfg, sim_opts, std::cout);
    if (bench->parsed()) return cli::cmd_bench(cfg, std::cout);
    if (exp->parsed()) return cli::cmd_export(cfg, export_opts, std::cout);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
