#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "privaflow/matrices.hpp"
#include "privaflow/mobility_sim.hpp"

namespace privaflow::cli {

namespace fs = std::filesystem;

// Everything one invocation needs; built from defaults, then the
// PRIVAFLOW_SEED environment variable, then the config file, then flags.
struct RunConfig {
  sim::FleetConfig fleet;
  unsigned security_level = 128;
  fs::path out = "privaflow_out";
  unsigned runs = 1;
  unsigned threads = 1;
  std::size_t pool_per_driver = 0;  // 0 = one epoch's worst case, L
  bool replenish = true;
  bool os_entropy = false;

  std::vector<std::uint32_t> bench_cells{10, 20, 40, 80};
  std::vector<std::uint32_t> bench_drivers{25, 50, 100, 150, 200};
  unsigned bench_repetitions = 5;

  matrices::WindowConfig window;
  matrices::SplitFractions split;
  bool export_complete_only = true;

  std::size_t initial_pool() const { return pool_per_driver ? pool_per_driver : fleet.grid.cells(); }
};

// Collects key=value settings from all sources and resolves them in order.
class ConfigBuilder {
 public:
  // Throws ConfigError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  void load_file(const fs::path& path);
  void load_env();
  RunConfig build() const;

  static const std::set<std::string>& known_keys();

 private:
  std::vector<std::pair<std::string, std::string>> settings_;
};

struct SimulateOptions {
  bool keygen_inline = false;
  std::optional<fs::path> keys_dir;  // default: <out>/keys
  bool write_ground_truth = false;
  bool ground_truth_only = false;
};

struct ExportOptions {
  std::optional<fs::path> series_csv;  // sidecar: same path with .json
};

int cmd_keygen(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opts, std::ostream& out);
int cmd_bench(const RunConfig& cfg, std::ostream& out);
int cmd_export(const RunConfig& cfg, const ExportOptions& opts, std::ostream& out);

// Byte counts of every serialized artifact next to the published figures.
void print_sizes(std::uint32_t k_anon, std::ostream& out);

}  // namespace privaflow::cli
