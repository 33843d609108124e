#pragma once

// Synthetic driver fleet: random-waypoint mobility with a daily pull toward a
// downtown block, and the end-to-end encrypted reporting pipeline driven by it.

#include <cstdint>
#include <span>
#include <vector>

#include "privaflow/aggregator.hpp"
#include "privaflow/grid_report.hpp"
#include "privaflow/ipfe.hpp"

namespace privaflow::sim {

using aggregator::DensitySeries;
using grid::GridSpec;
using grid::Position;
using ipfe::CellId;

struct FleetConfig {
  std::uint32_t n_drivers = 200;
  GridSpec grid{};  // 8 x 10 cells of 1 km
  std::uint32_t k_anon = 5;
  std::uint32_t delta_minutes = 5;
  std::uint32_t n_epochs = 100;
  std::uint64_t seed = 1;
  double speed_min_mps = 3.0;
  double speed_max_mps = 15.0;
  double report_probability = 1.0;

  // Downtown block (cells) and the diurnal pull toward it. The probability a
  // new waypoint lands downtown is base + amplitude * (1 - cos(phase)) / 2,
  // peaking at peak_minute each day and scaled by weekend_factor on days 5, 6.
  std::uint32_t downtown_row = 3;
  std::uint32_t downtown_col = 4;
  std::uint32_t downtown_rows = 2;
  std::uint32_t downtown_cols = 2;
  double attraction_base = 0.1;
  double attraction_amplitude = 0.6;
  double peak_minute = 13 * 60;
  double weekend_factor = 0.5;

  // Throws ConfigError / InvalidK.
  void validate() const;
};

// Ground truth per epoch: every driver's position and cell, and the counts.
struct GroundTruth {
  GridSpec grid;
  std::uint32_t delta_minutes = 5;
  std::vector<std::vector<Position>> positions;  // [epoch][driver]
  std::vector<std::vector<CellId>> cells;        // [epoch][driver]
  std::vector<std::vector<std::uint16_t>> density;  // [epoch][cell]

  std::size_t n_epochs() const { return density.size(); }
  DensitySeries as_series() const;
};

// Probability that a freshly drawn waypoint is downtown at the given epoch.
double downtown_attraction(const FleetConfig& cfg, std::uint32_t epoch);

GroundTruth simulate(const FleetConfig& cfg);

// Output of the key distribution center.
struct Deployment {
  ipfe::MasterPublic mpk;
  std::vector<ipfe::DriverKey> keys;  // keys[i] belongs to driver i+1
  ipfe::FunctionalKey dk;             // y = all ones
};

Deployment make_deployment(std::size_t n_drivers, Rng& rng);
// Seeded key-generation stream used by the convenience run_pipeline.
Rng keygen_rng(std::uint64_t seed);
std::vector<ipfe::Encryptor> make_encryptors(std::span<const ipfe::DriverKey> keys);

// Fresh pool of `per_driver` zeros for every driver.
grid::ZeroPool provision_pools(std::span<const ipfe::Encryptor> encryptors, std::size_t per_driver,
                               std::uint64_t seed, unsigned threads = 1);

struct PipelineOptions {
  unsigned threads = 1;
  // Top each driver's pool back up to one epoch's worst case (L zeros)
  // before every epoch.
  bool replenish = true;
  // Draw nonces from the OS instead of the seeded generator.
  bool os_entropy = false;
};

struct PipelineStats {
  std::uint64_t reports = 0;
  std::uint64_t report_ciphertexts = 0;
  std::uint64_t pool_generated = 0;
  std::uint64_t pool_consumed = 0;
  double encrypt_seconds = 0.0;
  double decrypt_seconds = 0.0;
};

struct PipelineResult {
  DensitySeries series;
  GroundTruth truth;
  PipelineStats stats;
};

// Simulates the fleet, has each driver report with probability
// report_probability, and decrypts every epoch at the aggregator. The pool
// is moved in; PoolExhausted propagates when it runs dry without replenish.
PipelineResult run_pipeline(const FleetConfig& cfg, std::span<const ipfe::Encryptor> encryptors,
                            const ipfe::FunctionalKey& dk, grid::ZeroPool pool, const PipelineOptions& opts = {});

// Convenience: fresh deployment and pools derived from cfg.seed.
PipelineResult run_pipeline(const FleetConfig& cfg, const PipelineOptions& opts = {});

struct Comparison {
  std::uint64_t pairs = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t undercounts = 0;
  std::uint64_t overcounts = 0;
};

Comparison compare(const DensitySeries& decrypted, const GroundTruth& truth);

}  // namespace privaflow::sim
