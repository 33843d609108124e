#include "privaflow/mobility_sim.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "privaflow/errors.hpp"
#include "privaflow/parallel.hpp"

namespace privaflow::sim {

namespace {

// Rng stream ids; one family per purpose, offset by driver id.
constexpr std::uint64_t kMobilityStream = 1ULL << 32;
constexpr std::uint64_t kNonceStream = 2ULL << 32;
constexpr std::uint64_t kPoolStream = 3ULL << 32;
constexpr std::uint64_t kReplenishStream = 4ULL << 32;
constexpr std::uint64_t kKeygenStream = 5ULL << 32;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct DriverState {
  Position pos;
  Position waypoint;
  double speed = 0.0;
};

Position draw_waypoint(const FleetConfig& cfg, std::uint32_t epoch, Rng& rng) {
  const auto& g = cfg.grid;
  if (rng.bernoulli(downtown_attraction(cfg, epoch))) {
    const double x0 = g.origin_x_m + cfg.downtown_col * g.cell_size_m;
    const double y0 = g.origin_y_m + cfg.downtown_row * g.cell_size_m;
    return {x0 + rng.uniform() * cfg.downtown_cols * g.cell_size_m,
            y0 + rng.uniform() * cfg.downtown_rows * g.cell_size_m};
  }
  return {g.origin_x_m + rng.uniform() * g.width_m(), g.origin_y_m + rng.uniform() * g.height_m()};
}

}  // namespace

void FleetConfig::validate() const {
  grid.validate();
  if (k_anon == 0 || k_anon > grid.cells()) {
    throw InvalidK("k_anon " + std::to_string(k_anon) + " must be in [1, " + std::to_string(grid.cells()) + "]");
  }
  if (!(report_probability >= 0.0 && report_probability <= 1.0)) {
    throw ConfigError("report_probability must be in [0, 1]");
  }
  if (delta_minutes == 0) throw ConfigError("delta_minutes must be positive");
  if (!(speed_min_mps >= 0.0 && speed_max_mps >= speed_min_mps)) throw ConfigError("invalid speed range");
  if (n_drivers > 65535) throw ConfigError("at most 65535 drivers are supported");
  if (downtown_rows == 0 || downtown_cols == 0 || downtown_row + downtown_rows > grid.rows ||
      downtown_col + downtown_cols > grid.cols) {
    throw ConfigError("downtown block must lie inside the grid");
  }
  if (!(attraction_base >= 0.0 && attraction_amplitude >= 0.0 && attraction_base + attraction_amplitude <= 1.0)) {
    throw ConfigError("attraction_base + attraction_amplitude must lie in [0, 1]");
  }
}

double downtown_attraction(const FleetConfig& cfg, std::uint32_t epoch) {
  const double minutes = static_cast<double>(epoch) * cfg.delta_minutes;
  const double minute_of_day = std::fmod(minutes, 1440.0);
  const auto day_of_week = static_cast<std::uint64_t>(minutes / 1440.0) % 7;
  const double phase = 2.0 * std::numbers::pi * (minute_of_day - cfg.peak_minute + 720.0) / 1440.0;
  double amplitude = cfg.attraction_amplitude;
  if (day_of_week >= 5) amplitude *= cfg.weekend_factor;
  return cfg.attraction_base + amplitude * 0.5 * (1.0 - std::cos(phase));
}

DensitySeries GroundTruth::as_series() const {
  DensitySeries s;
  s.grid = grid;
  s.delta_minutes = delta_minutes;
  s.epochs.reserve(density.size());
  for (std::size_t t = 0; t < density.size(); ++t) {
    s.epochs.push_back({static_cast<std::uint32_t>(t), density[t], 0});
  }
  return s;
}

GroundTruth simulate(const FleetConfig& cfg) {
  cfg.validate();
  GroundTruth truth;
  truth.grid = cfg.grid;
  truth.delta_minutes = cfg.delta_minutes;
  truth.positions.resize(cfg.n_epochs);
  truth.cells.resize(cfg.n_epochs);
  truth.density.assign(cfg.n_epochs, std::vector<std::uint16_t>(cfg.grid.cells(), 0));

  const double tick_seconds = 60.0 * cfg.delta_minutes;
  std::vector<DriverState> drivers(cfg.n_drivers);
  std::vector<Rng> rngs;
  rngs.reserve(cfg.n_drivers);
  for (std::uint32_t i = 0; i < cfg.n_drivers; ++i) {
    rngs.push_back(Rng::seeded(cfg.seed, kMobilityStream + i + 1));
    auto& d = drivers[i];
    d.pos = {cfg.grid.origin_x_m + rngs[i].uniform() * cfg.grid.width_m(),
             cfg.grid.origin_y_m + rngs[i].uniform() * cfg.grid.height_m()};
    d.waypoint = draw_waypoint(cfg, 0, rngs[i]);
    d.speed = rngs[i].uniform(cfg.speed_min_mps, cfg.speed_max_mps);
  }

  for (std::uint32_t t = 0; t < cfg.n_epochs; ++t) {
    if (t > 0) {
      for (std::uint32_t i = 0; i < cfg.n_drivers; ++i) {
        auto& d = drivers[i];
        const double dx = d.waypoint.x_m - d.pos.x_m;
        const double dy = d.waypoint.y_m - d.pos.y_m;
        const double dist = std::hypot(dx, dy);
        const double step = d.speed * tick_seconds;
        if (step >= dist) {
          d.pos = d.waypoint;
          d.waypoint = draw_waypoint(cfg, t, rngs[i]);
          d.speed = rngs[i].uniform(cfg.speed_min_mps, cfg.speed_max_mps);
        } else {
          const double f = step / dist;
          d.pos = {d.pos.x_m + f * dx, d.pos.y_m + f * dy};
        }
      }
    }
    auto& pos = truth.positions[t];
    auto& cells = truth.cells[t];
    pos.reserve(cfg.n_drivers);
    cells.reserve(cfg.n_drivers);
    for (const auto& d : drivers) {
      const CellId c = grid::locate(cfg.grid, d.pos);
      pos.push_back(d.pos);
      cells.push_back(c);
      ++truth.density[t][c];
    }
  }
  return truth;
}

Deployment make_deployment(std::size_t n_drivers, Rng& rng) {
  Deployment dep;
  auto [mpk, msk] = ipfe::setup(group::group_gen(128), n_drivers, rng);
  dep.keys.reserve(n_drivers);
  for (std::size_t i = 1; i <= n_drivers; ++i) {
    dep.keys.push_back(ipfe::derive_driver_key(mpk, msk, static_cast<ipfe::DriverId>(i)));
  }
  dep.dk = ipfe::derive_functional_key(msk, ipfe::ones(n_drivers));
  dep.mpk = std::move(mpk);
  return dep;
}

Rng keygen_rng(std::uint64_t seed) { return Rng::seeded(seed, kKeygenStream); }

std::vector<ipfe::Encryptor> make_encryptors(std::span<const ipfe::DriverKey> keys) {
  std::vector<ipfe::Encryptor> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.emplace_back(k);
  return out;
}

grid::ZeroPool provision_pools(std::span<const ipfe::Encryptor> encryptors, std::size_t per_driver,
                               std::uint64_t seed, unsigned threads) {
  std::vector<std::vector<ipfe::CellCiphertext>> zeros(encryptors.size());
  parallel_for(encryptors.size(), threads, [&](std::size_t i) {
    Rng rng = Rng::seeded(seed, kPoolStream + encryptors[i].driver_id());
    zeros[i] = grid::provision_zero_pool(encryptors[i], per_driver, rng);
  });
  grid::ZeroPool pool;
  for (std::size_t i = 0; i < encryptors.size(); ++i) pool.deposit(encryptors[i].driver_id(), std::move(zeros[i]));
  return pool;
}

PipelineResult run_pipeline(const FleetConfig& cfg, std::span<const ipfe::Encryptor> encryptors,
                            const ipfe::FunctionalKey& dk, grid::ZeroPool pool, const PipelineOptions& opts) {
  cfg.validate();
  if (encryptors.size() != cfg.n_drivers || dk.n_drivers() != cfg.n_drivers) {
    throw LengthMismatch("keys for " + std::to_string(encryptors.size()) + " drivers, config has " +
                         std::to_string(cfg.n_drivers));
  }
  for (std::size_t i = 0; i < encryptors.size(); ++i) {
    if (encryptors[i].driver_id() != i + 1) throw UnknownDriver("encryptors must be ordered by driver id");
  }

  PipelineResult out;
  out.truth = simulate(cfg);
  out.series.grid = cfg.grid;
  out.series.delta_minutes = cfg.delta_minutes;
  out.stats.pool_generated = pool.total();

  const std::uint32_t n_cells = cfg.grid.cells();
  auto make_rng = [&](std::uint64_t stream) { return opts.os_entropy ? Rng::os() : Rng::seeded(cfg.seed, stream); };
  std::vector<Rng> nonce_rngs;
  std::vector<Rng> decision_rngs;
  std::vector<Rng> replenish_rngs;
  for (std::uint32_t i = 1; i <= cfg.n_drivers; ++i) {
    nonce_rngs.push_back(make_rng(kNonceStream + i));
    replenish_rngs.push_back(make_rng(kReplenishStream + i));
    decision_rngs.push_back(Rng::seeded(cfg.seed, kMobilityStream + (1ULL << 31) + i));
  }

  aggregator::Aggregator tmc(dk, cfg.grid, {opts.threads});
  tmc.pool() = std::move(pool);

  std::vector<std::uint8_t> reporting(cfg.n_drivers);
  std::vector<std::optional<grid::Report>> slots(cfg.n_drivers);
  std::vector<std::vector<ipfe::CellCiphertext>> topups(cfg.n_drivers);
  for (std::uint32_t t = 0; t < cfg.n_epochs; ++t) {
    for (std::uint32_t i = 0; i < cfg.n_drivers; ++i) {
      reporting[i] = decision_rngs[i].bernoulli(cfg.report_probability) && cfg.report_probability > 0.0;
    }

    const auto enc_start = Clock::now();
    parallel_for(cfg.n_drivers, opts.threads, [&](std::size_t i) {
      const auto id = static_cast<ipfe::DriverId>(i + 1);
      slots[i].reset();
      if (reporting[i]) {
        slots[i] = grid::build_report(encryptors[i], out.truth.cells[t][i], cfg.k_anon, cfg.grid, t, nonce_rngs[i]);
      }
      topups[i].clear();
      if (opts.replenish) {
        const std::size_t have = tmc.pool().available(id);
        if (have < n_cells) topups[i] = grid::provision_zero_pool(encryptors[i], n_cells - have, replenish_rngs[i]);
      }
    });
    std::vector<grid::Report> reports;
    for (std::uint32_t i = 0; i < cfg.n_drivers; ++i) {
      out.stats.pool_generated += topups[i].size();
      tmc.pool().deposit(i + 1, std::move(topups[i]));
      if (slots[i]) {
        out.stats.report_ciphertexts += slots[i]->entries.size();
        reports.push_back(std::move(*slots[i]));
      }
    }
    out.stats.reports += reports.size();
    out.stats.encrypt_seconds += seconds_since(enc_start);

    const auto dec_start = Clock::now();
    auto agg = tmc.collect(reports, t);
    out.stats.decrypt_seconds += seconds_since(dec_start);
    out.stats.pool_consumed += agg.padded_count;
    out.series.push(std::move(agg));
  }
  return out;
}

PipelineResult run_pipeline(const FleetConfig& cfg, const PipelineOptions& opts) {
  cfg.validate();
  Rng keygen = opts.os_entropy ? Rng::os() : keygen_rng(cfg.seed);
  const Deployment dep = make_deployment(cfg.n_drivers, keygen);
  const auto encryptors = make_encryptors(dep.keys);
  auto pool = provision_pools(encryptors, cfg.grid.cells(), cfg.seed, opts.threads);
  return run_pipeline(cfg, encryptors, dep.dk, std::move(pool), opts);
}

Comparison compare(const DensitySeries& decrypted, const GroundTruth& truth) {
  if (decrypted.size() != truth.n_epochs()) throw LengthMismatch("series and ground truth differ in length");
  Comparison c;
  for (std::size_t t = 0; t < truth.n_epochs(); ++t) {
    const auto& got = decrypted.epochs[t].density;
    const auto& want = truth.density[t];
    if (got.size() != want.size()) throw LengthMismatch("series and ground truth differ in cell count");
    for (std::size_t j = 0; j < want.size(); ++j) {
      ++c.pairs;
      if (got[j] == want[j]) continue;
      ++c.mismatches;
      if (got[j] < want[j]) ++c.undercounts;
      else ++c.overcounts;
    }
  }
  return c;
}

}  // namespace privaflow::sim
