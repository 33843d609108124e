#pragma once

// Traffic-management-center side: per-epoch collection and decryption of
// driver reports into per-cell densities, and the resulting time series.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "privaflow/grid_report.hpp"
#include "privaflow/ipfe.hpp"

namespace privaflow::aggregator {

using grid::GridSpec;
using grid::Report;
using grid::ZeroPool;

// Cells x epochs matrix of driver counts.
template <typename T>
using DensityMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

struct EpochAggregate {
  std::uint32_t epoch = 0;
  std::vector<std::uint16_t> density;  // one count per cell
  std::uint32_t padded_count = 0;      // pool ciphertexts consumed

  friend bool operator==(const EpochAggregate&, const EpochAggregate&) = default;
};

struct CollectOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
};

// Decrypts one epoch. Every (driver, cell) pair absent from the reports is
// filled with one of that driver's pooled zeros, then each cell is decrypted
// over all drivers with bound n_drivers. Nothing is consumed from the pool
// unless the whole epoch can be padded.
//
// Errors: UnknownDriver, DuplicateReport, LateReport (report.epoch != epoch),
// InvalidCell, PoolExhausted, LengthMismatch (dk size), NotInRange.
EpochAggregate collect_epoch(std::span<const Report> reports, const ipfe::FunctionalKey& dk, ZeroPool& pool,
                             std::size_t n_drivers, std::size_t n_cells, std::uint32_t epoch,
                             const group::DlogTable& table, const CollectOptions& opts = {});

// Convenience form that builds the lookup table for bound n_drivers.
EpochAggregate collect_epoch(std::span<const Report> reports, const ipfe::FunctionalKey& dk, ZeroPool& pool,
                             std::size_t n_drivers, std::size_t n_cells, std::uint32_t epoch);

// Holds the functional key, the zero pool and the lookup table across epochs.
class Aggregator {
 public:
  Aggregator(ipfe::FunctionalKey dk, GridSpec grid, CollectOptions opts = {});

  EpochAggregate collect(std::span<const Report> reports, std::uint32_t epoch);
  ZeroPool& pool() { return pool_; }
  const ZeroPool& pool() const { return pool_; }
  std::size_t n_drivers() const { return dk_.n_drivers(); }
  const GridSpec& grid() const { return grid_; }

 private:
  ipfe::FunctionalKey dk_;
  GridSpec grid_;
  CollectOptions opts_;
  group::DlogTable table_;
  ZeroPool pool_;
};

struct DensitySeries {
  GridSpec grid;
  std::uint32_t delta_minutes = 5;
  std::vector<EpochAggregate> epochs;

  std::size_t size() const { return epochs.size(); }
  bool empty() const { return epochs.empty(); }
  // In-place append with the same checks as the free append().
  void push(EpochAggregate agg);

  friend bool operator==(const DensitySeries&, const DensitySeries&) = default;
};

// New series with agg appended; the input is untouched. Throws EpochGap
// unless agg.epoch is one past the last epoch (any epoch if empty), and
// LengthMismatch if agg has the wrong number of cells.
DensitySeries append(const DensitySeries& series, EpochAggregate agg);

// cells x epochs, column k is series.epochs[k].
DensityMatrix<std::uint16_t> density_matrix(const DensitySeries& series);

// CSV `epoch,cell_0,...,cell_{L-1}` plus a JSON sidecar with the grid and
// the epoch length. `source` tags where the counts came from.
void write_series(const DensitySeries& series, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path, const std::string& source = "decrypted");
DensitySeries read_series(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

}  // namespace privaflow::aggregator
