#pragma once

// Grid-cell model of the managed area and driver-side k-anonymous reports.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "privaflow/ipfe.hpp"

namespace privaflow::grid {

using ipfe::CellCiphertext;
using ipfe::CellId;
using ipfe::DriverId;

// rows x cols cells of cell_size_m meters, numbered row-major from the
// origin corner. The box is closed at the origin and open at the far edges.
struct GridSpec {
  std::uint32_t rows = 8;
  std::uint32_t cols = 10;
  double cell_size_m = 1000.0;
  double origin_x_m = 0.0;
  double origin_y_m = 0.0;

  std::uint32_t cells() const { return rows * cols; }
  double width_m() const { return cols * cell_size_m; }
  double height_m() const { return rows * cell_size_m; }
  // Throws ConfigError for empty grids, non-positive cell size, or more
  // cells than fit in a 16-bit cell id.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Position {
  double x_m = 0.0;
  double y_m = 0.0;
};

// Row-major cell containing the position; OutOfBounds outside the box.
CellId locate(const GridSpec& grid, Position pos);

// K ciphertexts from one driver for one epoch, sorted by cell id. Exactly one
// entry encrypts 1; which one is not recoverable from the report's shape.
struct Report {
  DriverId driver_id = 0;
  std::uint32_t epoch = 0;
  std::vector<CellCiphertext> entries;

  std::size_t k() const { return entries.size(); }
};

// Report plus the plaintext of every entry. Only for tests and audits.
struct AuditedReport {
  Report report;
  std::vector<std::pair<CellId, std::uint8_t>> plaintexts;
};

// true_cell plus K-1 distinct dummy cells drawn uniformly without replacement
// from the other L-1 cells, in ascending order.
std::vector<CellId> choose_report_cells(CellId true_cell, std::uint32_t k, const GridSpec& grid, Rng& rng);

Report build_report(const ipfe::Encryptor& enc, CellId true_cell, std::uint32_t k, const GridSpec& grid,
                    std::uint32_t epoch, Rng& rng);
AuditedReport build_report_audited(const ipfe::Encryptor& enc, CellId true_cell, std::uint32_t k,
                                   const GridSpec& grid, std::uint32_t epoch, Rng& rng);
// Report over a given cell set; true_cell must be a member.
AuditedReport build_report_for_cells(const ipfe::Encryptor& enc, std::span<const CellId> cells,
                                     CellId true_cell, std::uint32_t epoch, Rng& rng);

// Wire: [u32 driver_id][u32 epoch][u16 K] then K ciphertext records.
std::vector<std::uint8_t> serialize(const Report& report);
Report deserialize_report(std::span<const std::uint8_t> bytes);

// Encryptions of zero a driver deposits with the aggregator so that cells
// missing from its reports can be filled in.
std::vector<CellCiphertext> provision_zero_pool(const ipfe::Encryptor& enc, std::size_t count, Rng& rng);

// Aggregator-side store of pooled zeros. Each ciphertext is handed out once.
// Not synchronized: one consumer at a time.
class ZeroPool {
 public:
  void deposit(DriverId driver, std::vector<CellCiphertext> zeros);
  std::optional<CellCiphertext> take(DriverId driver);
  std::size_t available(DriverId driver) const;
  std::size_t total() const;

 private:
  std::unordered_map<DriverId, std::deque<CellCiphertext>> queues_;
};

// Pool file: [u8 version][u32 driver_id][u32 count] then count ciphertexts.
std::vector<std::uint8_t> serialize_pool(DriverId driver, std::span<const CellCiphertext> zeros);
std::pair<DriverId, std::vector<CellCiphertext>> deserialize_pool(std::span<const std::uint8_t> bytes);

}  // namespace privaflow::grid
