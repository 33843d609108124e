#include "privaflow/grid_report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "privaflow/errors.hpp"

namespace privaflow::grid {

void GridSpec::validate() const {
  if (rows == 0 || cols == 0) throw ConfigError("grid must have at least one row and one column");
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) throw ConfigError("cell size must be positive");
  if (std::uint64_t{rows} * cols >= ipfe::kUnassignedCell) {
    throw ConfigError("grid has too many cells for 16-bit cell ids");
  }
}

CellId locate(const GridSpec& grid, Position pos) {
  const double x = pos.x_m - grid.origin_x_m;
  const double y = pos.y_m - grid.origin_y_m;
  if (!(x >= 0.0 && x < grid.width_m() && y >= 0.0 && y < grid.height_m())) {
    throw OutOfBounds("position (" + std::to_string(pos.x_m) + ", " + std::to_string(pos.y_m) +
                      ") is outside the grid");
  }
  const auto col = std::min<std::uint32_t>(static_cast<std::uint32_t>(std::floor(x / grid.cell_size_m)), grid.cols - 1);
  const auto row = std::min<std::uint32_t>(static_cast<std::uint32_t>(std::floor(y / grid.cell_size_m)), grid.rows - 1);
  return static_cast<CellId>(row * grid.cols + col);
}

std::vector<CellId> choose_report_cells(CellId true_cell, std::uint32_t k, const GridSpec& grid, Rng& rng) {
  const std::uint32_t n_cells = grid.cells();
  if (true_cell >= n_cells) throw InvalidCell("cell " + std::to_string(true_cell) + " is not in the grid");
  if (k == 0 || k > n_cells) {
    throw InvalidK("k-anonymity parameter " + std::to_string(k) + " must be in [1, " + std::to_string(n_cells) +
                   "]");
  }
  std::vector<CellId> others;
  others.reserve(n_cells - 1);
  for (std::uint32_t c = 0; c < n_cells; ++c) {
    if (c != true_cell) others.push_back(static_cast<CellId>(c));
  }
  std::vector<CellId> cells;
  cells.reserve(k);
  std::sample(others.begin(), others.end(), std::back_inserter(cells), k - 1, rng);
  cells.push_back(true_cell);
  std::sort(cells.begin(), cells.end());
  return cells;
}

AuditedReport build_report_for_cells(const ipfe::Encryptor& enc, std::span<const CellId> cells, CellId true_cell,
                                     std::uint32_t epoch, Rng& rng) {
  std::vector<CellId> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidCell("report cells must be distinct");
  }
  if (!std::binary_search(sorted.begin(), sorted.end(), true_cell)) {
    throw InvalidCell("true cell is not among the report cells");
  }
  AuditedReport out;
  out.report.driver_id = enc.driver_id();
  out.report.epoch = epoch;
  out.report.entries.reserve(sorted.size());
  out.plaintexts.reserve(sorted.size());
  for (CellId c : sorted) {
    const std::uint8_t bit = c == true_cell ? 1 : 0;
    out.report.entries.push_back(enc.encrypt(bit, rng, c));
    out.plaintexts.emplace_back(c, bit);
  }
  return out;
}

AuditedReport build_report_audited(const ipfe::Encryptor& enc, CellId true_cell, std::uint32_t k,
                                   const GridSpec& grid, std::uint32_t epoch, Rng& rng) {
  const auto cells = choose_report_cells(true_cell, k, grid, rng);
  return build_report_for_cells(enc, cells, true_cell, epoch, rng);
}

Report build_report(const ipfe::Encryptor& enc, CellId true_cell, std::uint32_t k, const GridSpec& grid,
                    std::uint32_t epoch, Rng& rng) {
  return build_report_audited(enc, true_cell, k, grid, epoch, rng).report;
}

std::vector<std::uint8_t> serialize(const Report& report) {
  wire::Writer w;
  w.u32(report.driver_id);
  w.u32(report.epoch);
  w.u16(static_cast<std::uint16_t>(report.entries.size()));
  for (const auto& ct : report.entries) ipfe::write_ciphertext(w, ct);
  return std::move(w).take();
}

Report deserialize_report(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  Report report;
  report.driver_id = r.u32();
  report.epoch = r.u32();
  const std::uint16_t k = r.u16();
  if (r.remaining() != std::size_t{k} * ipfe::kCellCiphertextWireLen) throw DecodeError("report: length mismatch");
  report.entries.reserve(k);
  for (std::uint16_t i = 0; i < k; ++i) {
    auto ct = ipfe::read_ciphertext(r);
    if (ct.driver_id != report.driver_id) throw DecodeError("report: ciphertext from a different driver");
    if (!report.entries.empty() && ct.cell_id <= report.entries.back().cell_id) {
      throw DecodeError("report: entries not strictly sorted by cell id");
    }
    report.entries.push_back(ct);
  }
  return report;
}

std::vector<CellCiphertext> provision_zero_pool(const ipfe::Encryptor& enc, std::size_t count, Rng& rng) {
  std::vector<CellCiphertext> zeros;
  zeros.reserve(count);
  for (std::size_t i = 0; i < count; ++i) zeros.push_back(enc.encrypt(0, rng));
  return zeros;
}

void ZeroPool::deposit(DriverId driver, std::vector<CellCiphertext> zeros) {
  auto& q = queues_[driver];
  for (auto& ct : zeros) {
    if (ct.driver_id != driver) throw UnknownDriver("pool deposit contains another driver's ciphertext");
    q.push_back(std::move(ct));
  }
}

std::optional<CellCiphertext> ZeroPool::take(DriverId driver) {
  auto it = queues_.find(driver);
  if (it == queues_.end() || it->second.empty()) return std::nullopt;
  CellCiphertext ct = std::move(it->second.front());
  it->second.pop_front();
  return ct;
}

std::size_t ZeroPool::available(DriverId driver) const {
  auto it = queues_.find(driver);
  return it == queues_.end() ? 0 : it->second.size();
}

std::size_t ZeroPool::total() const {
  std::size_t n = 0;
  for (const auto& [id, q] : queues_) n += q.size();
  return n;
}

std::vector<std::uint8_t> serialize_pool(DriverId driver, std::span<const CellCiphertext> zeros) {
  wire::Writer w;
  w.u8(wire::kVersion);
  w.u32(driver);
  w.u32(static_cast<std::uint32_t>(zeros.size()));
  for (const auto& ct : zeros) ipfe::write_ciphertext(w, ct);
  return std::move(w).take();
}

std::pair<DriverId, std::vector<CellCiphertext>> deserialize_pool(std::span<const std::uint8_t> bytes) {
  wire::Reader r(bytes);
  r.expect_version("zero pool");
  const DriverId driver = r.u32();
  const std::uint32_t count = r.u32();
  if (r.remaining() != std::size_t{count} * ipfe::kCellCiphertextWireLen) throw DecodeError("zero pool: length mismatch");
  std::vector<CellCiphertext> zeros;
  zeros.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    zeros.push_back(ipfe::read_ciphertext(r));
    if (zeros.back().driver_id != driver) throw DecodeError("zero pool: ciphertext from a different driver");
  }
  return {driver, std::move(zeros)};
}

}  // namespace privaflow::grid
