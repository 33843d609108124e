#include "privaflow/aggregator.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"
#include "privaflow/errors.hpp"
#include "privaflow/parallel.hpp"

namespace privaflow::aggregator {

using ipfe::CellCiphertext;
using ipfe::DriverId;

EpochAggregate collect_epoch(std::span<const Report> reports, const ipfe::FunctionalKey& dk, ZeroPool& pool,
                             std::size_t n_drivers, std::size_t n_cells, std::uint32_t epoch,
                             const group::DlogTable& table, const CollectOptions& opts) {
  if (dk.n_drivers() != n_drivers) {
    throw LengthMismatch("functional key covers " + std::to_string(dk.n_drivers()) + " drivers, expected " +
                         std::to_string(n_drivers));
  }
  if (n_drivers > std::numeric_limits<std::uint16_t>::max()) throw ConfigError("too many drivers for u16 densities");

  // slot[j * n + (i-1)] is driver i's ciphertext for cell j
  std::vector<const CellCiphertext*> slot(n_cells * n_drivers, nullptr);
  std::vector<const Report*> by_driver(n_drivers, nullptr);
  for (const auto& rep : reports) {
    if (rep.driver_id == 0 || rep.driver_id > n_drivers) {
      throw UnknownDriver("report from unknown driver " + std::to_string(rep.driver_id));
    }
    if (rep.epoch != epoch) {
      throw LateReport("report from driver " + std::to_string(rep.driver_id) + " is for epoch " +
                       std::to_string(rep.epoch) + ", collecting epoch " + std::to_string(epoch));
    }
    auto& seen = by_driver[rep.driver_id - 1];
    if (seen != nullptr) throw DuplicateReport("two reports from driver " + std::to_string(rep.driver_id));
    seen = &rep;
    for (const auto& ct : rep.entries) {
      if (ct.cell_id >= n_cells) throw InvalidCell("report names cell " + std::to_string(ct.cell_id));
      if (ct.driver_id != rep.driver_id) throw UnknownDriver("report entry carries another driver's id");
      auto& s = slot[ct.cell_id * n_drivers + (rep.driver_id - 1)];
      if (s != nullptr) throw InvalidCell("report lists cell " + std::to_string(ct.cell_id) + " twice");
      s = &ct;
    }
  }

  for (std::size_t i = 0; i < n_drivers; ++i) {
    const std::size_t reported = by_driver[i] ? by_driver[i]->entries.size() : 0;
    const std::size_t demand = n_cells - reported;
    const auto id = static_cast<DriverId>(i + 1);
    if (pool.available(id) < demand) {
      throw PoolExhausted("zero pool for driver " + std::to_string(id) + " holds " +
                          std::to_string(pool.available(id)) + " ciphertexts but epoch " + std::to_string(epoch) +
                          " needs " + std::to_string(demand) + "; provision at least " + std::to_string(n_cells) +
                          " per driver per epoch");
    }
  }

  std::vector<CellCiphertext> padding;
  padding.reserve(n_cells * n_drivers - [&] {
    std::size_t r = 0;
    for (auto* rep : by_driver) r += rep ? rep->entries.size() : 0;
    return r;
  }());
  for (std::size_t j = 0; j < n_cells; ++j) {
    for (std::size_t i = 0; i < n_drivers; ++i) {
      if (slot[j * n_drivers + i] == nullptr) padding.push_back(*pool.take(static_cast<DriverId>(i + 1)));
    }
  }
  {
    std::size_t next = 0;
    for (auto& s : slot) {
      if (s == nullptr) s = &padding[next++];
    }
  }

  EpochAggregate agg;
  agg.epoch = epoch;
  agg.padded_count = static_cast<std::uint32_t>(padding.size());
  agg.density.assign(n_cells, 0);
  parallel_for(n_cells, opts.threads, [&](std::size_t j) {
    std::vector<CellCiphertext> cts;
    cts.reserve(n_drivers);
    for (std::size_t i = 0; i < n_drivers; ++i) cts.push_back(*slot[j * n_drivers + i]);
    agg.density[j] = static_cast<std::uint16_t>(ipfe::aggregate_decrypt(dk, cts, table));
  });
  return agg;
}

EpochAggregate collect_epoch(std::span<const Report> reports, const ipfe::FunctionalKey& dk, ZeroPool& pool,
                             std::size_t n_drivers, std::size_t n_cells, std::uint32_t epoch) {
  return collect_epoch(reports, dk, pool, n_drivers, n_cells, epoch, group::DlogTable(n_drivers));
}

Aggregator::Aggregator(ipfe::FunctionalKey dk, GridSpec grid, CollectOptions opts)
    : dk_(std::move(dk)), grid_(grid), opts_(opts), table_(dk_.n_drivers()) {
  grid_.validate();
}

EpochAggregate Aggregator::collect(std::span<const Report> reports, std::uint32_t epoch) {
  return collect_epoch(reports, dk_, pool_, dk_.n_drivers(), grid_.cells(), epoch, table_, opts_);
}

// ---- series ----

namespace {

void check_next(const DensitySeries& series, const EpochAggregate& agg) {
  if (agg.density.size() != series.grid.cells()) {
    throw LengthMismatch("aggregate has " + std::to_string(agg.density.size()) + " cells, series has " +
                         std::to_string(series.grid.cells()));
  }
  if (!series.epochs.empty() && agg.epoch != series.epochs.back().epoch + 1) {
    throw EpochGap("epoch " + std::to_string(agg.epoch) + " does not follow epoch " +
                   std::to_string(series.epochs.back().epoch));
  }
}

}  // namespace

void DensitySeries::push(EpochAggregate agg) {
  check_next(*this, agg);
  epochs.push_back(std::move(agg));
}

DensitySeries append(const DensitySeries& series, EpochAggregate agg) {
  DensitySeries out = series;
  out.push(std::move(agg));
  return out;
}

DensityMatrix<std::uint16_t> density_matrix(const DensitySeries& series) {
  const auto n_cells = static_cast<Eigen::Index>(series.grid.cells());
  DensityMatrix<std::uint16_t> m(n_cells, static_cast<Eigen::Index>(series.size()));
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const auto& d = series.epochs[static_cast<std::size_t>(k)].density;
    m.col(k) = Eigen::Map<const Eigen::Matrix<std::uint16_t, Eigen::Dynamic, 1>>(d.data(), n_cells);
  }
  return m;
}

void write_series(const DensitySeries& series, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path, const std::string& source) {
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "epoch";
  for (std::uint32_t j = 0; j < series.grid.cells(); ++j) csv << ",cell_" << j;
  csv << '\n';
  for (const auto& e : series.epochs) {
    csv << e.epoch;
    for (auto v : e.density) csv << ',' << v;
    csv << '\n';
  }
  if (!csv) throw IoError("failed writing " + csv_path.string());

  nlohmann::ordered_json j;
  j["format"] = "privaflow-density-series";
  j["version"] = 1;
  j["source"] = source;
  j["grid"] = {{"rows", series.grid.rows},
               {"cols", series.grid.cols},
               {"cell_size_m", series.grid.cell_size_m},
               {"origin_x_m", series.grid.origin_x_m},
               {"origin_y_m", series.grid.origin_y_m}};
  j["delta_minutes"] = series.delta_minutes;
  j["n_epochs"] = series.size();
  j["first_epoch"] = series.empty() ? 0 : series.epochs.front().epoch;
  j["padded_counts"] = [&] {
    std::vector<std::uint32_t> v;
    for (const auto& e : series.epochs) v.push_back(e.padded_count);
    return v;
  }();
  std::ofstream js(json_path);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << j.dump(2) << '\n';
  if (!js) throw IoError("failed writing " + json_path.string());
}

DensitySeries read_series(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  std::ifstream js(json_path);
  if (!js) throw IoError("cannot read " + json_path.string());
  nlohmann::json j;
  try {
    js >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(json_path.string() + ": " + e.what());
  }
  DensitySeries series;
  try {
    const auto& g = j.at("grid");
    series.grid.rows = g.at("rows").get<std::uint32_t>();
    series.grid.cols = g.at("cols").get<std::uint32_t>();
    series.grid.cell_size_m = g.at("cell_size_m").get<double>();
    series.grid.origin_x_m = g.value("origin_x_m", 0.0);
    series.grid.origin_y_m = g.value("origin_y_m", 0.0);
    series.delta_minutes = j.at("delta_minutes").get<std::uint32_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(json_path.string() + ": " + e.what());
  }
  std::vector<std::uint32_t> padded;
  if (j.contains("padded_counts")) padded = j["padded_counts"].get<std::vector<std::uint32_t>>();

  std::ifstream csv(csv_path);
  if (!csv) throw IoError("cannot read " + csv_path.string());
  std::string line;
  std::getline(csv, line);  // header
  const std::size_t n_cells = series.grid.cells();
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    EpochAggregate e;
    std::getline(ss, field, ',');
    e.epoch = static_cast<std::uint32_t>(std::stoul(field));
    while (std::getline(ss, field, ',')) e.density.push_back(static_cast<std::uint16_t>(std::stoul(field)));
    if (e.density.size() != n_cells) throw IoError(csv_path.string() + ": row has wrong number of cells");
    if (series.size() < padded.size()) e.padded_count = padded[series.size()];
    series.push(std::move(e));
  }
  return series;
}

}  // namespace privaflow::aggregator
