#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "privaflow/errors.hpp"
#include "privaflow/grid_report.hpp"

using namespace privaflow;
using namespace privaflow::grid;

namespace {

// Brute force: the cell whose origin-side corner is the closest corner not
// beyond the point on either axis.
std::optional<CellId> nearest_corner(const GridSpec& g, Position p) {
  std::optional<CellId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::uint32_t r = 0; r < g.rows; ++r) {
    for (std::uint32_t c = 0; c < g.cols; ++c) {
      const double x0 = g.origin_x_m + c * g.cell_size_m, y0 = g.origin_y_m + r * g.cell_size_m;
      if (x0 > p.x_m || y0 > p.y_m || p.x_m >= x0 + g.cell_size_m || p.y_m >= y0 + g.cell_size_m) continue;
      const double d = std::hypot(p.x_m - x0, p.y_m - y0);
      if (d < best_d) best_d = d, best = static_cast<CellId>(r * g.cols + c);
    }
  }
  return best;
}

struct Driver {
  ipfe::MasterPublic mpk;
  ipfe::MasterSecret msk;
  std::optional<ipfe::Encryptor> enc;
};

Driver single_driver(std::uint64_t seed) {
  Rng rng = Rng::seeded(seed);
  auto [mpk, msk] = ipfe::setup(group::group_gen(128), 1, rng);
  Driver d{std::move(mpk), std::move(msk), std::nullopt};
  d.enc.emplace(ipfe::derive_driver_key(d.mpk, d.msk, 1));
  return d;
}

}  // namespace

TEST(Locate, Examples) {
  const GridSpec g{2, 2, 1000.0};
  EXPECT_EQ(locate(g, {0, 0}), 0);
  EXPECT_EQ(locate(g, {1500, 500}), 1);
  EXPECT_EQ(locate(g, {500, 1500}), 2);
  EXPECT_EQ(locate(g, {1000, 1000}), 3);  // shared corner goes to the floor cell
  EXPECT_EQ(locate(g, {1999.999, 1999.999}), 3);
  EXPECT_THROW(locate(g, {2000.0, 0}), OutOfBounds);
  EXPECT_THROW(locate(g, {0, 2000.0}), OutOfBounds);
  EXPECT_THROW(locate(g, {-0.001, 0}), OutOfBounds);
  EXPECT_THROW(locate(g, {std::nan(""), 0}), OutOfBounds);
}

TEST(Locate, AgreesWithNearestCornerOracle) {
  const GridSpec g{7, 9, 250.0, -300.0, 1200.0};
  Rng rng = Rng::seeded(1);
  for (int i = 0; i < 20000; ++i) {
    // spill past the box on every side, and hit gridlines often
    double x = rng.uniform(g.origin_x_m - 100, g.origin_x_m + g.width_m() + 100);
    double y = rng.uniform(g.origin_y_m - 100, g.origin_y_m + g.height_m() + 100);
    if (i % 4 == 0) x = g.origin_x_m + std::round((x - g.origin_x_m) / g.cell_size_m) * g.cell_size_m;
    if (i % 6 == 0) y = g.origin_y_m + std::round((y - g.origin_y_m) / g.cell_size_m) * g.cell_size_m;
    const auto want = nearest_corner(g, {x, y});
    if (want) {
      ASSERT_EQ(locate(g, {x, y}), *want) << x << "," << y;
    } else {
      ASSERT_THROW(locate(g, {x, y}), OutOfBounds) << x << "," << y;
    }
  }
}

TEST(GridSpecValidation, RejectsDegenerateGrids) {
  EXPECT_THROW((GridSpec{0, 3, 1.0}.validate()), ConfigError);
  EXPECT_THROW((GridSpec{3, 3, 0.0}.validate()), ConfigError);
  EXPECT_THROW((GridSpec{256, 256, 1.0}.validate()), ConfigError);
  EXPECT_NO_THROW((GridSpec{}.validate()));
  EXPECT_EQ(GridSpec{}.cells(), 80u);
}

TEST(ReportCells, EdgeValuesOfK) {
  const GridSpec g{5, 8, 1000.0};
  Rng rng = Rng::seeded(2);
  EXPECT_EQ(choose_report_cells(13, 1, g, rng), std::vector<CellId>{13});
  const auto all = choose_report_cells(13, 40, g, rng);
  ASSERT_EQ(all.size(), 40u);
  for (CellId j = 0; j < 40; ++j) EXPECT_EQ(all[j], j);
  EXPECT_THROW(choose_report_cells(13, 41, g, rng), InvalidK);
  EXPECT_THROW(choose_report_cells(13, 0, g, rng), InvalidK);
  EXPECT_THROW(choose_report_cells(40, 5, g, rng), InvalidCell);
}

TEST(ReportCells, DummiesAreUniformOverOtherCells) {
  const GridSpec g{5, 8, 1000.0};  // L = 40
  const CellId true_cell = 17;
  const int trials = 10000;
  Rng rng = Rng::seeded(3);
  std::vector<int> hits(40, 0);
  for (int t = 0; t < trials; ++t) {
    const auto cells = choose_report_cells(true_cell, 5, g, rng);
    ASSERT_EQ(cells.size(), 5u);
    ASSERT_TRUE(std::is_sorted(cells.begin(), cells.end()));
    ASSERT_EQ(std::set<CellId>(cells.begin(), cells.end()).size(), 5u);
    ASSERT_TRUE(std::binary_search(cells.begin(), cells.end(), true_cell));
    for (auto c : cells) ++hits[c];
  }
  EXPECT_EQ(hits[true_cell], trials);
  const double p = 4.0 / 39.0;
  const double sigma = std::sqrt(trials * p * (1 - p));
  for (CellId c = 0; c < 40; ++c) {
    if (c == true_cell) continue;
    EXPECT_NEAR(hits[c], trials * p, 3 * sigma) << "cell " << c;
  }
}

TEST(BuildReport, ExactlyOneEntryEncryptsOne) {
  auto d = single_driver(4);
  const GridSpec g{4, 5, 1000.0};
  Rng rng = Rng::seeded(5);
  for (std::uint32_t k : {1u, 3u, 20u}) {
    const auto a = build_report_audited(*d.enc, 7, k, g, 42, rng);
    EXPECT_EQ(a.report.k(), k);
    EXPECT_EQ(a.report.epoch, 42u);
    EXPECT_EQ(a.report.driver_id, 1u);
    int ones = 0;
    for (std::size_t e = 0; e < k; ++e) {
      EXPECT_EQ(a.plaintexts[e].first, a.report.entries[e].cell_id);
      ones += a.plaintexts[e].second;
      if (a.plaintexts[e].second) EXPECT_EQ(a.plaintexts[e].first, 7);
    }
    EXPECT_EQ(ones, 1);
  }
}

TEST(BuildReport, EntriesDecryptToTheirPlaintexts) {
  auto d = single_driver(6);
  const auto dk = ipfe::derive_functional_key(d.msk, ipfe::ones(1));
  const GridSpec g{4, 5, 1000.0};
  Rng rng = Rng::seeded(7);
  const auto a = build_report_audited(*d.enc, 11, 6, g, 0, rng);
  for (std::size_t e = 0; e < a.report.k(); ++e) {
    const std::vector one{a.report.entries[e]};
    EXPECT_EQ(ipfe::aggregate_decrypt(dk, one, 1), a.plaintexts[e].second);
  }
}

TEST(BuildReport, ShapeDoesNotDependOnWhichEntryIsTrue) {
  auto d = single_driver(8);
  const std::vector<CellId> cells{2, 9, 14, 30, 31};
  std::optional<std::vector<std::uint8_t>> skeleton;
  for (auto true_cell : cells) {
    Rng rng = Rng::seeded(9);
    const auto a = build_report_for_cells(*d.enc, cells, true_cell, 3, rng);
    auto bytes = serialize(a.report);
    // blank the group elements; everything else must be identical
    for (std::size_t e = 0; e < cells.size(); ++e) {
      const std::size_t base = 10 + e * ipfe::kCellCiphertextWireLen + 7;
      std::fill_n(bytes.begin() + static_cast<std::ptrdiff_t>(base), 96, 0);
    }
    if (!skeleton) skeleton = bytes;
    EXPECT_EQ(bytes, *skeleton) << "true cell " << true_cell;
  }
  Rng rng = Rng::seeded(9);
  EXPECT_THROW(build_report_for_cells(*d.enc, cells, 3, 0, rng), InvalidCell);
  const std::vector<CellId> dup{1, 1, 2};
  EXPECT_THROW(build_report_for_cells(*d.enc, dup, 1, 0, rng), InvalidCell);
}

TEST(ReportWire, RoundTripAndValidation) {
  auto d = single_driver(10);
  Rng rng = Rng::seeded(11);
  const auto rep = build_report(*d.enc, 3, 4, GridSpec{}, 77, rng);
  const auto bytes = serialize(rep);
  ASSERT_EQ(bytes.size(), 10 + 4 * ipfe::kCellCiphertextWireLen);
  EXPECT_EQ(bytes[4], 77);
  EXPECT_EQ(bytes[8], 4);
  const auto back = deserialize_report(bytes);
  EXPECT_EQ(serialize(back), bytes);

  auto swapped = rep;
  std::swap(swapped.entries[0], swapped.entries[1]);
  EXPECT_THROW(deserialize_report(serialize(swapped)), DecodeError);
  EXPECT_THROW(deserialize_report(std::span(bytes).first(bytes.size() - 1)), DecodeError);
}

TEST(ZeroPoolTest, EntriesAreDistinctZeros) {
  auto d = single_driver(12);
  const auto dk = ipfe::derive_functional_key(d.msk, ipfe::ones(1));
  Rng rng = Rng::seeded(13);
  const auto zeros = provision_zero_pool(*d.enc, 50, rng);
  ASSERT_EQ(zeros.size(), 50u);
  std::set<std::vector<std::uint8_t>> seen;
  for (const auto& z : zeros) {
    seen.insert(ipfe::serialize(z));
    const std::vector one{z};
    EXPECT_EQ(ipfe::aggregate_decrypt(dk, one, 1), 0u);
  }
  EXPECT_EQ(seen.size(), 50u);
}

TEST(ZeroPoolTest, QueueSemantics) {
  auto d = single_driver(14);
  Rng rng = Rng::seeded(15);
  auto zeros = provision_zero_pool(*d.enc, 3, rng);
  ZeroPool pool;
  EXPECT_EQ(pool.available(1), 0u);
  EXPECT_FALSE(pool.take(1).has_value());
  pool.deposit(1, zeros);
  EXPECT_EQ(pool.available(1), 3u);
  EXPECT_EQ(pool.total(), 3u);
  for (const auto& z : zeros) EXPECT_EQ(ipfe::serialize(*pool.take(1)), ipfe::serialize(z));
  EXPECT_FALSE(pool.take(1).has_value());
  EXPECT_THROW(pool.deposit(2, zeros), UnknownDriver);
}

TEST(ZeroPoolTest, FileRoundTrip) {
  auto d = single_driver(16);
  Rng rng = Rng::seeded(17);
  const auto zeros = provision_zero_pool(*d.enc, 4, rng);
  const auto bytes = serialize_pool(1, zeros);
  ASSERT_EQ(bytes.size(), 9 + 4 * ipfe::kCellCiphertextWireLen);
  const auto [id, back] = deserialize_pool(bytes);
  EXPECT_EQ(id, 1u);
  ASSERT_EQ(back.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(ipfe::serialize(back[i]), ipfe::serialize(zeros[i]));
  EXPECT_THROW(deserialize_pool(std::span(bytes).first(bytes.size() - 5)), DecodeError);
}
