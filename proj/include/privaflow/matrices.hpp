#pragma once

// Spatiotemporal input windows for the forecaster: the current, daily and
// weekly density matrices around a target epoch, their future labels, and the
// on-disk dataset that carries them across to the training side.

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "privaflow/aggregator.hpp"

namespace privaflow::matrices {

using aggregator::DensitySeries;
using grid::GridSpec;

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

struct WindowConfig {
  std::uint32_t n = 15;
  std::uint32_t delta_minutes = 5;
  std::vector<std::uint32_t> horizons{1, 3, 6, 12};

  // Throws ConfigError unless n >= 1, horizons are positive and distinct, and
  // delta_minutes divides a day.
  void validate() const;
  std::uint32_t day_epochs() const { return 24 * 60 / delta_minutes; }
  std::uint32_t week_epochs() const { return 7 * day_epochs(); }
  std::uint32_t max_horizon() const;
};

// One training sample. Columns run forward in time; `daily` and `weekly` are
// zero-sized when the series does not reach back far enough.
template <typename T>
struct FlowMatrices {
  Matrix<T> current;  // L x (n+1), epochs t-n .. t
  Matrix<T> daily;    // L x (2n+1), epochs t-day-n .. t-day+n
  Matrix<T> weekly;   // L x (2n+1), epochs t-week-n .. t-week+n
  Matrix<T> labels;   // L x |horizons|, column k is epoch t + horizons[k]
  std::uint32_t target_epoch = 0;
  bool has_daily = false;
  bool has_weekly = false;
};

// Lazily materialized windows over a series. Sample i is built on demand, so
// a multi-week series need not be expanded in memory at once.
class WindowStream {
 public:
  // Throws SeriesTooShort if no target epoch admits a current window and all
  // labels, ConfigError if cfg is invalid or disagrees with the series.
  WindowStream(const DensitySeries& series, WindowConfig cfg);

  std::size_t size() const { return targets_.size(); }
  const WindowConfig& config() const { return cfg_; }
  const GridSpec& grid() const { return grid_; }
  std::uint32_t first_epoch() const { return first_epoch_; }
  // Series epoch of sample i's target.
  std::uint32_t target_epoch(std::size_t i) const { return first_epoch_ + targets_[i]; }
  bool has_daily(std::size_t i) const;
  bool has_weekly(std::size_t i) const;

  template <typename T>
  FlowMatrices<T> at(std::size_t i) const;

  // Keeps only samples that carry both daily and weekly windows.
  WindowStream complete_only() const;

 private:
  WindowStream() = default;
  WindowConfig cfg_;
  GridSpec grid_;
  std::uint32_t first_epoch_ = 0;
  Matrix<std::uint16_t> density_;      // L x E
  std::vector<std::uint32_t> targets_;  // column indices into density_
};

template <typename T>
FlowMatrices<T> WindowStream::at(std::size_t i) const {
  const auto t = static_cast<Eigen::Index>(targets_.at(i));
  const auto n = static_cast<Eigen::Index>(cfg_.n);
  FlowMatrices<T> s;
  s.target_epoch = target_epoch(i);
  s.current = density_.middleCols(t - n, n + 1).template cast<T>();
  s.has_daily = has_daily(i);
  s.has_weekly = has_weekly(i);
  if (s.has_daily) s.daily = density_.middleCols(t - cfg_.day_epochs() - n, 2 * n + 1).template cast<T>();
  if (s.has_weekly) s.weekly = density_.middleCols(t - cfg_.week_epochs() - n, 2 * n + 1).template cast<T>();
  s.labels.resize(density_.rows(), static_cast<Eigen::Index>(cfg_.horizons.size()));
  for (std::size_t k = 0; k < cfg_.horizons.size(); ++k) {
    s.labels.col(static_cast<Eigen::Index>(k)) = density_.col(t + cfg_.horizons[k]).template cast<T>();
  }
  return s;
}

WindowStream build_windows(const DensitySeries& series, const WindowConfig& cfg = {});

struct SplitFractions {
  double train = 0.7;
  double val = 0.1;
  double test = 0.2;
};

// [begin, end) sample indices of the three chronological splits.
struct SplitBounds {
  std::array<std::size_t, 4> edges{};  // train = [e0,e1), val = [e1,e2), test = [e2,e3)
  std::size_t count(int k) const { return edges[k + 1] - edges[k]; }
};

// Throws ConfigError if the fractions are negative or do not sum to 1,
// EmptySplit if any split would receive no samples.
SplitBounds split_counts(std::size_t n_samples, const SplitFractions& f);

inline constexpr std::array<const char*, 3> kSplitNames{"train", "val", "test"};
inline constexpr std::array<char, 4> kDatasetMagic{'P', 'F', 'D', 'S'};
inline constexpr std::uint32_t kDatasetVersion = 1;

struct ExportSummary {
  SplitBounds bounds;
  std::array<std::string, 3> sha256;  // hex digest per split file
  std::filesystem::path manifest;
};

// Writes train.bin, val.bin, test.bin and manifest.json into `dir`.
//
// Split file layout, all little-endian:
//   char[4] "PFDS", u32 version, u32 L, u32 n, u32 count, u32 n_horizons,
//   u32 horizons[n_horizons]
//   then per sample: u32 target_epoch, u8 has_daily, u8 has_weekly,
//   f32 current[L][n+1], f32 daily[L][2n+1], f32 weekly[L][2n+1],
//   f32 labels[L][n_horizons]
// Matrices are cell-major (row = cell, column = time); missing windows are
// written as zeros with their flag cleared.
ExportSummary export_dataset(const WindowStream& stream, const SplitFractions& split,
                             const std::filesystem::path& dir, const std::string& source = "decrypted");

struct DatasetFile {
  std::uint32_t n_cells = 0;
  std::uint32_t n = 0;
  std::vector<std::uint32_t> horizons;
  std::vector<FlowMatrices<float>> samples;
};

DatasetFile read_dataset_file(const std::filesystem::path& path);

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace privaflow::matrices
