#include "privaflow/matrices.hpp"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "privaflow/errors.hpp"
#include "privaflow/rng.hpp"
#include "privaflow/wire.hpp"

namespace privaflow::matrices {

void WindowConfig::validate() const {
  if (n == 0) throw ConfigError("window half-width n must be at least 1");
  if (delta_minutes == 0 || (24 * 60) % delta_minutes != 0) {
    throw ConfigError("delta_minutes " + std::to_string(delta_minutes) + " does not divide a day evenly");
  }
  if (horizons.empty()) throw ConfigError("at least one horizon is required");
  std::set<std::uint32_t> seen;
  for (auto h : horizons) {
    if (h == 0) throw ConfigError("horizons must be positive");
    if (!seen.insert(h).second) throw ConfigError("duplicate horizon " + std::to_string(h));
  }
}

std::uint32_t WindowConfig::max_horizon() const {
  return horizons.empty() ? 0 : *std::max_element(horizons.begin(), horizons.end());
}

WindowStream::WindowStream(const DensitySeries& series, WindowConfig cfg) : cfg_(std::move(cfg)), grid_(series.grid) {
  cfg_.validate();
  if (series.delta_minutes != cfg_.delta_minutes) {
    throw ConfigError("series epoch length " + std::to_string(series.delta_minutes) + " min differs from window's " +
                      std::to_string(cfg_.delta_minutes) + " min");
  }
  density_ = aggregator::density_matrix(series);
  first_epoch_ = series.empty() ? 0 : series.epochs.front().epoch;
  const std::size_t len = series.size();
  const std::size_t lo = cfg_.n;
  const std::size_t tail = cfg_.max_horizon();
  for (std::size_t t = lo; t + tail < len; ++t) targets_.push_back(static_cast<std::uint32_t>(t));
  if (targets_.empty()) {
    throw SeriesTooShort("series of " + std::to_string(len) + " epochs admits no window with n=" +
                         std::to_string(cfg_.n) + " and horizon " + std::to_string(tail) + "; need at least " +
                         std::to_string(lo + tail + 1));
  }
}

bool WindowStream::has_daily(std::size_t i) const { return targets_.at(i) >= cfg_.day_epochs() + cfg_.n; }
bool WindowStream::has_weekly(std::size_t i) const { return targets_.at(i) >= cfg_.week_epochs() + cfg_.n; }

WindowStream WindowStream::complete_only() const {
  WindowStream out;
  out.cfg_ = cfg_;
  out.grid_ = grid_;
  out.first_epoch_ = first_epoch_;
  out.density_ = density_;
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (has_daily(i) && has_weekly(i)) out.targets_.push_back(targets_[i]);
  }
  if (out.targets_.empty()) {
    throw SeriesTooShort("series of " + std::to_string(density_.cols()) +
                         " epochs admits no sample with a weekly window; need at least " +
                         std::to_string(cfg_.week_epochs() + cfg_.n + cfg_.max_horizon() + 1));
  }
  return out;
}

WindowStream build_windows(const DensitySeries& series, const WindowConfig& cfg) { return WindowStream(series, cfg); }

SplitBounds split_counts(std::size_t n_samples, const SplitFractions& f) {
  if (f.train < 0 || f.val < 0 || f.test < 0 || std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be non-negative and sum to 1");
  }
  const auto n_train = static_cast<std::size_t>(std::llround(f.train * static_cast<double>(n_samples)));
  const auto n_val = std::min(n_samples - std::min(n_train, n_samples),
                              static_cast<std::size_t>(std::llround(f.val * static_cast<double>(n_samples))));
  SplitBounds b;
  b.edges = {0, std::min(n_train, n_samples), 0, n_samples};
  b.edges[2] = b.edges[1] + n_val;
  for (int k = 0; k < 3; ++k) {
    if (b.count(k) == 0) {
      throw EmptySplit(std::string(kSplitNames[k]) + " split is empty with " + std::to_string(n_samples) +
                       " samples");
    }
  }
  return b;
}

namespace {

void put_f32(wire::Writer& w, float v) { w.u32(std::bit_cast<std::uint32_t>(v)); }

void put_matrix(wire::Writer& w, const Matrix<float>& m, Eigen::Index rows, Eigen::Index cols) {
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) put_f32(w, m.size() == 0 ? 0.0f : m(r, c));
  }
}

Matrix<float> get_matrix(wire::Reader& r, Eigen::Index rows, Eigen::Index cols) {
  Matrix<float> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = std::bit_cast<float>(r.u32());
  }
  return m;
}

std::string hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  ensure_sodium();
  const auto bytes = read_file(path);
  std::array<std::uint8_t, crypto_hash_sha256_BYTES> digest{};
  crypto_hash_sha256(digest.data(), bytes.data(), bytes.size());
  return hex(digest);
}

ExportSummary export_dataset(const WindowStream& stream, const SplitFractions& split,
                             const std::filesystem::path& dir, const std::string& source) {
  const auto& cfg = stream.config();
  const SplitBounds bounds = split_counts(stream.size(), split);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const auto L = static_cast<Eigen::Index>(stream.grid().cells());
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const auto H = static_cast<Eigen::Index>(cfg.horizons.size());
  std::vector<float> scales(static_cast<std::size_t>(L), 0.0f);

  ExportSummary summary;
  summary.bounds = bounds;
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  nlohmann::ordered_json splits = nlohmann::ordered_json::object();
  for (int k = 0; k < 3; ++k) {
    wire::Writer w;
    w.bytes({reinterpret_cast<const std::uint8_t*>(kDatasetMagic.data()), kDatasetMagic.size()});
    w.u32(kDatasetVersion);
    w.u32(static_cast<std::uint32_t>(L));
    w.u32(cfg.n);
    w.u32(static_cast<std::uint32_t>(bounds.count(k)));
    w.u32(static_cast<std::uint32_t>(H));
    for (auto h : cfg.horizons) w.u32(h);
    std::size_t n_daily = 0;
    std::size_t n_weekly = 0;
    for (std::size_t i = bounds.edges[k]; i < bounds.edges[k + 1]; ++i) {
      const auto s = stream.at<float>(i);
      w.u32(s.target_epoch);
      w.u8(s.has_daily ? 1 : 0);
      w.u8(s.has_weekly ? 1 : 0);
      put_matrix(w, s.current, L, n + 1);
      put_matrix(w, s.daily, L, 2 * n + 1);
      put_matrix(w, s.weekly, L, 2 * n + 1);
      put_matrix(w, s.labels, L, H);
      n_daily += s.has_daily;
      n_weekly += s.has_weekly;
      if (k == 0) {
        for (Eigen::Index c = 0; c < L; ++c) {
          float m = std::max(s.current.row(c).maxCoeff(), s.labels.row(c).maxCoeff());
          if (s.has_daily) m = std::max(m, s.daily.row(c).maxCoeff());
          if (s.has_weekly) m = std::max(m, s.weekly.row(c).maxCoeff());
          scales[static_cast<std::size_t>(c)] = std::max(scales[static_cast<std::size_t>(c)], m);
        }
      }
    }
    const auto file = std::string(kSplitNames[k]) + ".bin";
    const auto path = dir / file;
    write_file(path, w.data());
    summary.sha256[k] = sha256_file(path);
    files[kSplitNames[k]] = {{"path", file}, {"bytes", w.data().size()}, {"sha256", summary.sha256[k]}};
    splits[kSplitNames[k]] = {{"count", bounds.count(k)},
                              {"first_sample", bounds.edges[k]},
                              {"first_target_epoch", stream.target_epoch(bounds.edges[k])},
                              {"last_target_epoch", stream.target_epoch(bounds.edges[k + 1] - 1)},
                              {"with_daily", n_daily},
                              {"with_weekly", n_weekly}};
  }
  // A cell never occupied in training scales by 1 so normalization stays finite.
  for (auto& s : scales) s = std::max(s, 1.0f);

  nlohmann::ordered_json m;
  m["format"] = "privaflow-dataset";
  m["version"] = kDatasetVersion;
  m["source"] = source;
  const auto& g = stream.grid();
  m["grid"] = {{"rows", g.rows},
               {"cols", g.cols},
               {"cell_size_m", g.cell_size_m},
               {"origin_x_m", g.origin_x_m},
               {"origin_y_m", g.origin_y_m},
               {"cells", g.cells()}};
  m["window"] = {{"n", cfg.n},
                 {"delta_minutes", cfg.delta_minutes},
                 {"horizons", cfg.horizons},
                 {"day_epochs", cfg.day_epochs()},
                 {"week_epochs", cfg.week_epochs()}};
  m["layout"] = {{"byte_order", "little"},
                 {"dtype", "f32"},
                 {"matrix_order", "cell-major, row = cell, column = time ascending"},
                 {"channels", 1},
                 {"sample",
                  {"u32 target_epoch", "u8 has_daily", "u8 has_weekly", "current[L][n+1]", "daily[L][2n+1]",
                   "weekly[L][2n+1]", "labels[L][n_horizons]"}}};
  m["split"] = {{"fractions", {split.train, split.val, split.test}},
                {"n_samples", stream.size()},
                {"splits", splits}};
  m["scales"] = {{"kind", "per-cell max over train split"}, {"values", scales}};
  m["files"] = files;

  summary.manifest = dir / "manifest.json";
  std::ofstream out(summary.manifest);
  if (!out) throw IoError("cannot write " + summary.manifest.string());
  out << m.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + summary.manifest.string());
  return summary;
}

DatasetFile read_dataset_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  wire::Reader r(bytes);
  DatasetFile f;
  try {
    const auto magic = r.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), kDatasetMagic.begin())) {
      throw DecodeError(path.string() + ": not a dataset file");
    }
    if (const auto v = r.u32(); v != kDatasetVersion) {
      throw DecodeError(path.string() + ": unsupported version " + std::to_string(v));
    }
    f.n_cells = r.u32();
    f.n = r.u32();
    const auto count = r.u32();
    const auto n_h = r.u32();
    for (std::uint32_t k = 0; k < n_h; ++k) f.horizons.push_back(r.u32());
    const auto L = static_cast<Eigen::Index>(f.n_cells);
    const auto n = static_cast<Eigen::Index>(f.n);
    const std::size_t per_sample = 6 + 4 * static_cast<std::size_t>(L) * (5 * f.n + 3 + n_h);
    if (r.remaining() != per_sample * count) throw DecodeError(path.string() + ": size does not match header");
    f.samples.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      FlowMatrices<float> s;
      s.target_epoch = r.u32();
      s.has_daily = r.u8() != 0;
      s.has_weekly = r.u8() != 0;
      s.current = get_matrix(r, L, n + 1);
      s.daily = get_matrix(r, L, 2 * n + 1);
      s.weekly = get_matrix(r, L, 2 * n + 1);
      s.labels = get_matrix(r, L, static_cast<Eigen::Index>(n_h));
      if (!s.has_daily) s.daily.resize(0, 0);
      if (!s.has_weekly) s.weekly.resize(0, 0);
      f.samples.push_back(std::move(s));
    }
  } catch (const DecodeError& e) {
    throw IoError(e.what());
  }
  return f;
}

}  // namespace privaflow::matrices
