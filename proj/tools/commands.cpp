#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "privaflow/bench.hpp"
#include "privaflow/errors.hpp"

namespace privaflow::cli {

namespace {

// ---- value parsing ----

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ConfigError("invalid value '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for " + key);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  std::stringstream ss(value);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(parse_number<T>(key, item));
  }
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

// rows x cols with rows the largest divisor not above sqrt(cells): 80 -> 8 x 10.
std::pair<std::uint32_t, std::uint32_t> near_square(std::uint32_t cells) {
  if (cells == 0) throw ConfigError("cells must be positive");
  std::uint32_t rows = 1;
  for (std::uint32_t r = 1; r * r <= cells; ++r) {
    if (cells % r == 0) rows = r;
  }
  return {rows, cells / rows};
}

// ---- files ----

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string driver_file(ipfe::DriverId id, const char* ext) {
  std::ostringstream s;
  s << "driver_" << std::setw(5) << std::setfill('0') << id << ext;
  return s.str();
}

struct KeyMaterial {
  std::vector<ipfe::Encryptor> encryptors;
  ipfe::FunctionalKey dk;
};

KeyMaterial load_keys(const fs::path& dir, std::uint32_t n_drivers) {
  if (!fs::exists(dir / "dk.bin")) {
    throw IoError("no keys in " + dir.string() + "; run `privaflow keygen` first or pass --keygen");
  }
  KeyMaterial km;
  km.dk = ipfe::deserialize_functional_key(read_bytes(dir / "dk.bin"));
  if (km.dk.n_drivers() != n_drivers) {
    throw LengthMismatch("keys in " + dir.string() + " are for " + std::to_string(km.dk.n_drivers()) +
                         " drivers, config has " + std::to_string(n_drivers));
  }
  std::vector<ipfe::DriverKey> keys;
  for (ipfe::DriverId i = 1; i <= n_drivers; ++i) {
    keys.push_back(ipfe::deserialize_driver_key(read_bytes(dir / "drivers" / driver_file(i, ".key"))));
    if (keys.back().driver_id != i) throw DecodeError("key file for driver " + std::to_string(i) + " names another driver");
  }
  km.encryptors = sim::make_encryptors(keys);
  return km;
}

grid::ZeroPool load_pools(const fs::path& dir, std::uint32_t n_drivers) {
  grid::ZeroPool pool;
  for (ipfe::DriverId i = 1; i <= n_drivers; ++i) {
    auto [id, zeros] = grid::deserialize_pool(read_bytes(dir / "pools" / driver_file(i, ".pool")));
    if (id != i) throw DecodeError("pool file for driver " + std::to_string(i) + " names another driver");
    pool.deposit(id, std::move(zeros));
  }
  return pool;
}

nlohmann::ordered_json grid_json(const grid::GridSpec& g) {
  return {{"rows", g.rows}, {"cols", g.cols}, {"cell_size_m", g.cell_size_m}};
}

}  // namespace

// ---- configuration ----

const std::set<std::string>& ConfigBuilder::known_keys() {
  static const std::set<std::string> keys{
      "drivers",        "rows",           "cols",          "cells",           "cell_size_m",
      "origin_x_m",     "origin_y_m",     "k_anon",        "delta_minutes",   "epochs",
      "seed",           "speed_min_mps",  "speed_max_mps", "report_probability", "downtown_row",
      "downtown_col",   "downtown_rows",  "downtown_cols", "attraction_base", "attraction_amplitude",
      "peak_minute",    "weekend_factor", "security_level", "out",            "runs",
      "threads",        "pool_per_driver", "replenish",    "os_entropy",      "bench_cells",
      "bench_drivers",  "bench_repetitions", "window_n",   "horizons",        "split",
      "export_complete_only"};
  return keys;
}

void ConfigBuilder::set(const std::string& key, const std::string& value) {
  if (!known_keys().contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
  settings_.emplace_back(key, trim(value));
}

void ConfigBuilder::load_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void ConfigBuilder::load_env() {
  if (const char* seed = std::getenv("PRIVAFLOW_SEED"); seed != nullptr && *seed != '\0') set("seed", seed);
}

RunConfig ConfigBuilder::build() const {
  RunConfig c;
  auto& f = c.fleet;
  bool downtown_explicit = false;
  for (const auto& [k, v] : settings_) {
    if (k == "drivers") f.n_drivers = parse_number<std::uint32_t>(k, v);
    else if (k == "rows") f.grid.rows = parse_number<std::uint32_t>(k, v);
    else if (k == "cols") f.grid.cols = parse_number<std::uint32_t>(k, v);
    else if (k == "cells") std::tie(f.grid.rows, f.grid.cols) = near_square(parse_number<std::uint32_t>(k, v));
    else if (k == "cell_size_m") f.grid.cell_size_m = parse_number<double>(k, v);
    else if (k == "origin_x_m") f.grid.origin_x_m = parse_number<double>(k, v);
    else if (k == "origin_y_m") f.grid.origin_y_m = parse_number<double>(k, v);
    else if (k == "k_anon") f.k_anon = parse_number<std::uint32_t>(k, v);
    else if (k == "delta_minutes") f.delta_minutes = parse_number<std::uint32_t>(k, v);
    else if (k == "epochs") f.n_epochs = parse_number<std::uint32_t>(k, v);
    else if (k == "seed") f.seed = parse_number<std::uint64_t>(k, v);
    else if (k == "speed_min_mps") f.speed_min_mps = parse_number<double>(k, v);
    else if (k == "speed_max_mps") f.speed_max_mps = parse_number<double>(k, v);
    else if (k == "report_probability") f.report_probability = parse_number<double>(k, v);
    else if (k == "downtown_row") f.downtown_row = parse_number<std::uint32_t>(k, v), downtown_explicit = true;
    else if (k == "downtown_col") f.downtown_col = parse_number<std::uint32_t>(k, v), downtown_explicit = true;
    else if (k == "downtown_rows") f.downtown_rows = parse_number<std::uint32_t>(k, v), downtown_explicit = true;
    else if (k == "downtown_cols") f.downtown_cols = parse_number<std::uint32_t>(k, v), downtown_explicit = true;
    else if (k == "attraction_base") f.attraction_base = parse_number<double>(k, v);
    else if (k == "attraction_amplitude") f.attraction_amplitude = parse_number<double>(k, v);
    else if (k == "peak_minute") f.peak_minute = parse_number<double>(k, v);
    else if (k == "weekend_factor") f.weekend_factor = parse_number<double>(k, v);
    else if (k == "security_level") c.security_level = parse_number<unsigned>(k, v);
    else if (k == "out") c.out = v;
    else if (k == "runs") c.runs = parse_number<unsigned>(k, v);
    else if (k == "threads") c.threads = parse_number<unsigned>(k, v);
    else if (k == "pool_per_driver") c.pool_per_driver = parse_number<std::size_t>(k, v);
    else if (k == "replenish") c.replenish = parse_bool(k, v);
    else if (k == "os_entropy") c.os_entropy = parse_bool(k, v);
    else if (k == "bench_cells") c.bench_cells = parse_list<std::uint32_t>(k, v);
    else if (k == "bench_drivers") c.bench_drivers = parse_list<std::uint32_t>(k, v);
    else if (k == "bench_repetitions") c.bench_repetitions = parse_number<unsigned>(k, v);
    else if (k == "window_n") c.window.n = parse_number<std::uint32_t>(k, v);
    else if (k == "horizons") c.window.horizons = parse_list<std::uint32_t>(k, v);
    else if (k == "export_complete_only") c.export_complete_only = parse_bool(k, v);
    else if (k == "split") {
      const auto fr = parse_list<double>(k, v);
      if (fr.size() != 3) throw ConfigError("split needs three fractions: train,val,test");
      c.split = {fr[0], fr[1], fr[2]};
    }
  }
  if (!downtown_explicit) {
    // keep the 2 x 2 downtown block centred on whatever grid was chosen
    f.downtown_rows = std::min<std::uint32_t>(2, f.grid.rows);
    f.downtown_cols = std::min<std::uint32_t>(2, f.grid.cols);
    f.downtown_row = (f.grid.rows - f.downtown_rows) / 2;
    f.downtown_col = (f.grid.cols - f.downtown_cols) / 2;
  }
  c.window.delta_minutes = f.delta_minutes;

  group::group_gen(c.security_level);
  f.validate();
  c.window.validate();
  matrices::split_counts(1000, c.split);  // fractions check only
  if (c.runs == 0) throw ConfigError("runs must be at least 1");
  if (c.bench_repetitions == 0) throw ConfigError("bench_repetitions must be at least 1");
  for (auto k : c.bench_cells) {
    if (k == 0) throw InvalidK("bench cell counts must be positive");
  }
  for (auto n : c.bench_drivers) {
    if (n == 0) throw ConfigError("bench driver counts must be positive");
  }
  return c;
}

// ---- sizes ----

void print_sizes(std::uint32_t k_anon, std::ostream& out) {
  const auto params = group::group_gen(128);
  const std::size_t elem = params.element_len;
  const std::size_t ct_elems = ipfe::kCiphertextElements * elem;
  const std::size_t key_material = 3 * elem + params.scalar_len;
  const std::size_t report_wire = 10 + k_anon * ipfe::kCellCiphertextWireLen;

  out << "serialized sizes (" << params.group_id << ", " << elem << "-byte elements)\n";
  out << std::left << std::setw(44) << "item" << std::right << std::setw(10) << "measured" << std::setw(12)
      << "published" << "\n";
  auto row = [&](const std::string& item, std::size_t measured, const std::string& published,
                 const std::string& note = "") {
    out << std::left << std::setw(44) << item << std::right << std::setw(10) << measured << std::setw(12)
        << published << (note.empty() ? "" : "  " + note) << "\n";
  };
  row("ciphertext group elements (t0, t1, c)", ct_elems, "64", "DIFFERS: encryption yields 3 elements, not 2");
  row("ciphertext wire record", ipfe::kCellCiphertextWireLen, "-", "+ version, driver id, cell id");
  row("driver key material ([a], [Wa], u)", key_material, "66", "DIFFERS: 3 elements + 1 scalar");
  row("driver key file", ipfe::kDriverKeyWireLen, "-", "+ version, driver id");
  row("report payload, k=" + std::to_string(k_anon) + " (elements only)", k_anon * ct_elems,
      std::to_string(64 * k_anon), "proportional to k in both");
  row("report wire message, k=" + std::to_string(k_anon), report_wire, "-", "10-byte header + k records");
}

// ---- keygen ----

int cmd_keygen(const RunConfig& cfg, std::ostream& out) {
  const auto n = cfg.fleet.n_drivers;
  Rng rng = cfg.os_entropy ? Rng::os() : sim::keygen_rng(cfg.fleet.seed);
  const auto dep = sim::make_deployment(n, rng);
  const auto encs = sim::make_encryptors(dep.keys);
  auto pool = sim::provision_pools(encs, cfg.initial_pool(), cfg.fleet.seed, cfg.threads);

  const auto dir = cfg.out / "keys";
  make_dirs(dir / "drivers");
  make_dirs(dir / "pools");
  write_bytes(dir / "mpk.bin", ipfe::serialize(dep.mpk));
  write_bytes(dir / "dk.bin", ipfe::serialize(dep.dk));
  for (const auto& key : dep.keys) {
    write_bytes(dir / "drivers" / driver_file(key.driver_id, ".key"), ipfe::serialize(key));
    std::vector<ipfe::CellCiphertext> zeros;
    while (auto z = pool.take(key.driver_id)) zeros.push_back(std::move(*z));
    write_bytes(dir / "pools" / driver_file(key.driver_id, ".pool"), grid::serialize_pool(key.driver_id, zeros));
  }
  nlohmann::ordered_json meta;
  meta["group"] = dep.mpk.params.group_id;
  meta["n_drivers"] = n;
  meta["functional_key"] = "all-ones";
  meta["pool_per_driver"] = cfg.initial_pool();
  meta["entropy"] = cfg.os_entropy ? "os" : "seeded";
  write_json(dir / "keys.json", meta);

  out << "wrote " << n << " driver keys, 1 functional key and " << n << " zero pools of " << cfg.initial_pool()
      << " to " << dir.string() << "\n\n";
  print_sizes(cfg.fleet.k_anon, out);
  return 0;
}

// ---- simulate ----

int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opts, std::ostream& out) {
  make_dirs(cfg.out);
  std::optional<KeyMaterial> loaded;
  const auto keys_dir = opts.keys_dir.value_or(cfg.out / "keys");
  if (!opts.ground_truth_only && !opts.keygen_inline) loaded = load_keys(keys_dir, cfg.fleet.n_drivers);

  nlohmann::ordered_json summary, timing;
  summary["runs"] = nlohmann::ordered_json::array();
  timing["runs"] = nlohmann::ordered_json::array();
  sim::Comparison total;
  std::uint64_t total_epochs = 0;
  double total_decrypt = 0.0;

  out << std::left << std::setw(5) << "run" << std::setw(12) << "seed" << std::right << std::setw(10) << "pairs"
      << std::setw(12) << "mismatches" << std::setw(7) << "under" << std::setw(7) << "over";
  if (!opts.ground_truth_only) out << std::setw(10) << "enc_s" << std::setw(10) << "dec_s";
  out << "\n";

  for (unsigned r = 0; r < cfg.runs; ++r) {
    auto fleet = cfg.fleet;
    fleet.seed = cfg.fleet.seed + r;
    const auto dir = cfg.runs == 1 ? cfg.out : cfg.out / ("run_" + std::to_string(r));
    make_dirs(dir);

    nlohmann::ordered_json run;
    run["run"] = r;
    run["seed"] = fleet.seed;
    if (opts.ground_truth_only) {
      const auto truth = sim::simulate(fleet);
      aggregator::write_series(truth.as_series(), dir / "truth.csv", dir / "truth.json", "ground_truth");
      run["epochs"] = truth.n_epochs();
      out << std::left << std::setw(5) << r << std::setw(12) << fleet.seed << std::right << std::setw(10)
          << truth.n_epochs() * fleet.grid.cells() << std::setw(12) << "-" << std::setw(7) << "-" << std::setw(7)
          << "-" << "\n";
      summary["runs"].push_back(run);
      continue;
    }

    const sim::PipelineOptions popts{cfg.threads, cfg.replenish, cfg.os_entropy};
    sim::PipelineResult res;
    if (loaded) {
      res = sim::run_pipeline(fleet, loaded->encryptors, loaded->dk, load_pools(keys_dir, fleet.n_drivers), popts);
    } else {
      Rng rng = cfg.os_entropy ? Rng::os() : sim::keygen_rng(fleet.seed);
      const auto dep = sim::make_deployment(fleet.n_drivers, rng);
      const auto encs = sim::make_encryptors(dep.keys);
      auto pool = sim::provision_pools(encs, cfg.initial_pool(), fleet.seed, cfg.threads);
      res = sim::run_pipeline(fleet, encs, dep.dk, std::move(pool), popts);
    }
    const auto cmp = sim::compare(res.series, res.truth);
    aggregator::write_series(res.series, dir / "density.csv", dir / "density.json", "decrypted");
    if (opts.write_ground_truth) {
      aggregator::write_series(res.truth.as_series(), dir / "truth.csv", dir / "truth.json", "ground_truth");
    }

    total.pairs += cmp.pairs;
    total.mismatches += cmp.mismatches;
    total.undercounts += cmp.undercounts;
    total.overcounts += cmp.overcounts;
    total_epochs += res.series.size();
    total_decrypt += res.stats.decrypt_seconds;

    run["pairs"] = cmp.pairs;
    run["mismatches"] = cmp.mismatches;
    run["undercounts"] = cmp.undercounts;
    run["overcounts"] = cmp.overcounts;
    run["reports"] = res.stats.reports;
    run["report_ciphertexts"] = res.stats.report_ciphertexts;
    run["pool_generated"] = res.stats.pool_generated;
    run["pool_consumed"] = res.stats.pool_consumed;
    summary["runs"].push_back(run);
    timing["runs"].push_back({{"run", r},
                              {"encrypt_seconds", res.stats.encrypt_seconds},
                              {"decrypt_seconds", res.stats.decrypt_seconds}});

    out << std::left << std::setw(5) << r << std::setw(12) << fleet.seed << std::right << std::setw(10) << cmp.pairs
        << std::setw(12) << cmp.mismatches << std::setw(7) << cmp.undercounts << std::setw(7) << cmp.overcounts
        << std::fixed << std::setprecision(2) << std::setw(10) << res.stats.encrypt_seconds << std::setw(10)
        << res.stats.decrypt_seconds << "\n";
    out.unsetf(std::ios::floatfield);
  }

  summary["config"] = {{"drivers", cfg.fleet.n_drivers},
                       {"grid", grid_json(cfg.fleet.grid)},
                       {"k_anon", cfg.fleet.k_anon},
                       {"epochs", cfg.fleet.n_epochs},
                       {"delta_minutes", cfg.fleet.delta_minutes},
                       {"report_probability", cfg.fleet.report_probability},
                       {"seed", cfg.fleet.seed},
                       {"runs", cfg.runs}};
  if (opts.ground_truth_only) {
    write_json(cfg.out / "summary.json", summary);
    out << "ground truth only: " << cfg.runs << " run(s) of " << cfg.fleet.n_epochs << " epochs written to "
        << cfg.out.string() << "\n";
    return 0;
  }
  summary["total"] = {{"pairs", total.pairs},
                      {"mismatches", total.mismatches},
                      {"undercounts", total.undercounts},
                      {"overcounts", total.overcounts}};
  write_json(cfg.out / "summary.json", summary);
  write_json(cfg.out / "timing.json", timing);

  out << "total: mismatches=" << total.mismatches << " of " << total.pairs << " (epoch, cell) pairs"
      << " (under=" << total.undercounts << ", over=" << total.overcounts << ")\n";
  out << "mean decryption per epoch: " << std::fixed << std::setprecision(1)
      << 1e3 * total_decrypt / static_cast<double>(std::max<std::uint64_t>(total_epochs, 1)) << " ms\n";
  out.unsetf(std::ios::floatfield);
  if (cfg.fleet.report_probability >= 1.0 && total.mismatches > 0) {
    out << "EXACTNESS FAILURE: decrypted densities differ from ground truth under full reporting\n";
    return 3;
  }
  if (total.overcounts > 0) {
    out << "EXACTNESS FAILURE: decrypted densities exceed ground truth\n";
    return 3;
  }
  return 0;
}

// ---- bench ----

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  make_dirs(cfg.out);
  const auto& g = cfg.fleet.grid;
  const auto reps = cfg.bench_repetitions;
  for (auto k : cfg.bench_cells) {
    if (k > g.cells()) {
      throw InvalidK("bench cell count " + std::to_string(k) + " must be in [1, " + std::to_string(g.cells()) + "]");
    }
  }

  const auto enc = bench::encryption_vs_cells(cfg.bench_cells, g, reps, cfg.fleet.seed);
  const auto fit = bench::fit_line(enc);
  {
    std::ofstream csv(cfg.out / "bench_encrypt.csv");
    if (!csv) throw IoError("cannot write bench_encrypt.csv");
    csv << "cells,median_ms";
    for (unsigned r = 1; r <= reps; ++r) csv << ",rep" << r << "_ms";
    csv << "\n";
    for (const auto& s : enc) {
      csv << s.x << ',' << 1e3 * s.median_s;
      for (auto v : s.seconds) csv << ',' << 1e3 * v;
      csv << "\n";
    }
  }
  out << "driver-side encryption vs encrypted cells (median of " << reps << " after one warm-up)\n";
  out << std::setw(8) << "cells" << std::setw(14) << "median_ms" << "\n" << std::fixed << std::setprecision(3);
  for (const auto& s : enc) out << std::setw(8) << s.x << std::setw(14) << 1e3 * s.median_s << "\n";
  out << "linear fit: " << 1e3 * fit.slope << " ms/cell + " << 1e3 * fit.intercept << " ms, R^2 = "
      << std::setprecision(4) << fit.r2 << (fit.r2 >= 0.98 ? "  (linear)" : "  (NOT linear at R^2 >= 0.98)")
      << "\n";
  out << "published reference: about 50 ms at 80 cells (hardware-relative, not compared)\n\n";

  const auto dec = bench::decryption_vs_drivers(cfg.bench_drivers, g, cfg.fleet.k_anon, reps, cfg.threads,
                                                cfg.fleet.seed);
  {
    std::ofstream csv(cfg.out / "bench_decrypt.csv");
    if (!csv) throw IoError("cannot write bench_decrypt.csv");
    csv << "drivers,cells,median_ms";
    for (unsigned r = 1; r <= reps; ++r) csv << ",rep" << r << "_ms";
    csv << "\n";
    for (const auto& s : dec) {
      csv << s.x << ',' << g.cells() << ',' << 1e3 * s.median_s;
      for (auto v : s.seconds) csv << ',' << 1e3 * v;
      csv << "\n";
    }
  }
  out << std::setprecision(3) << "aggregator decryption of one epoch vs drivers (" << g.cells() << " cells, k="
      << cfg.fleet.k_anon << ", " << cfg.threads << " thread(s))\n";
  out << std::setw(8) << "drivers" << std::setw(14) << "median_ms" << std::setw(20) << "ms per driver*cell"
      << "\n";
  for (const auto& s : dec) {
    out << std::setw(8) << s.x << std::setw(14) << 1e3 * s.median_s << std::setw(20)
        << 1e3 * s.median_s / (s.x * g.cells()) << "\n";
  }
  out << "monotonic in drivers: " << (bench::strictly_increasing(dec) ? "yes" : "NO") << "\n";
  out << "published reference: under 600 ms at 200 drivers, 80 cells (hardware-relative, not compared)\n";
  out.unsetf(std::ios::floatfield);
  return 0;
}

// ---- export ----

int cmd_export(const RunConfig& cfg, const ExportOptions& opts, std::ostream& out) {
  aggregator::DensitySeries series;
  std::string source;
  if (opts.series_csv) {
    auto sidecar = *opts.series_csv;
    sidecar.replace_extension(".json");
    series = aggregator::read_series(*opts.series_csv, sidecar);
    source = "series:" + opts.series_csv->filename().string();
  } else {
    series = sim::simulate(cfg.fleet).as_series();
    source = "ground_truth";
  }
  auto window = cfg.window;
  window.delta_minutes = series.delta_minutes;
  auto stream = matrices::build_windows(series, window);
  if (cfg.export_complete_only) stream = stream.complete_only();

  const auto dir = cfg.out / "dataset";
  const auto summary = matrices::export_dataset(stream, cfg.split, dir, source);
  out << "exported " << stream.size() << " samples from " << series.size() << " epochs (" << source << ")\n";
  out << "grid " << series.grid.rows << " x " << series.grid.cols << ", n = " << window.n << ", horizons {";
  for (std::size_t i = 0; i < window.horizons.size(); ++i) out << (i ? "," : "") << window.horizons[i];
  out << "}\n";
  for (int k = 0; k < 3; ++k) {
    const auto& b = summary.bounds;
    out << std::left << std::setw(6) << matrices::kSplitNames[k] << std::right << std::setw(7) << b.count(k)
        << " samples, target epochs " << stream.target_epoch(b.edges[k]) << ".."
        << stream.target_epoch(b.edges[k + 1] - 1) << ", sha256 " << summary.sha256[k].substr(0, 16) << "\n";
  }
  out << "manifest: " << summary.manifest.string() << "\n";
  return 0;
}

}  // namespace privaflow::cli
