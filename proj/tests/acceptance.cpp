// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--threads N] [--runs N] [--only NAME]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "privaflow/bench.hpp"
#include "privaflow/errors.hpp"
#include "privaflow/matrices.hpp"
#include "privaflow/mobility_sim.hpp"

using namespace privaflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  unsigned threads = 0;
  unsigned runs = 30;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 30 seeded runs at 200 drivers, 80 cells, K=5, 100 epochs, full reporting.
Outcome end_to_end_exactness(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t pairs = 0, mismatches = 0;
  for (unsigned r = 0; r < o.runs; ++r) {
    sim::FleetConfig cfg;  // defaults are the criterion's parameters
    cfg.seed = 1000 + r;
    const auto res = sim::run_pipeline(cfg, {.threads = o.threads});
    // oracle: count the simulator's own driver cells, independent of the series it reports
    for (std::size_t t = 0; t < res.truth.n_epochs(); ++t) {
      std::vector<std::uint16_t> want(cfg.grid.cells(), 0);
      for (auto c : res.truth.cells[t]) ++want[c];
      for (std::size_t j = 0; j < want.size(); ++j) {
        ++pairs;
        mismatches += res.series.epochs[t].density[j] != want[j];
      }
    }
    std::fprintf(stderr, "  end-to-end run %u/%u: %llu mismatches so far, %.0f s\n", r + 1, o.runs,
                 static_cast<unsigned long long>(mismatches), seconds_since(t0));
  }
  const double minutes = seconds_since(t0) / 60.0;
  return {mismatches == 0 && o.runs >= 30,
          fmt("%u runs, %llu (epoch, cell) pairs, %llu mismatches; runtime %.1f min (laptop target 10 min)", o.runs,
              static_cast<unsigned long long>(pairs), static_cast<unsigned long long>(mismatches), minutes)};
}

// Every plaintext vector in {0,1,2}^n for n <= 4, under y = ones and 100 random y.
Outcome ipfe_exhaustive(const Options&) {
  Rng rng = Rng::seeded(77);
  std::uint64_t checks = 0, wrong = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto [mpk, msk] = ipfe::setup(group::group_gen(128), n, rng);
    std::vector<ipfe::Encryptor> encs;
    for (ipfe::DriverId i = 1; i <= n; ++i) encs.emplace_back(ipfe::derive_driver_key(mpk, msk, i));

    std::vector<std::vector<std::uint64_t>> ys{std::vector<std::uint64_t>(n, 1)};
    for (int v = 0; v < 100; ++v) {
      std::vector<std::uint64_t> y(n);
      for (auto& yi : y) yi = rng.below(256);
      ys.push_back(y);
    }
    const std::uint64_t bound = n * 2 * 255;
    const group::DlogTable table(bound);
    for (const auto& y : ys) {
      std::vector<group::Scalar> ys_scalar;
      for (auto yi : y) ys_scalar.push_back(group::Scalar::from_u64(yi));
      const auto dk = ipfe::derive_functional_key(msk, ys_scalar);
      std::size_t combos = 1;
      for (std::size_t i = 0; i < n; ++i) combos *= 3;
      for (std::size_t code = 0; code < combos; ++code) {
        std::vector<ipfe::CellCiphertext> cts;
        std::uint64_t want = 0;
        for (std::size_t i = 0, c = code; i < n; ++i, c /= 3) {
          cts.push_back(encs[i].encrypt(c % 3, rng));
          want += y[i] * (c % 3);
        }
        ++checks;
        wrong += ipfe::aggregate_decrypt(dk, cts, table) != want;
      }
    }
  }
  return {wrong == 0, fmt("%llu decryptions over |D| = 1..4, plaintexts {0,1,2}, 101 y vectors; %llu wrong",
                          static_cast<unsigned long long>(checks), static_cast<unsigned long long>(wrong))};
}

// 10^4 encryptions of one (key, cell, plaintext) are all distinct, and report
// framing does not depend on which entry is the true cell.
Outcome randomization(const Options&) {
  Rng rng = Rng::seeded(78);
  auto [mpk, msk] = ipfe::setup(group::group_gen(128), 1, rng);
  const ipfe::Encryptor enc(ipfe::derive_driver_key(mpk, msk, 1));
  std::set<std::vector<std::uint8_t>> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(ipfe::serialize(enc.encrypt(1, rng, 42)));

  const grid::GridSpec g{};
  int framing_diffs = 0, sets = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto cells = grid::choose_report_cells(static_cast<ipfe::CellId>(rng.below(80)), 5, g, rng);
    std::optional<std::vector<std::uint8_t>> first;
    for (auto true_cell : cells) {
      auto bytes = grid::serialize(grid::build_report_for_cells(enc, cells, true_cell, 9, rng).report);
      for (std::size_t e = 0; e < cells.size(); ++e) {
        auto it = bytes.begin() + static_cast<std::ptrdiff_t>(10 + e * ipfe::kCellCiphertextWireLen + 7);
        std::fill(it, it + 96, 0);
      }
      if (!first) first = bytes;
      framing_diffs += bytes != *first;
    }
    ++sets;
  }
  return {seen.size() == 10000 && framing_diffs == 0,
          fmt("%zu distinct of 10000 ciphertexts; %d framing differences across %d cell sets x 5 true-cell choices",
              seen.size(), framing_diffs, sets)};
}

// Density with K = L full reporting equals K = 5 plus pool padding.
Outcome padding_neutrality(const Options& o) {
  int epochs = 0, differing = 0;
  for (std::uint64_t seed : {5u, 6u}) {
    sim::FleetConfig cfg;
    cfg.seed = seed;
    cfg.n_epochs = 3;
    auto truth = sim::simulate(cfg);
    // plus one adversarial ground truth: everyone in the same cell
    truth.cells.push_back(std::vector<ipfe::CellId>(cfg.n_drivers, 37));
    Rng rng = Rng::seeded(seed, 99);
    const auto dep = sim::make_deployment(cfg.n_drivers, rng);
    const auto encs = sim::make_encryptors(dep.keys);
    aggregator::Aggregator full(dep.dk, cfg.grid, {o.threads});
    aggregator::Aggregator padded(dep.dk, cfg.grid, {o.threads});
    padded.pool() = sim::provision_pools(encs, truth.cells.size() * (80 - 5), seed, o.threads);
    for (std::uint32_t t = 0; t < truth.cells.size(); ++t) {
      std::vector<grid::Report> all, sparse;
      for (std::size_t i = 0; i < encs.size(); ++i) {
        all.push_back(grid::build_report(encs[i], truth.cells[t][i], 80, cfg.grid, t, rng));
        sparse.push_back(grid::build_report(encs[i], truth.cells[t][i], 5, cfg.grid, t, rng));
      }
      differing += full.collect(all, t).density != padded.collect(sparse, t).density;
      ++epochs;
    }
  }
  return {differing == 0, fmt("%d epochs at 200 drivers, 80 cells; %d density vectors differ", epochs, differing)};
}

// Encryption time linear in k; decryption time increasing in drivers.
Outcome scaling_shapes(const Options& o) {
  const grid::GridSpec g{};
  const std::vector<std::uint32_t> ks{10, 20, 40, 80};
  const auto enc = bench::encryption_vs_cells(ks, g, 7, 31);
  const auto fit = bench::fit_line(enc);
  const std::vector<std::uint32_t> ds{25, 50, 100, 150, 200};
  const auto dec = bench::decryption_vs_drivers(ds, g, 5, 5, o.threads, 32);
  const bool monotonic = bench::strictly_increasing(dec);
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << "encrypt R^2=" << std::setprecision(4) << fit.r2 << std::setprecision(2) << " [";
  for (const auto& p : enc) s << " k" << static_cast<int>(p.x) << ":" << 1e3 * p.median_s << "ms";
  s << " ]; decrypt " << (monotonic ? "monotonic" : "NOT monotonic") << " [";
  for (const auto& p : dec) s << " " << static_cast<int>(p.x) << "d:" << 1e3 * p.median_s << "ms";
  s << " ] (published: ~50 ms encrypt at 80 cells, <600 ms decrypt at 200 drivers; not gated)";
  return {fit.r2 >= 0.98 && monotonic, s.str()};
}

// Ciphertext is 3 elements; key material as documented; published figures printed beside.
Outcome size_contracts(const Options&) {
  Rng rng = Rng::seeded(79);
  auto [mpk, msk] = ipfe::setup(group::group_gen(128), 2, rng);
  const auto key = ipfe::derive_driver_key(mpk, msk, 2);
  const auto ct = ipfe::encrypt(key, 1, rng, 3);
  const std::size_t elem = mpk.params.element_len;
  const auto ct_wire = ipfe::serialize(ct).size();
  const auto key_wire = ipfe::serialize(key).size();
  const std::size_t ct_elements = ct_wire - (1 + 4 + 2);
  const std::size_t key_material = key_wire - (1 + 4);
  const bool ok = ct_elements == 3 * elem && ct_wire == 103 && key_material == 3 * elem + 32 && key_wire == 133;
  return {ok, fmt("ciphertext %zu B of elements (3 x %zu; published 64 -> DIFFERS), %zu B on the wire; driver key "
                  "material %zu B (published 66 -> DIFFERS), %zu B on the wire",
                  ct_elements, elem, ct_wire, key_material, key_wire)};
}

// Three simulated weeks: every sample matches direct indexing and leaks no label.
Outcome matrix_construction(const Options&) {
  sim::FleetConfig cfg;
  cfg.n_epochs = 3 * 2016;
  cfg.seed = 21;
  const auto truth = sim::simulate(cfg);
  const auto series = truth.as_series();
  const matrices::WindowConfig wc;
  const auto stream = matrices::build_windows(series, wc).complete_only();

  // oracle indexes the simulator's per-epoch counts directly
  const auto& d = truth.density;
  const long n = wc.n, day = 24 * 60 / 5, week = 7 * day;
  std::uint64_t violations = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto m = stream.at<double>(i);
    const long t = m.target_epoch;
    long max_input = -1;
    auto check = [&](const matrices::Matrix<double>& x, long start, long cols) {
      if (x.cols() != cols || x.rows() != 80) {
        ++violations;
        return;
      }
      for (long k = 0; k < cols; ++k) {
        max_input = std::max(max_input, start + k);
        for (long c = 0; c < 80; ++c) violations += x(c, k) != d[start + k][c];
      }
    };
    check(m.current, t - n, n + 1);
    check(m.daily, t - day - n, 2 * n + 1);
    check(m.weekly, t - week - n, 2 * n + 1);
    for (std::size_t h = 0; h < wc.horizons.size(); ++h) {
      const long label = t + wc.horizons[h];
      violations += label <= max_input;
      for (long c = 0; c < 80; ++c) violations += m.labels(c, static_cast<long>(h)) != d[label][c];
    }
  }

  const auto dir = std::filesystem::temp_directory_path() / "privaflow_acceptance_dataset";
  std::filesystem::remove_all(dir);
  const auto summary = matrices::export_dataset(stream, {}, dir, "ground_truth");
  const auto manifest = nlohmann::json::parse(std::ifstream(summary.manifest));
  const auto& sp = manifest["split"]["splits"];
  const bool chronological = sp["train"]["last_target_epoch"] < sp["val"]["first_target_epoch"] &&
                             sp["val"]["last_target_epoch"] < sp["test"]["first_target_epoch"];
  violations += !chronological;
  std::filesystem::remove_all(dir);

  return {violations == 0 && stream.size() >= 1000,
          fmt("%zu samples from %zu epochs (ground-truth series), %llu violations; split %zu/%zu/%zu chronological: %s",
              stream.size(), series.size(), static_cast<unsigned long long>(violations), summary.bounds.count(0),
              summary.bounds.count(1), summary.bounds.count(2), chronological ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  Options o;
  std::string only;
  app.add_option("--threads", o.threads, "worker threads (0 = all cores)");
  app.add_option("--runs", o.runs, "end-to-end runs (criterion requires 30)");
  app.add_option("--only", only, "run a single criterion by name");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome(const Options&)>>> criteria{
      {"ipfe-exhaustive", ipfe_exhaustive},
      {"randomization", randomization},
      {"size-contracts", size_contracts},
      {"padding-neutrality", padding_neutrality},
      {"scaling-shapes", scaling_shapes},
      {"matrix-construction", matrix_construction},
      {"end-to-end-exactness", end_to_end_exactness},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && only != name) continue;
    Outcome out;
    try {
      out = run(o);
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failed += !out.pass;
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
