#include "privaflow/bench.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>

#include "privaflow/aggregator.hpp"
#include "privaflow/errors.hpp"
#include "privaflow/mobility_sim.hpp"

namespace privaflow::bench {

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
Sample time_it(double x, unsigned repetitions, double per, F&& body) {
  Sample s;
  s.x = x;
  for (unsigned r = 0; r <= repetitions; ++r) {
    const auto t0 = Clock::now();
    body();
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count() / per;
    if (r > 0) s.seconds.push_back(dt);  // r == 0 is the warm-up
  }
  auto sorted = s.seconds;
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  s.median_s = n == 0 ? 0.0 : n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return s;
}

}  // namespace

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw LengthMismatch("a line fit needs at least two paired points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n), yv(y.data(), n);
  a.col(0) = xv;
  a.col(1).setOnes();
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(yv);
  const double ss_res = (yv - a * coef).squaredNorm();
  const double ss_tot = (yv.array() - yv.mean()).square().sum();
  return {coef(0), coef(1), ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

LinearFit fit_line(std::span<const Sample> samples) {
  std::vector<double> x, y;
  for (const auto& s : samples) {
    x.push_back(s.x);
    y.push_back(s.median_s);
  }
  return fit_line(x, y);
}

bool strictly_increasing(std::span<const Sample> samples) {
  return std::adjacent_find(samples.begin(), samples.end(),
                            [](const Sample& a, const Sample& b) { return b.median_s <= a.median_s; }) ==
         samples.end();
}

std::vector<Sample> encryption_vs_cells(std::span<const std::uint32_t> ks, const grid::GridSpec& grid,
                                        unsigned repetitions, std::uint64_t seed, unsigned batch) {
  Rng rng = Rng::seeded(seed);
  const auto dep = sim::make_deployment(1, rng);
  const ipfe::Encryptor enc(dep.keys[0]);
  std::vector<Sample> out;
  for (auto k : ks) {
    out.push_back(time_it(k, repetitions, batch, [&] {
      for (unsigned b = 0; b < batch; ++b) {
        const auto cell = static_cast<ipfe::CellId>(rng.below(grid.cells()));
        const auto rep = grid::build_report(enc, cell, k, grid, 0, rng);
        if (rep.k() != k) throw InvalidK("report has the wrong size");
      }
    }));
  }
  return out;
}

std::vector<Sample> decryption_vs_drivers(std::span<const std::uint32_t> drivers, const grid::GridSpec& grid,
                                          std::uint32_t k, unsigned repetitions, unsigned threads,
                                          std::uint64_t seed) {
  std::vector<Sample> out;
  for (auto n : drivers) {
    Rng rng = Rng::seeded(seed, n);
    const auto dep = sim::make_deployment(n, rng);
    const auto encs = sim::make_encryptors(dep.keys);
    std::vector<grid::Report> reports;
    for (const auto& e : encs) {
      reports.push_back(grid::build_report(e, static_cast<ipfe::CellId>(rng.below(grid.cells())), k, grid, 0, rng));
    }
    aggregator::Aggregator tmc(dep.dk, grid, {threads});
    tmc.pool() = sim::provision_pools(encs, (repetitions + 1) * (grid.cells() - k), seed, threads);
    out.push_back(time_it(n, repetitions, 1, [&] { tmc.collect(reports, 0); }));
  }
  return out;
}

}  // namespace privaflow::bench
