#pragma once

// Timing harness for driver-side encryption and aggregator-side decryption.
// Monotonic clock, one discarded warm-up run, median of the rest.

#include <cstdint>
#include <span>
#include <vector>

#include "privaflow/grid_report.hpp"

namespace privaflow::bench {

struct Sample {
  double x = 0.0;                // independent variable (cells or drivers)
  double median_s = 0.0;         // median seconds per operation
  std::vector<double> seconds;   // kept repetitions, warm-up excluded
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least-squares line y = slope * x + intercept with its coefficient of determination.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);
LinearFit fit_line(std::span<const Sample> samples);

bool strictly_increasing(std::span<const Sample> samples);

// Time to build one k-cell report (k encryptions plus dummy selection), for
// each k. Each repetition times `batch` reports and divides.
std::vector<Sample> encryption_vs_cells(std::span<const std::uint32_t> ks, const grid::GridSpec& grid,
                                        unsigned repetitions, std::uint64_t seed, unsigned batch = 8);

// Time for the aggregator to pad and decrypt one epoch of grid.cells() cells,
// with every driver sending a k-cell report, for each driver count.
std::vector<Sample> decryption_vs_drivers(std::span<const std::uint32_t> drivers, const grid::GridSpec& grid,
                                          std::uint32_t k, unsigned repetitions, unsigned threads,
                                          std::uint64_t seed);

}  // namespace privaflow::bench
