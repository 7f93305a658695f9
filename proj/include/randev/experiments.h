#ifndef RANDEV_EXPERIMENTS_H_
#define RANDEV_EXPERIMENTS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randev/estimators.h"
#include "randev/sources.h"

namespace randev::experiments {

struct EmpiricalPoint {
  uint64_t n_bits = 0;
  double deviation_plugin = 0;
  double z_score = 0;  // (plug-in - exact) / sigma_D(exact, n_bits)
};

struct GridRow {
  double bias = 0;
  double a1 = 0;
  double deviation_exact = 0;
  double deviation_approx = 0;
  double relative_error = 0;  // |approx - exact| / exact
  std::optional<EmpiricalPoint> empirical;
};

struct GridResult {
  std::vector<GridRow> rows;  // row-major in (bias, a1), (0, 0) excluded
  double max_relative_error = 0;
  double argmax_bias = 0;
  double argmax_a1 = 0;
  double max_abs_z = 0;  // empirical mode only
};

// Compares the quadratic deviation approximation with the exact Markov
// deviation on the grid {-0.1, ..., 0.1}^2 with the given step. With n_bits
// set, also simulates a Markov stream per grid point and scores the plug-in
// estimate against the exact value. Grid points run on `threads` workers;
// the result does not depend on the thread count.
GridResult ValidateApprox(double grid_step,
                          std::optional<uint64_t> n_bits = std::nullopt,
                          uint64_t seed = 1, unsigned threads = 1);

// CSV header `b,a1,d_exact,d_approx,rel_err`, plus `n_bits,d_plugin,z` when
// the grid carries empirical columns.
void WriteGridCsv(const GridResult& grid, std::ostream& out);

struct Fig2Row {
  double a1 = 0;
  double mi_exact = 0;
  double mi_approx = 0;
};

// Exact and parabolic mutual information on a1 = min, min + step, ... <= max.
std::vector<Fig2Row> Fig2Curve(double a1_min, double a1_max, double step);

// CSV header `a1,mi_exact,mi_approx`.
void WriteFig2Csv(std::span<const Fig2Row> rows, std::ostream& out);

struct ConcatCheck {
  bool bits_identical = false;
  bool reports_identical = false;
  bool pass() const { return bits_identical && reports_identical; }
};

// Generates pieces of the given lengths from one live source and compares
// them, bit for bit and by analysis report, with a single generation of the
// total length from a fresh source. `seed` replaces config.seed.
ConcatCheck ConcatProperty(SourceConfig config,
                           std::span<const uint64_t> lengths, uint64_t seed,
                           unsigned max_lag = 8);

struct PrngDemoReport {
  uint64_t length = 0;
  AnalysisReport analysis;
  double entropy_bound = 0;  // 64 / L bits per bit
  bool reproducible = false;
  double max_abs_z = 0;      // over bias and every autocorrelation lag
};

// Requires seed != 0 and length >= 64.
PrngDemoReport PrngDemo(uint64_t seed, uint64_t length, unsigned max_lag = 8);

// Largest |estimate / sigma| over bias and autocorrelations of a report.
double MaxAbsZ(const AnalysisReport& report);

}  // namespace randev::experiments

#endif  // RANDEV_EXPERIMENTS_H_
