#include "randev/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "randev/errors.h"
#include "randev/model.h"

namespace randev::experiments {
namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Either a report or the error message that stopped it.
struct Outcome {
  std::optional<AnalysisReport> report;
  std::string error;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

template <typename F>
Outcome Capture(F&& f) {
  try {
    return {f(), ""};
  } catch (const Error& e) {
    return {std::nullopt, e.what()};
  }
}

}  // namespace

GridResult ValidateApprox(double grid_step, std::optional<uint64_t> n_bits,
                          uint64_t seed, unsigned threads) {
  if (!(grid_step > 0 && grid_step <= 0.1)) {
    throw ParameterError("grid step must lie in (0, 0.1]");
  }
  const int steps = static_cast<int>(std::floor(0.1 / grid_step + 1e-9));

  GridResult result;
  SplitMix64 seeder(seed);
  std::vector<uint64_t> point_seeds;
  for (int i = -steps; i <= steps; ++i) {
    for (int j = -steps; j <= steps; ++j) {
      if (i == 0 && j == 0) continue;
      GridRow row;
      row.bias = i * grid_step;
      row.a1 = j * grid_step;
      const auto p = model::MarkovPrediction(row.bias, row.a1);
      row.deviation_exact = p.deviation_exact;
      row.deviation_approx = p.deviation_approx;
      row.relative_error =
          std::fabs(p.deviation_approx - p.deviation_exact) / p.deviation_exact;
      result.rows.push_back(row);
      point_seeds.push_back(seeder.Next());
    }
  }

  for (const auto& row : result.rows) {
    if (row.relative_error > result.max_relative_error) {
      result.max_relative_error = row.relative_error;
      result.argmax_bias = row.bias;
      result.argmax_a1 = row.a1;
    }
  }

  if (!n_bits) return result;

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t idx = next++; idx < result.rows.size(); idx = next++) {
      GridRow& row = result.rows[idx];
      const auto seq = Generate(
          SourceConfig::Markov(row.bias, row.a1, point_seeds[idx]), *n_bits);
      EmpiricalPoint e;
      e.n_bits = *n_bits;
      e.deviation_plugin = DeviationPlugin(CountPairs(seq));
      e.z_score = (e.deviation_plugin - row.deviation_exact) /
                  model::DeviationSigma(row.deviation_exact,
                                        static_cast<double>(*n_bits));
      row.empirical = e;
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& row : result.rows) {
    result.max_abs_z = std::max(result.max_abs_z, std::fabs(row.empirical->z_score));
  }
  return result;
}

void WriteGridCsv(const GridResult& grid, std::ostream& out) {
  const bool empirical = !grid.rows.empty() && grid.rows.front().empirical;
  out << "b,a1,d_exact,d_approx,rel_err";
  if (empirical) out << ",n_bits,d_plugin,z";
  out << '\n';
  for (const auto& r : grid.rows) {
    out << Num(r.bias) << ',' << Num(r.a1) << ',' << Num(r.deviation_exact)
        << ',' << Num(r.deviation_approx) << ',' << Num(r.relative_error);
    if (empirical) {
      out << ',' << r.empirical->n_bits << ','
          << Num(r.empirical->deviation_plugin) << ','
          << Num(r.empirical->z_score);
    }
    out << '\n';
  }
}

std::vector<Fig2Row> Fig2Curve(double a1_min, double a1_max, double step) {
  if (!(a1_min >= -1 && a1_min < a1_max && a1_max <= 1)) {
    throw ParameterError("fig2 range must satisfy -1 <= min < max <= 1");
  }
  if (!(step > 0)) throw ParameterError("fig2 step must be > 0");
  const auto count =
      static_cast<uint64_t>(std::floor((a1_max - a1_min) / step + 1e-9)) + 1;
  std::vector<Fig2Row> rows;
  rows.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    double a1 = a1_min + static_cast<double>(i) * step;
    if (std::fabs(a1) < 1e-9 * step) a1 = 0;
    a1 = std::clamp(a1, -1.0, 1.0);
    rows.push_back({a1, model::MiExactUnbiased(a1), model::MiParabolic(a1)});
  }
  return rows;
}

void WriteFig2Csv(std::span<const Fig2Row> rows, std::ostream& out) {
  out << "a1,mi_exact,mi_approx\n";
  for (const auto& r : rows) {
    out << Num(r.a1) << ',' << Num(r.mi_exact) << ',' << Num(r.mi_approx)
        << '\n';
  }
}

ConcatCheck ConcatProperty(SourceConfig config,
                           std::span<const uint64_t> lengths, uint64_t seed,
                           unsigned max_lag) {
  config.seed = seed;
  uint64_t total = 0;
  for (uint64_t n : lengths) total += n;

  auto live = MakeSource(config);
  std::vector<BitSequence> pieces;
  for (uint64_t n : lengths) pieces.push_back(live->Generate(n));
  const BitSequence joined = Concat(pieces);
  const BitSequence whole = Generate(config, total);

  ConcatCheck check;
  check.bits_identical = joined == whole;

  const Outcome serial = Capture([&] { return Analyze(whole, max_lag); });
  const Outcome from_joined = Capture([&] { return Analyze(joined, max_lag); });
  const Outcome merged = Capture([&] {
    Analyzer acc(max_lag);
    for (const auto& p : pieces) {
      Analyzer part(max_lag);
      part.Add(p);
      acc.Merge(part);
    }
    return acc.Report();
  });
  check.reports_identical = serial == from_joined && serial == merged;
  return check;
}

double MaxAbsZ(const AnalysisReport& report) {
  double z = std::fabs(report.bias.value / report.bias.sigma);
  for (const auto& a : report.autocorr) {
    z = std::max(z, std::fabs(a.value / a.sigma));
  }
  return z;
}

PrngDemoReport PrngDemo(uint64_t seed, uint64_t length, unsigned max_lag) {
  if (seed == 0) throw ParameterError("xorshift64 seed must be nonzero");
  if (length < 64) throw ParameterError("demo length must be >= 64 bits");
  const BitSequence first = Xorshift64Bits(seed, length);
  const BitSequence second = Xorshift64Bits(seed, length);
  PrngDemoReport r;
  r.length = length;
  r.analysis = Analyze(first, max_lag);
  r.entropy_bound = 64.0 / static_cast<double>(length);
  r.reproducible = first == second;
  r.max_abs_z = MaxAbsZ(r.analysis);
  return r;
}

}  // namespace randev::experiments
