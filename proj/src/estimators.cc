#include "randev/estimators.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "randev/errors.h"
#include "randev/model.h"

namespace randev {
namespace {

// sum over i < n - lag of x_i * x_{i+lag}.
uint64_t LaggedProductCount(const BitSequence& seq, uint64_t lag) {
  const uint64_t n = seq.size();
  if (n <= lag) return 0;
  const uint64_t end = n - lag;
  uint64_t total = 0;
  uint64_t pos = 0;
  for (; pos + 64 <= end; pos += 64) {
    total += std::popcount(seq.Word(pos) & seq.Word(pos + lag));
  }
  if (pos < end) {
    uint64_t mask = (uint64_t{1} << (end - pos)) - 1;
    total += std::popcount(seq.Word(pos) & seq.Word(pos + lag) & mask);
  }
  return total;
}

std::vector<uint8_t> BitsOf(const BitSequence& seq, uint64_t begin,
                            uint64_t end) {
  std::vector<uint8_t> out;
  out.reserve(end - begin);
  for (uint64_t i = begin; i < end; ++i) out.push_back(seq[i]);
  return out;
}

void RequirePairs(const PairCounts& c) {
  if (c.pairs() == 0) {
    throw InsufficientDataError("need at least 2 bits for pair statistics");
  }
}

double XLog2X(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

double Entropy2(double p1) { return -XLog2X(p1) - XLog2X(1 - p1); }

}  // namespace

PairCounts CountPairs(const BitSequence& seq) {
  PairCounts c;
  const uint64_t n = seq.size();
  if (n == 0) return c;
  c.n = n;
  c.ones = seq.CountOnes();
  c.first_bit = seq[0];
  c.last_bit = seq[n - 1];
  const uint64_t head_ones = seq.CountOnes(0, n - 1);
  const uint64_t tail_ones = seq.CountOnes(1, n);
  c.c11 = LaggedProductCount(seq, 1);
  c.c10 = head_ones - c.c11;
  c.c01 = tail_ones - c.c11;
  c.c00 = (n - 1) - c.c11 - c.c10 - c.c01;
  return c;
}

PairCounts Merge(const PairCounts& a, const PairCounts& b) {
  if (a.n == 0) return b;
  if (b.n == 0) return a;
  PairCounts out;
  out.n = a.n + b.n;
  out.ones = a.ones + b.ones;
  out.c00 = a.c00 + b.c00;
  out.c01 = a.c01 + b.c01;
  out.c10 = a.c10 + b.c10;
  out.c11 = a.c11 + b.c11;
  const bool x = *a.last_bit;
  const bool y = *b.first_bit;
  (x ? (y ? out.c11 : out.c10) : (y ? out.c01 : out.c00)) += 1;
  out.first_bit = a.first_bit;
  out.last_bit = b.last_bit;
  return out;
}

PairCounts Accumulate(const PairCounts& counts, const BitSequence& seq) {
  return Merge(counts, CountPairs(seq));
}

BiasEstimate EstimateBias(const PairCounts& counts) {
  if (counts.n == 0) throw InsufficientDataError("empty input");
  const double n = static_cast<double>(counts.n);
  return {-1 + 2 * static_cast<double>(counts.ones) / n, 1 / std::sqrt(n)};
}

double MutualInformationLag1(const PairCounts& c) {
  RequirePairs(c);
  const double total = static_cast<double>(c.pairs());
  const double cell[2][2] = {{static_cast<double>(c.c00), static_cast<double>(c.c01)},
                             {static_cast<double>(c.c10), static_cast<double>(c.c11)}};
  const double row[2] = {cell[0][0] + cell[0][1], cell[1][0] + cell[1][1]};
  const double col[2] = {cell[0][0] + cell[1][0], cell[0][1] + cell[1][1]};
  double mi = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if (cell[x][y] == 0) continue;
      mi += cell[x][y] / total *
            std::log2(cell[x][y] * total / (row[x] * col[y]));
    }
  }
  return std::max(mi, 0.0);
}

double CondEntropyLag1(const PairCounts& c) {
  RequirePairs(c);
  const double total = static_cast<double>(c.pairs());
  const double rows[2][2] = {{static_cast<double>(c.c00), static_cast<double>(c.c01)},
                             {static_cast<double>(c.c10), static_cast<double>(c.c11)}};
  double h = 0;
  for (const auto& r : rows) {
    const double weight = r[0] + r[1];
    if (weight == 0) continue;
    h += weight / total * Entropy2(r[1] / weight);
  }
  return h;
}

double MarginalEntropy(const PairCounts& c) {
  RequirePairs(c);
  return Entropy2(static_cast<double>(c.c01 + c.c11) /
                  static_cast<double>(c.pairs()));
}

double DeviationPlugin(const PairCounts& c) {
  return std::clamp(1 - CondEntropyLag1(c), 0.0, 1.0);
}

LagAccumulator::LagAccumulator(unsigned lag) : lag_(lag) {
  if (lag == 0) throw ParameterError("autocorrelation lag must be >= 1");
}

LagAccumulator LagAccumulator::FromSequence(const BitSequence& seq,
                                            unsigned lag) {
  LagAccumulator acc(lag);
  const uint64_t n = seq.size();
  const uint64_t edge = std::min<uint64_t>(lag, n);
  acc.n_ = n;
  acc.ones_ = seq.CountOnes();
  if (n > lag) {
    acc.sum_prod_ = LaggedProductCount(seq, lag);
    acc.sum_head_ = seq.CountOnes(0, n - lag);
    acc.sum_tail_ = seq.CountOnes(lag, n);
  }
  acc.head_ = BitsOf(seq, 0, edge);
  acc.tail_ = BitsOf(seq, n - edge, n);
  return acc;
}

void LagAccumulator::Merge(const LagAccumulator& later) {
  if (later.lag_ != lag_) throw ParameterError("merging different lags");
  const uint64_t k = lag_;
  // Pairs (i, i + k) with i in this stream and i + k in `later`. tail_[m] sits
  // at position n_ - tail_.size() + m; its partner is at offset j in later.
  const uint64_t tail_start = n_ - tail_.size();
  for (size_t m = 0; m < tail_.size(); ++m) {
    const uint64_t j = tail_start + m + k - n_;
    if (j >= later.head_.size()) continue;
    const uint64_t x = tail_[m];
    const uint64_t y = later.head_[j];
    sum_prod_ += x * y;
    sum_head_ += x;
    sum_tail_ += y;
  }
  sum_prod_ += later.sum_prod_;
  sum_head_ += later.sum_head_;
  sum_tail_ += later.sum_tail_;
  ones_ += later.ones_;
  n_ += later.n_;

  const size_t keep = static_cast<size_t>(std::min<uint64_t>(k, n_));
  if (head_.size() < keep) {
    const size_t extra = std::min(keep - head_.size(), later.head_.size());
    head_.insert(head_.end(), later.head_.begin(), later.head_.begin() + extra);
  }
  tail_.insert(tail_.end(), later.tail_.begin(), later.tail_.end());
  if (tail_.size() > keep) tail_.erase(tail_.begin(), tail_.end() - keep);
}

AutocorrEstimate Autocorrelation(const LagAccumulator& acc) {
  const uint64_t k = acc.lag();
  const uint64_t n_bits = acc.n();
  if (n_bits < k + 2) {
    throw InsufficientDataError("lag-" + std::to_string(k) +
                                " autocorrelation needs at least " +
                                std::to_string(k + 2) + " bits");
  }
  // Scaled by N^2 so the mean m = ones / N stays exact:
  //   N^2 num = N^2 S_prod - N ones (S_head + S_tail) + (N - k) ones^2
  //   N^2 den = N^2 S_head - 2 N ones S_head + (N - k) ones^2
  using Wide = __int128;
  const Wide n = n_bits;
  const Wide ones = acc.ones();
  const Wide m = n - static_cast<Wide>(k);
  const Wide head = acc.sum_head();
  const Wide num = n * n * static_cast<Wide>(acc.sum_prod()) -
                   n * ones * (head + static_cast<Wide>(acc.sum_tail())) +
                   m * ones * ones;
  const Wide den = n * n * head - 2 * n * ones * head + m * ones * ones;
  if (den == 0) {
    throw DegenerateInputError(
        "constant sequence: autocorrelation is undefined (zero variance)");
  }
  AutocorrEstimate out;
  out.lag = static_cast<unsigned>(k);
  out.value = static_cast<double>(static_cast<long double>(num) /
                                  static_cast<long double>(den));
  out.sigma = 1 / std::sqrt(static_cast<double>(n_bits));
  return out;
}

AutocorrEstimate Autocorrelation(const BitSequence& seq, unsigned lag) {
  return Autocorrelation(LagAccumulator::FromSequence(seq, lag));
}

Analyzer::Analyzer(unsigned max_lag) {
  if (max_lag == 0) throw ParameterError("max lag must be >= 1");
  lags_.reserve(max_lag);
  for (unsigned k = 1; k <= max_lag; ++k) lags_.emplace_back(k);
}

void Analyzer::Add(const BitSequence& chunk) {
  counts_ = Accumulate(counts_, chunk);
  for (auto& lag : lags_) lag.Add(chunk);
}

void Analyzer::Merge(const Analyzer& later) {
  if (later.lags_.size() != lags_.size()) {
    throw ParameterError("merging analyzers with different max lags");
  }
  counts_ = randev::Merge(counts_, later.counts_);
  for (size_t i = 0; i < lags_.size(); ++i) lags_[i].Merge(later.lags_[i]);
}

AnalysisReport Analyzer::Report() const {
  const uint64_t needed = lags_.size() + 2;
  if (counts_.n < needed) {
    throw InsufficientDataError("analysis with max lag " +
                                std::to_string(lags_.size()) + " needs " +
                                std::to_string(needed) + " bits, got " +
                                std::to_string(counts_.n));
  }
  AnalysisReport r;
  r.n_bits = counts_.n;
  r.bias = EstimateBias(counts_);
  for (const auto& lag : lags_) r.autocorr.push_back(Autocorrelation(lag));
  r.mi_lag1 = MutualInformationLag1(counts_);
  r.cond_entropy = CondEntropyLag1(counts_);
  r.deviation_plugin = DeviationPlugin(counts_);
  r.deviation_markov =
      model::DeviationApprox(r.bias.value, r.autocorr.front().value);
  r.deviation_sigma =
      model::DeviationSigma(r.deviation_plugin, static_cast<double>(r.n_bits));
  r.n_max = model::NMax(r.deviation_plugin);
  return r;
}

AnalysisReport Analyze(const BitSequence& seq, unsigned max_lag) {
  Analyzer a(max_lag);
  a.Add(seq);
  return a.Report();
}

AnalysisReport AnalyzeParallel(const BitSequence& seq, unsigned max_lag,
                               unsigned threads) {
  threads = std::max(1u, threads);
  const uint64_t words = (seq.size() + 63) / 64;
  const uint64_t per_chunk = (words + threads - 1) / threads * 64;
  std::vector<Analyzer> parts(threads, Analyzer(max_lag));
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      const uint64_t begin = std::min<uint64_t>(t * per_chunk, seq.size());
      const uint64_t end = std::min<uint64_t>(begin + per_chunk, seq.size());
      workers.emplace_back([&seq, &part = parts[t], begin, end] {
        part.Add(seq.Slice(begin, end - begin));
      });
    }
  }
  Analyzer total(max_lag);
  for (const auto& p : parts) total.Merge(p);
  return total.Report();
}

}  // namespace randev
