#ifndef RANDEV_ESTIMATORS_H_
#define RANDEV_ESTIMATORS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "randev/bitstream.h"

namespace randev {

// Adjacent-pair statistics of a bit stream. cXY counts pairs with
// x_i = X and x_{i+1} = Y. Mergeable: Merge(Count(a), Count(b)) equals
// Count(Concat(a, b)) field for field.
struct PairCounts {
  uint64_t n = 0;
  uint64_t ones = 0;
  uint64_t c00 = 0;
  uint64_t c01 = 0;
  uint64_t c10 = 0;
  uint64_t c11 = 0;
  std::optional<bool> first_bit;
  std::optional<bool> last_bit;

  uint64_t pairs() const { return c00 + c01 + c10 + c11; }

  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

PairCounts CountPairs(const BitSequence& seq);

// Counts of `seq` appended after the data already in `counts`, including the
// pair that straddles the boundary.
PairCounts Accumulate(const PairCounts& counts, const BitSequence& seq);

// `a` must precede `b` in stream order.
PairCounts Merge(const PairCounts& a, const PairCounts& b);

struct BiasEstimate {
  double value = 0;
  double sigma = 0;  // 1 / sqrt(n)

  friend bool operator==(const BiasEstimate&, const BiasEstimate&) = default;
};

// -1 + 2 * ones / n. Throws InsufficientDataError on empty input.
BiasEstimate EstimateBias(const PairCounts& counts);

// Plug-in estimates from the empirical joint distribution of adjacent bits.
// Each throws InsufficientDataError when there are no pairs. They satisfy
// MarginalEntropy = CondEntropyLag1 + MutualInformationLag1, where the
// marginal is that of the successor bit under the same joint.
double MutualInformationLag1(const PairCounts& counts);
double CondEntropyLag1(const PairCounts& counts);
double MarginalEntropy(const PairCounts& counts);

// 1 - CondEntropyLag1, in [0, 1].
double DeviationPlugin(const PairCounts& counts);

// Mergeable sums for the lag-k serial autocorrelation coefficient
//
//   a_k = sum_{i<=N-k} (x_i - m)(x_{i+k} - m) / sum_{i<=N-k} (x_i - m)^2
//
// with m the mean of all N bits. Keeps the first and last min(k, n) bits so
// that chunks can be merged exactly.
class LagAccumulator {
 public:
  explicit LagAccumulator(unsigned lag);

  static LagAccumulator FromSequence(const BitSequence& seq, unsigned lag);

  void Add(const BitSequence& seq) { Merge(FromSequence(seq, lag_)); }

  // Appends the stream summarized by `later`. Lags must match.
  void Merge(const LagAccumulator& later);

  unsigned lag() const { return lag_; }
  uint64_t n() const { return n_; }
  uint64_t ones() const { return ones_; }
  uint64_t sum_prod() const { return sum_prod_; }
  uint64_t sum_head() const { return sum_head_; }
  uint64_t sum_tail() const { return sum_tail_; }
  const std::vector<uint8_t>& head() const { return head_; }
  const std::vector<uint8_t>& tail() const { return tail_; }

  friend bool operator==(const LagAccumulator&,
                         const LagAccumulator&) = default;

 private:
  unsigned lag_;
  uint64_t n_ = 0;
  uint64_t ones_ = 0;
  uint64_t sum_prod_ = 0;  // sum_{i<=N-k} x_i x_{i+k}
  uint64_t sum_head_ = 0;  // sum_{i<=N-k} x_i
  uint64_t sum_tail_ = 0;  // sum_{i>k} x_i
  std::vector<uint8_t> head_;
  std::vector<uint8_t> tail_;
};

struct AutocorrEstimate {
  unsigned lag = 0;
  double value = 0;
  double sigma = 0;  // 1 / sqrt(N)

  friend bool operator==(const AutocorrEstimate&,
                         const AutocorrEstimate&) = default;
};

// Throws InsufficientDataError when n < lag + 2 and DegenerateInputError for
// constant input.
AutocorrEstimate Autocorrelation(const LagAccumulator& acc);
AutocorrEstimate Autocorrelation(const BitSequence& seq, unsigned lag);

struct AnalysisReport {
  uint64_t n_bits = 0;
  BiasEstimate bias;
  std::vector<AutocorrEstimate> autocorr;  // lags 1..K
  double mi_lag1 = 0;
  double cond_entropy = 0;
  double deviation_plugin = 0;
  double deviation_markov = 0;  // (a1^2 + b^2) / (2 ln 2) at the estimates
  double deviation_sigma = 0;
  double n_max = 0;  // model::kUnbounded when deviation_plugin == 0

  friend bool operator==(const AnalysisReport&,
                         const AnalysisReport&) = default;
};

// Streaming analysis over chunks; analyzers over consecutive pieces of a
// stream merge into exactly the state of one serial pass.
class Analyzer {
 public:
  explicit Analyzer(unsigned max_lag = 8);

  void Add(const BitSequence& chunk);
  void Merge(const Analyzer& later);

  const PairCounts& counts() const { return counts_; }
  const std::vector<LagAccumulator>& lags() const { return lags_; }

  // Throws when n < max_lag + 2 or the input is constant.
  AnalysisReport Report() const;

 private:
  PairCounts counts_;
  std::vector<LagAccumulator> lags_;
};

AnalysisReport Analyze(const BitSequence& seq, unsigned max_lag = 8);

// Splits `seq` into `threads` word-aligned chunks, analyzes them
// concurrently and merges in order. Identical to Analyze for every input.
AnalysisReport AnalyzeParallel(const BitSequence& seq, unsigned max_lag,
                               unsigned threads);

}  // namespace randev

#endif  // RANDEV_ESTIMATORS_H_
