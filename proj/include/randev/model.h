#ifndef RANDEV_MODEL_H_
#define RANDEV_MODEL_H_

#include <limits>

#include "randev/sources.h"

// Closed-form values of every quantity the estimators measure. All entropies
// are in bits, and 0 * log(0) is taken as 0 throughout.
namespace randev::model {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct ModelPrediction {
  double bias = 0;
  double a1 = 0;
  double mutual_info = 0;    // I(next bit; past), bits per bit
  double cond_entropy = 1;   // H(next bit | past), bits per bit
  double deviation_exact = 0;   // 1 - cond_entropy
  double deviation_approx = 0;  // (a1^2 + b^2) / (2 ln 2)
};

// -q log2 q - (1 - q) log2 (1 - q).
double BinaryEntropy(double q);

// Lag-1 autocorrelation of the dead-time beamsplitter generator,
// exp(-tau_d / tau) - 1.
double DeadtimeA1(double tau, double tau_d);

// Mutual information between adjacent bits of an unbiased Markov source.
double MiExactUnbiased(double a1);

// Leading Taylor term of MiExactUnbiased: a1^2 / (2 ln 2).
double MiParabolic(double a1);

// Exact conditional entropy, mutual information and randomness deviation of
// a stationary Markov source. Throws ParameterError outside the admissible
// (bias, a1) region.
ModelPrediction MarkovPrediction(double bias, double a1);

// Prediction for any configured source. Independent sources (ideal,
// Bernoulli, splitter) have zero mutual information; the dead-time
// generator is modelled as an unbiased Markov source with a1 from
// DeadtimeA1. Xorshift64 has no probabilistic model and throws.
ModelPrediction Predict(const SourceConfig& config);

// (a1^2 + b^2) / (2 ln 2).
double DeviationApprox(double bias, double a1);

// Statistical uncertainty of a deviation estimated from n bits,
// sqrt(2 D / (n ln 2)).
double DeviationSigma(double deviation, double n);

// Longest sequence whose deviation stays below its own uncertainty,
// 2 / (ln 2 * D). kUnbounded when D == 0.
double NMax(double deviation);

}  // namespace randev::model

#endif  // RANDEV_MODEL_H_
