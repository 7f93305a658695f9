#include "randev/model.h"

#include <cmath>
#include <numbers>
#include <string>

#include "randev/errors.h"

namespace randev::model {
namespace {

// x log2 x with the zero convention.
double XLog2X(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

ModelPrediction IndependentPrediction(double p1) {
  ModelPrediction out;
  out.bias = 2 * p1 - 1;
  out.a1 = 0;
  out.mutual_info = 0;
  out.cond_entropy = BinaryEntropy(p1);
  out.deviation_exact = 1 - out.cond_entropy;
  out.deviation_approx = DeviationApprox(out.bias, 0);
  return out;
}

}  // namespace

double BinaryEntropy(double q) {
  if (!(q >= 0 && q <= 1)) {
    throw ParameterError("probability must lie in [0, 1]");
  }
  return -XLog2X(q) - XLog2X(1 - q);
}

double DeadtimeA1(double tau, double tau_d) {
  if (!(tau > 0) || !(tau_d >= 0)) {
    throw ParameterError("dead-time model needs tau > 0 and tau_d >= 0");
  }
  return std::exp(-tau_d / tau) - 1;
}

double MiExactUnbiased(double a1) {
  if (!(a1 >= -1 && a1 <= 1)) {
    throw ParameterError("a1 must lie in [-1, 1]");
  }
  return 0.5 * XLog2X(1 + a1) + 0.5 * XLog2X(1 - a1);
}

double MiParabolic(double a1) {
  return a1 * a1 / (2 * std::numbers::ln2);
}

double DeviationApprox(double bias, double a1) {
  return (a1 * a1 + bias * bias) / (2 * std::numbers::ln2);
}

ModelPrediction MarkovPrediction(double bias, double a1) {
  const TransitionMatrix m = MarkovTransitionMatrix(bias, a1);
  ModelPrediction out;
  out.bias = bias;
  out.a1 = a1;
  out.cond_entropy = m.pi0 * BinaryEntropy(m.p1_given_0) +
                     m.pi1 * BinaryEntropy(m.p1_given_1);
  out.mutual_info = BinaryEntropy(m.pi1) - out.cond_entropy;
  // Cancellation can leave -1e-17 when the true value is zero.
  if (out.mutual_info < 0) out.mutual_info = 0;
  out.deviation_exact = 1 - out.cond_entropy;
  out.deviation_approx = DeviationApprox(bias, a1);
  return out;
}

ModelPrediction Predict(const SourceConfig& config) {
  config.Validate();
  switch (config.kind) {
    case SourceKind::kIdeal:
      return IndependentPrediction(0.5);
    case SourceKind::kBernoulli:
      return IndependentPrediction(config.p);
    case SourceKind::kUnbalancedSplitter:
      return IndependentPrediction((1 + config.bias) / 2);
    case SourceKind::kMarkov:
      return MarkovPrediction(config.bias, config.a1);
    case SourceKind::kDeadTime:
      return MarkovPrediction(0, DeadtimeA1(config.tau, config.tau_d));
    case SourceKind::kXorshift64:
      break;
  }
  throw ParameterError(
      "no probabilistic model for a deterministic generator (xorshift64)");
}

double DeviationSigma(double deviation, double n) {
  if (!(deviation >= 0) || !(n >= 1)) {
    throw ParameterError("deviation sigma needs D >= 0 and N >= 1");
  }
  return std::sqrt(2 * deviation / (n * std::numbers::ln2));
}

double NMax(double deviation) {
  if (!(deviation >= 0)) throw ParameterError("deviation must be >= 0");
  if (deviation == 0) return kUnbounded;
  return 2 / (std::numbers::ln2 * deviation);
}

}  // namespace randev::model
