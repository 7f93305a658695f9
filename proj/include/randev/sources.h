#ifndef RANDEV_SOURCES_H_
#define RANDEV_SOURCES_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "randev/bitstream.h"

namespace randev {

// SplitMix64, bit-exact with the public-domain reference. Every simulated
// source draws its randomness from one of these.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed = 0) : state_(seed) {}

  uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double NextDouble() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

// Marsaglia xorshift64 (13, 7, 17). The state must be nonzero.
inline uint64_t Xorshift64Step(uint64_t s) {
  s ^= s << 13;
  s ^= s >> 7;
  s ^= s << 17;
  return s;
}

enum class SourceKind {
  kIdeal,
  kBernoulli,
  kUnbalancedSplitter,
  kMarkov,
  kDeadTime,
  kXorshift64,
};

std::string_view SourceKindName(SourceKind kind);
std::optional<SourceKind> ParseSourceKind(std::string_view name);

// What happens to a photon that reaches a detector still in its dead time.
enum class DeadPhotonPolicy {
  // Detected by the other detector if that one is live; lost otherwise.
  kReroute,
  // Always lost.
  kLoss,
};

struct SourceConfig {
  SourceKind kind = SourceKind::kIdeal;
  double p = 0.5;       // P(1), Bernoulli
  double bias = 0.0;    // p(1) - p(0), UnbalancedSplitter and Markov
  double a1 = 0.0;      // lag-1 autocorrelation, Markov
  double tau = 1.0;     // mean photon inter-arrival time, DeadTime
  double tau_d = 0.0;   // detector dead time, same units as tau
  DeadPhotonPolicy dead_photon = DeadPhotonPolicy::kReroute;
  uint64_t seed = 1;

  static SourceConfig Ideal(uint64_t seed);
  static SourceConfig Bernoulli(double p, uint64_t seed);
  static SourceConfig UnbalancedSplitter(double bias, uint64_t seed);
  static SourceConfig Markov(double bias, double a1, uint64_t seed);
  static SourceConfig DeadTime(
      double tau, double tau_d, uint64_t seed,
      DeadPhotonPolicy policy = DeadPhotonPolicy::kReroute);
  static SourceConfig Xorshift64(uint64_t seed);

  // Throws ParameterError naming the violated constraint.
  void Validate() const;
};

// Stationary two-state chain with P(1) = (1 + bias) / 2 and a_k = a1^k.
struct TransitionMatrix {
  double p1_given_0;
  double p1_given_1;
  double pi0;
  double pi1;
};

// Requires |bias| < 1 and -(1 - |bias|) / (1 + |bias|) <= a1 <= 1; throws
// ParameterError naming the admissible a1 interval otherwise.
TransitionMatrix MarkovTransitionMatrix(double bias, double a1);

// Lower end of the admissible a1 interval for a given bias.
double MarkovMinA1(double bias);

// A live, stateful bit generator. Generating n1 bits and then n2 bits yields
// exactly the bits of a fresh identically configured source generating
// n1 + n2. Movable between threads, not shareable.
class BitSource {
 public:
  virtual ~BitSource() = default;

  virtual bool NextBit() = 0;

  // Appends n bits to `out`.
  virtual void Fill(uint64_t n, BitSequence& out);

  BitSequence Generate(uint64_t n) {
    BitSequence out;
    out.reserve(n);
    Fill(n, out);
    return out;
  }
};

std::unique_ptr<BitSource> MakeSource(const SourceConfig& config);

// n bits from a fresh source.
BitSequence Generate(const SourceConfig& config, uint64_t n);

// Event-driven two-detector simulation with exponential photon arrivals.
BitSequence SimulateDeadTime(double tau, double tau_d, uint64_t n,
                             uint64_t seed,
                             DeadPhotonPolicy policy = DeadPhotonPolicy::kReroute);

// The xorshift64 state after each update, 64 bits LSB first, truncated to n.
BitSequence Xorshift64Bits(uint64_t seed, uint64_t n);

}  // namespace randev

#endif  // RANDEV_SOURCES_H_
