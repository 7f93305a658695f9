#include "randev/sources.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "randev/errors.h"

namespace randev {
namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Sources whose bits come 64 at a time from a word generator.
class WordSource : public BitSource {
 public:
  bool NextBit() override {
    if (buffered_ == 0) Refill();
    bool bit = word_ & 1;
    word_ >>= 1;
    --buffered_;
    return bit;
  }

  void Fill(uint64_t n, BitSequence& out) override {
    while (n > 0) {
      if (buffered_ == 0) Refill();
      unsigned take = static_cast<unsigned>(std::min<uint64_t>(buffered_, n));
      out.AppendWord(word_, take);
      word_ = take == 64 ? 0 : word_ >> take;
      buffered_ -= take;
      n -= take;
    }
  }

 protected:
  virtual uint64_t NextWord() = 0;

 private:
  void Refill() {
    word_ = NextWord();
    buffered_ = 64;
  }

  uint64_t word_ = 0;
  unsigned buffered_ = 0;
};

class IdealSource final : public WordSource {
 public:
  explicit IdealSource(uint64_t seed) : rng_(seed) {}

 protected:
  uint64_t NextWord() override { return rng_.Next(); }

 private:
  SplitMix64 rng_;
};

class XorshiftSource final : public WordSource {
 public:
  explicit XorshiftSource(uint64_t seed) : state_(seed) {}

 protected:
  uint64_t NextWord() override {
    state_ = Xorshift64Step(state_);
    return state_;
  }

 private:
  uint64_t state_;
};

class BernoulliSource final : public BitSource {
 public:
  BernoulliSource(double p, uint64_t seed) : p_(p), rng_(seed) {}

  bool NextBit() override { return rng_.NextDouble() < p_; }

 private:
  double p_;
  SplitMix64 rng_;
};

class MarkovSource final : public BitSource {
 public:
  MarkovSource(const TransitionMatrix& m, uint64_t seed) : m_(m), rng_(seed) {}

  bool NextBit() override {
    double threshold = !started_ ? m_.pi1
                       : prev_   ? m_.p1_given_1
                                 : m_.p1_given_0;
    started_ = true;
    prev_ = rng_.NextDouble() < threshold;
    return prev_;
  }

 private:
  TransitionMatrix m_;
  SplitMix64 rng_;
  bool started_ = false;
  bool prev_ = false;
};

class DeadTimeSource final : public BitSource {
 public:
  DeadTimeSource(double tau, double tau_d, DeadPhotonPolicy policy,
                 uint64_t seed)
      : tau_(tau), tau_d_(tau_d), policy_(policy), rng_(seed) {}

  bool NextBit() override {
    for (;;) {
      double u = rng_.NextDouble();
      now_ += -tau_ * std::log(1.0 - u);
      int detector = rng_.NextDouble() < 0.5 ? 0 : 1;
      if (dead_until_[detector] > now_) {
        if (policy_ == DeadPhotonPolicy::kReroute &&
            !(dead_until_[1 - detector] > now_)) {
          detector = 1 - detector;
        } else {
          continue;
        }
      }
      dead_until_[detector] = now_ + tau_d_;
      return detector == 1;
    }
  }

 private:
  double tau_;
  double tau_d_;
  DeadPhotonPolicy policy_;
  SplitMix64 rng_;
  double now_ = 0.0;
  double dead_until_[2] = {0.0, 0.0};
};

void ValidateDeadTime(double tau, double tau_d) {
  if (!(tau > 0) || !std::isfinite(tau)) {
    throw ParameterError("tau must be finite and > 0, got " +
                         FormatDouble(tau));
  }
  if (!(tau_d >= 0) || !std::isfinite(tau_d)) {
    throw ParameterError("dead time must be finite and >= 0, got " +
                         FormatDouble(tau_d));
  }
}

void ValidateBias(double bias) {
  if (!(std::fabs(bias) < 1)) {
    throw ParameterError("bias must satisfy |b| < 1, got " +
                         FormatDouble(bias));
  }
}

}  // namespace

std::string_view SourceKindName(SourceKind kind) {
  switch (kind) {
    case SourceKind::kIdeal: return "ideal";
    case SourceKind::kBernoulli: return "bernoulli";
    case SourceKind::kUnbalancedSplitter: return "splitter";
    case SourceKind::kMarkov: return "markov";
    case SourceKind::kDeadTime: return "deadtime";
    case SourceKind::kXorshift64: return "xorshift64";
  }
  return "unknown";
}

std::optional<SourceKind> ParseSourceKind(std::string_view name) {
  for (SourceKind k :
       {SourceKind::kIdeal, SourceKind::kBernoulli,
        SourceKind::kUnbalancedSplitter, SourceKind::kMarkov,
        SourceKind::kDeadTime, SourceKind::kXorshift64}) {
    if (SourceKindName(k) == name) return k;
  }
  if (name == "xorshift") return SourceKind::kXorshift64;
  return std::nullopt;
}

SourceConfig SourceConfig::Ideal(uint64_t seed) {
  SourceConfig c;
  c.kind = SourceKind::kIdeal;
  c.seed = seed;
  return c;
}

SourceConfig SourceConfig::Bernoulli(double p, uint64_t seed) {
  SourceConfig c;
  c.kind = SourceKind::kBernoulli;
  c.p = p;
  c.seed = seed;
  return c;
}

SourceConfig SourceConfig::UnbalancedSplitter(double bias, uint64_t seed) {
  SourceConfig c;
  c.kind = SourceKind::kUnbalancedSplitter;
  c.bias = bias;
  c.seed = seed;
  return c;
}

SourceConfig SourceConfig::Markov(double bias, double a1, uint64_t seed) {
  SourceConfig c;
  c.kind = SourceKind::kMarkov;
  c.bias = bias;
  c.a1 = a1;
  c.seed = seed;
  return c;
}

SourceConfig SourceConfig::DeadTime(double tau, double tau_d, uint64_t seed,
                                    DeadPhotonPolicy policy) {
  SourceConfig c;
  c.kind = SourceKind::kDeadTime;
  c.tau = tau;
  c.tau_d = tau_d;
  c.dead_photon = policy;
  c.seed = seed;
  return c;
}

SourceConfig SourceConfig::Xorshift64(uint64_t seed) {
  SourceConfig c;
  c.kind = SourceKind::kXorshift64;
  c.seed = seed;
  return c;
}

void SourceConfig::Validate() const {
  switch (kind) {
    case SourceKind::kIdeal:
      break;
    case SourceKind::kBernoulli:
      if (!(p >= 0 && p <= 1)) {
        throw ParameterError("p must lie in [0, 1], got " + FormatDouble(p));
      }
      break;
    case SourceKind::kUnbalancedSplitter:
      ValidateBias(bias);
      break;
    case SourceKind::kMarkov:
      MarkovTransitionMatrix(bias, a1);
      break;
    case SourceKind::kDeadTime:
      ValidateDeadTime(tau, tau_d);
      break;
    case SourceKind::kXorshift64:
      if (seed == 0) throw ParameterError("xorshift64 seed must be nonzero");
      break;
  }
}

double MarkovMinA1(double bias) {
  double b = std::fabs(bias);
  return -(1 - b) / (1 + b);
}

TransitionMatrix MarkovTransitionMatrix(double bias, double a1) {
  ValidateBias(bias);
  double lo = MarkovMinA1(bias);
  if (!(a1 >= lo && a1 <= 1)) {
    throw ParameterError("a1 = " + FormatDouble(a1) +
                         " outside the admissible interval [" +
                         FormatDouble(lo) + ", 1] for bias " +
                         FormatDouble(bias));
  }
  const double p1 = (1 + bias) / 2;
  const double p0 = (1 - bias) / 2;
  TransitionMatrix m;
  // Rounding at the interval ends can leave these a few ulps outside [0, 1].
  m.p1_given_0 = std::clamp(p1 * (1 - a1), 0.0, 1.0);
  m.p1_given_1 = std::clamp(p1 + a1 * p0, 0.0, 1.0);
  m.pi0 = p0;
  m.pi1 = p1;
  return m;
}

void BitSource::Fill(uint64_t n, BitSequence& out) {
  for (uint64_t i = 0; i < n; ++i) out.push_back(NextBit());
}

std::unique_ptr<BitSource> MakeSource(const SourceConfig& config) {
  config.Validate();
  switch (config.kind) {
    case SourceKind::kIdeal:
      return std::make_unique<IdealSource>(config.seed);
    case SourceKind::kBernoulli:
      return std::make_unique<BernoulliSource>(config.p, config.seed);
    case SourceKind::kUnbalancedSplitter:
      return std::make_unique<BernoulliSource>((1 + config.bias) / 2,
                                               config.seed);
    case SourceKind::kMarkov:
      return std::make_unique<MarkovSource>(
          MarkovTransitionMatrix(config.bias, config.a1), config.seed);
    case SourceKind::kDeadTime:
      return std::make_unique<DeadTimeSource>(config.tau, config.tau_d,
                                              config.dead_photon, config.seed);
    case SourceKind::kXorshift64:
      return std::make_unique<XorshiftSource>(config.seed);
  }
  throw ParameterError("unknown source kind");
}

BitSequence Generate(const SourceConfig& config, uint64_t n) {
  return MakeSource(config)->Generate(n);
}

BitSequence SimulateDeadTime(double tau, double tau_d, uint64_t n,
                             uint64_t seed, DeadPhotonPolicy policy) {
  return Generate(SourceConfig::DeadTime(tau, tau_d, seed, policy), n);
}

BitSequence Xorshift64Bits(uint64_t seed, uint64_t n) {
  return Generate(SourceConfig::Xorshift64(seed), n);
}

}  // namespace randev
