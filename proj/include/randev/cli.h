#ifndef RANDEV_CLI_H_
#define RANDEV_CLI_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "randev/estimators.h"
#include "randev/model.h"

namespace randev::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitAlarm = 2,
  kExitIo = 3,
};

// Runs the `randev` command line. argv[0] is the program name.
int Run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

// {"n_bits", "bias": {"value", "sigma"}, "autocorr": [{"lag", "value",
// "sigma"}], "mi_lag1", "cond_entropy", "deviation_plugin",
// "deviation_markov", "deviation_sigma", "n_max"}; n_max is a number or the
// string "unbounded".
nlohmann::json ReportToJson(const AnalysisReport& report);
nlohmann::json PredictionToJson(const model::ModelPrediction& prediction);

// Two-column table, 6 significant digits.
std::string FormatReport(const AnalysisReport& report);

struct MonitorConfig {
  uint64_t window_bits = uint64_t{1} << 20;
  double sigma_k = 3.0;
  std::optional<double> deviation_threshold;

  void Validate() const;
};

enum class WindowStatus { kOk, kAlarm, kIncomplete };

struct WindowResult {
  uint64_t index = 0;
  uint64_t n_bits = 0;
  double d_hat = 0;
  double sigma_d = 0;
  WindowStatus status = WindowStatus::kOk;
};

// "index,d_hat,sigma_d,status".
std::string FormatWindow(const WindowResult& w);

// Splits a bit stream into consecutive windows and flags every full window
// whose plug-in deviation exceeds sigma_k * sigma_D (and the absolute
// threshold, when set). Strictly sequential.
class StreamMonitor {
 public:
  using Sink = std::function<void(const WindowResult&)>;

  StreamMonitor(MonitorConfig config, Sink sink);

  void Feed(const BitSequence& chunk);
  // Reports the trailing partial window, if any, as incomplete. A stream
  // that never filled a window always yields one incomplete line.
  void Finish();

  bool alarmed() const { return alarmed_; }

 private:
  void Emit(WindowStatus status);

  MonitorConfig config_;
  Sink sink_;
  PairCounts window_;
  uint64_t index_ = 0;
  bool alarmed_ = false;
};

// Reads raw bits from `in` until EOF. Returns true if any window alarmed.
// Throws IoError on read failure.
bool RunMonitor(std::istream& in, const MonitorConfig& config,
                const StreamMonitor::Sink& sink);

}  // namespace randev::cli

#endif  // RANDEV_CLI_H_
