#include "randev/cli.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "randev/bitstream.h"
#include "randev/errors.h"
#include "randev/experiments.h"
#include "randev/model.h"
#include "randev/sources.h"

namespace randev::cli {
namespace {

using nlohmann::json;

std::string Fmt(double v, int digits) {
  if (std::isinf(v) && v > 0) return "unbounded";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

json NMaxJson(double n_max) {
  if (std::isinf(n_max)) return "unbounded";
  return n_max;
}

struct SourceFlags {
  std::string source = "ideal";
  double p = 0.5;
  double bias = 0;
  double a1 = 0;
  double tau = 1;
  double dead_time = 0;
  std::string dead_photon = "reroute";
  uint64_t seed = 1;

  void Register(CLI::App* app) {
    app->add_option("--source", source,
                    "ideal | bernoulli | splitter | markov | deadtime | "
                    "xorshift64")
        ->capture_default_str();
    app->add_option("--p", p, "P(1) for bernoulli")->capture_default_str();
    app->add_option("--bias", bias, "p(1) - p(0) for splitter and markov")
        ->capture_default_str();
    app->add_option("--a1", a1, "lag-1 autocorrelation for markov")
        ->capture_default_str();
    app->add_option("--tau", tau, "mean photon inter-arrival time (deadtime)")
        ->capture_default_str();
    app->add_option("--dead-time", dead_time, "detector dead time (deadtime)")
        ->capture_default_str();
    app->add_option("--dead-photon", dead_photon,
                    "reroute | loss: fate of a photon hitting a dead detector")
        ->capture_default_str();
    app->add_option("--seed", seed, "64-bit seed")->capture_default_str();
  }

  SourceConfig ToConfig() const {
    auto kind = ParseSourceKind(source);
    if (!kind) throw ParameterError("unknown source '" + source + "'");
    SourceConfig c;
    c.kind = *kind;
    c.p = p;
    c.bias = bias;
    c.a1 = a1;
    c.tau = tau;
    c.tau_d = dead_time;
    c.seed = seed;
    if (dead_photon == "reroute") {
      c.dead_photon = DeadPhotonPolicy::kReroute;
    } else if (dead_photon == "loss") {
      c.dead_photon = DeadPhotonPolicy::kLoss;
    } else {
      throw ParameterError("--dead-photon must be reroute or loss");
    }
    c.Validate();
    return c;
  }
};

BitFormat FormatFlag(const std::string& name) {
  auto f = ParseBitFormat(name);
  if (!f) throw ParameterError("--format must be raw or ascii");
  return *f;
}

BitSequence ReadInput(const std::string& path, BitFormat format,
                      std::optional<uint64_t> nbits, std::istream& in) {
  if (path == "-") {
    if (format != BitFormat::kRaw) {
      throw ParameterError("stdin input is raw format only");
    }
    return ReadBits(in, format, nbits);
  }
  return ReadBits(std::filesystem::path(path), format, nbits);
}

void WriteOutput(const BitSequence& seq, const std::string& path,
                 BitFormat format, std::ostream& out) {
  if (path == "-") {
    WriteBits(seq, out, format);
  } else {
    WriteBits(seq, std::filesystem::path(path), format);
  }
}

// Opens `path` for text output, or returns `fallback` when path is empty.
class TextSink {
 public:
  TextSink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::trunc);
    if (!file_) throw IoError("cannot open " + path + " for writing");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }
  void Close() {
    stream_->flush();
    if (!*stream_) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

unsigned ResolveThreads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

json ReportToJson(const AnalysisReport& r) {
  json autocorr = json::array();
  for (const auto& a : r.autocorr) {
    autocorr.push_back({{"lag", a.lag}, {"value", a.value}, {"sigma", a.sigma}});
  }
  return {
      {"n_bits", r.n_bits},
      {"bias", {{"value", r.bias.value}, {"sigma", r.bias.sigma}}},
      {"autocorr", autocorr},
      {"mi_lag1", r.mi_lag1},
      {"cond_entropy", r.cond_entropy},
      {"deviation_plugin", r.deviation_plugin},
      {"deviation_markov", r.deviation_markov},
      {"deviation_sigma", r.deviation_sigma},
      {"n_max", NMaxJson(r.n_max)},
  };
}

json PredictionToJson(const model::ModelPrediction& p) {
  return {
      {"bias", p.bias},
      {"a1", p.a1},
      {"mutual_info", p.mutual_info},
      {"cond_entropy", p.cond_entropy},
      {"deviation_exact", p.deviation_exact},
      {"deviation_approx", p.deviation_approx},
      {"n_max", NMaxJson(model::NMax(p.deviation_exact))},
  };
}

std::string FormatReport(const AnalysisReport& r) {
  std::ostringstream os;
  char line[128];
  auto row = [&](const std::string& name, const std::string& value) {
    std::snprintf(line, sizeof(line), "%-18s %s\n", name.c_str(),
                  value.c_str());
    os << line;
  };
  row("n_bits", std::to_string(r.n_bits));
  row("bias", Fmt(r.bias.value, 6) + " +/- " + Fmt(r.bias.sigma, 6));
  for (const auto& a : r.autocorr) {
    row("a" + std::to_string(a.lag), Fmt(a.value, 6) + " +/- " + Fmt(a.sigma, 6));
  }
  row("mi_lag1", Fmt(r.mi_lag1, 6));
  row("cond_entropy", Fmt(r.cond_entropy, 6));
  row("deviation_plugin", Fmt(r.deviation_plugin, 6));
  row("deviation_markov", Fmt(r.deviation_markov, 6));
  row("deviation_sigma", Fmt(r.deviation_sigma, 6));
  row("n_max", Fmt(r.n_max, 6));
  return os.str();
}

void MonitorConfig::Validate() const {
  if (window_bits < 1024) throw ParameterError("window must be >= 1024 bits");
  if (!(sigma_k > 0)) throw ParameterError("sigma-k must be > 0");
  if (deviation_threshold && !(*deviation_threshold >= 0)) {
    throw ParameterError("threshold must be >= 0");
  }
}

std::string FormatWindow(const WindowResult& w) {
  const char* status = w.status == WindowStatus::kAlarm        ? "ALARM"
                       : w.status == WindowStatus::kIncomplete ? "incomplete"
                                                               : "ok";
  return std::to_string(w.index) + "," + Fmt(w.d_hat, 9) + "," +
         Fmt(w.sigma_d, 9) + "," + status;
}

StreamMonitor::StreamMonitor(MonitorConfig config, Sink sink)
    : config_(config), sink_(std::move(sink)) {
  config_.Validate();
}

void StreamMonitor::Feed(const BitSequence& chunk) {
  uint64_t pos = 0;
  while (pos < chunk.size()) {
    const uint64_t take =
        std::min(config_.window_bits - window_.n, chunk.size() - pos);
    window_ = Accumulate(window_, chunk.Slice(pos, take));
    pos += take;
    if (window_.n == config_.window_bits) {
      const double d = DeviationPlugin(window_);
      const double sigma =
          model::DeviationSigma(d, static_cast<double>(window_.n));
      bool alarm = d > config_.sigma_k * sigma;
      if (config_.deviation_threshold) {
        alarm = alarm && d > *config_.deviation_threshold;
      }
      Emit(alarm ? WindowStatus::kAlarm : WindowStatus::kOk);
    }
  }
}

void StreamMonitor::Finish() {
  if (window_.n > 0 || index_ == 0) Emit(WindowStatus::kIncomplete);
}

void StreamMonitor::Emit(WindowStatus status) {
  WindowResult w;
  w.index = index_++;
  w.n_bits = window_.n;
  w.status = status;
  if (window_.n >= 2) {
    w.d_hat = DeviationPlugin(window_);
    w.sigma_d = model::DeviationSigma(w.d_hat, static_cast<double>(window_.n));
  }
  if (status == WindowStatus::kAlarm) alarmed_ = true;
  window_ = PairCounts{};
  sink_(w);
}

bool RunMonitor(std::istream& in, const MonitorConfig& config,
                const StreamMonitor::Sink& sink) {
  StreamMonitor monitor(config, sink);
  std::vector<uint8_t> buf(1 << 16);
  for (;;) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<size_t>(in.gcount());
    if (got > 0) {
      monitor.Feed(BitSequence::FromBytes(std::span(buf.data(), got)));
    }
    if (in.bad()) throw IoError("read failed");
    if (!in) break;
  }
  monitor.Finish();
  return monitor.alarmed();
}

int Run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Simulate random bit generators and measure randomness deviation"};
  app.name("randev");
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write bits from a simulated source");
  SourceFlags gen_src;
  gen_src.Register(gen);
  uint64_t gen_nbits = 0;
  std::string gen_out;
  std::string gen_format = "raw";
  gen->add_option("--nbits", gen_nbits, "number of bits")->required();
  gen->add_option("--out", gen_out, "output file, - for stdout")->required();
  gen->add_option("--format", gen_format, "raw | ascii")->capture_default_str();

  // analyze
  auto* ana = app.add_subcommand("analyze", "Measure a bit file");
  std::string ana_file;
  std::string ana_format = "raw";
  std::optional<uint64_t> ana_nbits;
  unsigned ana_max_lag = 8;
  bool ana_json = false;
  unsigned ana_threads = 0;
  ana->add_option("file", ana_file, "input file, - for stdin (raw)")->required();
  ana->add_option("--format", ana_format, "raw | ascii")->capture_default_str();
  ana->add_option("--nbits", ana_nbits, "use only the first N bits");
  ana->add_option("--max-lag", ana_max_lag, "largest autocorrelation lag")
      ->capture_default_str();
  ana->add_flag("--json", ana_json, "emit JSON");
  ana->add_option("--threads", ana_threads, "worker threads, 0 = all cores")
      ->capture_default_str();

  // predict
  auto* pre = app.add_subcommand("predict", "Closed-form model values for a source");
  SourceFlags pre_src;
  pre_src.Register(pre);

  // nmax
  auto* nmx = app.add_subcommand("nmax", "Maximum usable sequence length");
  std::optional<double> nmx_dev;
  std::optional<double> nmx_a1;
  std::optional<double> nmx_bias;
  auto* dev_opt = nmx->add_option("--deviation", nmx_dev, "randomness deviation D");
  auto* a1_opt = nmx->add_option("--a1", nmx_a1, "lag-1 autocorrelation");
  auto* bias_opt = nmx->add_option("--bias", nmx_bias, "bias");
  dev_opt->excludes(a1_opt)->excludes(bias_opt);

  // monitor
  auto* mon = app.add_subcommand("monitor", "Windowed health check of a raw bit stream");
  MonitorConfig mon_cfg;
  std::string mon_file = "-";
  mon->add_option("file", mon_file, "input, - for stdin")->capture_default_str();
  mon->add_option("--window", mon_cfg.window_bits, "bits per window")
      ->capture_default_str();
  mon->add_option("--sigma-k", mon_cfg.sigma_k, "alarm significance in sigma_D")
      ->capture_default_str();
  mon->add_option("--threshold", mon_cfg.deviation_threshold,
                  "absolute deviation floor for alarms");

  // validate-approx
  auto* val = app.add_subcommand("validate-approx",
                                 "Error of the quadratic deviation approximation");
  double val_step = 0.02;
  std::optional<uint64_t> val_nbits;
  uint64_t val_seed = 1;
  unsigned val_threads = 0;
  std::string val_out;
  val->add_option("--grid-step", val_step, "grid spacing in b and a1")
      ->capture_default_str();
  val->add_option("--nbits", val_nbits, "also simulate N bits per grid point");
  val->add_option("--seed", val_seed, "seed for simulated points")
      ->capture_default_str();
  val->add_option("--threads", val_threads, "worker threads, 0 = all cores")
      ->capture_default_str();
  val->add_option("--out", val_out, "CSV output file");

  // fig2
  auto* fig = app.add_subcommand("fig2", "Exact vs parabolic mutual information curve");
  double fig_min = -1, fig_max = 1, fig_step = 0.01;
  std::string fig_out;
  fig->add_option("--min", fig_min)->capture_default_str();
  fig->add_option("--max", fig_max)->capture_default_str();
  fig->add_option("--step", fig_step)->capture_default_str();
  fig->add_option("--out", fig_out, "CSV output file (default stdout)");

  // concat
  auto* cat = app.add_subcommand("concat", "Concatenate bit files");
  std::vector<std::string> cat_inputs;
  std::string cat_out;
  std::string cat_format = "raw";
  cat->add_option("inputs", cat_inputs, "input files")->required();
  cat->add_option("--out", cat_out, "output file, - for stdout")->required();
  cat->add_option("--format", cat_format, "raw | ascii")->capture_default_str();

  // prng-demo
  auto* demo = app.add_subcommand(
      "prng-demo", "Statistics of a seeded xorshift64 stream vs its entropy bound");
  uint64_t demo_seed = 1;
  uint64_t demo_length = uint64_t{1} << 20;
  demo->add_option("--seed", demo_seed)->capture_default_str();
  demo->add_option("--length", demo_length, "bits to generate")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      const SourceConfig cfg = gen_src.ToConfig();
      const BitFormat fmt = FormatFlag(gen_format);
      WriteOutput(Generate(cfg, gen_nbits), gen_out, fmt, out);
    } else if (*ana) {
      const BitSequence seq =
          ReadInput(ana_file, FormatFlag(ana_format), ana_nbits, in);
      const AnalysisReport r =
          AnalyzeParallel(seq, ana_max_lag, ResolveThreads(ana_threads));
      if (ana_json) {
        out << ReportToJson(r).dump(2) << '\n';
      } else {
        out << FormatReport(r);
      }
    } else if (*pre) {
      const SourceConfig cfg = pre_src.ToConfig();
      json j = PredictionToJson(model::Predict(cfg));
      j["source"] = std::string(SourceKindName(cfg.kind));
      out << j.dump(2) << '\n';
    } else if (*nmx) {
      double d;
      if (nmx_dev) {
        d = *nmx_dev;
      } else if (nmx_a1 || nmx_bias) {
        d = model::DeviationApprox(nmx_bias.value_or(0), nmx_a1.value_or(0));
      } else {
        err << "nmax: give --deviation or --a1/--bias\n";
        return kExitUsage;
      }
      const double n = model::NMax(d);
      out << "deviation " << Fmt(d, 9) << '\n' << "n_max " << Fmt(n, 9) << '\n';
    } else if (*mon) {
      mon_cfg.Validate();
      auto sink = [&out](const WindowResult& w) {
        out << FormatWindow(w) << '\n';
      };
      bool alarm;
      if (mon_file == "-") {
        alarm = RunMonitor(in, mon_cfg, sink);
      } else {
        std::ifstream f(mon_file, std::ios::binary);
        if (!f) throw IoError("cannot open " + mon_file);
        alarm = RunMonitor(f, mon_cfg, sink);
      }
      out.flush();
      return alarm ? kExitAlarm : kExitOk;
    } else if (*val) {
      const auto grid = experiments::ValidateApprox(
          val_step, val_nbits, val_seed, ResolveThreads(val_threads));
      if (!val_out.empty()) {
        TextSink sink(val_out, out);
        experiments::WriteGridCsv(grid, sink.get());
        sink.Close();
      }
      out << "grid_points " << grid.rows.size() << '\n'
          << "max_relative_error " << Fmt(grid.max_relative_error, 9) << '\n'
          << "argmax_b " << Fmt(grid.argmax_bias, 9) << '\n'
          << "argmax_a1 " << Fmt(grid.argmax_a1, 9) << '\n';
      if (val_nbits) out << "max_abs_z " << Fmt(grid.max_abs_z, 9) << '\n';
    } else if (*fig) {
      const auto rows = experiments::Fig2Curve(fig_min, fig_max, fig_step);
      TextSink sink(fig_out, out);
      experiments::WriteFig2Csv(rows, sink.get());
      sink.Close();
    } else if (*cat) {
      const BitFormat fmt = FormatFlag(cat_format);
      std::vector<BitSequence> parts;
      for (const auto& path : cat_inputs) {
        parts.push_back(ReadInput(path, fmt, std::nullopt, in));
      }
      WriteOutput(Concat(parts), cat_out, fmt, out);
    } else if (*demo) {
      const auto r = experiments::PrngDemo(demo_seed, demo_length);
      json j = {
          {"length", r.length},
          {"entropy_bound", r.entropy_bound},
          {"reproducible", r.reproducible},
          {"max_abs_z", r.max_abs_z},
          {"analysis", ReportToJson(r.analysis)},
      };
      out << j.dump(2) << '\n';
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace randev::cli
