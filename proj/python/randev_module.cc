#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "randev/bitstream.h"
#include "randev/errors.h"
#include "randev/estimators.h"
#include "randev/experiments.h"
#include "randev/model.h"
#include "randev/sources.h"

namespace py = pybind11;
using namespace randev;

namespace {

BitFormat FormatArg(const std::string& name) {
  auto f = ParseBitFormat(name);
  if (!f) throw ParameterError("format must be 'raw' or 'ascii'");
  return *f;
}

py::object NMaxObject(double n_max) {
  if (n_max == model::kUnbounded) return py::str("unbounded");
  return py::float_(n_max);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomness deviation of bit generators";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError",
                                                PyExc_ValueError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError",
                                               PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<BitSequence>(m, "BitSequence")
      .def(py::init<>())
      .def_static("from_string", &BitSequence::FromString)
      .def_static(
          "from_bytes",
          [](py::bytes data, std::optional<uint64_t> nbits) {
            std::string s = data;
            auto span = std::span(reinterpret_cast<const uint8_t*>(s.data()),
                                  s.size());
            return nbits ? BitSequence::FromBytes(span, *nbits)
                         : BitSequence::FromBytes(span);
          },
          py::arg("data"), py::arg("nbits") = py::none())
      .def("__len__", &BitSequence::size)
      .def("__getitem__",
           [](const BitSequence& s, uint64_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           })
      .def("to_string", &BitSequence::ToString)
      .def("to_bytes",
           [](const BitSequence& s) {
             auto b = s.bytes();
             return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
           })
      .def("count_ones", py::overload_cast<>(&BitSequence::CountOnes, py::const_))
      .def("slice", &BitSequence::Slice)
      .def("append", &BitSequence::Append)
      .def(py::self == py::self)
      .def("__repr__", [](const BitSequence& s) {
        return "<BitSequence nbits=" + std::to_string(s.size()) + ">";
      });

  m.def("concat", py::overload_cast<const BitSequence&, const BitSequence&>(&Concat));
  m.def("concat_all", [](const std::vector<BitSequence>& parts) {
    return Concat(std::span<const BitSequence>(parts));
  });
  m.def(
      "write_bits",
      [](const BitSequence& s, const std::string& path, const std::string& fmt) {
        WriteBits(s, std::filesystem::path(path), FormatArg(fmt));
      },
      py::arg("seq"), py::arg("path"), py::arg("format") = "raw");
  m.def(
      "read_bits",
      [](const std::string& path, const std::string& fmt,
         std::optional<uint64_t> nbits) {
        return ReadBits(std::filesystem::path(path), FormatArg(fmt), nbits);
      },
      py::arg("path"), py::arg("format") = "raw", py::arg("nbits") = py::none());

  // sources
  py::enum_<SourceKind>(m, "SourceKind")
      .value("IDEAL", SourceKind::kIdeal)
      .value("BERNOULLI", SourceKind::kBernoulli)
      .value("UNBALANCED_SPLITTER", SourceKind::kUnbalancedSplitter)
      .value("MARKOV", SourceKind::kMarkov)
      .value("DEAD_TIME", SourceKind::kDeadTime)
      .value("XORSHIFT64", SourceKind::kXorshift64);
  py::enum_<DeadPhotonPolicy>(m, "DeadPhotonPolicy")
      .value("REROUTE", DeadPhotonPolicy::kReroute)
      .value("LOSS", DeadPhotonPolicy::kLoss);

  py::class_<SourceConfig>(m, "SourceConfig")
      .def_readwrite("kind", &SourceConfig::kind)
      .def_readwrite("p", &SourceConfig::p)
      .def_readwrite("bias", &SourceConfig::bias)
      .def_readwrite("a1", &SourceConfig::a1)
      .def_readwrite("tau", &SourceConfig::tau)
      .def_readwrite("tau_d", &SourceConfig::tau_d)
      .def_readwrite("dead_photon", &SourceConfig::dead_photon)
      .def_readwrite("seed", &SourceConfig::seed)
      .def_static("ideal", &SourceConfig::Ideal, py::arg("seed") = 1)
      .def_static("bernoulli", &SourceConfig::Bernoulli, py::arg("p"),
                  py::arg("seed") = 1)
      .def_static("splitter", &SourceConfig::UnbalancedSplitter,
                  py::arg("bias"), py::arg("seed") = 1)
      .def_static("markov", &SourceConfig::Markov, py::arg("bias"),
                  py::arg("a1"), py::arg("seed") = 1)
      .def_static("deadtime", &SourceConfig::DeadTime, py::arg("tau"),
                  py::arg("tau_d"), py::arg("seed") = 1,
                  py::arg("policy") = DeadPhotonPolicy::kReroute)
      .def_static("xorshift64", &SourceConfig::Xorshift64, py::arg("seed") = 1)
      .def("validate", &SourceConfig::Validate);

  py::class_<TransitionMatrix>(m, "TransitionMatrix")
      .def_readonly("p1_given_0", &TransitionMatrix::p1_given_0)
      .def_readonly("p1_given_1", &TransitionMatrix::p1_given_1)
      .def_readonly("pi0", &TransitionMatrix::pi0)
      .def_readonly("pi1", &TransitionMatrix::pi1);

  py::class_<SplitMix64>(m, "SplitMix64")
      .def(py::init<uint64_t>(), py::arg("seed") = 0)
      .def("next", &SplitMix64::Next)
      .def("next_double", &SplitMix64::NextDouble);

  py::class_<BitSource>(m, "BitSource")
      .def("next_bit", &BitSource::NextBit)
      .def("generate", &BitSource::Generate);
  m.def("make_source", &MakeSource);
  m.def("generate", &Generate, py::arg("config"), py::arg("n"));
  m.def("markov_transition_matrix", &MarkovTransitionMatrix, py::arg("bias"),
        py::arg("a1"));
  m.def("simulate_deadtime", &SimulateDeadTime, py::arg("tau"),
        py::arg("tau_d"), py::arg("n"), py::arg("seed"),
        py::arg("policy") = DeadPhotonPolicy::kReroute);
  m.def("xorshift64_bits", &Xorshift64Bits, py::arg("seed"), py::arg("n"));

  // model
  py::class_<model::ModelPrediction>(m, "ModelPrediction")
      .def_readonly("bias", &model::ModelPrediction::bias)
      .def_readonly("a1", &model::ModelPrediction::a1)
      .def_readonly("mutual_info", &model::ModelPrediction::mutual_info)
      .def_readonly("cond_entropy", &model::ModelPrediction::cond_entropy)
      .def_readonly("deviation_exact", &model::ModelPrediction::deviation_exact)
      .def_readonly("deviation_approx", &model::ModelPrediction::deviation_approx);
  m.def("binary_entropy", &model::BinaryEntropy);
  m.def("deadtime_a1", &model::DeadtimeA1, py::arg("tau"), py::arg("tau_d"));
  m.def("mi_exact_unbiased", &model::MiExactUnbiased);
  m.def("mi_parabolic", &model::MiParabolic);
  m.def("markov_prediction", &model::MarkovPrediction, py::arg("bias"),
        py::arg("a1"));
  m.def("predict", &model::Predict);
  m.def("deviation_approx", &model::DeviationApprox, py::arg("bias"),
        py::arg("a1"));
  m.def("deviation_sigma", &model::DeviationSigma, py::arg("deviation"),
        py::arg("n"));
  m.def("n_max", [](double d) { return NMaxObject(model::NMax(d)); });

  // estimators
  py::class_<PairCounts>(m, "PairCounts")
      .def(py::init<>())
      .def_readwrite("n", &PairCounts::n)
      .def_readwrite("ones", &PairCounts::ones)
      .def_readwrite("c00", &PairCounts::c00)
      .def_readwrite("c01", &PairCounts::c01)
      .def_readwrite("c10", &PairCounts::c10)
      .def_readwrite("c11", &PairCounts::c11)
      .def_readwrite("first_bit", &PairCounts::first_bit)
      .def_readwrite("last_bit", &PairCounts::last_bit)
      .def(py::self == py::self);
  m.def("count_pairs", &CountPairs);
  m.def("accumulate", &Accumulate);
  m.def("merge", &Merge);
  m.def("bias_estimate", [](const PairCounts& c) {
    auto b = EstimateBias(c);
    return py::make_tuple(b.value, b.sigma);
  });
  m.def("autocorr", [](const BitSequence& s, unsigned lag) {
    auto a = Autocorrelation(s, lag);
    return py::make_tuple(a.value, a.sigma);
  });
  m.def("mutual_information_lag1", &MutualInformationLag1);
  m.def("cond_entropy_lag1", &CondEntropyLag1);
  m.def("marginal_entropy", &MarginalEntropy);
  m.def("deviation_plugin", &DeviationPlugin);

  py::class_<AutocorrEstimate>(m, "AutocorrEstimate")
      .def_readonly("lag", &AutocorrEstimate::lag)
      .def_readonly("value", &AutocorrEstimate::value)
      .def_readonly("sigma", &AutocorrEstimate::sigma);
  py::class_<AnalysisReport>(m, "AnalysisReport")
      .def_readonly("n_bits", &AnalysisReport::n_bits)
      .def_property_readonly("bias",
                             [](const AnalysisReport& r) { return r.bias.value; })
      .def_property_readonly("bias_sigma",
                             [](const AnalysisReport& r) { return r.bias.sigma; })
      .def_readonly("autocorr", &AnalysisReport::autocorr)
      .def_readonly("mi_lag1", &AnalysisReport::mi_lag1)
      .def_readonly("cond_entropy", &AnalysisReport::cond_entropy)
      .def_readonly("deviation_plugin", &AnalysisReport::deviation_plugin)
      .def_readonly("deviation_markov", &AnalysisReport::deviation_markov)
      .def_readonly("deviation_sigma", &AnalysisReport::deviation_sigma)
      .def_property_readonly(
          "n_max", [](const AnalysisReport& r) { return NMaxObject(r.n_max); })
      .def(py::self == py::self);
  m.def(
      "analyze",
      [](const BitSequence& s, unsigned max_lag, unsigned threads) {
        py::gil_scoped_release release;
        return AnalyzeParallel(s, max_lag, threads);
      },
      py::arg("seq"), py::arg("max_lag") = 8, py::arg("threads") = 1);

  // experiments
  py::class_<experiments::GridResult>(m, "GridResult")
      .def_readonly("max_relative_error", &experiments::GridResult::max_relative_error)
      .def_readonly("argmax_bias", &experiments::GridResult::argmax_bias)
      .def_readonly("argmax_a1", &experiments::GridResult::argmax_a1)
      .def_readonly("max_abs_z", &experiments::GridResult::max_abs_z)
      .def_property_readonly("rows", [](const experiments::GridResult& g) {
        py::list rows;
        for (const auto& r : g.rows) {
          rows.append(py::make_tuple(r.bias, r.a1, r.deviation_exact,
                                     r.deviation_approx, r.relative_error));
        }
        return rows;
      });
  m.def(
      "validate_approx",
      [](double step, std::optional<uint64_t> n_bits, uint64_t seed) {
        py::gil_scoped_release release;
        return experiments::ValidateApprox(step, n_bits, seed);
      },
      py::arg("grid_step"), py::arg("n_bits") = py::none(), py::arg("seed") = 1);
  m.def(
      "fig2_curve",
      [](double lo, double hi, double step) {
        py::list rows;
        for (const auto& r : experiments::Fig2Curve(lo, hi, step)) {
          rows.append(py::make_tuple(r.a1, r.mi_exact, r.mi_approx));
        }
        return rows;
      },
      py::arg("a1_min"), py::arg("a1_max"), py::arg("step"));
  m.def(
      "concat_property",
      [](const SourceConfig& c, const std::vector<uint64_t>& lengths,
         uint64_t seed) {
        return experiments::ConcatProperty(c, lengths, seed).pass();
      },
      py::arg("config"), py::arg("lengths"), py::arg("seed"));
  m.def(
      "prng_demo",
      [](uint64_t seed, uint64_t length) {
        auto r = experiments::PrngDemo(seed, length);
        py::dict d;
        d["length"] = r.length;
        d["entropy_bound"] = r.entropy_bound;
        d["reproducible"] = r.reproducible;
        d["max_abs_z"] = r.max_abs_z;
        d["analysis"] = r.analysis;
        return d;
      },
      py::arg("seed"), py::arg("length"));
}
