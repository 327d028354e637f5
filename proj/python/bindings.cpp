#include "specinv/algorithms.hpp"
#include "specinv/experiment.hpp"
#include "specinv/losses.hpp"
#include "specinv/metrics.hpp"
#include "specinv/projectors.hpp"
#include "specinv/signal_io.hpp"
#include "specinv/spectral.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace specinv;

namespace {

using Samples = py::array_t<double, py::array::c_style | py::array::forcecast>;

TimeSignal to_signal(const Samples& x, double sample_rate)
{
  if (x.ndim() != 1) throw InvalidArgument("expected a 1-D signal");
  TimeSignal s;
  s.sample_rate = sample_rate;
  s.samples.assign(x.data(), x.data() + x.size());
  return s;
}

py::array_t<double> to_array(const TimeSignal& s)
{
  return py::array_t<double>(static_cast<py::ssize_t>(s.size()), s.samples.data());
}

/// None, a number, or "inf".
std::optional<Sigma> to_sigma(const py::object& obj)
{
  if (obj.is_none()) return std::nullopt;
  if (py::isinstance<py::str>(obj)) return Sigma::parse(obj.cast<std::string>());
  const double v = obj.cast<double>();
  return std::isinf(v) && v > 0 ? Sigma::infinity() : Sigma::finite(v);
}

py::object from_sigma(const std::optional<Sigma>& s)
{
  if (!s) return py::none();
  return py::float_(s->is_infinite() ? std::numeric_limits<double>::infinity() : s->value());
}

Problem make_problem(const ComplexSpectrogram& X, std::vector<MagnitudeSpectrogram> V,
                     const StftConfig& cfg, std::size_t length)
{
  Problem p;
  p.mixture = X;
  p.magnitudes = std::move(V);
  p.stft = cfg;
  p.signal_length = length ? length : cfg.natural_length(static_cast<int>(X.cols()));
  return p;
}

py::dict run_algorithm(const ComplexSpectrogram& X, std::vector<MagnitudeSpectrogram> V,
                       const std::string& algorithm, const py::object& sigma, int iterations,
                       const std::optional<std::string>& weights, const StftConfig& cfg,
                       std::size_t length)
{
  AlgorithmSpec spec = algorithm_from_name(algorithm);
  if (auto s = to_sigma(sigma); s && !spec.sigma) spec.sigma = s;
  if (weights) spec.weight_scheme = parse_weight_scheme(*weights);
  spec.iterations = iterations;
  spec.max_iterations = std::max(spec.max_iterations, iterations);

  const Problem problem = make_problem(X, std::move(V), cfg, length);
  RunTrace trace;
  {
    py::gil_scoped_release release;
    trace = run(spec, problem);
  }

  py::array_t<double> losses({static_cast<py::ssize_t>(trace.losses.size()), py::ssize_t{3}});
  auto l = losses.mutable_unchecked<2>();
  py::list objective;
  for (std::size_t k = 0; k < trace.losses.size(); ++k)
  {
    const auto& r = trace.losses[k];
    const auto i = static_cast<py::ssize_t>(k);
    l(i, 0) = r.mixing;
    l(i, 1) = r.inconsistency;
    l(i, 2) = r.magnitude;
    objective.append(r.objective ? py::object(py::float_(*r.objective)) : py::none());
  }

  py::dict out;
  out["estimates"] = trace.estimates;
  out["losses"] = losses;
  out["objective"] = objective;
  out["iterations_run"] = trace.iterations_run;
  out["warnings"] = trace.warnings;
  out["sigma"] = from_sigma(spec.sigma);
  out["family"] = std::string(to_string(spec.family));
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Spectrogram inversion with alternating projections";

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  py::class_<StftConfig>(m, "StftConfig")
      .def(py::init([](int window_length, int hop, double sample_rate) {
             StftConfig c;
             c.window_length = window_length;
             c.hop = hop;
             c.sample_rate = sample_rate;
             c.validate();
             return c;
           }),
           py::arg("window_length") = 1024, py::arg("hop") = 256,
           py::arg("sample_rate") = 16000.0)
      .def_readwrite("window_length", &StftConfig::window_length)
      .def_readwrite("hop", &StftConfig::hop)
      .def_readwrite("sample_rate", &StftConfig::sample_rate)
      .def_property_readonly("num_bins", &StftConfig::num_bins)
      .def("num_frames", &StftConfig::num_frames, py::arg("length"))
      .def("natural_length", &StftConfig::natural_length, py::arg("frames"))
      .def("window", &StftConfig::window)
      .def("__repr__", [](const StftConfig& c) {
        return "StftConfig(window_length=" + std::to_string(c.window_length) +
               ", hop=" + std::to_string(c.hop) + ")";
      });

  m.def(
      "stft", [](const Samples& x, const StftConfig& cfg) { return stft(to_signal(x, cfg.sample_rate), cfg); },
      py::arg("x"), py::arg("cfg") = StftConfig{});
  m.def(
      "istft",
      [](const ComplexSpectrogram& S, std::size_t length, const StftConfig& cfg) {
        return to_array(istft(S, cfg, length));
      },
      py::arg("S"), py::arg("length"), py::arg("cfg") = StftConfig{});
  m.def("g_operator", &g_operator, py::arg("S"), py::arg("cfg") = StftConfig{},
        py::arg("length") = 0, "stft(istft(S)) at the given signal length");
  m.def("spectral_energy", py::overload_cast<const ComplexSpectrogram&>(&spectral_energy));

  m.def(
      "weights_uniform",
      [](std::size_t J, Eigen::Index rows, Eigen::Index cols) {
        return weights_uniform(J, rows, cols).weights;
      },
      py::arg("num_sources"), py::arg("rows"), py::arg("cols"));
  m.def(
      "weights_magnitude_ratio",
      [](const std::vector<MagnitudeSpectrogram>& V, double floor) {
        return weights_magnitude_ratio(V, floor).weights;
      },
      py::arg("V"), py::arg("relative_floor") = 1e-12);
  m.def(
      "p_mix",
      [](const SourceSet& S, const ComplexSpectrogram& X,
         std::optional<std::vector<MagnitudeSpectrogram>> weights) {
        MixingWeights w = weights_uniform(S.size(), X.rows(), X.cols());
        if (weights) w.weights = std::move(*weights);
        return p_mix(S, X, w);
      },
      py::arg("S"), py::arg("X"), py::arg("weights") = py::none());
  m.def(
      "p_mag",
      [](const SourceSet& S, const std::vector<MagnitudeSpectrogram>& V) { return p_mag(S, V); },
      py::arg("S"), py::arg("V"));
  m.def("p_cons", &p_cons, py::arg("S"), py::arg("cfg") = StftConfig{}, py::arg("length") = 0);

  m.def("mixing_error", &mixing_error, py::arg("S"), py::arg("X"));
  m.def("inconsistency", &inconsistency, py::arg("S"), py::arg("cfg") = StftConfig{},
        py::arg("length") = 0);
  m.def(
      "magnitude_mismatch",
      [](const SourceSet& S, const std::vector<MagnitudeSpectrogram>& V) {
        return magnitude_mismatch(S, V);
      },
      py::arg("S"), py::arg("V"));

  m.def(
      "init_amplitude_mask",
      [](const ComplexSpectrogram& X, const std::vector<MagnitudeSpectrogram>& V) {
        return init_amplitude_mask(X, V);
      },
      py::arg("X"), py::arg("V"));
  m.def("run", &run_algorithm, py::arg("X"), py::arg("V"), py::arg("algorithm"),
        py::arg("sigma") = py::none(), py::arg("iterations") = 20,
        py::arg("weights") = py::none(), py::arg("cfg") = StftConfig{}, py::arg("length") = 0,
        "Runs a named algorithm from the amplitude-mask initialization.");
  m.def("algorithm_names", &algorithm_names);

  m.def(
      "sdr",
      [](const Samples& ref, const Samples& est) {
        return sdr(to_signal(ref, 1.0), to_signal(est, 1.0));
      },
      py::arg("reference"), py::arg("estimate"));

  m.def(
      "make_mixture",
      [](const Samples& clean, const Samples& noise, double isnr_db, std::uint64_t seed,
         double sample_rate) {
        const auto r = make_mixture(to_signal(clean, sample_rate), to_signal(noise, sample_rate),
                                    isnr_db, seed);
        py::dict out;
        out["mixture"] = to_array(r.mixture);
        out["scaled_noise"] = to_array(r.scaled_noise);
        out["offset"] = r.offset;
        out["gain"] = r.gain;
        out["achieved_isnr_db"] = r.achieved_isnr_db;
        return out;
      },
      py::arg("clean"), py::arg("noise"), py::arg("isnr_db"), py::arg("seed") = 0,
      py::arg("sample_rate") = 16000.0);
  m.def(
      "degrade_magnitudes",
      [](const std::vector<MagnitudeSpectrogram>& V, double level, std::uint64_t seed) {
        return degrade_magnitudes(V, level, seed);
      },
      py::arg("V"), py::arg("level"), py::arg("seed"));

  m.def(
      "read_wav",
      [](const std::filesystem::path& path) {
        const auto s = read_wav(path);
        return py::make_tuple(to_array(s), s.sample_rate);
      },
      py::arg("path"));
  m.def(
      "write_wav",
      [](const std::filesystem::path& path, const Samples& x, double sample_rate, bool pcm16) {
        write_wav(path, to_signal(x, sample_rate),
                  pcm16 ? WavEncoding::Pcm16 : WavEncoding::Float32);
      },
      py::arg("path"), py::arg("x"), py::arg("sample_rate") = 16000.0,
      py::arg("pcm16") = false);
}
