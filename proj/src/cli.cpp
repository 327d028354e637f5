#include "specinv/cli.hpp"

#include "specinv/algorithms.hpp"
#include "specinv/experiment.hpp"
#include "specinv/losses.hpp"
#include "specinv/metrics.hpp"
#include "specinv/signal_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <thread>

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace specinv::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

struct MixArgs
{
  std::string clean, noise, out;
  double isnr = 0.0;
  std::uint64_t seed = 0;
};

void cmd_mix(const MixArgs& a, std::ostream& out)
{
  const auto clean = read_wav(a.clean);
  const auto noise = read_wav(a.noise);
  const auto m = make_mixture(clean, noise, a.isnr, a.seed);
  const fs::path dir(a.out);
  ensure_dir(dir);
  write_wav(dir / "mixture.wav", m.mixture);
  write_wav(dir / "scaled_noise.wav", m.scaled_noise);

  nlohmann::json sidecar = {{"gain", m.gain},
                            {"offset", m.offset},
                            {"achieved_isnr_db", m.achieved_isnr_db},
                            {"isnr_db", a.isnr},
                            {"seed", a.seed},
                            {"sample_rate", clean.sample_rate}};
  std::ofstream js(dir / "mixture.json", std::ios::trunc);
  if (!js) throw IoError("cannot write " + (dir / "mixture.json").string());
  js << sidecar.dump(2) << '\n';
  out << "wrote " << (dir / "mixture.wav").string() << " (gain " << m.gain << ")\n";
}

struct SeparateArgs
{
  std::string mixture, out, algo, sigma, weights = "magratio";
  std::vector<std::string> mags;
  int iters = 20;
  int window = 1024;
  int hop = 256;
};

void cmd_separate(const SeparateArgs& a, std::ostream& out, std::ostream& err)
{
  AlgorithmSpec spec = algorithm_from_name(a.algo);
  if (!a.sigma.empty())
  {
    const auto s = Sigma::parse(a.sigma);
    if (spec.sigma && !(*spec.sigma == s))
      err << "warning: " << a.algo << " pins sigma to " << spec.sigma->to_string()
          << "; ignoring --sigma\n";
    else
      spec.sigma = s;
  }
  spec.weight_scheme = parse_weight_scheme(a.weights);
  if (!uses_weight_scheme(spec.family)) spec.weight_scheme.reset();
  spec.iterations = a.iters;
  spec.max_iterations = std::max(spec.max_iterations, a.iters);

  const auto x = read_wav(a.mixture);
  Problem problem;
  problem.stft.window_length = a.window;
  problem.stft.hop = a.hop;
  problem.stft.sample_rate = x.sample_rate;
  problem.mixture = stft(x, problem.stft);
  problem.signal_length = x.size();
  for (const auto& path : a.mags) problem.magnitudes.push_back(read_magnitudes(path));

  const auto trace = run(spec, problem);
  for (const auto& w : trace.warnings) err << "warning: " << w << '\n';

  const fs::path dir(a.out);
  ensure_dir(dir);
  for (std::size_t j = 0; j < trace.estimates.size(); ++j)
  {
    auto signal = istft(trace.estimates[j], problem.stft, x.size());
    write_wav(dir / ("source_" + std::to_string(j + 1) + ".wav"), signal);
  }
  std::ofstream csv(dir / "trace.csv", std::ios::trunc);
  if (!csv) throw IoError("cannot write " + (dir / "trace.csv").string());
  csv << "iteration,h,i,m\n";
  char buf[128];
  for (std::size_t k = 0; k < trace.losses.size(); ++k)
  {
    const auto& r = trace.losses[k];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", k, r.mixing,
                  r.inconsistency, r.magnitude);
    csv << buf;
  }
  out << "ran " << a.algo << " for " << trace.iterations_run << " iterations; wrote "
      << trace.estimates.size() << " sources to " << dir.string() << '\n';
}

void cmd_evaluate(const std::string& ref, const std::string& est, std::ostream& out)
{
  const double value = sdr(read_wav(ref), read_wav(est));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f\n", value);
  out << buf;
}

void cmd_benchmark(const std::string& config_path, int jobs, std::ostream& out)
{
  const auto config = read_sweep_config(config_path);
  const auto result = run_benchmark(config, jobs);
  out << "validation rows: " << result.validation.rows.size() << " -> "
      << result.validation_csv.string() << '\n'
      << "test rows: " << result.test.rows.size() << " -> " << result.test_csv.string()
      << '\n';
}

struct DatasetArgs
{
  std::string out;
  int items = 10;
  std::uint64_t seed = 2024;
  double seconds = 4.0;
};

void cmd_make_dataset(const DatasetArgs& a, std::ostream& out)
{
  SyntheticDatasetOptions options;
  options.items_per_split = a.items;
  options.seed = a.seed;
  options.clean_seconds = a.seconds;
  options.noise_seconds = a.seconds * 1.5;
  const auto manifest = generate_synthetic_dataset(a.out, options);
  out << "wrote " << manifest.string() << " and "
      << (fs::path(a.out) / "benchmark.json").string() << '\n';
}

struct MagsArgs
{
  std::string in, out;
  double degrade = 0.0;
  std::uint64_t seed = 0;
  int window = 1024;
  int hop = 256;
};

void cmd_mags(const MagsArgs& a, std::ostream& out)
{
  const auto x = read_wav(a.in);
  StftConfig cfg;
  cfg.window_length = a.window;
  cfg.hop = a.hop;
  cfg.sample_rate = x.sample_rate;
  const std::vector<TimeSignal> sources = {x};
  auto V = degrade_magnitudes(oracle_magnitudes(sources, cfg), a.degrade, a.seed);
  write_spectrogram(a.out, V.front());
  out << "wrote " << a.out << " (" << V.front().rows() << "x" << V.front().cols() << ")\n";
}

} // namespace

void tune_allocator()
{
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Spectrogram inversion for source separation"};
  app.require_subcommand(1);

  MixArgs mix;
  auto* mix_cmd = app.add_subcommand("mix", "Mix clean speech and noise at a target iSNR");
  mix_cmd->add_option("--clean", mix.clean, "Clean speech WAV")->required();
  mix_cmd->add_option("--noise", mix.noise, "Noise WAV")->required();
  mix_cmd->add_option("--isnr", mix.isnr, "Input SNR in dB")->required();
  mix_cmd->add_option("--seed", mix.seed, "Crop seed");
  mix_cmd->add_option("--out", mix.out, "Output directory")->required();

  SeparateArgs sep;
  auto* sep_cmd = app.add_subcommand("separate", "Run a spectrogram inversion algorithm");
  sep_cmd->add_option("--mixture", sep.mixture, "Mixture WAV")->required();
  sep_cmd->add_option("--mags", sep.mags, "One SPGM magnitude file per source")->required();
  sep_cmd->add_option("--algo", sep.algo, "Algorithm name")->required();
  sep_cmd->add_option("--sigma", sep.sigma, "Consistency weight (number or inf)");
  sep_cmd->add_option("--iters", sep.iters, "Iterations")->capture_default_str();
  sep_cmd->add_option("--weights", sep.weights, "uniform or magratio")->capture_default_str();
  sep_cmd->add_option("--window", sep.window, "Window length")->capture_default_str();
  sep_cmd->add_option("--hop", sep.hop, "Hop size")->capture_default_str();
  sep_cmd->add_option("--out", sep.out, "Output directory")->required();

  std::string ref, est;
  auto* eval_cmd = app.add_subcommand("evaluate", "Print the SDR of an estimate");
  eval_cmd->add_option("--ref", ref, "Reference WAV")->required();
  eval_cmd->add_option("--est", est, "Estimate WAV")->required();

  std::string config_path;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* bench_cmd = app.add_subcommand("benchmark", "Validation sweep plus test evaluation");
  bench_cmd->add_option("--config", config_path, "Sweep config JSON")->required();
  bench_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  DatasetArgs data;
  auto* data_cmd = app.add_subcommand("make-dataset", "Write the synthetic desk-scale dataset");
  data_cmd->add_option("--out", data.out, "Output directory")->required();
  data_cmd->add_option("--items", data.items, "Items per split")->capture_default_str();
  data_cmd->add_option("--seed", data.seed, "Seed")->capture_default_str();
  data_cmd->add_option("--seconds", data.seconds, "Speech duration")->capture_default_str();

  MagsArgs mags;
  auto* mags_cmd = app.add_subcommand("mags", "Write (optionally degraded) STFT magnitudes of a WAV");
  mags_cmd->add_option("--in", mags.in, "Input WAV")->required();
  mags_cmd->add_option("--out", mags.out, "Output SPGM file")->required();
  mags_cmd->add_option("--degrade", mags.degrade, "Log-Gaussian degradation level");
  mags_cmd->add_option("--seed", mags.seed, "Degradation seed");
  mags_cmd->add_option("--window", mags.window, "Window length")->capture_default_str();
  mags_cmd->add_option("--hop", mags.hop, "Hop size")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try
  {
    app.parse(reversed);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try
  {
    if (*mix_cmd) cmd_mix(mix, out);
    else if (*sep_cmd) cmd_separate(sep, out, err);
    else if (*eval_cmd) cmd_evaluate(ref, est, out);
    else if (*bench_cmd) cmd_benchmark(config_path, jobs, out);
    else if (*data_cmd) cmd_make_dataset(data, out);
    else if (*mags_cmd) cmd_mags(mags, out);
  }
  catch (const IoError& e)
  {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  catch (const std::invalid_argument& e)
  {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

} // namespace specinv::cli
