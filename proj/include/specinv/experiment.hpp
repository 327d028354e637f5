#pragma once

#include "specinv/algorithms.hpp"
#include "specinv/projectors.hpp"
#include "specinv/signal_io.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specinv {

/// One evaluation condition: a mixture iSNR and the magnitude degradation
/// level standing in for estimator accuracy at that iSNR.
struct Condition
{
  double isnr_db = 0.0;
  double degradation = 0.0;

  friend auto operator<=>(const Condition&, const Condition&) = default;
};

struct SweepConfig
{
  /// Family names and aliases, see algorithm_names().
  std::vector<std::string> algorithms;
  std::vector<Sigma> sigmas;
  int max_iterations = 20;
  WeightScheme weight_scheme = WeightScheme::MagnitudeRatio;
  /// iSNR (dB) -> degradation levels run on items at that iSNR.
  std::map<double, std::vector<double>> degradation;
  std::filesystem::path manifest;
  std::filesystem::path output_dir;
  /// Wall times make CSVs non-reproducible, so they are opt-in.
  bool record_wall_time = false;

  void validate() const;
  /// The stock grid: every family and alias, sigma in
  /// {0, .01, .1, .3, 1, 3, 10, 100, inf}, 20 iterations, magnitude-ratio
  /// weights, levels 10 dB -> 0, 0 dB -> 0.2, -10 dB -> 0.5.
  static SweepConfig defaults();
};

/// Relative manifest/output paths resolve against the config's directory.
SweepConfig read_sweep_config(const std::filesystem::path& path);
void write_sweep_config(const std::filesystem::path& path,
                        const SweepConfig& config);

struct ItemResult
{
  std::string item_id;
  std::optional<double> sdr_db; ///< empty when the item failed
  double wall_ms = 0.0;
};

struct ResultRow
{
  std::string algorithm;
  std::optional<Sigma> sigma; ///< empty for sigma-free families
  int iterations = 0;
  Condition condition;
  std::string split;
  double mean_sdr_db = 0.0; ///< over successful items; NaN if none
  std::vector<ItemResult> items;

  bool failed() const;
};

struct ResultTable
{
  std::vector<ResultRow> rows;

  /// One line per (row, item), header
  /// algorithm,sigma,iterations,isnr_db,degradation,split,item_id,sdr_db,wall_ms
  std::string to_csv(bool with_wall_time = false) const;
  /// One line per row with the mean SDR.
  std::string summary_csv() const;
};

struct Selection
{
  std::optional<Sigma> sigma;
  int iterations = 0;
  double mean_sdr_db = 0.0;
};

/// Runs every configuration on the validation split, recording the speech
/// SDR after each iteration 1..max_iterations (iteration 0 for am).
ResultTable run_sweep(const SweepConfig& config, int jobs = 1);

/// argmax of mean validation SDR for `algorithm` under `condition`; ties go
/// to fewer iterations, then smaller sigma.
Selection select_best(const ResultTable& table, std::string_view algorithm,
                      const Condition& condition);

/// Runs every algorithm at its validation-selected setting on the test split.
ResultTable evaluate_test(const ResultTable& validation,
                          const SweepConfig& config, int jobs = 1);

struct BenchmarkResult
{
  ResultTable validation;
  ResultTable test;
  std::filesystem::path validation_csv;
  std::filesystem::path test_csv;
  std::filesystem::path test_summary_csv;
};

/// run_sweep + evaluate_test, writing validation.csv, test.csv and
/// test_summary.csv under config.output_dir.
BenchmarkResult run_benchmark(const SweepConfig& config, int jobs = 1);

// ------------------------------------------------------ synthetic data

struct SyntheticDatasetOptions
{
  int items_per_split = 10;
  std::vector<double> isnrs_db = {10.0, 0.0, -10.0};
  double clean_seconds = 4.0;
  double noise_seconds = 6.0;
  double sample_rate = 16000.0;
  std::uint64_t seed = 2024;
};

/// Harmonic, syllable-modulated "speech" with three coloured-noise
/// environments. Writes clean/*.wav, noise/*.wav, manifest.json and a
/// default benchmark.json into `dir`; returns the manifest path.
std::filesystem::path
generate_synthetic_dataset(const std::filesystem::path& dir,
                           const SyntheticDatasetOptions& options = {});

TimeSignal synth_speech(std::size_t length, double sample_rate,
                        std::uint64_t seed);
TimeSignal synth_noise(std::size_t length, double sample_rate, int environment,
                       std::uint64_t seed);

} // namespace specinv
