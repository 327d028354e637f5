#pragma once

#include "specinv/projectors.hpp"
#include "specinv/spectral.hpp"
#include "specinv/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specinv {

/// Consistency weight: a finite nonnegative value or the distinguished
/// infinite weight. Update formulas implement the sigma -> infinity limit
/// analytically instead of doing arithmetic on inf.
class Sigma
{
public:
  static Sigma finite(double value);
  static Sigma infinity() { return Sigma(0.0, true); }
  /// Decimal string or "inf".
  static Sigma parse(std::string_view text);

  bool is_infinite() const { return mInfinite; }
  /// Only meaningful when finite.
  double value() const { return mValue; }
  std::string to_string() const;

  friend bool operator==(const Sigma&, const Sigma&) = default;
  /// Total order with infinity last.
  friend bool operator<(const Sigma& a, const Sigma& b)
  {
    if (a.mInfinite || b.mInfinite) return !a.mInfinite && b.mInfinite;
    return a.mValue < b.mValue;
  }

private:
  Sigma(double v, bool inf) : mValue(v), mInfinite(inf) {}
  double mValue;
  bool mInfinite;
};

enum class Family
{
  AM,
  MISI,
  MixIncons,
  MixInconsHardMag,
  InconsHardMix,
  MagInconsHardMix,
};

std::string_view to_string(Family family);
bool uses_sigma(Family family);
bool uses_weight_scheme(Family family);

struct AlgorithmSpec
{
  Family family = Family::AM;
  std::optional<Sigma> sigma;
  std::optional<WeightScheme> weight_scheme;
  int iterations = 20;
  int max_iterations = 20;
  /// Stop once ||S_k - S_{k-1}|| <= tol * ||S_k||; off when empty.
  std::optional<double> stop_tolerance;
  /// Name the spec was created from (family name or alias).
  std::string name;
};

/// Builds a spec from a family name or one of the aliases mixture_proj,
/// stft_proj, pu_iter, griffin_lim (which pin sigma).
AlgorithmSpec algorithm_from_name(std::string_view name);
const std::vector<std::string>& algorithm_names();

/// Everything the iterations need besides the current estimate.
struct Problem
{
  ComplexSpectrogram mixture;                   ///< X
  std::vector<MagnitudeSpectrogram> magnitudes; ///< V_j
  StftConfig stft;
  std::size_t signal_length = 0;

  std::size_t num_sources() const { return magnitudes.size(); }
  void validate() const;
};

/// S_j = V_j X / |X|, with phasor 1 where X = 0.
SourceSet init_amplitude_mask(const ComplexSpectrogram& X,
                              std::span<const MagnitudeSpectrogram> V);

/// Single update steps. They assume S matches the validated problem; run()
/// checks its iterates, direct callers are responsible for their own.
SourceSet step_misi(const SourceSet& S, const Problem& p);
SourceSet step_mix_incons(const SourceSet& S, const Problem& p,
                          const MixingWeights& weights, Sigma sigma);
SourceSet step_mix_incons_hardmag(const SourceSet& S, const Problem& p,
                                  const MixingWeights& weights, Sigma sigma);
SourceSet step_incons_hardmix(const SourceSet& S, const Problem& p);
SourceSet step_mag_incons_hardmix(const SourceSet& S, const Problem& p,
                                  Sigma sigma);

struct LossRecord
{
  double mixing = 0.0;        ///< h
  double inconsistency = 0.0; ///< i
  double magnitude = 0.0;     ///< m
  /// Objective the family minimizes, where it has one.
  std::optional<double> objective;
};

struct RunTrace
{
  std::vector<LossRecord> losses; ///< index 0 is the initialization
  SourceSet estimates;
  int iterations_run = 0;
  std::vector<std::string> warnings;
};

struct RunOptions
{
  bool record_losses = true;
  /// Called with (iteration, estimate) for iteration 0..n.
  std::function<void(int, const SourceSet&)> on_iterate;
};

/// Throws on invalid combinations that cannot be ignored; returns warnings
/// for settings that are ignored.
std::vector<std::string> validate(const AlgorithmSpec& spec);

RunTrace run(const AlgorithmSpec& spec, const Problem& problem,
             const RunOptions& options = {});

} // namespace specinv
