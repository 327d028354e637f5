#pragma once

#include "specinv/spectral.hpp"
#include "specinv/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace specinv {

enum class WeightScheme
{
  Uniform,
  MagnitudeRatio,
};

std::string_view to_string(WeightScheme scheme);
/// Accepts "uniform", "magratio" and "magnitude-ratio".
WeightScheme parse_weight_scheme(std::string_view name);

/// Per-bin nonnegative weights Lambda_j summing to one over the sources.
struct MixingWeights
{
  std::vector<MagnitudeSpectrogram> weights;
  WeightScheme scheme = WeightScheme::Uniform;

  std::size_t num_sources() const { return weights.size(); }
};

/// Throws unless the set is non-empty, equally shaped and finite.
void validate_sources(const SourceSet& S);

MixingWeights weights_uniform(std::size_t num_sources, Eigen::Index rows,
                              Eigen::Index cols);

/// Lambda_j = V_j / sum_k V_k. Bins where sum_k V_k <= relative_floor *
/// max(V) fall back to 1/J.
MixingWeights weights_magnitude_ratio(std::span<const MagnitudeSpectrogram> V,
                                      double relative_floor = 1e-12);

/// Unit phasor of s, with the convention phasor(0) = 1.
inline Complex unit_phasor(Complex s)
{
  const double a = std::abs(s);
  return a > 0.0 ? s / a : Complex(1.0, 0.0);
}

/// Magnitude projector: keeps each bin's phase and imposes |S_j| = V_j.
SourceSet p_mag(const SourceSet& S, std::span<const MagnitudeSpectrogram> V);

/// Consistency projector: G applied to every source.
SourceSet p_cons(const SourceSet& S, const StftConfig& cfg,
                 std::size_t signal_length = 0);

/// Mixing projector: S_j + Lambda_j (X - sum_k S_k).
SourceSet p_mix(const SourceSet& S, const ComplexSpectrogram& X,
                const MixingWeights& weights);

/// sum_j S_j
ComplexSpectrogram sum_sources(const SourceSet& S);

} // namespace specinv
