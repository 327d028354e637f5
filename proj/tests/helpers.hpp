#pragma once

#include "specinv/algorithms.hpp"
#include "specinv/spectral.hpp"
#include "specinv/types.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace specinv::testing {

inline TimeSignal random_signal(std::size_t n, std::mt19937_64& rng, double scale = 1.0)
{
  std::normal_distribution<double> g(0.0, scale);
  TimeSignal x;
  x.samples.resize(n);
  for (auto& s : x.samples) s = g(rng);
  return x;
}

inline ComplexSpectrogram random_spectrogram(Eigen::Index F, Eigen::Index T,
                                             std::mt19937_64& rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexSpectrogram S(F, T);
  for (Eigen::Index k = 0; k < S.size(); ++k) S(k) = Complex(g(rng), g(rng));
  return S;
}

inline MagnitudeSpectrogram random_magnitude(Eigen::Index F, Eigen::Index T,
                                             std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(0.05, 2.0);
  MagnitudeSpectrogram V(F, T);
  for (Eigen::Index k = 0; k < V.size(); ++k) V(k) = u(rng);
  return V;
}

/// |S| kept, phases replaced by uniform random values.
inline ComplexSpectrogram randomize_phase(const ComplexSpectrogram& S, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  ComplexSpectrogram out(S.rows(), S.cols());
  for (Eigen::Index k = 0; k < S.size(); ++k) out(k) = std::polar(std::abs(S(k)), u(rng));
  return out;
}

/// Frobenius norm of a difference divided by the norm of `ref` (or 1).
template <typename A, typename B>
double rel_diff(const A& a, const B& ref)
{
  const double d = std::sqrt((a - ref).abs2().sum());
  const double n = std::sqrt(ref.abs2().sum());
  return n > 0.0 ? d / n : d;
}

inline double rel_diff(const SourceSet& a, const SourceSet& ref)
{
  double d = 0.0, n = 0.0;
  for (std::size_t j = 0; j < ref.size(); ++j)
  {
    d += (a[j] - ref[j]).abs2().sum();
    n += ref[j].abs2().sum();
  }
  return n > 0.0 ? std::sqrt(d / n) : std::sqrt(d);
}

inline double max_abs_diff(const SourceSet& a, const SourceSet& b)
{
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, (a[j] - b[j]).abs().maxCoeff());
  return m;
}

/// Small problem geometry for fast algorithm tests: window 64, hop 16.
inline StftConfig small_config()
{
  StftConfig cfg;
  cfg.window_length = 64;
  cfg.hop = 16;
  return cfg;
}

/// Random J-source problem with a consistent mixture and magnitudes that
/// are perturbed oracle magnitudes of the sources.
inline Problem random_problem(std::size_t J, std::size_t length, std::mt19937_64& rng,
                              const StftConfig& cfg = small_config(),
                              double perturbation = 0.3)
{
  Problem p;
  p.stft = cfg;
  p.signal_length = length;
  std::vector<TimeSignal> sources;
  TimeSignal mix;
  mix.samples.assign(length, 0.0);
  std::normal_distribution<double> jitter(0.0, 1.0);
  for (std::size_t j = 0; j < J; ++j)
  {
    auto s = random_signal(length, rng, 1.0 + j);
    for (std::size_t n = 0; n < length; ++n) mix.samples[n] += s.samples[n];
    MagnitudeSpectrogram v = stft(s, cfg).abs();
    if (perturbation > 0.0)
      for (Eigen::Index k = 0; k < v.size(); ++k) v(k) *= std::exp(perturbation * jitter(rng));
    p.magnitudes.push_back(std::move(v));
  }
  p.mixture = stft(mix, cfg);
  return p;
}

} // namespace specinv::testing
