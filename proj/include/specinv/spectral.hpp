#pragma once

#include "specinv/types.hpp"

#include <cstddef>
#include <vector>

namespace specinv {

/// Parameters of the analysis/synthesis pair. The FFT size equals the
/// window length; the window is a periodic Hann taper and every signal is
/// zero-padded by (window_length - hop) samples on both ends.
struct StftConfig
{
  int window_length = 1024;
  int hop = 256;
  double sample_rate = 16000.0;

  int fft_size() const { return window_length; }
  int num_bins() const { return window_length / 2 + 1; }
  int padding() const { return window_length - hop; }

  /// Frame count produced for a signal of `length` samples.
  int num_frames(std::size_t length) const;

  /// Longest signal length that still yields `frames` frames.
  std::size_t natural_length(int frames) const;

  std::vector<double> window() const;

  /// Throws InvalidArgument unless hop divides the window length and the
  /// squared-window overlap-add is constant to 1e-10 relative.
  void validate() const;
};

ComplexSpectrogram stft(const TimeSignal& x, const StftConfig& cfg);

/// Weighted overlap-add least-squares inverse. `out_len` must map to the
/// spectrogram's frame count.
TimeSignal istft(const ComplexSpectrogram& S, const StftConfig& cfg,
                 std::size_t out_len);

/// G = STFT o iSTFT for signals of `signal_length` samples. Passing 0 uses
/// natural_length(S.cols()).
ComplexSpectrogram g_operator(const ComplexSpectrogram& S,
                              const StftConfig& cfg,
                              std::size_t signal_length = 0);

/// Multiplicity of bin f of an F-bin one-sided grid in the two-sided
/// spectrum: 1 for DC and Nyquist, 2 otherwise.
inline double bin_multiplicity(Eigen::Index f, Eigen::Index F)
{
  return (f == 0 || (F > 1 && f == F - 1)) ? 1.0 : 2.0;
}

/// Squared norm of the two-sided spectrum represented by a one-sided grid.
/// This is the norm in which g_operator is an orthogonal projection.
double spectral_energy(const ComplexSpectrogram& S);
double spectral_energy(const MagnitudeSpectrogram& M);

} // namespace specinv
