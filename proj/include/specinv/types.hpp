#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace specinv {

using Complex = std::complex<double>;

/// One-sided F x T complex spectrogram; column t is frame t.
using ComplexSpectrogram = Eigen::ArrayXXcd;

/// F x T nonnegative magnitudes.
using MagnitudeSpectrogram = Eigen::ArrayXXd;

/// Ordered set of J source spectrograms sharing one shape.
using SourceSet = std::vector<ComplexSpectrogram>;

struct TimeSignal
{
  std::vector<double> samples;
  double sample_rate = 16000.0;

  std::size_t size() const { return samples.size(); }
};

/// Raised for anything touching the filesystem or a malformed file.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Precondition / argument failures.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace specinv
