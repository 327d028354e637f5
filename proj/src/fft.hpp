#pragma once

#include <complex>

struct fftw_plan_s;

namespace specinv::detail {

/// Real <-> half-complex FFT of a fixed size with its own aligned buffers.
/// Instances are not shared between threads; use `real_fft(n)` to get the
/// calling thread's instance.
class RealFft
{
public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return mSize; }

  double* time() { return mTime; }
  std::complex<double>* freq() { return mFreq; }

  /// time() -> freq(), unnormalized.
  void forward();
  /// freq() -> time(), unnormalized; imaginary parts of DC and Nyquist are
  /// ignored. freq() is clobbered.
  void inverse();

private:
  int mSize;
  double* mTime;
  std::complex<double>* mFreq;
  fftw_plan_s* mForward;
  fftw_plan_s* mInverse;
};

RealFft& real_fft(int n);

} // namespace specinv::detail
