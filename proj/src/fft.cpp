#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace specinv::detail {

namespace {
// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}
} // namespace

RealFft::RealFft(int n) : mSize(n)
{
  std::lock_guard<std::mutex> lock(planner_mutex());
  mTime = fftw_alloc_real(static_cast<std::size_t>(n));
  mFreq = reinterpret_cast<std::complex<double>*>(
      fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1)));
  if (!mTime || !mFreq) throw std::bad_alloc();
  auto* f = reinterpret_cast<fftw_complex*>(mFreq);
  mForward = fftw_plan_dft_r2c_1d(n, mTime, f, FFTW_ESTIMATE);
  mInverse = fftw_plan_dft_c2r_1d(n, f, mTime, FFTW_ESTIMATE);
}

RealFft::~RealFft()
{
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(mForward);
  fftw_destroy_plan(mInverse);
  fftw_free(mTime);
  fftw_free(mFreq);
}

void RealFft::forward() { fftw_execute(mForward); }

void RealFft::inverse() { fftw_execute(mInverse); }

RealFft& real_fft(int n)
{
  thread_local std::map<int, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

} // namespace specinv::detail
