#include "specinv/spectral.hpp"

#include "fft.hpp"
#include "summation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace specinv {

int StftConfig::num_frames(std::size_t length) const
{
  const auto padded = static_cast<long long>(length) + 2LL * padding();
  const long long span = padded - window_length;
  if (span <= 0) return 1;
  return static_cast<int>((span + hop - 1) / hop) + 1;
}

std::size_t StftConfig::natural_length(int frames) const
{
  // num_frames(len) == T  <=>  (T-2)H < len + N - 2H <= (T-1)H
  const long long len =
      static_cast<long long>(frames + 1) * hop - window_length;
  return len > 0 ? static_cast<std::size_t>(len) : 1;
}

std::vector<double> StftConfig::window() const
{
  std::vector<double> w(static_cast<std::size_t>(window_length));
  const double step = 2.0 * std::numbers::pi / window_length;
  for (int n = 0; n < window_length; ++n)
    w[static_cast<std::size_t>(n)] = 0.5 - 0.5 * std::cos(step * n);
  return w;
}

void StftConfig::validate() const
{
  if (window_length < 4 || window_length % 2 != 0)
    throw InvalidArgument("window_length must be even and >= 4");
  if (hop <= 0 || hop > window_length || window_length % hop != 0)
    throw InvalidArgument("hop must divide window_length");
  if (!(sample_rate > 0.0))
    throw InvalidArgument("sample_rate must be positive");

  const auto w = window();
  std::vector<double> sum(static_cast<std::size_t>(hop), 0.0);
  for (int n = 0; n < window_length; ++n)
    sum[static_cast<std::size_t>(n % hop)] += w[n] * w[n];
  const auto [lo, hi] = std::minmax_element(sum.begin(), sum.end());
  if (*lo <= 0.0 || (*hi - *lo) > 1e-10 * *hi)
    throw InvalidArgument("squared Hann window is not overlap-add constant "
                          "for hop " + std::to_string(hop));
}

namespace {

void check_finite(const ComplexSpectrogram& S)
{
  if (!S.isFinite().all())
    throw InvalidArgument("spectrogram contains non-finite values");
}

} // namespace

ComplexSpectrogram stft(const TimeSignal& x, const StftConfig& cfg)
{
  cfg.validate();
  if (x.samples.empty()) throw InvalidArgument("empty input");

  const int N = cfg.window_length;
  const int H = cfg.hop;
  const int T = cfg.num_frames(x.size());
  const std::size_t pad = static_cast<std::size_t>(cfg.padding());

  std::vector<double> padded(static_cast<std::size_t>(T - 1) * H + N, 0.0);
  for (std::size_t n = 0; n < x.size(); ++n)
  {
    if (!std::isfinite(x.samples[n]))
      throw InvalidArgument("signal contains non-finite samples");
    padded[n + pad] = x.samples[n];
  }

  const auto w = cfg.window();
  auto& fft = detail::real_fft(N);
  ComplexSpectrogram S(cfg.num_bins(), T);
  for (int t = 0; t < T; ++t)
  {
    const double* frame = padded.data() + static_cast<std::size_t>(t) * H;
    double* buf = fft.time();
    for (int n = 0; n < N; ++n) buf[n] = frame[n] * w[n];
    fft.forward();
    std::copy_n(fft.freq(), cfg.num_bins(), S.col(t).data());
  }
  return S;
}

TimeSignal istft(const ComplexSpectrogram& S, const StftConfig& cfg,
                 std::size_t out_len)
{
  cfg.validate();
  check_finite(S);
  const int N = cfg.window_length;
  const int H = cfg.hop;
  const int T = static_cast<int>(S.cols());
  if (S.rows() != cfg.num_bins() || T < 1 || out_len == 0 ||
      cfg.num_frames(out_len) != T)
    throw InvalidArgument("length mismatch");

  const auto w = cfg.window();
  const std::size_t total = static_cast<std::size_t>(T - 1) * H + N;
  std::vector<double> acc(total, 0.0);
  std::vector<double> norm(total, 0.0);

  auto& fft = detail::real_fft(N);
  const double scale = 1.0 / N;
  for (int t = 0; t < T; ++t)
  {
    std::copy_n(S.col(t).data(), cfg.num_bins(), fft.freq());
    fft.inverse();
    const double* buf = fft.time();
    const std::size_t offset = static_cast<std::size_t>(t) * H;
    for (int n = 0; n < N; ++n)
    {
      acc[offset + n] += w[n] * buf[n] * scale;
      norm[offset + n] += w[n] * w[n];
    }
  }

  TimeSignal y;
  y.sample_rate = cfg.sample_rate;
  y.samples.resize(out_len);
  const std::size_t pad = static_cast<std::size_t>(cfg.padding());
  for (std::size_t n = 0; n < out_len; ++n)
    y.samples[n] = acc[n + pad] / norm[n + pad];
  return y;
}

ComplexSpectrogram g_operator(const ComplexSpectrogram& S,
                              const StftConfig& cfg,
                              std::size_t signal_length)
{
  if (signal_length == 0)
    signal_length = cfg.natural_length(static_cast<int>(S.cols()));
  return stft(istft(S, cfg, signal_length), cfg);
}

double spectral_energy(const ComplexSpectrogram& S)
{
  const Eigen::Index F = S.rows();
  std::vector<double> terms(static_cast<std::size_t>(S.size()));
  std::size_t k = 0;
  for (Eigen::Index t = 0; t < S.cols(); ++t)
    for (Eigen::Index f = 0; f < F; ++f)
      terms[k++] = bin_multiplicity(f, F) * std::norm(S(f, t));
  return detail::pairwise_sum(terms);
}

double spectral_energy(const MagnitudeSpectrogram& M)
{
  const Eigen::Index F = M.rows();
  std::vector<double> terms(static_cast<std::size_t>(M.size()));
  std::size_t k = 0;
  for (Eigen::Index t = 0; t < M.cols(); ++t)
    for (Eigen::Index f = 0; f < F; ++f)
      terms[k++] = bin_multiplicity(f, F) * M(f, t) * M(f, t);
  return detail::pairwise_sum(terms);
}

} // namespace specinv
