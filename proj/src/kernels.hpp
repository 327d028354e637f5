#pragma once

#include "specinv/types.hpp"

#include <cmath>
#include <span>

// Elementwise kernels on complex spectrograms with real weights. Eigen's
// complex-by-complex products go through the C99 complex multiply, which is
// several times slower than splitting real and imaginary parts.
namespace specinv::detail {

/// V * S/|S|, with the phasor of 0 taken as 1.
inline ComplexSpectrogram apply_magnitude(const ComplexSpectrogram& S,
                                          const MagnitudeSpectrogram& V)
{
  ComplexSpectrogram out(S.rows(), S.cols());
  const Complex* s = S.data();
  const double* v = V.data();
  Complex* o = out.data();
  for (Eigen::Index k = 0; k < S.size(); ++k)
  {
    const double re = s[k].real(), im = s[k].imag();
    double a = std::sqrt(re * re + im * im);
    if (a == 0.0 && (re != 0.0 || im != 0.0)) a = std::abs(s[k]);
    if (a > 0.0)
    {
      const double g = v[k] / a;
      o[k] = Complex(re * g, im * g);
    }
    else
    {
      o[k] = Complex(v[k], 0.0);
    }
  }
  return out;
}

/// A + w * B.
inline ComplexSpectrogram add_scaled(const ComplexSpectrogram& A,
                                     const MagnitudeSpectrogram& w,
                                     const ComplexSpectrogram& B)
{
  ComplexSpectrogram out(A.rows(), A.cols());
  const Complex* a = A.data();
  const Complex* b = B.data();
  const double* g = w.data();
  Complex* o = out.data();
  for (Eigen::Index k = 0; k < A.size(); ++k)
    o[k] = Complex(a[k].real() + g[k] * b[k].real(), a[k].imag() + g[k] * b[k].imag());
  return out;
}

/// (A + s*w*B) / (1 + s*w), or A + s*w*B when not normalizing.
inline ComplexSpectrogram blend(const ComplexSpectrogram& A,
                                const MagnitudeSpectrogram& w, double s,
                                const ComplexSpectrogram& B, bool normalize)
{
  ComplexSpectrogram out(A.rows(), A.cols());
  const Complex* a = A.data();
  const Complex* b = B.data();
  const double* g = w.data();
  Complex* o = out.data();
  for (Eigen::Index k = 0; k < A.size(); ++k)
  {
    const double sl = s * g[k];
    double re = a[k].real() + sl * b[k].real();
    double im = a[k].imag() + sl * b[k].imag();
    if (normalize)
    {
      const double d = 1.0 + sl;
      re /= d;
      im /= d;
    }
    o[k] = Complex(re, im);
  }
  return out;
}

/// Projectors without input validation, for use on already checked iterates.
inline SourceSet mag_set(const SourceSet& S, std::span<const MagnitudeSpectrogram> V)
{
  SourceSet out;
  out.reserve(S.size());
  for (std::size_t j = 0; j < S.size(); ++j) out.push_back(apply_magnitude(S[j], V[j]));
  return out;
}

inline ComplexSpectrogram residual(const SourceSet& S, const ComplexSpectrogram& X)
{
  ComplexSpectrogram total = S.front();
  for (std::size_t j = 1; j < S.size(); ++j) total += S[j];
  return X - total;
}

inline SourceSet mix_set(const SourceSet& S, const ComplexSpectrogram& X,
                         std::span<const MagnitudeSpectrogram> weights)
{
  const ComplexSpectrogram r = residual(S, X);
  SourceSet out;
  out.reserve(S.size());
  for (std::size_t j = 0; j < S.size(); ++j) out.push_back(add_scaled(S[j], weights[j], r));
  return out;
}

/// Mixing projection with uniform weights 1/J.
inline SourceSet mix_set_uniform(const SourceSet& S, const ComplexSpectrogram& X)
{
  const ComplexSpectrogram r = residual(S, X) * (1.0 / static_cast<double>(S.size()));
  SourceSet out;
  out.reserve(S.size());
  for (const auto& s : S) out.push_back(s + r);
  return out;
}

} // namespace specinv::detail
