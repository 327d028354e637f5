#include "specinv/losses.hpp"

#include "specinv/projectors.hpp"

namespace specinv {

double mixing_error(const SourceSet& S, const ComplexSpectrogram& X)
{
  const ComplexSpectrogram total = sum_sources(S);
  if (total.rows() != X.rows() || total.cols() != X.cols())
    throw InvalidArgument("shape mismatch between sources and mixture");
  return spectral_energy(ComplexSpectrogram(X - total));
}

double inconsistency(const SourceSet& S, const StftConfig& cfg,
                     std::size_t signal_length)
{
  validate_sources(S);
  double total = 0.0;
  for (const auto& s : S)
    total += spectral_energy(ComplexSpectrogram(s - g_operator(s, cfg, signal_length)));
  return total;
}

double magnitude_mismatch(const SourceSet& S,
                          std::span<const MagnitudeSpectrogram> V)
{
  validate_sources(S);
  if (V.size() != S.size())
    throw InvalidArgument("expected one magnitude per source");
  double total = 0.0;
  for (std::size_t j = 0; j < S.size(); ++j)
  {
    if (V[j].rows() != S[j].rows() || V[j].cols() != S[j].cols())
      throw InvalidArgument("shape mismatch between source and magnitude");
    total += spectral_energy(MagnitudeSpectrogram(S[j].abs() - V[j]));
  }
  return total;
}

} // namespace specinv
