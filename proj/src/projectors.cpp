#include "specinv/projectors.hpp"

#include "kernels.hpp"

#include <algorithm>
#include <string>

namespace specinv {

std::string_view to_string(WeightScheme scheme)
{
  switch (scheme)
  {
  case WeightScheme::Uniform: return "uniform";
  case WeightScheme::MagnitudeRatio: return "magratio";
  }
  return "?";
}

WeightScheme parse_weight_scheme(std::string_view name)
{
  if (name == "uniform") return WeightScheme::Uniform;
  if (name == "magratio" || name == "magnitude-ratio")
    return WeightScheme::MagnitudeRatio;
  throw InvalidArgument("unknown weight scheme '" + std::string(name) +
                        "' (expected uniform or magratio)");
}

namespace {

template <typename A, typename B>
void require_same_shape(const A& a, const B& b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("shape mismatch: " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " vs " +
                          std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()));
}

} // namespace

void validate_sources(const SourceSet& S)
{
  if (S.empty()) throw InvalidArgument("source set is empty");
  for (const auto& s : S)
  {
    require_same_shape(s, S.front());
    if (s.size() == 0) throw InvalidArgument("empty spectrogram");
    if (!s.isFinite().all())
      throw InvalidArgument("spectrogram contains non-finite values");
  }
}

MixingWeights weights_uniform(std::size_t num_sources, Eigen::Index rows,
                              Eigen::Index cols)
{
  if (num_sources == 0) throw InvalidArgument("need at least one source");
  MixingWeights out;
  out.scheme = WeightScheme::Uniform;
  out.weights.assign(num_sources, MagnitudeSpectrogram::Constant(
                                      rows, cols, 1.0 / num_sources));
  return out;
}

MixingWeights weights_magnitude_ratio(std::span<const MagnitudeSpectrogram> V,
                                      double relative_floor)
{
  if (V.empty()) throw InvalidArgument("need at least one source");
  double peak = 0.0;
  for (const auto& v : V)
  {
    require_same_shape(v, V.front());
    if (!(v >= 0.0).all() || !v.isFinite().all())
      throw InvalidArgument("invalid magnitude");
    if (v.size() > 0) peak = std::max(peak, v.maxCoeff());
  }

  const auto J = V.size();
  MagnitudeSpectrogram total = MagnitudeSpectrogram::Zero(V[0].rows(), V[0].cols());
  for (const auto& v : V) total += v;
  const double floor = relative_floor * peak;

  MixingWeights out;
  out.scheme = WeightScheme::MagnitudeRatio;
  out.weights.reserve(J);
  for (const auto& v : V)
    out.weights.push_back(
        (total > floor).select(v / total, 1.0 / static_cast<double>(J)));
  return out;
}

SourceSet p_mag(const SourceSet& S, std::span<const MagnitudeSpectrogram> V)
{
  validate_sources(S);
  if (V.size() != S.size())
    throw InvalidArgument("expected one magnitude per source");
  for (std::size_t j = 0; j < S.size(); ++j)
  {
    require_same_shape(S[j], V[j]);
    if (!(V[j] >= 0.0).all()) throw InvalidArgument("invalid magnitude");
  }
  return detail::mag_set(S, V);
}

SourceSet p_cons(const SourceSet& S, const StftConfig& cfg,
                 std::size_t signal_length)
{
  validate_sources(S);
  SourceSet out;
  out.reserve(S.size());
  for (const auto& s : S) out.push_back(g_operator(s, cfg, signal_length));
  return out;
}

ComplexSpectrogram sum_sources(const SourceSet& S)
{
  validate_sources(S);
  ComplexSpectrogram total = S.front();
  for (std::size_t j = 1; j < S.size(); ++j) total += S[j];
  return total;
}

SourceSet p_mix(const SourceSet& S, const ComplexSpectrogram& X,
                const MixingWeights& weights)
{
  validate_sources(S);
  require_same_shape(S.front(), X);
  if (weights.num_sources() != S.size())
    throw InvalidArgument("expected one weight matrix per source");
  for (const auto& w : weights.weights) require_same_shape(S.front(), w);
  return detail::mix_set(S, X, weights.weights);
}

} // namespace specinv
