#include "specinv/algorithms.hpp"

#include "specinv/losses.hpp"

#include "kernels.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace specinv {

Sigma Sigma::finite(double value)
{
  if (!std::isfinite(value) || value < 0.0)
    throw InvalidArgument("sigma must be a finite nonnegative number or inf");
  return Sigma(value, false);
}

Sigma Sigma::parse(std::string_view text)
{
  if (text == "inf" || text == "+inf" || text == "infinity")
    return infinity();
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InvalidArgument("invalid sigma '" + std::string(text) + "'");
  return finite(v);
}

std::string Sigma::to_string() const
{
  if (mInfinite) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", mValue);
  return buf;
}

std::string_view to_string(Family family)
{
  switch (family)
  {
  case Family::AM: return "am";
  case Family::MISI: return "misi";
  case Family::MixIncons: return "mix_incons";
  case Family::MixInconsHardMag: return "mix_incons_hardmag";
  case Family::InconsHardMix: return "incons_hardmix";
  case Family::MagInconsHardMix: return "mag_incons_hardmix";
  }
  return "?";
}

bool uses_sigma(Family family)
{
  return family == Family::MixIncons || family == Family::MixInconsHardMag ||
         family == Family::MagInconsHardMix;
}

bool uses_weight_scheme(Family family)
{
  return family == Family::MixIncons || family == Family::MixInconsHardMag;
}

const std::vector<std::string>& algorithm_names()
{
  static const std::vector<std::string> names = {
      "am",           "misi",      "mix_incons", "mix_incons_hardmag",
      "incons_hardmix", "mag_incons_hardmix", "mixture_proj", "stft_proj",
      "pu_iter",      "griffin_lim"};
  return names;
}

AlgorithmSpec algorithm_from_name(std::string_view name)
{
  AlgorithmSpec spec;
  spec.name = std::string(name);
  if (name == "am") spec.family = Family::AM;
  else if (name == "misi") spec.family = Family::MISI;
  else if (name == "mix_incons") spec.family = Family::MixIncons;
  else if (name == "mix_incons_hardmag") spec.family = Family::MixInconsHardMag;
  else if (name == "incons_hardmix") spec.family = Family::InconsHardMix;
  else if (name == "mag_incons_hardmix") spec.family = Family::MagInconsHardMix;
  else if (name == "mixture_proj")
  {
    spec.family = Family::MixIncons;
    spec.sigma = Sigma::finite(0.0);
  }
  else if (name == "stft_proj")
  {
    spec.family = Family::MixIncons;
    spec.sigma = Sigma::infinity();
  }
  else if (name == "pu_iter")
  {
    spec.family = Family::MixInconsHardMag;
    spec.sigma = Sigma::finite(0.0);
  }
  else if (name == "griffin_lim")
  {
    spec.family = Family::MixInconsHardMag;
    spec.sigma = Sigma::infinity();
  }
  else
  {
    std::string valid;
    for (const auto& n : algorithm_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown algorithm '" + std::string(name) +
                          "'; valid names: " + valid);
  }
  return spec;
}

void Problem::validate() const
{
  stft.validate();
  if (mixture.size() == 0) throw InvalidArgument("empty mixture");
  if (!mixture.isFinite().all())
    throw InvalidArgument("mixture contains non-finite values");
  if (mixture.rows() != stft.num_bins())
    throw InvalidArgument("mixture has " + std::to_string(mixture.rows()) +
                          " bins, STFT config expects " +
                          std::to_string(stft.num_bins()));
  const auto len = signal_length ? signal_length
                                 : stft.natural_length(static_cast<int>(mixture.cols()));
  if (stft.num_frames(len) != mixture.cols())
    throw InvalidArgument("length mismatch");
  if (magnitudes.empty()) throw InvalidArgument("need at least one magnitude");
  for (const auto& v : magnitudes)
  {
    if (v.rows() != mixture.rows() || v.cols() != mixture.cols())
      throw InvalidArgument("shape mismatch between magnitudes and mixture");
    if (!v.isFinite().all() || !(v >= 0.0).all())
      throw InvalidArgument("invalid magnitude");
  }
}

SourceSet init_amplitude_mask(const ComplexSpectrogram& X,
                              std::span<const MagnitudeSpectrogram> V)
{
  if (V.empty()) throw InvalidArgument("need at least one magnitude");
  SourceSet S;
  S.reserve(V.size());
  for (const auto& v : V)
  {
    if (v.rows() != X.rows() || v.cols() != X.cols())
      throw InvalidArgument("shape mismatch between magnitudes and mixture");
    S.push_back(detail::apply_magnitude(X, v));
  }
  return S;
}

namespace {

/// Per-source blend Y + sigma*Lambda*Z, normalized by (1 + sigma*Lambda) when
/// `normalize`. The infinite weight takes Z wherever Lambda > 0.
SourceSet blend(const SourceSet& Y, const SourceSet& Z,
                const MixingWeights& weights, Sigma sigma, bool normalize)
{
  SourceSet out;
  out.reserve(Y.size());
  for (std::size_t j = 0; j < Y.size(); ++j)
  {
    const auto& lambda = weights.weights[j];
    if (sigma.is_infinite())
    {
      out.push_back((lambda > 0.0).select(Z[j], Y[j]));
      continue;
    }
    out.push_back(detail::blend(Y[j], lambda, sigma.value(), Z[j], normalize));
  }
  return out;
}

} // namespace

SourceSet step_misi(const SourceSet& S, const Problem& p)
{
  const auto Z = p_cons(S, p.stft, p.signal_length);
  return detail::mix_set_uniform(detail::mag_set(Z, p.magnitudes), p.mixture);
}

SourceSet step_mix_incons(const SourceSet& S, const Problem& p,
                          const MixingWeights& weights, Sigma sigma)
{
  const auto Y = detail::mix_set(S, p.mixture, weights.weights);
  if (!sigma.is_infinite() && sigma.value() == 0.0) return Y;
  const auto Z = p_cons(S, p.stft, p.signal_length);
  return blend(Y, Z, weights, sigma, true);
}

SourceSet step_mix_incons_hardmag(const SourceSet& S, const Problem& p,
                                  const MixingWeights& weights, Sigma sigma)
{
  const auto Y = detail::mix_set(S, p.mixture, weights.weights);
  if (!sigma.is_infinite() && sigma.value() == 0.0)
    return detail::mag_set(Y, p.magnitudes);
  const auto Z = p_cons(S, p.stft, p.signal_length);
  return detail::mag_set(blend(Y, Z, weights, sigma, false), p.magnitudes);
}

SourceSet step_incons_hardmix(const SourceSet& S, const Problem& p)
{
  return detail::mix_set_uniform(p_cons(S, p.stft, p.signal_length), p.mixture);
}

SourceSet step_mag_incons_hardmix(const SourceSet& S, const Problem& p,
                                  Sigma sigma)
{
  if (sigma.is_infinite())
    return detail::mix_set_uniform(p_cons(S, p.stft, p.signal_length), p.mixture);

  SourceSet W = detail::mag_set(S, p.magnitudes);
  if (sigma.value() > 0.0)
  {
    const auto Z = p_cons(S, p.stft, p.signal_length);
    const double s = sigma.value();
    for (std::size_t j = 0; j < W.size(); ++j)
      W[j] = (W[j] + s * Z[j]) / (1.0 + s);
  }
  return detail::mix_set_uniform(W, p.mixture);
}

std::vector<std::string> validate(const AlgorithmSpec& spec)
{
  std::vector<std::string> warnings;
  if (spec.max_iterations < 0)
    throw InvalidArgument("max_iterations must be nonnegative");
  if (spec.iterations < 0)
    throw InvalidArgument("iterations must be nonnegative");
  if (spec.iterations > spec.max_iterations)
    throw InvalidArgument("iterations (" + std::to_string(spec.iterations) +
                          ") exceed the cap of " +
                          std::to_string(spec.max_iterations));
  if (spec.stop_tolerance && !(*spec.stop_tolerance >= 0.0))
    throw InvalidArgument("stop tolerance must be nonnegative");

  const auto family = std::string(to_string(spec.family));
  if (uses_sigma(spec.family))
  {
    if (!spec.sigma)
      throw InvalidArgument("algorithm " + family + " requires sigma");
  }
  else if (spec.sigma)
  {
    warnings.push_back("sigma is ignored by " + family);
  }
  if (spec.weight_scheme && !uses_weight_scheme(spec.family))
    warnings.push_back("weight scheme is ignored by " + family);
  if (spec.family == Family::AM && spec.iterations > 0)
    warnings.push_back("am performs no iterations");
  return warnings;
}

namespace {

LossRecord evaluate(const AlgorithmSpec& spec, const Problem& p,
                    const SourceSet& S)
{
  LossRecord r;
  r.mixing = mixing_error(S, p.mixture);
  r.inconsistency = inconsistency(S, p.stft, p.signal_length);
  r.magnitude = magnitude_mismatch(S, p.magnitudes);

  const auto weighted = [&](double base) -> double {
    return spec.sigma->is_infinite() ? r.inconsistency
                                     : base + spec.sigma->value() * r.inconsistency;
  };
  switch (spec.family)
  {
  case Family::AM: break;
  case Family::MISI: r.objective = r.magnitude; break;
  case Family::MixIncons:
  case Family::MixInconsHardMag: r.objective = weighted(r.mixing); break;
  case Family::InconsHardMix: r.objective = r.inconsistency; break;
  case Family::MagInconsHardMix: r.objective = weighted(r.magnitude); break;
  }
  return r;
}

double relative_change(const SourceSet& prev, const SourceSet& next)
{
  double diff = 0.0, norm = 0.0;
  for (std::size_t j = 0; j < next.size(); ++j)
  {
    diff += (next[j] - prev[j]).abs2().sum();
    norm += next[j].abs2().sum();
  }
  return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

} // namespace

RunTrace run(const AlgorithmSpec& spec, const Problem& problem,
             const RunOptions& options)
{
  RunTrace trace;
  trace.warnings = validate(spec);
  problem.validate();

  MixingWeights weights;
  if (uses_weight_scheme(spec.family))
  {
    const auto scheme = spec.weight_scheme.value_or(WeightScheme::MagnitudeRatio);
    weights = scheme == WeightScheme::Uniform
                  ? weights_uniform(problem.num_sources(), problem.mixture.rows(),
                                    problem.mixture.cols())
                  : weights_magnitude_ratio(problem.magnitudes);
  }

  const auto step = [&](const SourceSet& S) -> SourceSet {
    switch (spec.family)
    {
    case Family::AM: return S;
    case Family::MISI: return step_misi(S, problem);
    case Family::MixIncons: return step_mix_incons(S, problem, weights, *spec.sigma);
    case Family::MixInconsHardMag:
      return step_mix_incons_hardmag(S, problem, weights, *spec.sigma);
    case Family::InconsHardMix: return step_incons_hardmix(S, problem);
    case Family::MagInconsHardMix:
      return step_mag_incons_hardmix(S, problem, *spec.sigma);
    }
    return S;
  };

  SourceSet S = init_amplitude_mask(problem.mixture, problem.magnitudes);
  const auto observe = [&](int k) {
    if (options.record_losses) trace.losses.push_back(evaluate(spec, problem, S));
    if (options.on_iterate) options.on_iterate(k, S);
  };
  observe(0);

  const int n = spec.family == Family::AM ? 0 : spec.iterations;
  for (int k = 1; k <= n; ++k)
  {
    SourceSet next = step(S);
    for (const auto& s : next)
      if (!s.isFinite().all())
        throw std::runtime_error("non-finite estimate at iteration " +
                                 std::to_string(k));
    const bool converged =
        spec.stop_tolerance && relative_change(S, next) <= *spec.stop_tolerance;
    S = std::move(next);
    trace.iterations_run = k;
    observe(k);
    if (converged) break;
  }
  trace.estimates = std::move(S);
  return trace;
}

} // namespace specinv
