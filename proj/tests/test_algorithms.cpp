#include "doctest.h"
#include "helpers.hpp"

#include "specinv/algorithms.hpp"
#include "specinv/losses.hpp"

#include <random>

using namespace specinv;
using namespace specinv::testing;

namespace {

bool non_increasing(const std::vector<double>& v, std::size_t from = 0, double slack = 1e-9)
{
  for (std::size_t k = from + 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] * (1.0 + slack)) return false;
  return true;
}

std::vector<double> objectives(const RunTrace& t)
{
  std::vector<double> out;
  for (const auto& r : t.losses) out.push_back(*r.objective);
  return out;
}

AlgorithmSpec spec_for(Family family, std::optional<Sigma> sigma, int iterations,
                       std::optional<WeightScheme> scheme = std::nullopt)
{
  AlgorithmSpec s;
  s.family = family;
  s.sigma = sigma;
  s.iterations = iterations;
  s.weight_scheme = scheme;
  return s;
}

} // namespace

TEST_CASE("sigma parsing and ordering")
{
  CHECK(Sigma::parse("inf").is_infinite());
  CHECK(Sigma::parse("0.3").value() == 0.3);
  CHECK(Sigma::parse("10").to_string() == "10");
  CHECK(Sigma::infinity().to_string() == "inf");
  CHECK_THROWS_AS(Sigma::parse("-1"), InvalidArgument);
  CHECK_THROWS_AS(Sigma::parse("abc"), InvalidArgument);
  CHECK(Sigma::finite(100.0) < Sigma::infinity());
  CHECK_FALSE(Sigma::infinity() < Sigma::finite(1.0));
}

TEST_CASE("algorithm names and aliases")
{
  CHECK(algorithm_from_name("misi").family == Family::MISI);
  const auto mp = algorithm_from_name("mixture_proj");
  CHECK(mp.family == Family::MixIncons);
  CHECK(mp.sigma->value() == 0.0);
  CHECK(algorithm_from_name("griffin_lim").sigma->is_infinite());
  CHECK(algorithm_from_name("pu_iter").family == Family::MixInconsHardMag);
  CHECK(algorithm_from_name("stft_proj").sigma->is_infinite());
  CHECK_THROWS_WITH_AS(algorithm_from_name("wiener"),
                       doctest::Contains("valid names"), InvalidArgument);
}

TEST_CASE("amplitude-mask initialization")
{
  ComplexSpectrogram x(1, 2);
  x << Complex(0.0, 2.0), Complex(0.0, 0.0);
  MagnitudeSpectrogram v(1, 2);
  v << 3.0, 1.0;
  const std::vector<MagnitudeSpectrogram> V{v};
  const auto S = init_amplitude_mask(x, V);
  CHECK(S[0](0, 0) == Complex(0.0, 3.0));
  CHECK(S[0](0, 1) == Complex(1.0, 0.0));

  std::mt19937_64 rng(1);
  const auto p = random_problem(3, 200, rng);
  const auto A = init_amplitude_mask(p.mixture, p.magnitudes);
  CHECK(magnitude_mismatch(A, p.magnitudes) < 1e-20);
  for (const auto& s : A)
  {
    const Eigen::ArrayXXd dphi = (s * p.mixture.conjugate()).arg();
    CHECK((dphi.abs() < 1e-12).all());
  }
}

TEST_CASE("MISI step")
{
  std::mt19937_64 rng(2);
  const auto p = random_problem(2, 300, rng, small_config(), 0.0);
  const auto S0 = init_amplitude_mask(p.mixture, p.magnitudes);
  const auto S1 = step_misi(S0, p);
  CHECK(rel_diff(sum_sources(S1), p.mixture) < 1e-10);
  CHECK(rel_diff(S1, S0) > 1e-3);

  SUBCASE("fixed point")
  {
    Problem q = p;
    SourceSet S{stft(random_signal(300, rng), q.stft), stft(random_signal(300, rng), q.stft)};
    q.magnitudes = {S[0].abs(), S[1].abs()};
    q.mixture = S[0] + S[1];
    CHECK(rel_diff(step_misi(S, q), S) < 1e-10);
  }
}

TEST_CASE("Mix+Incons step")
{
  std::mt19937_64 rng(3);
  const auto p = random_problem(2, 300, rng);
  const auto S = init_amplitude_mask(p.mixture, p.magnitudes);
  const auto w = weights_magnitude_ratio(p.magnitudes);

  CHECK(max_abs_diff(step_mix_incons(S, p, w, Sigma::finite(0.0)), p_mix(S, p.mixture, w)) <= 1e-15);
  CHECK(rel_diff(step_mix_incons(S, p, w, Sigma::infinity()), p_cons(S, p.stft, p.signal_length)) <= 1e-12);

  const auto Y = p_mix(S, p.mixture, w);
  const auto Z = p_cons(S, p.stft, p.signal_length);
  const auto half = weights_uniform(2, p.mixture.rows(), p.mixture.cols());
  const auto Yh = p_mix(S, p.mixture, half);
  const auto out = step_mix_incons(S, p, half, Sigma::finite(2.0));
  // sigma * lambda = 1: plain average of Y and Z
  CHECK(rel_diff(out[0], ComplexSpectrogram((Yh[0] + Z[0]) / 2.0)) < 1e-14);
  (void)Y;
}

TEST_CASE("Mix+Incons_hardMag step")
{
  std::mt19937_64 rng(4);
  const auto p = random_problem(2, 300, rng);
  const auto S = init_amplitude_mask(p.mixture, p.magnitudes);
  const auto w = weights_magnitude_ratio(p.magnitudes);

  CHECK(max_abs_diff(step_mix_incons_hardmag(S, p, w, Sigma::finite(0.0)),
                     p_mag(p_mix(S, p.mixture, w), p.magnitudes)) <= 1e-12);
  CHECK(max_abs_diff(step_mix_incons_hardmag(S, p, w, Sigma::infinity()),
                     p_mag(p_cons(S, p.stft, p.signal_length), p.magnitudes)) <= 1e-12);
  for (double sigma : {0.0, 0.5, 7.0})
  {
    const auto out = step_mix_incons_hardmag(S, p, w, Sigma::finite(sigma));
    for (std::size_t j = 0; j < 2; ++j) CHECK(((out[j].abs() - p.magnitudes[j]).abs() <= 1e-12).all());
  }
}

TEST_CASE("Incons_hardMix step")
{
  std::mt19937_64 rng(5);
  const auto p = random_problem(3, 300, rng);
  const SourceSet S{random_spectrogram(p.mixture.rows(), p.mixture.cols(), rng),
                    random_spectrogram(p.mixture.rows(), p.mixture.cols(), rng),
                    random_spectrogram(p.mixture.rows(), p.mixture.cols(), rng)};
  const auto once = step_incons_hardmix(S, p);
  CHECK(rel_diff(sum_sources(once), p.mixture) < 1e-10);
  CHECK(rel_diff(step_incons_hardmix(once, p), once) < 1e-10);
  const auto uniform = weights_uniform(3, p.mixture.rows(), p.mixture.cols());
  CHECK((once[1] == p_mix(p_cons(S, p.stft, p.signal_length), p.mixture, uniform)[1]).all());
}

TEST_CASE("Mag+Incons_hardMix step")
{
  std::mt19937_64 rng(6);
  const auto p = random_problem(2, 300, rng);
  const auto S = init_amplitude_mask(p.mixture, p.magnitudes);

  for (double sigma : {0.0, 0.3, 5.0})
    CHECK(rel_diff(sum_sources(step_mag_incons_hardmix(S, p, Sigma::finite(sigma))), p.mixture) < 1e-10);
  CHECK(max_abs_diff(step_mag_incons_hardmix(S, p, Sigma::infinity()), step_incons_hardmix(S, p)) <= 1e-12);

  // sigma = 0 from the amplitude mask: mixture phase with corrected magnitudes
  const auto one = step_mag_incons_hardmix(S, p, Sigma::finite(0.0));
  const ComplexSpectrogram phase = p.mixture.unaryExpr(&unit_phasor);
  const Eigen::ArrayXXd total = p.magnitudes[0] + p.magnitudes[1];
  for (std::size_t j = 0; j < 2; ++j)
  {
    const ComplexSpectrogram closed =
        (p.magnitudes[j] + 0.5 * (p.mixture.abs() - total)).cast<Complex>() * phase;
    CHECK(rel_diff(one[j], closed) < 1e-10);
  }
}

TEST_CASE("run: traces, warnings and validation")
{
  std::mt19937_64 rng(7);
  const auto p = random_problem(2, 300, rng);

  SUBCASE("am returns the initialization")
  {
    const auto t = run(spec_for(Family::AM, std::nullopt, 0), p);
    CHECK(t.losses.size() == 1);
    CHECK(t.iterations_run == 0);
    CHECK(rel_diff(t.estimates, init_amplitude_mask(p.mixture, p.magnitudes)) == 0.0);
    CHECK_FALSE(t.losses[0].objective.has_value());
  }
  SUBCASE("iteration zero returns the initialization for any family")
  {
    const auto t = run(spec_for(Family::MISI, std::nullopt, 0), p);
    CHECK(t.losses.size() == 1);
    CHECK(rel_diff(t.estimates, init_amplitude_mask(p.mixture, p.magnitudes)) == 0.0);
  }
  SUBCASE("trace length")
  {
    const auto t = run(spec_for(Family::MixIncons, Sigma::finite(1.0), 5), p);
    CHECK(t.losses.size() == 6);
    CHECK(t.iterations_run == 5);
  }
  SUBCASE("ignored settings produce warnings")
  {
    const auto t = run(spec_for(Family::MISI, Sigma::finite(1.0), 2, WeightScheme::Uniform), p);
    CHECK(t.warnings.size() == 2);
  }
  SUBCASE("invalid specs")
  {
    CHECK_THROWS_AS(run(spec_for(Family::MixIncons, std::nullopt, 2), p), InvalidArgument);
    CHECK_THROWS_AS(run(spec_for(Family::MISI, std::nullopt, 21), p), InvalidArgument);
    CHECK_THROWS_AS(run(spec_for(Family::MISI, std::nullopt, -1), p), InvalidArgument);
    Problem bad = p;
    bad.magnitudes[1] = MagnitudeSpectrogram::Ones(3, 3);
    CHECK_THROWS_AS(run(spec_for(Family::MISI, std::nullopt, 1), bad), InvalidArgument);
  }
  SUBCASE("determinism")
  {
    const auto spec = spec_for(Family::MagInconsHardMix, Sigma::finite(0.3), 4);
    const auto a = run(spec, p);
    const auto b = run(spec, p);
    for (std::size_t k = 0; k < a.losses.size(); ++k)
    {
      CHECK(a.losses[k].mixing == b.losses[k].mixing);
      CHECK(a.losses[k].inconsistency == b.losses[k].inconsistency);
    }
    CHECK((a.estimates[0] == b.estimates[0]).all());
  }
  SUBCASE("optional early stop")
  {
    auto spec = spec_for(Family::InconsHardMix, std::nullopt, 20);
    spec.stop_tolerance = 1e-8;
    const auto t = run(spec, p);
    CHECK(t.iterations_run == 2);
    CHECK(t.losses.size() == 3);
  }
  SUBCASE("observer sees every iterate")
  {
    RunOptions options;
    options.record_losses = false;
    std::vector<int> seen;
    options.on_iterate = [&](int k, const SourceSet&) { seen.push_back(k); };
    const auto t = run(spec_for(Family::MISI, std::nullopt, 3), p, options);
    CHECK(seen == std::vector<int>{0, 1, 2, 3});
    CHECK(t.losses.empty());
  }
}

TEST_CASE("descent of the soft objectives")
{
  for (std::uint64_t seed = 0; seed < 3; ++seed)
  {
    std::mt19937_64 rng(100 + seed);
    const auto p = random_problem(2, 400, rng);
    for (double sigma : {0.1, 1.0, 10.0})
    {
      CAPTURE(sigma);
      for (auto scheme : {WeightScheme::Uniform, WeightScheme::MagnitudeRatio})
      {
        const auto t = run(spec_for(Family::MixIncons, Sigma::finite(sigma), 20, scheme), p);
        CHECK(non_increasing(objectives(t)));
      }
      const auto m = run(spec_for(Family::MagInconsHardMix, Sigma::finite(sigma), 20), p);
      CHECK(non_increasing(objectives(m), 1));
      for (std::size_t k = 1; k < m.losses.size(); ++k)
        CHECK(m.losses[k].mixing <= 1e-20 * spectral_energy(p.mixture));
    }
  }
}

TEST_CASE("Griffin-Lim descent")
{
  for (std::uint64_t seed = 0; seed < 3; ++seed)
  {
    std::mt19937_64 rng(200 + seed);
    const auto p = random_problem(2, 400, rng);
    double vnorm = 0.0;
    for (const auto& v : p.magnitudes) vnorm += spectral_energy(v);
    const auto t = run(algorithm_from_name("griffin_lim"), p);
    for (std::size_t k = 1; k < t.losses.size(); ++k)
    {
      CHECK(t.losses[k].magnitude <= 1e-20 * vnorm);
      CHECK(t.losses[k].inconsistency <= t.losses[k - 1].inconsistency * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("constraint classes of the iterates")
{
  std::mt19937_64 rng(8);
  const auto p = random_problem(2, 400, rng);
  RunOptions options;
  options.record_losses = false;
  const double Ex = spectral_energy(p.mixture);

  const auto check_each = [&](AlgorithmSpec spec, auto&& predicate) {
    options.on_iterate = [&](int k, const SourceSet& S) {
      if (k > 0) predicate(S);
    };
    run(spec, p, options);
  };
  const auto magnitude_exact = [&](const SourceSet& S) {
    CHECK(magnitude_mismatch(S, p.magnitudes) < 1e-20 * Ex);
  };
  const auto conservative = [&](const SourceSet& S) {
    CHECK(rel_diff(sum_sources(S), p.mixture) < 1e-10);
  };
  check_each(spec_for(Family::MISI, std::nullopt, 5), conservative);
  check_each(spec_for(Family::MixInconsHardMag, Sigma::finite(1.0), 5), magnitude_exact);
  check_each(spec_for(Family::InconsHardMix, std::nullopt, 3), conservative);

  // generic inputs: hardMag iterates are not conservative, the soft ones
  // do not match the magnitudes
  const auto hm = run(spec_for(Family::MixInconsHardMag, Sigma::finite(1.0), 3), p);
  CHECK(hm.losses.back().mixing > 1e-6 * Ex);
  // MISI ends with the mixing projector: conservative, magnitudes off
  const auto misi = run(spec_for(Family::MISI, std::nullopt, 3), p);
  CHECK(misi.losses.back().magnitude > 1e-6 * Ex);
  const auto mi = run(spec_for(Family::MixIncons, Sigma::finite(1.0), 3), p);
  CHECK(mi.losses.back().magnitude > 1e-6 * Ex);
}
