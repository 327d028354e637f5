#include "doctest.h"
#include "helpers.hpp"

#include "specinv/algorithms.hpp"
#include "specinv/cli.hpp"
#include "specinv/experiment.hpp"
#include "specinv/metrics.hpp"
#include "specinv/signal_io.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace specinv;
namespace fs = std::filesystem;

namespace {

struct Result
{
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args)
{
  args.insert(args.begin(), "specinv");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / "specinv_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TimeSignal as_float(TimeSignal x)
{
  for (auto& s : x.samples) s = static_cast<float>(s);
  return x;
}

/// Clean/noise pair plus the mixture and oracle magnitudes written by the CLI.
struct Fixture
{
  fs::path dir;
  TimeSignal clean, noise;

  explicit Fixture(const std::string& name) : dir(scratch(name))
  {
    clean = as_float(synth_speech(8000, 16000, 11));
    noise = as_float(synth_noise(12000, 16000, 0, 12));
    write_wav(dir / "clean.wav", clean);
    write_wav(dir / "noise.wav", noise);
    REQUIRE(invoke({"mix", "--clean", p("clean.wav"), "--noise", p("noise.wav"), "--isnr", "0",
                 "--seed", "5", "--out", p("mix")}).code == 0);
    REQUIRE(invoke({"mags", "--in", p("clean.wav"), "--out", p("v1.spgm")}).code == 0);
    REQUIRE(invoke({"mags", "--in", p("mix/scaled_noise.wav"), "--out", p("v2.spgm")}).code == 0);
  }

  std::string p(const std::string& rel) const { return (dir / rel).string(); }

  Result separate(const std::string& algo, const std::string& out,
                  std::vector<std::string> extra = {}) const
  {
    std::vector<std::string> args{"separate", "--mixture", p("mix/mixture.wav"), "--mags",
                                  p("v1.spgm"),  p("v2.spgm"), "--algo", algo, "--out", p(out)};
    args.insert(args.end(), extra.begin(), extra.end());
    return invoke(args);
  }
};

} // namespace

TEST_CASE("usage errors")
{
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"mix", "--clean", "a.wav"}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("mix")
{
  const Fixture fx("mix");
  const auto sidecar = nlohmann::json::parse(slurp(fx.dir / "mix/mixture.json"));
  const auto direct = make_mixture(fx.clean, fx.noise, 0.0, 5);
  CHECK(sidecar["gain"].get<double>() == direct.gain);
  CHECK(sidecar["offset"].get<std::size_t>() == direct.offset);
  CHECK(std::abs(sidecar["achieved_isnr_db"].get<double>()) < 1e-9);
  CHECK(read_wav(fx.dir / "mix/mixture.wav").samples == as_float(direct.mixture).samples);

  // equal-power inputs at 0 dB keep the noise as is
  const auto dir = scratch("mix_unit");
  TimeSignal c, n;
  for (int i = 0; i < 400; ++i) c.samples.push_back(i % 2 ? 0.5 : -0.5);
  n.samples.assign(800, 0.5);
  write_wav(dir / "c.wav", c);
  write_wav(dir / "n.wav", n);
  REQUIRE(invoke({"mix", "--clean", (dir / "c.wav").string(), "--noise", (dir / "n.wav").string(),
               "--isnr", "0", "--out", (dir / "o").string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "o/mixture.json"))["gain"].get<double>() == 1.0);

  REQUIRE(invoke({"mix", "--clean", fx.p("clean.wav"), "--noise", fx.p("noise.wav"), "--isnr",
               "0", "--seed", "5", "--out", fx.p("mix2")}).code == 0);
  CHECK(slurp(fx.dir / "mix/mixture.wav") == slurp(fx.dir / "mix2/mixture.wav"));

  CHECK(invoke({"mix", "--clean", fx.p("nope.wav"), "--noise", fx.p("noise.wav"), "--isnr", "0",
             "--out", fx.p("x")}).code == cli::kExitIo);
  CHECK(invoke({"mix", "--clean", fx.p("noise.wav"), "--noise", fx.p("clean.wav"), "--isnr", "0",
             "--out", fx.p("x")}).code == cli::kExitUsage);
}

TEST_CASE("separate")
{
  const Fixture fx("separate");
  const auto mixture = read_wav(fx.dir / "mix/mixture.wav");
  Problem problem;
  problem.mixture = stft(mixture, problem.stft);
  problem.magnitudes = {read_magnitudes(fx.dir / "v1.spgm"), read_magnitudes(fx.dir / "v2.spgm")};
  problem.signal_length = mixture.size();

  SUBCASE("am with zero iterations is the amplitude-mask initialization")
  {
    const auto r = fx.separate("am", "am", {"--iters", "0"});
    REQUIRE(r.code == 0);
    const auto S = init_amplitude_mask(problem.mixture, problem.magnitudes);
    const auto expect = as_float(istft(S[0], problem.stft, mixture.size()));
    CHECK(read_wav(fx.dir / "am/source_1.wav").samples == expect.samples);
    CHECK(fs::exists(fx.dir / "am/source_2.wav"));
  }
  SUBCASE("thin adapter over run()")
  {
    const auto r = fx.separate("misi", "misi", {"--iters", "4"});
    REQUIRE(r.code == 0);
    auto spec = algorithm_from_name("misi");
    spec.iterations = 4;
    const auto trace = run(spec, problem);
    for (std::size_t j = 0; j < 2; ++j)
    {
      const auto expect = as_float(istft(trace.estimates[j], problem.stft, mixture.size()));
      CHECK(read_wav(fx.dir / ("misi/source_" + std::to_string(j + 1) + ".wav")).samples ==
            expect.samples);
    }
    std::istringstream csv(slurp(fx.dir / "misi/trace.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "iteration,h,i,m");
    int rows = 0;
    while (std::getline(csv, line))
    {
      double h = 0, i = 0, m = 0;
      int k = -1;
      REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &k, &h, &i, &m) == 4);
      CHECK(k == rows);
      CHECK(m == trace.losses[static_cast<std::size_t>(k)].magnitude);
      ++rows;
    }
    CHECK(rows == 5);
  }
  SUBCASE("aliases match the family at the pinned sigma")
  {
    REQUIRE(fx.separate("mix_incons", "a", {"--sigma", "0", "--iters", "1"}).code == 0);
    const auto pinned = fx.separate("mixture_proj", "b", {"--iters", "1", "--sigma", "3"});
    REQUIRE(pinned.code == 0);
    CHECK(pinned.err.find("ignoring --sigma") != std::string::npos);
    CHECK(slurp(fx.dir / "a/source_1.wav") == slurp(fx.dir / "b/source_1.wav"));
  }
  SUBCASE("errors")
  {
    CHECK(fx.separate("nope", "e").code == cli::kExitUsage);
    CHECK(fx.separate("mix_incons", "e").code == cli::kExitUsage);
    CHECK(fx.separate("misi", "e", {"--hop", "300"}).code == cli::kExitUsage);
    CHECK(invoke({"separate", "--mixture", fx.p("mix/mixture.wav"), "--mags", fx.p("v1.spgm"),
               fx.p("missing.spgm"), "--algo", "misi", "--out", fx.p("e")}).code == cli::kExitIo);

    // magnitudes computed at another hop do not fit the mixture grid
    REQUIRE(invoke({"mags", "--in", fx.p("clean.wav"), "--out", fx.p("w.spgm"), "--hop", "128"}).code == 0);
    CHECK(invoke({"separate", "--mixture", fx.p("mix/mixture.wav"), "--mags", fx.p("w.spgm"),
               fx.p("v2.spgm"), "--algo", "misi", "--out", fx.p("e")}).code == cli::kExitUsage);
  }
}

TEST_CASE("evaluate")
{
  const Fixture fx("evaluate");
  auto r = invoke({"evaluate", "--ref", fx.p("clean.wav"), "--est", fx.p("clean.wav")});
  CHECK(r.code == 0);
  CHECK(r.out == "300.000000\n");

  TimeSignal twice = fx.clean;
  for (auto& s : twice.samples) s *= 2.0;
  write_wav(fx.dir / "twice.wav", twice);
  r = invoke({"evaluate", "--ref", fx.p("clean.wav"), "--est", fx.p("twice.wav")});
  CHECK(r.code == 0);
  CHECK(r.out == "0.000000\n");

  CHECK(invoke({"evaluate", "--ref", fx.p("clean.wav"), "--est", fx.p("noise.wav")}).code ==
        cli::kExitUsage);
  CHECK(invoke({"evaluate", "--ref", fx.p("clean.wav"), "--est", fx.p("none.wav")}).code ==
        cli::kExitIo);
}

TEST_CASE("make-dataset and benchmark")
{
  const auto dir = scratch("bench");
  REQUIRE(invoke({"make-dataset", "--out", (dir / "data").string(), "--items", "1", "--seconds",
               "0.5"}).code == 0);
  auto config = read_sweep_config(dir / "data/benchmark.json");
  config.algorithms = {"am", "misi", "griffin_lim"};
  config.max_iterations = 2;
  config.output_dir = dir / "out1";
  write_sweep_config(dir / "a.json", config);
  config.output_dir = dir / "out2";
  write_sweep_config(dir / "b.json", config);

  REQUIRE(invoke({"benchmark", "--config", (dir / "a.json").string(), "--jobs", "1"}).code == 0);
  REQUIRE(invoke({"benchmark", "--config", (dir / "b.json").string(), "--jobs", "3"}).code == 0);
  for (const char* f : {"validation.csv", "test.csv", "test_summary.csv"})
    CHECK(slurp(dir / "out1" / f) == slurp(dir / "out2" / f));

  config.algorithms = {"am", "wiener"};
  nlohmann::json bad = nlohmann::json::parse(slurp(dir / "a.json"));
  bad["algorithms"] = {"am", "wiener"};
  std::ofstream(dir / "bad.json") << bad.dump();
  CHECK(invoke({"benchmark", "--config", (dir / "bad.json").string()}).code == cli::kExitUsage);
  CHECK(invoke({"benchmark", "--config", (dir / "none.json").string()}).code == cli::kExitIo);
}
