#include "specinv/experiment.hpp"

#include "specinv/metrics.hpp"
#include "summation.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <thread>

namespace specinv {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------ config

void SweepConfig::validate() const
{
  if (algorithms.empty()) throw InvalidArgument("sweep needs at least one algorithm");
  for (const auto& name : algorithms) algorithm_from_name(name);
  if (sigmas.empty()) throw InvalidArgument("sweep needs a non-empty sigma grid");
  if (max_iterations < 1) throw InvalidArgument("iteration cap must be >= 1");
  if (degradation.empty())
    throw InvalidArgument("sweep needs degradation levels for at least one iSNR");
  for (const auto& [isnr, levels] : degradation)
  {
    if (levels.empty())
      throw InvalidArgument("empty degradation list for iSNR " + std::to_string(isnr));
    for (double level : levels)
      if (!(level >= 0.0)) throw InvalidArgument("degradation level must be >= 0");
  }
}

SweepConfig SweepConfig::defaults()
{
  SweepConfig c;
  c.algorithms = algorithm_names();
  for (double s : {0.0, 0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0})
    c.sigmas.push_back(Sigma::finite(s));
  c.sigmas.push_back(Sigma::infinity());
  c.degradation = {{10.0, {0.0}}, {0.0, {0.2}}, {-10.0, {0.5}}};
  c.manifest = "manifest.json";
  c.output_dir = "results";
  return c;
}

namespace {

std::string fmt_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

} // namespace

SweepConfig read_sweep_config(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try
  {
    in >> j;
  }
  catch (const json::exception& e)
  {
    throw IoError(path.string() + ": " + e.what());
  }

  SweepConfig c = SweepConfig::defaults();
  try
  {
    if (j.contains("algorithms"))
      c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("sigmas"))
    {
      c.sigmas.clear();
      for (const auto& s : j.at("sigmas"))
        c.sigmas.push_back(s.is_string() ? Sigma::parse(s.get<std::string>())
                                         : Sigma::finite(s.get<double>()));
    }
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    if (j.contains("weights"))
      c.weight_scheme = parse_weight_scheme(j.at("weights").get<std::string>());
    if (j.contains("degradation"))
    {
      c.degradation.clear();
      for (const auto& [key, levels] : j.at("degradation").items())
      {
        std::size_t used = 0;
        const double isnr = std::stod(key, &used);
        if (used != key.size()) throw InvalidArgument("bad iSNR key '" + key + "'");
        c.degradation[isnr] = levels.get<std::vector<double>>();
      }
    }
    c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
    c.manifest = j.value("manifest", c.manifest.string());
    c.output_dir = j.value("output_dir", c.output_dir.string());
  }
  catch (const json::exception& e)
  {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  catch (const std::logic_error& e)
  {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  if (c.manifest.is_relative()) c.manifest = (base / c.manifest).lexically_normal();
  if (c.output_dir.is_relative()) c.output_dir = (base / c.output_dir).lexically_normal();
  c.validate();
  return c;
}

void write_sweep_config(const fs::path& path, const SweepConfig& c)
{
  json j;
  j["algorithms"] = c.algorithms;
  j["sigmas"] = json::array();
  for (const auto& s : c.sigmas)
    j["sigmas"].push_back(s.is_infinite() ? json("inf") : json(s.value()));
  j["max_iterations"] = c.max_iterations;
  j["weights"] = std::string(to_string(c.weight_scheme));
  j["degradation"] = json::object();
  for (const auto& [isnr, levels] : c.degradation) j["degradation"][fmt_number(isnr)] = levels;
  j["manifest"] = c.manifest.generic_string();
  j["output_dir"] = c.output_dir.generic_string();
  j["record_wall_time"] = c.record_wall_time;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// ------------------------------------------------------------ tables

bool ResultRow::failed() const { return std::isnan(mean_sdr_db); }

std::string ResultTable::to_csv(bool with_wall_time) const
{
  std::string out =
      "algorithm,sigma,iterations,isnr_db,degradation,split,item_id,sdr_db,wall_ms\n";
  char buf[64];
  for (const auto& row : rows)
  {
    const std::string prefix = row.algorithm + "," +
                               (row.sigma ? row.sigma->to_string() : "na") + "," +
                               std::to_string(row.iterations) + "," +
                               fmt_number(row.condition.isnr_db) + "," +
                               fmt_number(row.condition.degradation) + "," + row.split;
    for (const auto& item : row.items)
    {
      out += prefix;
      out += ',';
      out += item.item_id;
      out += ',';
      if (item.sdr_db)
      {
        std::snprintf(buf, sizeof buf, "%.6f", *item.sdr_db);
        out += buf;
      }
      else
      {
        out += "failed";
      }
      out += ',';
      if (with_wall_time)
      {
        std::snprintf(buf, sizeof buf, "%.3f", item.wall_ms);
        out += buf;
      }
      else
      {
        out += '0';
      }
      out += '\n';
    }
  }
  return out;
}

std::string ResultTable::summary_csv() const
{
  std::string out =
      "algorithm,sigma,iterations,isnr_db,degradation,split,mean_sdr_db,num_items\n";
  char buf[64];
  for (const auto& row : rows)
  {
    std::size_t ok = 0;
    for (const auto& item : row.items) ok += item.sdr_db.has_value();
    if (row.failed()) std::snprintf(buf, sizeof buf, "failed");
    else std::snprintf(buf, sizeof buf, "%.6f", row.mean_sdr_db);
    out += row.algorithm + "," + (row.sigma ? row.sigma->to_string() : "na") + "," +
           std::to_string(row.iterations) + "," + fmt_number(row.condition.isnr_db) +
           "," + fmt_number(row.condition.degradation) + "," + row.split + "," + buf +
           "," + std::to_string(ok) + "\n";
  }
  return out;
}

// ------------------------------------------------------------ engine

namespace {

/// One algorithm run and the iterations whose SDR is recorded.
struct RunPlan
{
  std::string algorithm;
  AlgorithmSpec spec;
  std::vector<int> record; ///< ascending
};

struct WorkItem
{
  std::size_t manifest_index = 0;
  std::string item_id;
  Condition condition;
};

struct RunOutcome
{
  std::vector<std::optional<double>> sdr; ///< parallel to RunPlan::record
  std::vector<double> wall_ms;
};

struct WorkOutcome
{
  std::vector<RunOutcome> runs; ///< empty when the item failed
};

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string item_id(std::size_t index)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "item_%04zu", index);
  return buf;
}

std::vector<WorkItem> work_for_split(const DatasetManifest& manifest,
                                     const SweepConfig& config,
                                     const std::string& split)
{
  std::vector<WorkItem> work;
  for (std::size_t i = 0; i < manifest.items.size(); ++i)
  {
    const auto& item = manifest.items[i];
    if (item.split != split) continue;
    const auto levels = config.degradation.find(item.isnr_db);
    if (levels == config.degradation.end())
      throw InvalidArgument("no degradation level configured for iSNR " +
                            fmt_number(item.isnr_db));
    for (double level : levels->second)
      work.push_back({i, item_id(i), Condition{item.isnr_db, level}});
  }
  return work;
}

AlgorithmSpec make_spec(const std::string& name, std::optional<Sigma> sigma,
                        int iterations, const SweepConfig& config)
{
  AlgorithmSpec spec = algorithm_from_name(name);
  if (uses_sigma(spec.family) && !spec.sigma) spec.sigma = sigma;
  if (uses_weight_scheme(spec.family)) spec.weight_scheme = config.weight_scheme;
  spec.max_iterations = config.max_iterations;
  spec.iterations = spec.family == Family::AM ? 0 : iterations;
  return spec;
}

std::vector<RunPlan> validation_plans(const SweepConfig& config)
{
  std::vector<RunPlan> plans;
  std::vector<int> all(static_cast<std::size_t>(config.max_iterations));
  for (int k = 0; k < config.max_iterations; ++k) all[static_cast<std::size_t>(k)] = k + 1;

  for (const auto& name : config.algorithms)
  {
    const AlgorithmSpec base = algorithm_from_name(name);
    if (base.family == Family::AM)
    {
      plans.push_back({name, make_spec(name, std::nullopt, 0, config), {0}});
    }
    else if (uses_sigma(base.family) && !base.sigma)
    {
      for (const auto& s : config.sigmas)
        plans.push_back({name, make_spec(name, s, config.max_iterations, config), all});
    }
    else
    {
      plans.push_back({name, make_spec(name, std::nullopt, config.max_iterations, config), all});
    }
  }
  return plans;
}

std::string run_key(const RunPlan& plan)
{
  const auto& spec = plan.spec;
  std::string key(to_string(spec.family));
  char sigma[48] = "na";
  if (spec.sigma && spec.sigma->is_infinite()) std::snprintf(sigma, sizeof sigma, "inf");
  else if (spec.sigma) std::snprintf(sigma, sizeof sigma, "%a", spec.sigma->value());
  key += '|' + std::string(sigma);
  key += '|' + std::string(spec.weight_scheme ? to_string(*spec.weight_scheme) : "none");
  key += '|' + std::to_string(spec.iterations);
  for (int k : plan.record) key += ',' + std::to_string(k);
  return key;
}

WorkOutcome evaluate_item(const DatasetManifest& manifest, const WorkItem& work,
                          const std::vector<RunPlan>& plans)
{
  using clock = std::chrono::steady_clock;
  const auto& item = manifest.items[work.manifest_index];
  const TimeSignal clean = read_wav(item.clean_path);
  const TimeSignal noise = read_wav(item.noise_path);
  const Mixture mix = make_mixture(clean, noise, item.isnr_db, item.seed);

  StftConfig stft = manifest.stft;
  stft.sample_rate = clean.sample_rate;

  const std::vector<TimeSignal> sources = {clean, mix.scaled_noise};
  const auto oracle = oracle_magnitudes(sources, stft);
  const auto level_seed =
      splitmix64(item.seed ^ std::bit_cast<std::uint64_t>(work.condition.degradation));

  Problem problem;
  problem.mixture = specinv::stft(mix.mixture, stft);
  problem.magnitudes = degrade_magnitudes(oracle, work.condition.degradation, level_seed);
  problem.stft = stft;
  problem.signal_length = clean.size();

  WorkOutcome out;
  out.runs.reserve(plans.size());
  // aliases resolve to a family run that may already be in the plan list
  std::map<std::string, std::size_t> done;
  for (const auto& plan : plans)
  {
    const std::string key = run_key(plan);
    if (const auto hit = done.find(key); hit != done.end())
    {
      out.runs.push_back(out.runs[hit->second]);
      continue;
    }
    done.emplace(key, out.runs.size());
    RunOutcome r;
    r.sdr.assign(plan.record.size(), std::nullopt);
    r.wall_ms.assign(plan.record.size(), 0.0);
    const auto start = clock::now();
    RunOptions options;
    options.record_losses = false;
    options.on_iterate = [&](int k, const SourceSet& S) {
      const auto at = std::lower_bound(plan.record.begin(), plan.record.end(), k);
      if (at == plan.record.end() || *at != k) return;
      const auto slot = static_cast<std::size_t>(at - plan.record.begin());
      const TimeSignal speech = istft(S.front(), stft, clean.size());
      r.sdr[slot] = sdr(clean, speech);
      r.wall_ms[slot] =
          std::chrono::duration<double, std::milli>(clock::now() - start).count();
    };
    run(plan.spec, problem, options);
    out.runs.push_back(std::move(r));
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn)
{
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1)
  {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

/// Evaluates each work item with the plans of its condition and assembles
/// rows ordered by condition, plan, recorded iteration, then item id.
ResultTable execute(const DatasetManifest& manifest, const std::vector<WorkItem>& work,
                    const std::map<Condition, std::vector<RunPlan>>& plans,
                    const std::string& split, int jobs)
{
  if (work.empty()) throw InvalidArgument("manifest has no " + split + " items");

  std::vector<WorkOutcome> outcomes(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    try
    {
      outcomes[i] = evaluate_item(manifest, work[i], plans.at(work[i].condition));
    }
    catch (const std::exception&)
    {
      outcomes[i].runs.clear();
    }
  });
  if (std::all_of(outcomes.begin(), outcomes.end(),
                  [](const WorkOutcome& o) { return o.runs.empty(); }))
    throw std::runtime_error("all " + split + " items failed");

  ResultTable table;
  for (const auto& [condition, condition_plans] : plans)
  {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < work.size(); ++i)
      if (work[i].condition == condition) members.push_back(i);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return work[a].item_id < work[b].item_id;
    });

    for (std::size_t p = 0; p < condition_plans.size(); ++p)
    {
      const auto& plan = condition_plans[p];
      for (std::size_t slot = 0; slot < plan.record.size(); ++slot)
      {
        ResultRow row;
        row.algorithm = plan.algorithm;
        if (uses_sigma(plan.spec.family)) row.sigma = plan.spec.sigma;
        row.iterations = plan.record[slot];
        row.condition = condition;
        row.split = split;
        std::vector<double> ok;
        for (std::size_t m : members)
        {
          ItemResult item{work[m].item_id, std::nullopt, 0.0};
          if (!outcomes[m].runs.empty())
          {
            item.sdr_db = outcomes[m].runs[p].sdr[slot];
            item.wall_ms = outcomes[m].runs[p].wall_ms[slot];
          }
          if (item.sdr_db) ok.push_back(*item.sdr_db);
          row.items.push_back(std::move(item));
        }
        row.mean_sdr_db = ok.empty() ? std::nan("")
                                     : detail::pairwise_sum(ok) / static_cast<double>(ok.size());
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

void write_text(const fs::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

} // namespace

ResultTable run_sweep(const SweepConfig& config, int jobs)
{
  config.validate();
  const auto manifest = read_manifest(config.manifest);
  const auto work = work_for_split(manifest, config, "validation");
  const auto plans = validation_plans(config);
  std::map<Condition, std::vector<RunPlan>> by_condition;
  for (const auto& w : work) by_condition[w.condition] = plans;
  return execute(manifest, work, by_condition, "validation", jobs);
}

Selection select_best(const ResultTable& table, std::string_view algorithm,
                      const Condition& condition)
{
  const ResultRow* best = nullptr;
  const auto better = [](const ResultRow& a, const ResultRow& b) {
    if (a.mean_sdr_db != b.mean_sdr_db) return a.mean_sdr_db > b.mean_sdr_db;
    if (a.iterations != b.iterations) return a.iterations < b.iterations;
    if (a.sigma.has_value() != b.sigma.has_value()) return !a.sigma.has_value();
    return a.sigma && *a.sigma < *b.sigma;
  };
  for (const auto& row : table.rows)
  {
    if (row.algorithm != algorithm || row.condition != condition || row.failed())
      continue;
    if (!best || better(row, *best)) best = &row;
  }
  if (!best)
    throw InvalidArgument("no validation results for algorithm '" +
                          std::string(algorithm) + "' at iSNR " +
                          fmt_number(condition.isnr_db) + ", degradation " +
                          fmt_number(condition.degradation));
  return {best->sigma, best->iterations, best->mean_sdr_db};
}

ResultTable evaluate_test(const ResultTable& validation, const SweepConfig& config,
                          int jobs)
{
  config.validate();
  const auto manifest = read_manifest(config.manifest);
  const auto work = work_for_split(manifest, config, "test");

  std::map<Condition, std::vector<RunPlan>> by_condition;
  for (const auto& w : work)
  {
    if (by_condition.count(w.condition)) continue;
    auto& plans = by_condition[w.condition];
    for (const auto& name : config.algorithms)
    {
      if (algorithm_from_name(name).family == Family::AM)
      {
        plans.push_back({name, make_spec(name, std::nullopt, 0, config), {0}});
        continue;
      }
      const auto chosen = select_best(validation, name, w.condition);
      auto spec = make_spec(name, chosen.sigma, chosen.iterations, config);
      plans.push_back({name, std::move(spec), {chosen.iterations}});
    }
  }
  return execute(manifest, work, by_condition, "test", jobs);
}

BenchmarkResult run_benchmark(const SweepConfig& config, int jobs)
{
  config.validate();
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());

  BenchmarkResult out;
  out.validation = run_sweep(config, jobs);
  out.validation_csv = config.output_dir / "validation.csv";
  write_text(out.validation_csv, out.validation.to_csv(config.record_wall_time));
  write_text(config.output_dir / "validation_summary.csv", out.validation.summary_csv());

  out.test = evaluate_test(out.validation, config, jobs);
  out.test_csv = config.output_dir / "test.csv";
  out.test_summary_csv = config.output_dir / "test_summary.csv";
  write_text(out.test_csv, out.test.to_csv(config.record_wall_time));
  write_text(out.test_summary_csv, out.test.summary_csv());
  return out;
}

// ------------------------------------------------------ synthetic data

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void normalize_peak(std::vector<double>& x, double peak)
{
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : x) v *= peak / m;
}

} // namespace

TimeSignal synth_speech(std::size_t length, double sample_rate, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };

  struct Syllable
  {
    std::size_t begin, end;
    double f0_start, f0_end, gain;
    std::array<double, 3> formants;
  };
  const double f0_base = uni(100.0, 220.0);
  std::vector<Syllable> syllables;
  for (double t = uni(0.05, 0.2); t < length / sample_rate - 0.2;)
  {
    const double dur = uni(0.15, 0.35);
    Syllable s;
    s.begin = static_cast<std::size_t>(t * sample_rate);
    s.end = std::min(length, static_cast<std::size_t>((t + dur) * sample_rate));
    s.f0_start = f0_base * uni(0.85, 1.15);
    s.f0_end = f0_base * uni(0.85, 1.15);
    s.gain = uni(0.5, 1.0);
    s.formants = {uni(300.0, 900.0), uni(900.0, 2500.0), uni(2300.0, 3300.0)};
    syllables.push_back(s);
    t += dur + uni(0.05, 0.15);
  }
  if (syllables.empty() && length > 0)
  {
    Syllable s;
    s.begin = length / 10;
    s.end = length - length / 10;
    s.f0_start = s.f0_end = f0_base;
    s.gain = 1.0;
    s.formants = {600.0, 1500.0, 2800.0};
    syllables.push_back(s);
  }

  const double nyquist = 0.45 * sample_rate;
  std::vector<double> phase_offsets(64);
  for (auto& p : phase_offsets) p = uni(0.0, kTwoPi);
  std::normal_distribution<double> white(0.0, 1.0);

  TimeSignal x;
  x.sample_rate = sample_rate;
  x.samples.assign(length, 0.0);
  double phase = 0.0;
  const double ramp = 0.03 * sample_rate;
  for (const auto& s : syllables)
  {
    const double span = static_cast<double>(s.end - s.begin);
    for (std::size_t n = s.begin; n < s.end; ++n)
    {
      const double u = (n - s.begin) / span;
      const double vibrato = 1.0 + 0.02 * std::sin(kTwoPi * 5.0 * n / sample_rate);
      const double f0 = (s.f0_start + (s.f0_end - s.f0_start) * u) * vibrato;
      phase += kTwoPi * f0 / sample_rate;

      const double rise = std::min(1.0, (n - s.begin) / ramp);
      const double fall = std::min(1.0, (s.end - n) / ramp);
      const double env = s.gain * std::sin(0.5 * std::numbers::pi * rise) *
                         std::sin(0.5 * std::numbers::pi * fall);

      double v = 0.0;
      for (int h = 1; h < 64 && h * f0 < nyquist; ++h)
      {
        const double f = h * f0;
        double amp = 0.02;
        for (std::size_t k = 0; k < s.formants.size(); ++k)
        {
          const double bw = 80.0 + 60.0 * k;
          const double d = (f - s.formants[k]) / bw;
          amp += std::exp(-0.5 * d * d) / (1.0 + k);
        }
        v += amp * std::sin(h * phase + phase_offsets[static_cast<std::size_t>(h)]);
      }
      x.samples[n] = env * (v + 0.02 * white(rng));
    }
  }
  normalize_peak(x.samples, 0.5);
  return x;
}

TimeSignal synth_noise(std::size_t length, double sample_rate, int environment,
                       std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> white(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  TimeSignal x;
  x.sample_rate = sample_rate;
  x.samples.assign(length, 0.0);

  switch (environment % 3)
  {
  case 0: // living room: pink-ish noise with mains hum
  {
    double b0 = 0, b1 = 0, b2 = 0;
    for (std::size_t n = 0; n < length; ++n)
    {
      const double w = white(rng);
      b0 = 0.99765 * b0 + w * 0.0990460;
      b1 = 0.96300 * b1 + w * 0.2965164;
      b2 = 0.57000 * b2 + w * 1.0526913;
      double hum = 0.0;
      for (int h = 1; h <= 4; ++h)
        hum += std::sin(kTwoPi * 50.0 * h * n / sample_rate) / h;
      x.samples[n] = b0 + b1 + b2 + w * 0.1848 + 0.3 * hum;
    }
    break;
  }
  case 1: // bus: low rumble, engine harmonics, slow swell
  {
    double lp = 0.0;
    const double engine = 70.0 + 30.0 * U(rng);
    for (std::size_t n = 0; n < length; ++n)
    {
      lp = 0.985 * lp + 0.15 * white(rng);
      const double t = n / sample_rate;
      double motor = 0.0;
      for (int h = 1; h <= 6; ++h) motor += std::sin(kTwoPi * engine * h * t + h) / h;
      const double swell = 1.0 + 0.4 * std::sin(kTwoPi * 0.4 * t);
      x.samples[n] = swell * (lp + 0.4 * motor) + 0.05 * white(rng);
    }
    break;
  }
  default: // public square: babble of distant talkers over broadband noise
  {
    for (int talker = 0; talker < 4; ++talker)
    {
      const auto voice = synth_speech(length, sample_rate, seed * 31 + 7 + talker);
      for (std::size_t n = 0; n < length; ++n) x.samples[n] += voice.samples[n];
    }
    for (auto& v : x.samples) v += 0.05 * white(rng);
    break;
  }
  }
  normalize_peak(x.samples, 0.5);
  return x;
}

fs::path generate_synthetic_dataset(const fs::path& dir,
                                    const SyntheticDatasetOptions& options)
{
  if (options.items_per_split < 1) throw InvalidArgument("need at least one item per split");
  if (options.noise_seconds < options.clean_seconds)
    throw InvalidArgument("noise must be at least as long as speech");
  std::error_code ec;
  fs::create_directories(dir / "clean", ec);
  fs::create_directories(dir / "noise", ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const auto clean_len = static_cast<std::size_t>(options.clean_seconds * options.sample_rate);
  const auto noise_len = static_cast<std::size_t>(options.noise_seconds * options.sample_rate);

  DatasetManifest manifest;
  manifest.stft.sample_rate = options.sample_rate;
  int pair = 0;
  for (const std::string split : {"validation", "test"})
  {
    for (int i = 0; i < options.items_per_split; ++i, ++pair)
    {
      const std::uint64_t base = splitmix64(options.seed + static_cast<std::uint64_t>(pair));
      char name[64];
      std::snprintf(name, sizeof name, "%s_%02d.wav", split.c_str(), i);
      const fs::path clean_rel = fs::path("clean") / name;
      const fs::path noise_rel = fs::path("noise") / name;
      write_wav(dir / clean_rel, synth_speech(clean_len, options.sample_rate, base));
      write_wav(dir / noise_rel, synth_noise(noise_len, options.sample_rate, i, base ^ 0x5A5A));
      for (std::size_t k = 0; k < options.isnrs_db.size(); ++k)
        manifest.items.push_back({clean_rel.generic_string(), noise_rel.generic_string(),
                                  options.isnrs_db[k], splitmix64(base + k + 1), split});
    }
  }
  const auto manifest_path = dir / "manifest.json";
  write_manifest(manifest_path, manifest);

  SweepConfig config = SweepConfig::defaults();
  config.manifest = "manifest.json";
  config.output_dir = "results";
  write_sweep_config(dir / "benchmark.json", config);
  return manifest_path;
}

} // namespace specinv
