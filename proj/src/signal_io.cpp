#include "specinv/signal_io.hpp"

#include "summation.hpp"

#include "json.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

namespace specinv {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> slurp(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const fs::path& path, const std::vector<unsigned char>& bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

/// Little-endian byte reader over a buffer with bounds checks.
class Reader
{
public:
  Reader(const std::vector<unsigned char>& b, std::string what)
      : mBytes(b), mWhat(std::move(what)) {}

  std::size_t remaining() const { return mBytes.size() - mPos; }
  std::size_t position() const { return mPos; }

  void need(std::size_t n) const
  {
    if (remaining() < n) throw IoError(mWhat + ": truncated file");
  }
  template <typename T> T get()
  {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(mBytes[mPos + i]) << (8 * i);
    mPos += sizeof(T);
    if constexpr (sizeof(T) == 1) return static_cast<T>(v);
    else if constexpr (sizeof(T) == 2) return static_cast<T>(static_cast<std::uint16_t>(v));
    else if constexpr (sizeof(T) == 4) return std::bit_cast<T>(static_cast<std::uint32_t>(v));
    else return std::bit_cast<T>(v);
  }
  std::string tag()
  {
    need(4);
    std::string s(reinterpret_cast<const char*>(&mBytes[mPos]), 4);
    mPos += 4;
    return s;
  }
  void skip(std::size_t n)
  {
    need(n);
    mPos += n;
  }

private:
  const std::vector<unsigned char>& mBytes;
  std::string mWhat;
  std::size_t mPos = 0;
};

class Writer
{
public:
  template <typename T> void put(T value)
  {
    std::uint64_t v = 0;
    if constexpr (sizeof(T) == 1) v = static_cast<std::uint8_t>(value);
    else if constexpr (sizeof(T) == 2) v = static_cast<std::uint16_t>(value);
    else if constexpr (sizeof(T) == 4) v = std::bit_cast<std::uint32_t>(value);
    else v = std::bit_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
      bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void tag(const char (&t)[5]) { bytes.insert(bytes.end(), t, t + 4); }

  std::vector<unsigned char> bytes;
};

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

} // namespace

TimeSignal read_wav(const fs::path& path)
{
  const auto bytes = slurp(path);
  Reader r(bytes, path.string());
  if (r.tag() != "RIFF") throw IoError(path.string() + ": not a RIFF file");
  r.get<std::uint32_t>();
  if (r.tag() != "WAVE") throw IoError(path.string() + ": not a WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (true)
  {
    if (r.remaining() < 8) throw IoError(path.string() + ": no data chunk");
    const auto id = r.tag();
    const auto size = r.get<std::uint32_t>();
    if (id == "fmt ")
    {
      if (size < 16) throw IoError(path.string() + ": malformed fmt chunk");
      r.need(size);
      const auto start = r.position();
      format = r.get<std::uint16_t>();
      channels = r.get<std::uint16_t>();
      rate = r.get<std::uint32_t>();
      r.get<std::uint32_t>();
      r.get<std::uint16_t>();
      bits = r.get<std::uint16_t>();
      if (format == kFormatExtensible && size >= 40)
      {
        r.skip(8);
        format = r.get<std::uint16_t>();
      }
      r.skip(size - (r.position() - start));
      have_fmt = true;
    }
    else if (id == "data")
    {
      if (!have_fmt) throw IoError(path.string() + ": data before fmt chunk");
      if (channels != 1)
        throw IoError(path.string() + ": mono required (file has " +
                      std::to_string(channels) + " channels)");
      const bool pcm16 = format == kFormatPcm && bits == 16;
      const bool f32 = format == kFormatFloat && bits == 32;
      if (!pcm16 && !f32)
        throw IoError(path.string() + ": unsupported codec (format " +
                      std::to_string(format) + ", " + std::to_string(bits) +
                      " bits); need PCM16 or float32");
      const std::size_t width = bits / 8;
      if (size % width != 0 || r.remaining() < size)
        throw IoError(path.string() + ": truncated file");
      TimeSignal x;
      x.sample_rate = rate;
      x.samples.resize(size / width);
      for (auto& s : x.samples)
        s = pcm16 ? r.get<std::int16_t>() / 32768.0
                  : static_cast<double>(r.get<float>());
      return x;
    }
    else
    {
      r.skip(size + (size & 1u));
    }
  }
}

void write_wav(const fs::path& path, const TimeSignal& signal,
               WavEncoding encoding)
{
  const bool pcm = encoding == WavEncoding::Pcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(signal.sample_rate));
  const std::size_t data_bytes = signal.samples.size() * (bits / 8);
  if (data_bytes > std::numeric_limits<std::uint32_t>::max() - 64)
    throw IoError(path.string() + ": signal too long for WAV");

  Writer w;
  w.tag("RIFF");
  w.put(static_cast<std::uint32_t>(36 + data_bytes));
  w.tag("WAVE");
  w.tag("fmt ");
  w.put(std::uint32_t{16});
  w.put(pcm ? kFormatPcm : kFormatFloat);
  w.put(std::uint16_t{1});
  w.put(rate);
  w.put(static_cast<std::uint32_t>(rate * (bits / 8)));
  w.put(static_cast<std::uint16_t>(bits / 8));
  w.put(bits);
  w.tag("data");
  w.put(static_cast<std::uint32_t>(data_bytes));
  for (double s : signal.samples)
  {
    if (pcm)
    {
      const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
      w.put(static_cast<std::int16_t>(q));
    }
    else
    {
      w.put(static_cast<float>(s));
    }
  }
  spill(path, w.bytes);
}

double mean_power(std::span<const double> x)
{
  if (x.empty()) return 0.0;
  std::vector<double> sq(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) sq[n] = x[n] * x[n];
  return detail::pairwise_sum(sq) / static_cast<double>(x.size());
}

Mixture make_mixture(const TimeSignal& clean, const TimeSignal& noise,
                     double isnr_db, std::uint64_t seed)
{
  if (clean.samples.empty()) throw InvalidArgument("empty input");
  if (noise.size() < clean.size())
    throw InvalidArgument("noise (" + std::to_string(noise.size()) +
                          " samples) is shorter than clean speech (" +
                          std::to_string(clean.size()) + ")");
  if (clean.sample_rate != noise.sample_rate)
    throw InvalidArgument("sample rate mismatch between clean and noise");
  if (!std::isfinite(isnr_db)) throw InvalidArgument("iSNR must be finite");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, noise.size() - clean.size());
  Mixture m;
  m.offset = pick(rng);

  const std::span<const double> crop(noise.samples.data() + m.offset, clean.size());
  const double p_clean = mean_power(clean.samples);
  const double p_noise = mean_power(crop);
  if (!(p_noise > 0.0)) throw InvalidArgument("zero-power noise crop");
  if (!(p_clean > 0.0)) throw InvalidArgument("zero-power clean signal");

  m.gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, isnr_db / 10.0)));
  m.scaled_noise.sample_rate = clean.sample_rate;
  m.mixture.sample_rate = clean.sample_rate;
  m.scaled_noise.samples.resize(clean.size());
  m.mixture.samples.resize(clean.size());
  for (std::size_t n = 0; n < clean.size(); ++n)
  {
    m.scaled_noise.samples[n] = m.gain * crop[n];
    m.mixture.samples[n] = clean.samples[n] + m.scaled_noise.samples[n];
  }
  m.achieved_isnr_db = 10.0 * std::log10(p_clean / mean_power(m.scaled_noise.samples));
  return m;
}

std::vector<MagnitudeSpectrogram>
oracle_magnitudes(std::span<const TimeSignal> sources, const StftConfig& cfg)
{
  if (sources.empty()) throw InvalidArgument("need at least one source");
  std::vector<MagnitudeSpectrogram> V;
  V.reserve(sources.size());
  for (const auto& s : sources)
  {
    if (s.size() != sources.front().size())
      throw InvalidArgument("sources must have equal lengths");
    V.push_back(stft(s, cfg).abs());
  }
  return V;
}

std::vector<MagnitudeSpectrogram>
degrade_magnitudes(std::span<const MagnitudeSpectrogram> V, double level,
                   std::uint64_t seed)
{
  if (!(level >= 0.0) || !std::isfinite(level))
    throw InvalidArgument("degradation level must be nonnegative");
  std::vector<MagnitudeSpectrogram> out(V.begin(), V.end());
  if (level == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, level);
  for (auto& v : out)
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) *= std::exp(eps(rng));
  return out;
}

// ------------------------------------------------------------------ SPGM

namespace {

constexpr std::uint8_t kSpgmVersion = 1;
constexpr std::uint8_t kKindReal = 0;
constexpr std::uint8_t kKindComplex = 1;

template <typename Matrix>
void write_spgm(const fs::path& path, const Matrix& M, std::uint8_t kind)
{
  if (M.rows() > std::numeric_limits<std::uint32_t>::max() ||
      M.cols() > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("spectrogram too large for SPGM");
  Writer w;
  w.tag("SPGM");
  w.put(kSpgmVersion);
  w.put(kind);
  w.put(static_cast<std::uint32_t>(M.rows()));
  w.put(static_cast<std::uint32_t>(M.cols()));
  w.bytes.reserve(w.bytes.size() + static_cast<std::size_t>(M.size()) * 16);
  for (Eigen::Index f = 0; f < M.rows(); ++f)
    for (Eigen::Index t = 0; t < M.cols(); ++t)
    {
      if constexpr (std::is_same_v<typename Matrix::Scalar, double>)
        w.put(M(f, t));
      else
      {
        w.put(M(f, t).real());
        w.put(M(f, t).imag());
      }
    }
  spill(path, w.bytes);
}

} // namespace

void write_spectrogram(const fs::path& path, const MagnitudeSpectrogram& M)
{
  write_spgm(path, M, kKindReal);
}

void write_spectrogram(const fs::path& path, const ComplexSpectrogram& M)
{
  write_spgm(path, M, kKindComplex);
}

SpectrogramPayload read_spectrogram(const fs::path& path)
{
  const auto bytes = slurp(path);
  const auto name = path.string();
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "SPGM", 4) != 0)
    throw IoError(name + ": not a spectrogram file");
  Reader r(bytes, name);
  r.tag();
  const auto version = r.get<std::uint8_t>();
  if (version != kSpgmVersion)
    throw IoError(name + ": unsupported SPGM version " + std::to_string(version));
  const auto kind = r.get<std::uint8_t>();
  if (kind != kKindReal && kind != kKindComplex)
    throw IoError(name + ": unknown payload kind " + std::to_string(kind));
  const std::uint64_t F = r.get<std::uint32_t>();
  const std::uint64_t T = r.get<std::uint32_t>();
  const std::uint64_t width = kind == kKindReal ? 8 : 16;
  if (F != 0 && T > std::numeric_limits<std::uint64_t>::max() / F / width)
    throw IoError(name + ": dimension overflow");
  const std::uint64_t payload = F * T * width;
  if (payload > r.remaining()) throw IoError(name + ": truncated file");
  if (payload < r.remaining()) throw IoError(name + ": trailing bytes after payload");

  const auto rows = static_cast<Eigen::Index>(F);
  const auto cols = static_cast<Eigen::Index>(T);
  if (kind == kKindReal)
  {
    MagnitudeSpectrogram M(rows, cols);
    for (Eigen::Index f = 0; f < rows; ++f)
      for (Eigen::Index t = 0; t < cols; ++t) M(f, t) = r.get<double>();
    return M;
  }
  ComplexSpectrogram M(rows, cols);
  for (Eigen::Index f = 0; f < rows; ++f)
    for (Eigen::Index t = 0; t < cols; ++t)
    {
      const double re = r.get<double>();
      const double im = r.get<double>();
      M(f, t) = Complex(re, im);
    }
  return M;
}

MagnitudeSpectrogram read_magnitudes(const fs::path& path)
{
  auto payload = read_spectrogram(path);
  if (auto* m = std::get_if<MagnitudeSpectrogram>(&payload))
  {
    if (!m->isFinite().all() || !(*m >= 0.0).all())
      throw InvalidArgument(path.string() + ": invalid magnitude");
    return std::move(*m);
  }
  throw IoError(path.string() + ": expected a real magnitude payload");
}

// -------------------------------------------------------------- manifest

void DatasetManifest::validate() const
{
  stft.validate();
  if (J < 1) throw InvalidArgument("manifest J must be positive");
  for (const auto& item : items)
  {
    if (item.clean_path.empty() || item.noise_path.empty())
      throw InvalidArgument("manifest item with empty path");
    if (item.split != "validation" && item.split != "test")
      throw InvalidArgument("manifest split must be validation or test, got '" +
                            item.split + "'");
  }
}

DatasetManifest read_manifest(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try
  {
    in >> j;
  }
  catch (const nlohmann::json::exception& e)
  {
    throw IoError(path.string() + ": " + e.what());
  }

  DatasetManifest m;
  const auto base = path.parent_path();
  try
  {
    m.J = j.value("J", 2);
    if (j.contains("stft"))
    {
      const auto& s = j.at("stft");
      m.stft.window_length = s.value("window_length", m.stft.window_length);
      m.stft.hop = s.value("hop", m.stft.hop);
      m.stft.sample_rate = s.value("sample_rate", m.stft.sample_rate);
    }
    for (const auto& it : j.at("items"))
    {
      ManifestItem item;
      item.clean_path = it.at("clean_path").get<std::string>();
      item.noise_path = it.at("noise_path").get<std::string>();
      item.isnr_db = it.at("isnr_db").get<double>();
      item.seed = it.at("seed").get<std::uint64_t>();
      item.split = it.at("split").get<std::string>();
      for (auto* p : {&item.clean_path, &item.noise_path})
        if (!p->empty() && fs::path(*p).is_relative())
          *p = (base / *p).lexically_normal().string();
      m.items.push_back(std::move(item));
    }
  }
  catch (const nlohmann::json::exception& e)
  {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest)
{
  nlohmann::json j;
  j["J"] = manifest.J;
  j["stft"] = {{"window_length", manifest.stft.window_length},
               {"hop", manifest.stft.hop},
               {"sample_rate", manifest.stft.sample_rate}};
  j["items"] = nlohmann::json::array();
  for (const auto& item : manifest.items)
    j["items"].push_back({{"clean_path", item.clean_path},
                          {"noise_path", item.noise_path},
                          {"isnr_db", item.isnr_db},
                          {"seed", item.seed},
                          {"split", item.split}});
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

} // namespace specinv
