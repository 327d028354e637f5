#pragma once

#include "specinv/spectral.hpp"
#include "specinv/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace specinv {

// ---------------------------------------------------------------- WAV

enum class WavEncoding
{
  Pcm16,
  Float32,
};

/// Reads a mono RIFF/WAVE file (PCM 16-bit or IEEE float 32-bit). PCM is
/// scaled by 1/32768.
TimeSignal read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const TimeSignal& signal,
               WavEncoding encoding = WavEncoding::Float32);

// ---------------------------------------------------------- mixtures

struct Mixture
{
  TimeSignal mixture;
  TimeSignal scaled_noise;
  std::size_t offset = 0;  ///< start of the noise crop
  double gain = 0.0;       ///< applied to the noise crop
  double achieved_isnr_db = 0.0;
};

/// Mean squared amplitude.
double mean_power(std::span<const double> x);

/// Crops noise at a seeded random offset to the clean length and scales it
/// so that 10 log10(P_clean / P_noise) = isnr_db.
Mixture make_mixture(const TimeSignal& clean, const TimeSignal& noise,
                     double isnr_db, std::uint64_t seed);

// -------------------------------------------------------- magnitudes

std::vector<MagnitudeSpectrogram>
oracle_magnitudes(std::span<const TimeSignal> sources, const StftConfig& cfg);

/// V'_j = V_j exp(eps), eps ~ N(0, level^2) i.i.d. per bin.
std::vector<MagnitudeSpectrogram>
degrade_magnitudes(std::span<const MagnitudeSpectrogram> V, double level,
                   std::uint64_t seed);

// ------------------------------------------------------ SPGM files
//
// Little-endian: "SPGM", u8 version (1), u8 kind (0 real f64, 1 complex f64
// interleaved re/im), u32 F, u32 T, then F*T values in row-major order.

using SpectrogramPayload = std::variant<MagnitudeSpectrogram, ComplexSpectrogram>;

void write_spectrogram(const std::filesystem::path& path,
                       const MagnitudeSpectrogram& M);
void write_spectrogram(const std::filesystem::path& path,
                       const ComplexSpectrogram& M);
SpectrogramPayload read_spectrogram(const std::filesystem::path& path);
/// Reads a real payload; complex payloads are rejected.
MagnitudeSpectrogram read_magnitudes(const std::filesystem::path& path);

// ---------------------------------------------------------- manifest

struct ManifestItem
{
  std::string clean_path;
  std::string noise_path;
  double isnr_db = 0.0;
  std::uint64_t seed = 0;
  std::string split; ///< "validation" or "test"
};

struct DatasetManifest
{
  std::vector<ManifestItem> items;
  StftConfig stft;
  int J = 2;

  void validate() const;
};

/// Relative item paths are resolved against the manifest's directory.
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const DatasetManifest& manifest);

} // namespace specinv
