#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace accent {

/// Mono waveform with amplitudes in [-1, 1].
struct AudioClip {
  Eigen::VectorXd samples;
  int sample_rate = 0;
  std::string source_id;

  Eigen::Index size() const { return samples.size(); }
};

/// Throws InvalidArgument unless the clip is nonempty, finite, in range and
/// has a positive sample rate.
void validate(const AudioClip& clip);

/// Reads a RIFF/WAVE file with integer PCM (8/16/24/32 bit) or 32-bit float
/// samples. Multichannel audio is downmixed by the per-frame channel mean.
/// Integer samples are divided by 2^(bits-1); 8-bit data is unsigned and is
/// re-centred at 128 first.
AudioClip load_wav(const std::filesystem::path& path);

/// Same as load_wav, from an in-memory byte image.
AudioClip decode_wav(const std::vector<unsigned char>& bytes, std::string source_id = {});

enum class WavEncoding { kPcm16, kFloat32 };

/// Writes a mono clip. Samples are clamped to [-1, 1] and 16-bit output uses
/// round-to-nearest with a 32767 ceiling.
void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavEncoding encoding = WavEncoding::kPcm16);

struct ManifestEntry {
  std::string path;
  int label = 0;  // 0 = US, 1 = non-US
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
};

/// Parses `path,label` lines. A first line reading exactly `path,label` is
/// treated as a header. Blank lines are skipped.
CorpusManifest parse_manifest(const std::string& text);
CorpusManifest load_manifest(const std::filesystem::path& path);

}  // namespace accent
