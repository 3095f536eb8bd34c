#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "accent/audio.hpp"

namespace accent {

/// Synthetic two-accent corpus: every clip is a dense random-phase tone
/// mixture (one tone per FFT bin up to 5 kHz) whose amplitudes follow three
/// formant resonances. Each word has its own formant pattern, shared by both
/// classes; the non-US class moves the formants by `separation` (relative).
/// The non-US class also gets a spectral tilt of `tilt_db_per_octave` around
/// 1 kHz. Speakers scale all formants by a vocal-tract factor drawn from
/// [1 - speaker_spread, 1 + speaker_spread].
struct SynthSpec {
  int speakers_per_class = 11;
  int words_per_speaker = 15;
  int sample_rate = 44100;
  double duration_s = 1.0;
  double separation = 0.08;
  double tilt_db_per_octave = 2.5;
  double formant_jitter = 0.04;  // per-clip relative standard deviation
  double speaker_spread = 0.05;
  double level_spread = 0.1;     // peak level drawn from 0.5 * [1 - s, 1 + s]
  double noise_level = 0.003;    // white-noise standard deviation
  std::uint64_t seed = 1;
};

struct LabeledClip {
  AudioClip clip;
  int label = 0;
};

/// Speaker-major, class 0 speakers first. Deterministic in the spec.
std::vector<LabeledClip> generate_corpus(const SynthSpec& spec);

/// Writes one 16-bit WAV per clip plus `manifest.csv` into `dir` and returns
/// the path of the manifest.
std::filesystem::path write_corpus(const std::filesystem::path& dir, const SynthSpec& spec);

}  // namespace accent
