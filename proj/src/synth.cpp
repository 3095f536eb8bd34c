#include "accent/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "accent/error.hpp"
#include "accent/fft.hpp"

namespace accent {
namespace {

// Portable draws; the standard distributions differ across library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

struct Formants {
  std::array<double, 3> freq;
  std::array<double, 3> bandwidth;
  std::array<double, 3> gain;
};

// Accent shift applied to the non-US class: F1 up, F2 down, F3 up.
constexpr std::array<double, 3> kAccentDirection = {1.0, -1.0, 0.6};

std::vector<Formants> word_patterns(int words, Rng& rng) {
  std::vector<Formants> out;
  for (int w = 0; w < words; ++w) {
    Formants f;
    f.freq = {rng.uniform(300.0, 800.0), rng.uniform(900.0, 2300.0), rng.uniform(2400.0, 3300.0)};
    f.bandwidth = {rng.uniform(60.0, 110.0), rng.uniform(80.0, 140.0), rng.uniform(120.0, 200.0)};
    f.gain = {1.0, rng.uniform(0.4, 0.8), rng.uniform(0.15, 0.4)};
    out.push_back(f);
  }
  return out;
}

double resonance(const Formants& f, double hz) {
  double a = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double x = (hz - f.freq[i]) / f.bandwidth[i];
    a += f.gain[i] / (1.0 + x * x);
  }
  return a;
}

AudioClip render(const Formants& formants, double tilt_db, double gain, const SynthSpec& spec, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.sample_rate));
  const std::size_t size = next_power_of_two(static_cast<std::size_t>(n));
  const double bin_hz = static_cast<double>(spec.sample_rate) / static_cast<double>(size);
  const double top_hz = std::min(5000.0, spec.sample_rate / 2.0);

  // One cosine per bin: x[t] = sum_k A_k cos(2 pi k t / size + phi_k), formed
  // as the real part of a forward transform of the conjugate spectrum.
  std::vector<std::complex<double>> spectrum(size);
  for (std::size_t k = 1; static_cast<double>(k) * bin_hz < top_hz; ++k) {
    const double hz = static_cast<double>(k) * bin_hz;
    const double amp = resonance(formants, hz) * std::pow(10.0, tilt_db * std::log2(hz / 1000.0) / 20.0);
    spectrum[k] = std::polar(amp, -rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  Radix2Fft<double>(size).forward(spectrum);

  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = spectrum[static_cast<std::size_t>(i)].real();
  // Word-like envelope: 40 ms attack, sustained, 120 ms release.
  const double attack = 0.04 * spec.sample_rate;
  const double release = 0.12 * spec.sample_rate;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    const double env = std::min({1.0, t / attack, static_cast<double>(n - 1 - i) / release});
    x[i] *= std::max(env, 0.0);
  }
  const double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0.0) x *= gain / peak;
  for (Eigen::Index i = 0; i < n; ++i) x[i] = std::clamp(x[i] + spec.noise_level * rng.normal(), -1.0, 1.0);

  AudioClip clip;
  clip.samples = std::move(x);
  clip.sample_rate = spec.sample_rate;
  return clip;
}

}  // namespace

std::vector<LabeledClip> generate_corpus(const SynthSpec& spec) {
  if (spec.speakers_per_class < 1 || spec.words_per_speaker < 1) {
    throw InvalidArgument("synthetic corpus needs at least one speaker and one word per class");
  }
  if (spec.sample_rate < 8000) throw InvalidArgument("synthetic corpus needs a sample rate >= 8000 Hz");
  if (!(spec.duration_s > 0.0)) throw InvalidArgument("clip duration must be positive");

  Rng rng(spec.seed);
  const auto words = word_patterns(spec.words_per_speaker, rng);
  std::vector<LabeledClip> out;
  for (int label = 0; label < 2; ++label) {
    for (int s = 0; s < spec.speakers_per_class; ++s) {
      const double tract = rng.uniform(1.0 - spec.speaker_spread, 1.0 + spec.speaker_spread);
      for (int w = 0; w < spec.words_per_speaker; ++w) {
        Formants f = words[static_cast<std::size_t>(w)];
        for (std::size_t i = 0; i < 3; ++i) {
          const double shift = label == 1 ? 1.0 + spec.separation * kAccentDirection[i] : 1.0;
          f.freq[i] *= tract * shift * (1.0 + spec.formant_jitter * rng.normal());
        }
        const double gain = 0.5 * rng.uniform(1.0 - spec.level_spread, 1.0 + spec.level_spread);
        LabeledClip item{render(f, label == 1 ? spec.tilt_db_per_octave : 0.0, gain, spec, rng), label};
        std::ostringstream id;
        id << (label == 0 ? "us" : "nonus") << "_s" << (s < 10 ? "0" : "") << s << "_w"
           << (w < 10 ? "0" : "") << w << ".wav";
        item.clip.source_id = id.str();
        out.push_back(std::move(item));
      }
    }
  }
  return out;
}

std::filesystem::path write_corpus(const std::filesystem::path& dir, const SynthSpec& spec) {
  std::filesystem::create_directories(dir);
  const auto corpus = generate_corpus(spec);
  const auto manifest_path = dir / "manifest.csv";
  std::ofstream manifest(manifest_path);
  if (!manifest) throw IoError("cannot create '" + manifest_path.string() + "'");
  manifest << "path,label\n";
  for (const auto& item : corpus) {
    write_wav(dir / item.clip.source_id, item.clip);
    manifest << item.clip.source_id << ',' << item.label << '\n';
  }
  if (!manifest) throw IoError("error writing '" + manifest_path.string() + "'");
  return manifest_path;
}

}  // namespace accent
