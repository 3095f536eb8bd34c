#pragma once

#include <Eigen/Core>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "accent/audio.hpp"
#include "accent/error.hpp"
#include "accent/fft.hpp"

namespace accent {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Lower clamp applied to filterbank energies before taking the log.
inline constexpr double kLogEnergyFloor = 1e-12;

struct MfccConfig {
  double alpha = 0.97;     // pre-emphasis coefficient
  double frame_ms = 25.0;  // analysis frame length
  double hop_ms = 10.0;    // frame advance
  int num_filters = 26;    // M
  int num_coeffs = 13;     // q
  double f_low = 0.0;
  std::optional<double> f_high;  // unset = Nyquist of the clip
  bool include_c0 = true;

  /// Index of the first cepstral coefficient returned (0 or 1).
  int first_coeff() const { return include_c0 ? 0 : 1; }
};

/// Checks the rate-independent invariants; throws InvalidArgument.
void validate(const MfccConfig& config);
/// Rate-dependent checks (frequency bounds against Nyquist).
void validate(const MfccConfig& config, int sample_rate);

/// Flat `key=value` form, one pair per line, in a fixed key order.
std::string to_key_value(const MfccConfig& config);
/// Applies one key/value pair; unknown keys throw InvalidArgument.
void apply_key_value(MfccConfig& config, const std::string& key, const std::string& value);
/// Parses the text produced by to_key_value. Lines starting with '#' are
/// comments, keys not belonging to MfccConfig are ignored when `strict` is false.
MfccConfig parse_mfcc_config(const std::string& text, bool strict = true);

// ---------------------------------------------------------------------------
// Scalar primitives

/// Mel warping, linear up to 1 kHz and logarithmic above. The two branches
/// meet with a step of about 0.0145 mel at 1 kHz, so the map is continuous to
/// within 0.1 mel but not injective on (1000, 1000.022] Hz.
template <typename Scalar>
Scalar hz_to_mel(Scalar hz) {
  if (!(hz >= Scalar(0))) throw InvalidArgument("hz_to_mel: frequency must be nonnegative");
  if (hz <= Scalar(1000)) return hz;
  return Scalar(2595) * std::log10(Scalar(1) + hz / Scalar(700));
}

/// Inverse of hz_to_mel on each branch (base 10 in the log branch).
template <typename Scalar>
Scalar mel_to_hz(Scalar mel) {
  if (!(mel >= Scalar(0))) throw InvalidArgument("mel_to_hz: mel value must be nonnegative");
  if (mel <= Scalar(1000)) return mel;
  return Scalar(700) * (std::pow(Scalar(10), mel / Scalar(2595)) - Scalar(1));
}

/// w[n] = 0.54 - 0.46 cos(2 pi n / (length - 1)).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hamming_window(Eigen::Index length) {
  if (length < 2) throw InvalidArgument("hamming_window: length must be at least 2");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(length);
  const Scalar denom = static_cast<Scalar>(length - 1);
  for (Eigen::Index n = 0; n < length; ++n) {
    w[n] = Scalar(0.54) -
           Scalar(0.46) * std::cos(Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(n) / denom);
  }
  // cos() is not exactly symmetric about pi in floating point.
  for (Eigen::Index n = 0; n < length / 2; ++n) w[length - 1 - n] = w[n];
  return w;
}

/// s[0] = x[0], s[n] = x[n] - alpha x[n-1].
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> pre_emphasis(
    const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) throw InvalidArgument("pre_emphasis: empty signal");
  if (!(alpha >= Scalar(0) && alpha <= Scalar(1))) {
    throw InvalidArgument("pre_emphasis: alpha must lie in [0, 1]");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> s(x.size());
  s[0] = x[0];
  for (Eigen::Index n = 1; n < x.size(); ++n) s[n] = x[n] - alpha * x[n - 1];
  return s;
}

AudioClip pre_emphasis(const AudioClip& clip, double alpha);

/// Rows j = first..first+count-1 of the unnormalized DCT-II matrix,
/// D(j, m) = cos(pi j (m + 1/2) / M).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dct_matrix(Eigen::Index num_inputs,
                                                                 Eigen::Index first,
                                                                 Eigen::Index count) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(count, num_inputs);
  const Scalar m_total = static_cast<Scalar>(num_inputs);
  for (Eigen::Index r = 0; r < count; ++r) {
    const Scalar j = static_cast<Scalar>(first + r);
    for (Eigen::Index m = 0; m < num_inputs; ++m) {
      d(r, m) = std::cos(std::numbers::pi_v<Scalar> * j * (Scalar(m) + Scalar(0.5)) / m_total);
    }
  }
  return d;
}

/// DCT-II of the log energies, returning q coefficients starting at c0 (or
/// c1 when include_c0 is false).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> dct_cepstrum(
    const Eigen::MatrixBase<Derived>& log_energies, Eigen::Index q, bool include_c0 = true) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = log_energies.size();
  const Eigen::Index first = include_c0 ? 0 : 1;
  if (q < 1 || first + q > m) {
    throw InvalidArgument("dct_cepstrum: coefficient count " + std::to_string(q) +
                          " out of range for " + std::to_string(m) + " filters");
  }
  return dct_matrix<Scalar>(m, first, q) * log_energies.derived();
}

// ---------------------------------------------------------------------------
// Pipeline stages

/// Frame length in samples, round-half-to-even of frame_ms * rate / 1000.
Eigen::Index frame_length(const MfccConfig& config, int sample_rate);
Eigen::Index hop_length(const MfccConfig& config, int sample_rate);

/// Windowed analysis frames, one per row.
struct FrameMatrix {
  RowMatrixXd frames;
  int sample_rate = 0;
};

/// |X[k]|^2 for bins 0..fft_size/2, one frame per row.
struct PowerSpectra {
  RowMatrixXd spectra;
  Eigen::Index fft_size = 0;
  int sample_rate = 0;
};

/// Triangular filters on integer FFT bins, one filter per row.
struct MelFilterbank {
  RowMatrixXd weights;
  Eigen::VectorXd center_freqs;     // Hz
  std::vector<Eigen::Index> edges;  // M + 2 bin indices
};

struct MfccMatrix {
  RowMatrixXd coeffs;  // n_frames x q
  MfccConfig config;
  std::string source_id;
};

struct FeatureVector {
  Eigen::VectorXd values;
  std::optional<int> label;
  std::string source_id;
};

FrameMatrix frame_and_window(const AudioClip& clip, const MfccConfig& config);

/// Zero-pads each frame to the next power of two and keeps the
/// non-redundant half of the spectrum.
PowerSpectra power_spectrum(const FrameMatrix& frames);

/// M + 2 edges equally spaced in mel between f_low and f_high (Nyquist when
/// unset), each rounded to the nearest FFT bin. Filter m rises from edge m to
/// a unit peak at edge m+1 and falls to zero at edge m+2. Throws
/// InvalidArgument when two edges land on the same bin.
MelFilterbank build_filterbank(const MfccConfig& config, Eigen::Index fft_size, int sample_rate);

/// S[m] = ln(max(sum_k P[k] W(m, k), kLogEnergyFloor)).
Eigen::VectorXd filterbank_log_energies(const Eigen::Ref<const Eigen::VectorXd>& spectrum_row,
                                        const MelFilterbank& bank);

/// Reusable extraction plan for one (config, sample rate) pair. Immutable
/// after construction and safe to share between threads.
class MfccExtractor {
 public:
  MfccExtractor(const MfccConfig& config, int sample_rate);

  MfccMatrix compute(const AudioClip& clip) const;

  const MfccConfig& config() const { return config_; }
  int sample_rate() const { return sample_rate_; }
  const MelFilterbank& filterbank() const { return bank_; }
  Eigen::Index fft_size() const { return fft_size_; }

 private:
  MfccConfig config_;
  int sample_rate_;
  Eigen::Index frame_len_;
  Eigen::Index hop_len_;
  Eigen::Index fft_size_;
  MelFilterbank bank_;
  Eigen::MatrixXd dct_;  // q x M
};

MfccMatrix compute_mfcc(const AudioClip& clip, const MfccConfig& config);

/// Column means of the coefficient matrix.
FeatureVector summarize_mean(const MfccMatrix& m);

}  // namespace accent
