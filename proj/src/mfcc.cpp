#include "accent/mfcc.hpp"

#include <algorithm>
#include <charconv>
#include <complex>
#include <sstream>

#include "accent/text.hpp"

namespace accent {

void validate(const MfccConfig& c) {
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(c.frame_ms > 0.0)) throw InvalidArgument("frame_ms must be positive");
  if (!(c.hop_ms > 0.0 && c.hop_ms <= c.frame_ms)) {
    throw InvalidArgument("hop_ms must satisfy 0 < hop_ms <= frame_ms");
  }
  if (c.num_filters < 1) throw InvalidArgument("num_filters must be at least 1");
  if (c.num_coeffs < 1 || c.first_coeff() + c.num_coeffs > c.num_filters) {
    throw InvalidArgument("num_coeffs must be in [1, " +
                          std::to_string(c.num_filters - c.first_coeff()) + "] for " +
                          std::to_string(c.num_filters) + " filters");
  }
  if (!(c.f_low >= 0.0)) throw InvalidArgument("f_low must be nonnegative");
  if (c.f_high && !(*c.f_high > c.f_low)) throw InvalidArgument("f_high must exceed f_low");
}

void validate(const MfccConfig& c, int sample_rate) {
  validate(c);
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  const double high = c.f_high.value_or(nyquist);
  if (high > nyquist) {
    throw InvalidArgument("f_high " + format_double(high) + " Hz exceeds Nyquist " +
                          format_double(nyquist) + " Hz");
  }
  if (!(c.f_low < high)) throw InvalidArgument("f_low must be below f_high");
}

std::string to_key_value(const MfccConfig& c) {
  std::ostringstream out;
  out << "alpha=" << format_double(c.alpha) << '\n'
      << "frame_ms=" << format_double(c.frame_ms) << '\n'
      << "hop_ms=" << format_double(c.hop_ms) << '\n'
      << "num_filters=" << c.num_filters << '\n'
      << "num_coeffs=" << c.num_coeffs << '\n'
      << "f_low=" << format_double(c.f_low) << '\n'
      << "f_high=" << (c.f_high ? format_double(*c.f_high) : std::string("nyquist")) << '\n'
      << "include_c0=" << (c.include_c0 ? "true" : "false") << '\n';
  return out.str();
}

void apply_key_value(MfccConfig& c, const std::string& key, const std::string& value) {
  if (key == "alpha") {
    c.alpha = parse_double(value, key);
  } else if (key == "frame_ms") {
    c.frame_ms = parse_double(value, key);
  } else if (key == "hop_ms") {
    c.hop_ms = parse_double(value, key);
  } else if (key == "num_filters") {
    c.num_filters = parse_int(value, key);
  } else if (key == "num_coeffs") {
    c.num_coeffs = parse_int(value, key);
  } else if (key == "f_low") {
    c.f_low = parse_double(value, key);
  } else if (key == "f_high") {
    if (value == "nyquist") {
      c.f_high.reset();
    } else {
      c.f_high = parse_double(value, key);
    }
  } else if (key == "include_c0") {
    c.include_c0 = parse_bool(value, key);
  } else {
    throw InvalidArgument("unknown MFCC setting '" + key + "'");
  }
}

MfccConfig parse_mfcc_config(const std::string& text, bool strict) {
  static const char* const kKeys[] = {"alpha",      "frame_ms", "hop_ms", "num_filters",
                                      "num_coeffs", "f_low",    "f_high", "include_c0"};
  MfccConfig config;
  for (const auto& [key, value] : parse_key_values(text)) {
    const bool known = std::find(std::begin(kKeys), std::end(kKeys), key) != std::end(kKeys);
    if (!known && !strict) continue;
    apply_key_value(config, key, value);
  }
  validate(config);
  return config;
}

AudioClip pre_emphasis(const AudioClip& clip, double alpha) {
  AudioClip out;
  out.samples = pre_emphasis(clip.samples, alpha);
  out.sample_rate = clip.sample_rate;
  out.source_id = clip.source_id;
  return out;
}

Eigen::Index frame_length(const MfccConfig& config, int sample_rate) {
  // nearbyint rounds half to even under the default rounding mode.
  const auto len = static_cast<Eigen::Index>(std::nearbyint(config.frame_ms * sample_rate / 1000.0));
  if (len < 2) throw InvalidArgument("frame length is shorter than two samples");
  return len;
}

Eigen::Index hop_length(const MfccConfig& config, int sample_rate) {
  const auto len = static_cast<Eigen::Index>(std::nearbyint(config.hop_ms * sample_rate / 1000.0));
  if (len < 1) throw InvalidArgument("hop length is shorter than one sample");
  return len;
}

namespace {

FrameMatrix frame_signal(const Eigen::VectorXd& signal, int sample_rate, Eigen::Index frame_len,
                         Eigen::Index hop_len, const Eigen::VectorXd& window) {
  if (signal.size() < frame_len) {
    throw InvalidArgument("clip has " + std::to_string(signal.size()) +
                          " samples, fewer than one frame of " + std::to_string(frame_len));
  }
  const Eigen::Index n_frames = 1 + (signal.size() - frame_len) / hop_len;
  FrameMatrix out;
  out.sample_rate = sample_rate;
  out.frames.resize(n_frames, frame_len);
  for (Eigen::Index a = 0; a < n_frames; ++a) {
    out.frames.row(a) = signal.segment(a * hop_len, frame_len).cwiseProduct(window).transpose();
  }
  return out;
}

void power_row(const Radix2Fft<double>& fft, const Eigen::Ref<const Eigen::RowVectorXd>& frame,
               std::vector<std::complex<double>>& buffer, Eigen::Ref<Eigen::RowVectorXd> out) {
  std::fill(buffer.begin(), buffer.end(), std::complex<double>{});
  for (Eigen::Index n = 0; n < frame.size(); ++n) buffer[static_cast<std::size_t>(n)] = frame[n];
  fft.forward(buffer);
  for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = std::norm(buffer[static_cast<std::size_t>(k)]);
}

}  // namespace

FrameMatrix frame_and_window(const AudioClip& clip, const MfccConfig& config) {
  const Eigen::Index frame_len = frame_length(config, clip.sample_rate);
  return frame_signal(clip.samples, clip.sample_rate, frame_len,
                      hop_length(config, clip.sample_rate), hamming_window(frame_len));
}

PowerSpectra power_spectrum(const FrameMatrix& frames) {
  if (frames.frames.rows() == 0 || frames.frames.cols() == 0) {
    throw InvalidArgument("power_spectrum: no frames");
  }
  const auto fft_size = static_cast<Eigen::Index>(
      next_power_of_two(static_cast<std::size_t>(frames.frames.cols())));
  const Radix2Fft<double> fft(static_cast<std::size_t>(fft_size));
  PowerSpectra out;
  out.fft_size = fft_size;
  out.sample_rate = frames.sample_rate;
  out.spectra.resize(frames.frames.rows(), fft_size / 2 + 1);
  std::vector<std::complex<double>> buffer(static_cast<std::size_t>(fft_size));
  for (Eigen::Index a = 0; a < frames.frames.rows(); ++a) {
    power_row(fft, frames.frames.row(a), buffer, out.spectra.row(a));
  }
  return out;
}

MelFilterbank build_filterbank(const MfccConfig& config, Eigen::Index fft_size, int sample_rate) {
  validate(config, sample_rate);
  if (fft_size < 2 || !is_power_of_two(static_cast<std::size_t>(fft_size))) {
    throw InvalidArgument("fft_size must be a power of two >= 2");
  }
  const int m = config.num_filters;
  const double high = config.f_high.value_or(sample_rate / 2.0);
  const double mel_low = hz_to_mel(config.f_low);
  const double mel_high = hz_to_mel(high);
  const double step = (mel_high - mel_low) / (m + 1);
  const Eigen::Index n_bins = fft_size / 2 + 1;

  MelFilterbank bank;
  bank.edges.resize(static_cast<std::size_t>(m + 2));
  bank.center_freqs.resize(m);
  for (int i = 0; i < m + 2; ++i) {
    const double mel = i == m + 1 ? mel_high : mel_low + step * i;
    const double hz = mel_to_hz(mel);
    const double bin = hz * static_cast<double>(fft_size) / sample_rate;
    bank.edges[static_cast<std::size_t>(i)] =
        std::min<Eigen::Index>(static_cast<Eigen::Index>(std::nearbyint(bin)), n_bins - 1);
    if (i >= 1 && i <= m) bank.center_freqs[i - 1] = hz;
  }
  for (int i = 1; i < m + 2; ++i) {
    if (bank.edges[static_cast<std::size_t>(i)] <= bank.edges[static_cast<std::size_t>(i - 1)]) {
      throw InvalidArgument("mel filter edges " + std::to_string(i - 1) + " and " +
                            std::to_string(i) + " fall on the same FFT bin; use a larger fft_size "
                            "(longer frames) or fewer filters than " + std::to_string(m));
    }
  }

  bank.weights = RowMatrixXd::Zero(m, n_bins);
  for (int f = 0; f < m; ++f) {
    const Eigen::Index left = bank.edges[static_cast<std::size_t>(f)];
    const Eigen::Index centre = bank.edges[static_cast<std::size_t>(f + 1)];
    const Eigen::Index right = bank.edges[static_cast<std::size_t>(f + 2)];
    for (Eigen::Index k = left + 1; k < centre; ++k) {
      bank.weights(f, k) = static_cast<double>(k - left) / static_cast<double>(centre - left);
    }
    bank.weights(f, centre) = 1.0;
    for (Eigen::Index k = centre + 1; k < right; ++k) {
      bank.weights(f, k) = static_cast<double>(right - k) / static_cast<double>(right - centre);
    }
  }
  return bank;
}

Eigen::VectorXd filterbank_log_energies(const Eigen::Ref<const Eigen::VectorXd>& spectrum_row,
                                        const MelFilterbank& bank) {
  if (spectrum_row.size() != bank.weights.cols()) {
    throw DimensionError("spectrum has " + std::to_string(spectrum_row.size()) +
                         " bins but the filterbank expects " + std::to_string(bank.weights.cols()));
  }
  return (bank.weights * spectrum_row).cwiseMax(kLogEnergyFloor).array().log().matrix();
}

MfccExtractor::MfccExtractor(const MfccConfig& config, int sample_rate)
    : config_(config), sample_rate_(sample_rate) {
  validate(config_, sample_rate_);
  frame_len_ = frame_length(config_, sample_rate_);
  hop_len_ = hop_length(config_, sample_rate_);
  fft_size_ =
      static_cast<Eigen::Index>(next_power_of_two(static_cast<std::size_t>(frame_len_)));
  bank_ = build_filterbank(config_, fft_size_, sample_rate_);
  dct_ = dct_matrix<double>(config_.num_filters, config_.first_coeff(), config_.num_coeffs);
}

MfccMatrix MfccExtractor::compute(const AudioClip& clip) const {
  validate(clip);
  if (clip.sample_rate != sample_rate_) {
    throw InvalidArgument("clip '" + clip.source_id + "' has sample rate " +
                          std::to_string(clip.sample_rate) + ", extractor expects " +
                          std::to_string(sample_rate_));
  }
  const Eigen::VectorXd emphasized = pre_emphasis(clip.samples, config_.alpha);
  const FrameMatrix frames =
      frame_signal(emphasized, sample_rate_, frame_len_, hop_len_, hamming_window(frame_len_));

  const Radix2Fft<double> fft(static_cast<std::size_t>(fft_size_));
  std::vector<std::complex<double>> buffer(static_cast<std::size_t>(fft_size_));
  Eigen::RowVectorXd power(fft_size_ / 2 + 1);

  MfccMatrix out;
  out.config = config_;
  out.source_id = clip.source_id;
  out.coeffs.resize(frames.frames.rows(), config_.num_coeffs);
  for (Eigen::Index a = 0; a < frames.frames.rows(); ++a) {
    power_row(fft, frames.frames.row(a), buffer, power);
    const Eigen::VectorXd log_energy = filterbank_log_energies(power.transpose(), bank_);
    out.coeffs.row(a) = (dct_ * log_energy).transpose();
  }
  return out;
}

MfccMatrix compute_mfcc(const AudioClip& clip, const MfccConfig& config) {
  return MfccExtractor(config, clip.sample_rate).compute(clip);
}

FeatureVector summarize_mean(const MfccMatrix& m) {
  if (m.coeffs.rows() == 0) throw InvalidArgument("summarize_mean: empty MFCC matrix");
  FeatureVector v;
  v.values = m.coeffs.colwise().mean().transpose();
  v.source_id = m.source_id;
  return v;
}

}  // namespace accent
