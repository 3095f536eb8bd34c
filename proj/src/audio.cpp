#include "accent/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "accent/error.hpp"

namespace accent {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

// Decodes one little-endian sample to [-1, 1].
double decode_sample(const unsigned char* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    float f;
    std::uint32_t u = read_u32(p);
    std::memcpy(&f, &u, sizeof f);
    return f;
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
      std::int32_t v = std::int32_t(p[0]) | (std::int32_t(p[1]) << 8) | (std::int32_t(p[2]) << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
    default:
      throw FormatError("unsupported PCM bit depth " + std::to_string(bits));
  }
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ostream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

void validate(const AudioClip& clip) {
  if (clip.sample_rate <= 0) throw InvalidArgument("audio clip has nonpositive sample rate");
  if (clip.samples.size() == 0) throw InvalidArgument("audio clip is empty");
  for (Eigen::Index i = 0; i < clip.samples.size(); ++i) {
    const double v = clip.samples[i];
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
      throw InvalidArgument("audio sample " + std::to_string(i) + " outside [-1, 1] in '" +
                            clip.source_id + "'");
    }
  }
}

AudioClip decode_wav(const std::vector<unsigned char>& bytes, std::string source_id) {
  const std::string where = source_id.empty() ? std::string("<memory>") : source_id;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(where + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available) throw FormatError(where + ": truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      sample_rate = static_cast<int>(read_u32(f + 4));
      bits = read_u16(f + 14);
      if (format == kFormatExtensible && size >= 40) {
        // The real format tag is the first two bytes of the subformat GUID.
        format = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      // Streaming writers sometimes leave the size field at 0xFFFFFFFF.
      data_size = std::min<std::size_t>(size, available);
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt) throw FormatError(where + ": missing fmt chunk");
  if (format != kFormatPcm && format != kFormatFloat) {
    throw FormatError(where + ": unsupported codec (format tag " + std::to_string(format) + ")");
  }
  if (format == kFormatFloat && bits != 32) {
    throw FormatError(where + ": only 32-bit float samples are supported");
  }
  if (format == kFormatPcm && bits != 8 && bits != 16 && bits != 24 && bits != 32) {
    throw FormatError(where + ": unsupported PCM bit depth " + std::to_string(bits));
  }
  if (channels < 1) throw FormatError(where + ": zero channels");
  if (sample_rate <= 0) throw FormatError(where + ": nonpositive sample rate");
  if (data == nullptr) throw FormatError(where + ": missing data chunk");

  const std::size_t sample_bytes = static_cast<std::size_t>(bits / 8);
  const std::size_t frame_bytes = sample_bytes * static_cast<std::size_t>(channels);
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) throw FormatError(where + ": empty data chunk");

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.source_id = std::move(source_id);
  clip.samples.resize(static_cast<Eigen::Index>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* frame = data + i * frame_bytes;
    double sum = 0.0;
    for (int c = 0; c < channels; ++c) {
      sum += decode_sample(frame + static_cast<std::size_t>(c) * sample_bytes, format, bits);
    }
    clip.samples[static_cast<Eigen::Index>(i)] = sum / channels;
  }
  validate(clip);
  return clip;
}

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return decode_wav(bytes, path.string());
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavEncoding encoding) {
  if (clip.sample_rate <= 0) throw InvalidArgument("write_wav: nonpositive sample rate");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create '" + path.string() + "'");

  const bool is_float = encoding == WavEncoding::kFloat32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(clip.samples.size()) * (bits / 8u);

  out.write("RIFF", 4);
  put_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(out, 16);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * (bits / 8u));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  out.write("data", 4);
  put_u32(out, data_size);
  for (Eigen::Index i = 0; i < clip.samples.size(); ++i) {
    const double v = std::clamp(clip.samples[i], -1.0, 1.0);
    if (is_float) {
      const float f = static_cast<float>(v);
      std::uint32_t u;
      std::memcpy(&u, &f, sizeof u);
      put_u32(out, u);
    } else {
      const long q = std::lround(v * 32768.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
    }
  }
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

CorpusManifest parse_manifest(const std::string& text) {
  CorpusManifest manifest;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "path,label") continue;

    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0 || line.find(',', comma + 1) != std::string::npos) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": expected 'path,label'");
    }
    std::string path = line.substr(0, comma);
    const std::string label_text = line.substr(comma + 1);
    if (label_text != "0" && label_text != "1") {
      throw FormatError("manifest line " + std::to_string(line_no) + ": label '" + label_text +
                        "' is not 0 (US) or 1 (non-US)");
    }
    if (!seen.insert(path).second) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": duplicate path '" + path +
                        "'");
    }
    manifest.entries.push_back({std::move(path), label_text == "1" ? 1 : 0});
  }
  if (manifest.entries.empty()) throw FormatError("manifest has no entries");
  return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str());
}

}  // namespace accent
