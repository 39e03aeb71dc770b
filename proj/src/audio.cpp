// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "forge/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "forge/error.hpp"

namespace forge {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(Bytes& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::string hex_tag(std::uint16_t tag) {
  std::ostringstream os;
  os << "0x" << std::hex << std::uppercase;
  os.width(4);
  os.fill('0');
  os << tag;
  return os.str();
}

struct FmtChunk {
  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

FmtChunk parse_fmt(const std::uint8_t* p, std::uint32_t size) {
  if (size < 16) throw FormatError("invalid 'fmt ' chunk: size " + std::to_string(size));
  FmtChunk f;
  f.format_tag = le16(p);
  f.channels = le16(p + 2);
  f.sample_rate = le32(p + 4);
  f.bits_per_sample = le16(p + 14);
  if (f.format_tag == kFormatExtensible) {
    if (size < 40) throw FormatError("invalid 'fmt ' chunk: truncated WAVE_FORMAT_EXTENSIBLE");
    f.format_tag = le16(p + 24);  // first two bytes of the sub-format GUID
  }
  if (f.channels == 0) throw FormatError("invalid 'fmt ' chunk: zero channels");
  if (f.sample_rate == 0) throw FormatError("invalid 'fmt ' chunk: zero sample rate");
  return f;
}

void check_codec(const FmtChunk& f) {
  const bool pcm = f.format_tag == kFormatPcm &&
                   (f.bits_per_sample == 16 || f.bits_per_sample == 24 ||
                    f.bits_per_sample == 32);
  const bool flt = f.format_tag == kFormatFloat && f.bits_per_sample == 32;
  if (!pcm && !flt) {
    throw UnsupportedCodec("unsupported WAV encoding: format tag " + hex_tag(f.format_tag) +
                           ", " + std::to_string(f.bits_per_sample) + " bits");
  }
}

struct Layout {
  FmtChunk fmt;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;
};

Layout walk_chunks(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("missing RIFF/WAVE header");
  }
  Layout layout;
  bool have_fmt = false, have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + pos;
    const std::uint32_t size = le32(hdr + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size > available) throw FormatError("invalid 'fmt ' chunk: truncated");
      layout.fmt = parse_fmt(bytes.data() + body, size);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      layout.data_offset = body;
      // Writers that stream often leave a stale size; keep what is there.
      layout.data_size = std::min<std::size_t>(size, available);
      have_data = true;
      if (have_fmt) break;
    }
    pos = body + static_cast<std::size_t>(size) + (size & 1u);
  }
  if (!have_fmt) throw FormatError("missing 'fmt ' chunk");
  if (!have_data) throw FormatError("missing 'data' chunk");
  return layout;
}

float clamp_sample(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? 0.0f : (v > 0 ? 1.0f : -1.0f);
  return static_cast<float>(std::clamp(v, -1.0, 1.0));
}

double read_sample(const std::uint8_t* p, const FmtChunk& f) {
  switch (f.bits_per_sample) {
    case 16:
      return static_cast<std::int16_t>(le16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default: {
      const std::uint32_t raw = le32(p);
      if (f.format_tag == kFormatFloat) {
        float x;
        std::memcpy(&x, &raw, sizeof x);
        return x;
      }
      return static_cast<std::int32_t>(raw) / 2147483648.0;
    }
  }
}

}  // namespace

WavInfo probe_wav(std::span<const std::uint8_t> bytes) {
  const Layout layout = walk_chunks(bytes);
  const std::size_t frame_bytes =
      static_cast<std::size_t>(layout.fmt.channels) * (layout.fmt.bits_per_sample / 8);
  WavInfo info;
  info.format_tag = layout.fmt.format_tag;
  info.channels = layout.fmt.channels;
  info.sample_rate = layout.fmt.sample_rate;
  info.bits_per_sample = layout.fmt.bits_per_sample;
  info.frames = frame_bytes == 0 ? 0 : static_cast<std::int64_t>(layout.data_size / frame_bytes);
  return info;
}

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  const Layout layout = walk_chunks(bytes);
  const FmtChunk& f = layout.fmt;
  check_codec(f);
  const std::size_t width = f.bits_per_sample / 8;
  const std::size_t frame_bytes = width * f.channels;
  const auto frames = static_cast<Eigen::Index>(layout.data_size / frame_bytes);

  AudioBuffer out(AudioBuffer::Samples(frames), static_cast<int>(f.sample_rate));
  const std::uint8_t* data = bytes.data() + layout.data_offset;
  for (Eigen::Index i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data + static_cast<std::size_t>(i) * frame_bytes;
    double acc = 0.0;
    for (std::uint16_t c = 0; c < f.channels; ++c) {
      acc += clamp_sample(read_sample(frame + c * width, f));
    }
    out.samples[i] = clamp_sample(acc / f.channels);
  }
  return out;
}

Bytes encode_wav(const AudioBuffer& buf) {
  const auto n = static_cast<std::uint32_t>(buf.size());
  const std::uint32_t data_bytes = n * 2;
  Bytes out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(buf.sample_rate));
  put32(out, static_cast<std::uint32_t>(buf.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  put_tag(out, "data");
  put32(out, data_bytes);
  for (Eigen::Index i = 0; i < buf.size(); ++i) {
    const double code = std::nearbyint(static_cast<double>(buf.samples[i]) * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(code, -32768.0, 32767.0));
    put16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

Bytes read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

WavInfo probe_wav_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);

  std::uint8_t riff[12];
  if (!in.read(reinterpret_cast<char*>(riff), 12) || std::memcmp(riff, "RIFF", 4) != 0 ||
      std::memcmp(riff + 8, "WAVE", 4) != 0) {
    throw FormatError(path.string() + ": missing RIFF/WAVE header");
  }
  std::optional<FmtChunk> fmt;
  std::optional<std::uint64_t> data_size;
  std::uint64_t pos = 12;
  while (pos + 8 <= file_size && !(fmt && data_size)) {
    std::uint8_t hdr[8];
    in.seekg(static_cast<std::streamoff>(pos));
    if (!in.read(reinterpret_cast<char*>(hdr), 8)) break;
    const std::uint32_t size = le32(hdr + 4);
    const std::uint64_t available = file_size - pos - 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size > available || size > 4096) throw FormatError(path.string() + ": invalid 'fmt ' chunk");
      std::vector<std::uint8_t> body(size);
      in.read(reinterpret_cast<char*>(body.data()), size);
      fmt = parse_fmt(body.data(), size);
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data_size = std::min<std::uint64_t>(size, available);
    }
    pos += 8 + static_cast<std::uint64_t>(size) + (size & 1u);
  }
  if (!fmt) throw FormatError(path.string() + ": missing 'fmt ' chunk");
  if (!data_size) throw FormatError(path.string() + ": missing 'data' chunk");
  WavInfo info;
  info.format_tag = fmt->format_tag;
  info.channels = fmt->channels;
  info.sample_rate = fmt->sample_rate;
  info.bits_per_sample = fmt->bits_per_sample;
  const std::uint64_t frame_bytes = static_cast<std::uint64_t>(fmt->channels) * (fmt->bits_per_sample / 8);
  info.frames = frame_bytes == 0 ? 0 : static_cast<std::int64_t>(*data_size / frame_bytes);
  return info;
}

AudioBuffer read_wav_file(const std::filesystem::path& path) {
  const Bytes bytes = read_file_bytes(path);
  try {
    return decode_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const UnsupportedCodec& e) {
    throw UnsupportedCodec(path.string() + ": " + e.what());
  }
}

void write_wav_file(const std::filesystem::path& path, const AudioBuffer& buf) {
  write_file_bytes(path, encode_wav(buf));
}

// ---------------------------------------------------------------------------
// Resampling

std::int64_t resampled_length(std::int64_t n, int source_rate, int target_rate) {
  const std::int64_t g = std::gcd(source_rate, target_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = source_rate / g;
  return (n * up + down / 2) / down;
}

namespace {

double bessel_i0(double x) { return std::cyl_bessel_i(0.0, x); }

/// Windowed-sinc kernel evaluated at offset `t` input samples from the
/// output instant.
class SincKernel {
 public:
  SincKernel(double scale, int half_width, double beta)
      : scale_(scale), half_width_(half_width), beta_(beta), norm_(1.0 / bessel_i0(beta)) {}

  double operator()(double t) const {
    const double r = t / half_width_;
    if (r <= -1.0 || r >= 1.0) return 0.0;
    const double x = scale_ * t;
    const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
    return scale_ * sinc * bessel_i0(beta_ * std::sqrt(1.0 - r * r)) * norm_;
  }

  int half_width() const { return half_width_; }

 private:
  double scale_;
  int half_width_;
  double beta_;
  double norm_;
};

/// Coefficients for one fractional phase, taps at input offsets
/// base - H + 1 .. base + H, normalised to unit DC gain.
void fill_phase(const SincKernel& kernel, double frac, Eigen::Ref<Eigen::VectorXd> taps) {
  const int h = kernel.half_width();
  for (int j = 0; j < 2 * h; ++j) {
    const int offset = j - h + 1;
    taps[j] = kernel(frac - offset);
  }
  const double sum = taps.sum();
  if (sum != 0.0) taps /= sum;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& buf, int target_rate, const ResampleOptions& options) {
  if (target_rate <= 0) throw InvalidArgument("resample: target rate must be positive");
  if (buf.sample_rate <= 0) throw InvalidArgument("resample: source rate must be positive");
  if (target_rate == buf.sample_rate) return buf;

  const std::int64_t g = std::gcd(buf.sample_rate, target_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = buf.sample_rate / g;
  const std::int64_t n_in = buf.size();
  const std::int64_t n_out = resampled_length(n_in, buf.sample_rate, target_rate);

  const double scale = std::min(1.0, static_cast<double>(up) / down) * options.rolloff;
  const int half_width = static_cast<int>(std::ceil(options.zero_crossings / scale));
  const SincKernel kernel(scale, half_width, options.kaiser_beta);
  const int taps = 2 * half_width;

  const bool tabulate = up <= options.max_table_phases;
  Eigen::MatrixXd table;
  if (tabulate) {
    table.resize(taps, up);
    for (std::int64_t p = 0; p < up; ++p) {
      fill_phase(kernel, static_cast<double>(p) / up, table.col(p));
    }
  }

  const Eigen::VectorXd x = buf.samples.cast<double>();
  AudioBuffer out(AudioBuffer::Samples(n_out), target_rate);
  Eigen::VectorXd scratch(taps);
  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t pos = n * down;
    const std::int64_t base = pos / up;
    const std::int64_t phase = pos % up;
    if (!tabulate) fill_phase(kernel, static_cast<double>(phase) / up, scratch);
    const auto coeffs = tabulate ? Eigen::Ref<const Eigen::VectorXd>(table.col(phase))
                                 : Eigen::Ref<const Eigen::VectorXd>(scratch);

    const std::int64_t first = base - half_width + 1;
    const std::int64_t lo = std::max<std::int64_t>(first, 0);
    const std::int64_t hi = std::min<std::int64_t>(first + taps, n_in);
    double acc = 0.0;
    if (hi > lo) {
      acc = coeffs.segment(lo - first, hi - lo).dot(x.segment(lo, hi - lo));
    }
    out.samples[n] = clamp_sample(acc);
  }
  return out;
}

AudioBuffer resample_linear(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) throw InvalidArgument("resample: target rate must be positive");
  if (target_rate == buf.sample_rate) return buf;
  const std::int64_t n_in = buf.size();
  const std::int64_t n_out = resampled_length(n_in, buf.sample_rate, target_rate);
  AudioBuffer out(AudioBuffer::Samples(n_out), target_rate);
  for (std::int64_t n = 0; n < n_out; ++n) {
    const double t = static_cast<double>(n) * buf.sample_rate / target_rate;
    const auto i = static_cast<std::int64_t>(std::floor(t));
    const double frac = t - i;
    const double a = i < n_in ? buf.samples[i] : 0.0;
    const double b = i + 1 < n_in ? buf.samples[i + 1] : a;
    out.samples[n] = static_cast<float>(a + frac * (b - a));
  }
  return out;
}

}  // namespace forge
