#include "aadiff/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <tuple>

#include "aadiff/error.hpp"

namespace aadiff {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

__extension__ typedef __int128 Wide;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  void require(std::size_t n) const {
    if (remaining() < n) throw Error(Errc::DecodeError, "truncated RIFF data");
  }

  std::uint16_t u16() {
    require(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  bool tag(const char (&expected)[5]) {
    require(4);
    bool match = std::memcmp(bytes_.data() + pos_, expected, 4) == 0;
    pos_ += 4;
    return match;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    require(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void skip(std::size_t n) {
    require(n);
    pos_ += n;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct WavFormat {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

WavFormat parse_fmt(std::span<const std::uint8_t> chunk) {
  if (chunk.size() < 16) throw Error(Errc::DecodeError, "fmt chunk too short");
  ByteReader r(chunk);
  WavFormat f;
  f.format = r.u16();
  f.channels = r.u16();
  f.sample_rate = r.u32();
  r.u32();  // byte rate
  f.block_align = r.u16();
  f.bits = r.u16();
  if (f.format == kFormatExtensible) {
    // cbSize, valid bits, channel mask, then the subformat GUID whose first
    // two bytes carry the actual format tag.
    if (chunk.size() < 40) throw Error(Errc::DecodeError, "extensible fmt chunk too short");
    r.skip(8);
    f.format = r.u16();
  }
  return f;
}

void put_u16(io::Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(io::Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(io::Bytes& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

io::Bytes encode_wav(const AudioClip& clip, std::uint16_t format, std::uint16_t bits) {
  const std::uint32_t bytes_per_sample = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(clip.samples.size() * bytes_per_sample);
  io::Bytes out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, 1);
  put_u32(out, clip.sample_rate);
  put_u32(out, clip.sample_rate * bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(bytes_per_sample));
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (float s : clip.samples) {
    if (format == kFormatFloat) {
      put_u32(out, std::bit_cast<std::uint32_t>(s));
    } else {
      const float clamped = std::clamp(s, -1.0f, 1.0f);
      const auto v = static_cast<std::int16_t>(std::lround(clamped * 32767.0f));
      put_u16(out, static_cast<std::uint16_t>(v));
    }
  }
  return out;
}

// Exact rational for the frame rate; 30 -> 30/1, 29.97 -> 2997/100, 30000/1001 -> itself.
std::pair<std::int64_t, std::int64_t> fps_to_rational(double fps) {
  for (std::int64_t den = 1; den <= 100000; ++den) {
    const double scaled = fps * static_cast<double>(den);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) <= 1e-9 * std::max(1.0, scaled)) {
      return {static_cast<std::int64_t>(rounded), den};
    }
  }
  constexpr std::int64_t den = 1000000;
  return {static_cast<std::int64_t>(std::llround(fps * den)), den};
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes, std::string source_label) {
  ByteReader r(bytes);
  if (bytes.size() < 12) throw Error(Errc::DecodeError, "file too short for a RIFF header");
  if (!r.tag("RIFF")) throw Error(Errc::DecodeError, "missing RIFF tag");
  r.u32();  // riff size; the chunk walk below is bounded by the buffer instead
  if (!r.tag("WAVE")) throw Error(Errc::DecodeError, "missing WAVE tag");

  WavFormat fmt;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  while (r.remaining() >= 8) {
    const auto id = r.take(4);
    const std::uint32_t size = r.u32();
    if (size > r.remaining()) throw Error(Errc::DecodeError, "chunk extends past end of file");
    const auto body = r.take(size);
    if (std::memcmp(id.data(), "fmt ", 4) == 0) {
      fmt = parse_fmt(body);
      have_fmt = true;
    } else if (std::memcmp(id.data(), "data", 4) == 0) {
      data = body;
      have_data = true;
    }
    if ((size & 1U) && r.remaining() > 0) r.skip(1);
    if (have_fmt && have_data) break;
  }

  if (!have_fmt) throw Error(Errc::DecodeError, "missing fmt chunk");
  if (!have_data) throw Error(Errc::DecodeError, "missing data chunk");
  if (fmt.format != kFormatPcm && fmt.format != kFormatFloat) {
    throw Error(Errc::UnsupportedFormat, "format tag " + std::to_string(fmt.format));
  }
  if ((fmt.format == kFormatPcm && fmt.bits != 16) ||
      (fmt.format == kFormatFloat && fmt.bits != 32)) {
    throw Error(Errc::UnsupportedFormat, std::to_string(fmt.bits) + "-bit samples");
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    throw Error(Errc::UnsupportedFormat, std::to_string(fmt.channels) + " channels");
  }
  if (fmt.sample_rate == 0) throw Error(Errc::DecodeError, "sample rate is zero");

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (fmt.block_align != 0 && fmt.block_align != frame_bytes) {
    throw Error(Errc::DecodeError, "block align does not match channels and bit depth");
  }
  if (data.empty()) throw Error(Errc::EmptyAudio, "data chunk is empty");
  if (data.size() % frame_bytes != 0) {
    throw Error(Errc::DecodeError, "data chunk is not a whole number of sample frames");
  }

  AudioClip clip;
  clip.sample_rate = fmt.sample_rate;
  clip.source_label = std::move(source_label);
  const std::size_t n = data.size() / frame_bytes;
  clip.samples.resize(n);

  auto sample_at = [&](std::size_t offset) -> double {
    if (fmt.format == kFormatPcm) {
      const auto raw = static_cast<std::int16_t>(data[offset] | (data[offset + 1] << 8));
      return static_cast<double>(raw) / 32768.0;
    }
    std::uint32_t bits = 0;
    for (int i = 3; i >= 0; --i) bits = (bits << 8) | data[offset + i];
    const float v = std::bit_cast<float>(bits);
    if (!std::isfinite(v)) throw Error(Errc::DecodeError, "non-finite float sample");
    return std::clamp(static_cast<double>(v), -1.0, 1.0);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = i * frame_bytes;
    if (fmt.channels == 1) {
      clip.samples[i] = static_cast<float>(sample_at(base));
    } else {
      clip.samples[i] =
          static_cast<float>(0.5 * (sample_at(base) + sample_at(base + bytes_per_sample)));
    }
  }
  return clip;
}

AudioClip read_wav_file(const std::filesystem::path& path) {
  const io::Bytes bytes = io::read_file(path);
  return decode_wav(bytes, path.string());
}

io::Bytes encode_wav_f32(const AudioClip& clip) { return encode_wav(clip, kFormatFloat, 32); }

io::Bytes encode_wav_s16(const AudioClip& clip) { return encode_wav(clip, kFormatPcm, 16); }

std::size_t FrameGrid::window_begin(std::size_t frame_index) const {
  const Wide num = static_cast<Wide>(frame_index) * sample_rate * fps_den;
  const Wide begin = num / fps_num;
  return begin >= static_cast<Wide>(sample_count) ? sample_count : static_cast<std::size_t>(begin);
}

FrameGrid make_frame_grid(const AudioClip& clip, double fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw Error(Errc::InvalidFps, "fps must be positive");
  if (clip.samples.empty()) throw Error(Errc::EmptyAudio, "clip has no samples");
  if (clip.sample_rate == 0) throw Error(Errc::DecodeError, "sample rate is zero");

  FrameGrid grid;
  grid.fps = fps;
  std::tie(grid.fps_num, grid.fps_den) = fps_to_rational(fps);
  if (grid.fps_num <= 0) throw Error(Errc::InvalidFps, "fps rounds to zero");
  grid.sample_rate = clip.sample_rate;
  grid.sample_count = clip.samples.size();

  // ceil(samples * fps / sample_rate) in exact integer arithmetic.
  const Wide num = static_cast<Wide>(grid.sample_count) * grid.fps_num;
  const Wide den = static_cast<Wide>(grid.sample_rate) * grid.fps_den;
  grid.frame_count = static_cast<std::size_t>((num + den - 1) / den);
  return grid;
}

std::span<const float> frame_samples(const AudioClip& clip, const FrameGrid& grid,
                                     std::size_t frame_index) {
  if (frame_index >= grid.frame_count) {
    throw Error(Errc::IndexError, "frame " + std::to_string(frame_index) + " of " +
                                      std::to_string(grid.frame_count));
  }
  if (grid.sample_count != clip.samples.size() || grid.sample_rate != clip.sample_rate) {
    throw Error(Errc::GridMismatch, "frame grid was built from a different clip");
  }
  const std::size_t begin = grid.window_begin(frame_index);
  const std::size_t end = grid.window_begin(frame_index + 1);
  return std::span<const float>(clip.samples).subspan(begin, end - begin);
}

}  // namespace aadiff
