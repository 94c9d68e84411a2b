#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aadiff/io.hpp"

namespace aadiff {

/// Mono PCM clip with samples normalized to [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  std::uint32_t sample_rate = 0;
  std::string source_label;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

/// Video-frame partition of a clip. The frame rate is held as an exact
/// fraction fps_num / fps_den so window boundaries are computed in integers.
struct FrameGrid {
  double fps = 0.0;
  std::int64_t fps_num = 0;
  std::int64_t fps_den = 1;
  std::uint32_t sample_rate = 0;
  std::size_t sample_count = 0;
  std::size_t frame_count = 0;

  double samples_per_frame() const {
    return static_cast<double>(sample_rate) * static_cast<double>(fps_den) /
           static_cast<double>(fps_num);
  }

  /// First sample index of frame `i`, floor(i * sample_rate / fps), clamped to the clip.
  std::size_t window_begin(std::size_t frame_index) const;
};

AudioClip decode_wav(std::span<const std::uint8_t> bytes, std::string source_label = {});
AudioClip read_wav_file(const std::filesystem::path& path);

/// 32-bit IEEE float mono WAV; decode_wav reproduces the samples bit-exactly.
io::Bytes encode_wav_f32(const AudioClip& clip);
/// 16-bit mono WAV, samples scaled by 32767 (test fixtures and demo inputs).
io::Bytes encode_wav_s16(const AudioClip& clip);

FrameGrid make_frame_grid(const AudioClip& clip, double fps);

std::span<const float> frame_samples(const AudioClip& clip, const FrameGrid& grid,
                                     std::size_t frame_index);

}  // namespace aadiff
