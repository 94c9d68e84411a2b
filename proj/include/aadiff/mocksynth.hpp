#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aadiff/io.hpp"
#include "aadiff/schedule.hpp"

namespace aadiff {

using Rgb = std::array<double, 3>;

/// Stand-in for a generated frame: H x W pixels, channels in [0, 1].
struct MockImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Rgb> pixels;  // row-major

  static MockImage uniform(std::size_t height, std::size_t width, Rgb color);

  std::size_t cells() const { return height * width; }

  friend bool operator==(const MockImage&, const MockImage&) = default;
};

/// The visual effect a prompt token stands for, with that token's attention
/// row over the image cells.
struct EffectSpec {
  int token_index = 0;
  Rgb color{1.0, 1.0, 1.0};
  std::vector<double> attention;
};

struct MetricSeries {
  std::string name;
  std::vector<double> values;
};

/// out = clamp01(base + min(multiplier * attn, 1) * (color - base)), per channel.
MockImage render_frame(const MockImage& base, const EffectSpec& effect, double multiplier);

/// Renders every frame independently from `base`. Each frame's edits go
/// through the attention kernel, then effects are blended in ascending
/// token order. An effect whose token is absent from a frame map is not applied.
std::vector<MockImage> render_video(const MockImage& base, std::span<const EffectSpec> effects,
                                    const EditSchedule& schedule);

/// Attention-weighted mean closeness of the frame to the effect color, in [0, 1].
double proxy_score(const MockImage& frame, const EffectSpec& effect);
MetricSeries proxy_series(std::span<const MockImage> frames, const EffectSpec& effect,
                          std::string name);

double pearson(const MetricSeries& a, const MetricSeries& b);
double pearson(std::span<const double> a, std::span<const double> b);

std::string plot_data_csv(std::span<const MetricSeries> series);
void emit_plot_data(std::span<const MetricSeries> series, const std::filesystem::path& path);

/// Gaussian bump with peak 1 at (center_y, center_x), in cell units.
std::vector<double> blob_attention(std::size_t height, std::size_t width, double center_y,
                                   double center_x, double sigma);

/// Binary PPM (P6), 8 bits per channel, value = floor(255 * v + 0.5).
io::Bytes encode_ppm(const MockImage& image);
MockImage decode_ppm(std::span<const std::uint8_t> bytes);
void write_ppm(const MockImage& image, const std::filesystem::path& path);
MockImage read_ppm(const std::filesystem::path& path);

}  // namespace aadiff
