#include "aadiff/mocksynth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "aadiff/attention.hpp"
#include "aadiff/error.hpp"

namespace aadiff {
namespace {

void check_effect(const MockImage& image, const EffectSpec& effect) {
  if (effect.attention.size() != image.cells()) {
    throw Error(Errc::DimensionError, "attention row for token " +
                                          std::to_string(effect.token_index) + " has " +
                                          std::to_string(effect.attention.size()) +
                                          " cells, image has " + std::to_string(image.cells()));
  }
  if (image.pixels.size() != image.cells()) {
    throw Error(Errc::DimensionError, "image pixel count does not match its dimensions");
  }
  for (double c : effect.color) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(Errc::ValidationError, "effect color outside [0,1]");
  }
}

// `scaled` is the effect's attention row after multiplication.
void blend_into(MockImage& image, const Rgb& color, std::span<const double> scaled) {
  for (std::size_t p = 0; p < image.pixels.size(); ++p) {
    const double w = std::min(scaled[p], 1.0);
    if (w == 0.0) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      const double base = image.pixels[p][c];
      image.pixels[p][c] = std::clamp(base + w * (color[c] - base), 0.0, 1.0);
    }
  }
}

std::size_t parse_header_int(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (std::isspace(bytes[pos])) {
      ++pos;
    } else if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  std::size_t value = 0;
  std::size_t digits = 0;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    value = value * 10 + (bytes[pos] - '0');
    ++pos;
    if (++digits > 9) throw Error(Errc::FormatError, "PPM header value too large");
  }
  if (digits == 0) throw Error(Errc::FormatError, "malformed PPM header");
  return value;
}

}  // namespace

MockImage MockImage::uniform(std::size_t height, std::size_t width, Rgb color) {
  return MockImage{height, width, std::vector<Rgb>(height * width, color)};
}

MockImage render_frame(const MockImage& base, const EffectSpec& effect, double multiplier) {
  check_effect(base, effect);
  if (!(multiplier >= 0.0) || !std::isfinite(multiplier)) {
    throw Error(Errc::ValidationError, "multiplier must be finite and non-negative");
  }
  std::vector<double> scaled(effect.attention.size());
  for (std::size_t p = 0; p < scaled.size(); ++p) scaled[p] = multiplier * effect.attention[p];
  MockImage out = base;
  blend_into(out, effect.color, scaled);
  return out;
}

std::vector<MockImage> render_video(const MockImage& base, std::span<const EffectSpec> effects,
                                    const EditSchedule& schedule) {
  validate(schedule);
  std::vector<const EffectSpec*> ordered;
  std::set<int> covered;
  for (const EffectSpec& e : effects) {
    check_effect(base, e);
    if (e.token_index < 0) throw Error(Errc::ConfigError, "effect token index is negative");
    if (!covered.insert(e.token_index).second) {
      throw Error(Errc::ConfigError, "two effects for token " + std::to_string(e.token_index));
    }
    ordered.push_back(&e);
  }
  for (const ScheduleToken& t : schedule.tokens) {
    if (!covered.contains(t.index)) {
      throw Error(Errc::ConfigError, "no effect for scheduled token " + std::to_string(t.index) +
                                         " ('" + t.token + "')");
    }
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const EffectSpec* a, const EffectSpec* b) { return a->token_index < b->token_index; });

  // One attention row per token index up to the largest effect token.
  const std::size_t token_rows =
      ordered.empty() ? 1 : static_cast<std::size_t>(ordered.back()->token_index) + 1;
  AttentionMap attention = AttentionMap::zeros(token_rows, base.cells());
  for (const EffectSpec* e : ordered) {
    auto row = attention.row(static_cast<std::size_t>(e->token_index));
    std::copy(e->attention.begin(), e->attention.end(), row.begin());
  }

  std::vector<MockImage> frames;
  frames.reserve(schedule.frame_count);
  for (std::size_t t = 0; t < schedule.frame_count; ++t) {
    const FrameEdits& edits = schedule.frames[t];
    const AttentionMap scaled = apply_schedule_step(attention, schedule, t);
    MockImage frame = base;
    for (const EffectSpec* e : ordered) {
      if (!edits.contains(e->token_index)) continue;
      blend_into(frame, e->color, scaled.row(static_cast<std::size_t>(e->token_index)));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

double proxy_score(const MockImage& frame, const EffectSpec& effect) {
  check_effect(frame, effect);
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t p = 0; p < frame.pixels.size(); ++p) {
    const double a = effect.attention[p];
    if (a == 0.0) continue;
    double l1 = 0.0;
    for (std::size_t c = 0; c < 3; ++c) l1 += std::abs(frame.pixels[p][c] - effect.color[c]);
    weighted += a * (1.0 - l1 / 3.0);
    total += a;
  }
  return total > 0.0 ? weighted / total : 0.0;
}

MetricSeries proxy_series(std::span<const MockImage> frames, const EffectSpec& effect,
                          std::string name) {
  MetricSeries series{std::move(name), {}};
  series.values.reserve(frames.size());
  for (const MockImage& f : frames) series.values.push_back(proxy_score(f, effect));
  return series;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::GridMismatch, "series lengths differ");
  if (a.size() < 2) throw Error(Errc::DegenerateSeries, "need at least two points");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(Errc::DegenerateSeries, "series is constant");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double pearson(const MetricSeries& a, const MetricSeries& b) { return pearson(a.values, b.values); }

std::string plot_data_csv(std::span<const MetricSeries> series) {
  if (series.empty()) throw Error(Errc::ConfigError, "no series to write");
  const std::size_t n = series.front().values.size();
  for (const MetricSeries& s : series) {
    if (s.values.size() != n) throw Error(Errc::GridMismatch, "series '" + s.name + "' length differs");
  }
  std::ostringstream out;
  out << "frame";
  for (const MetricSeries& s : series) out << ',' << s.name;
  out << '\n';
  for (std::size_t t = 0; t < n; ++t) {
    out << t;
    for (const MetricSeries& s : series) out << ',' << io::format_double(s.values[t]);
    out << '\n';
  }
  return out.str();
}

void emit_plot_data(std::span<const MetricSeries> series, const std::filesystem::path& path) {
  io::write_file_atomic(path, plot_data_csv(series));
}

std::vector<double> blob_attention(std::size_t height, std::size_t width, double center_y,
                                   double center_x, double sigma) {
  std::vector<double> row(height * width);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double dy = static_cast<double>(y) - center_y;
      const double dx = static_cast<double>(x) - center_x;
      row[y * width + x] = std::exp(-(dx * dx + dy * dy) * inv);
    }
  }
  return row;
}

io::Bytes encode_ppm(const MockImage& image) {
  if (image.pixels.size() != image.cells()) {
    throw Error(Errc::DimensionError, "image pixel count does not match its dimensions");
  }
  const std::string header =
      "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  io::Bytes out(header.begin(), header.end());
  out.reserve(header.size() + image.pixels.size() * 3);
  for (const Rgb& px : image.pixels) {
    for (double c : px) {
      const double v = std::floor(std::clamp(c, 0.0, 1.0) * 255.0 + 0.5);
      out.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return out;
}

MockImage decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw Error(Errc::FormatError, "not a binary PPM (P6)");
  }
  std::size_t pos = 2;
  const std::size_t width = parse_header_int(bytes, pos);
  const std::size_t height = parse_header_int(bytes, pos);
  const std::size_t maxval = parse_header_int(bytes, pos);
  if (width == 0 || height == 0) throw Error(Errc::FormatError, "PPM has zero size");
  if (maxval != 255) throw Error(Errc::FormatError, "only 8-bit PPM (maxval 255) is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(Errc::FormatError, "malformed PPM header");
  }
  ++pos;
  const std::size_t need = width * height * 3;
  if (bytes.size() - pos < need) throw Error(Errc::FormatError, "PPM pixel data truncated");

  MockImage image{height, width, std::vector<Rgb>(width * height)};
  for (std::size_t p = 0; p < image.pixels.size(); ++p) {
    for (std::size_t c = 0; c < 3; ++c) image.pixels[p][c] = bytes[pos++] / 255.0;
  }
  return image;
}

void write_ppm(const MockImage& image, const std::filesystem::path& path) {
  io::write_file_atomic(path, encode_ppm(image));
}

MockImage read_ppm(const std::filesystem::path& path) { return decode_ppm(io::read_file(path)); }

}  // namespace aadiff
