#include "aadiff/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "aadiff/error.hpp"
#include "aadiff/io.hpp"

namespace aadiff {
namespace {

void check_values(const Envelope& env) {
  for (double v : env.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(Errc::ValidationError, "envelope values must be finite and non-negative");
    }
  }
}

}  // namespace

Envelope compute_envelope(const AudioClip& clip, const FrameGrid& grid, MagnitudeMetric metric) {
  if (grid.sample_count != clip.samples.size() || grid.sample_rate != clip.sample_rate) {
    throw Error(Errc::GridMismatch, "frame grid was built from a different clip");
  }
  Envelope env;
  env.fps = grid.fps;
  env.kind = EnvelopeKind::raw;
  env.values.resize(grid.frame_count, 0.0);

  for (std::size_t t = 0; t < grid.frame_count; ++t) {
    const auto window = frame_samples(clip, grid, t);
    if (window.empty()) continue;
    if (metric == MagnitudeMetric::rms) {
      double sum_sq = 0.0;
      for (float s : window) sum_sq += static_cast<double>(s) * static_cast<double>(s);
      env.values[t] = std::sqrt(sum_sq / static_cast<double>(window.size()));
    } else {
      double peak = 0.0;
      for (float s : window) peak = std::max(peak, std::abs(static_cast<double>(s)));
      env.values[t] = peak;
    }
  }
  return env;
}

Envelope smooth(const Envelope& env, const SmoothingConfig& cfg) {
  if (cfg.window_size < 1) throw Error(Errc::InvalidWindow, "window size must be >= 1");
  if (env.kind == EnvelopeKind::multiplier) {
    throw Error(Errc::ValidationError, "cannot smooth a multiplier envelope");
  }
  Envelope out = env;
  out.kind = EnvelopeKind::smoothed;
  const std::size_t n = env.values.size();
  if (cfg.window_size == 1 || n == 0) return out;

  const auto [lo_it, hi_it] = std::minmax_element(env.values.begin(), env.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  std::vector<long double> prefix(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + env.values[i];

  const auto s = static_cast<std::ptrdiff_t>(cfg.window_size);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  const std::ptrdiff_t before = cfg.mode == SmoothingMode::centered ? (s - 1) / 2 : s - 1;
  const std::ptrdiff_t after = cfg.mode == SmoothingMode::centered ? s / 2 : 0;

  for (std::ptrdiff_t t = 0; t <= last; ++t) {
    const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, t - before);
    const std::ptrdiff_t b = std::min(last, t + after);
    const long double sum = prefix[b + 1] - prefix[a];
    const double mean = static_cast<double>(sum / static_cast<long double>(b - a + 1));
    // A mean can only leave [lo, hi] through rounding.
    out.values[t] = std::clamp(mean, lo, hi);
  }
  return out;
}

Envelope to_multipliers(const Envelope& env, const GainConfig& cfg) {
  if (!(cfg.gain >= 0.0) || !(cfg.floor >= 0.0)) {
    throw Error(Errc::ValidationError, "gain and floor must be non-negative");
  }
  if (cfg.normalization == Normalization::max && cfg.floor > cfg.gain) {
    throw Error(Errc::ValidationError, "floor must not exceed gain under max normalization");
  }
  if (env.kind == EnvelopeKind::raw) {
    std::clog << "warning: mapping an unsmoothed envelope to multipliers\n";
  } else if (env.kind == EnvelopeKind::multiplier) {
    throw Error(Errc::ValidationError, "envelope is already a multiplier series");
  }
  check_values(env);

  Envelope out = env;
  out.kind = EnvelopeKind::multiplier;
  if (cfg.normalization == Normalization::none) {
    for (double& v : out.values) v = cfg.gain * v;
    return out;
  }

  const double peak =
      env.values.empty() ? 0.0 : *std::max_element(env.values.begin(), env.values.end());
  for (double& v : out.values) {
    v = peak > 0.0 ? cfg.floor + (cfg.gain - cfg.floor) * (v / peak) : cfg.floor;
  }
  return out;
}

Envelope mix_envelopes(std::span<const Envelope> envs, std::span<const double> weights) {
  if (envs.empty()) throw Error(Errc::GridMismatch, "no envelopes to mix");
  if (envs.size() != weights.size()) {
    throw Error(Errc::GridMismatch, "envelope and weight counts differ");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(Errc::ValidationError, "mix weights must be non-negative");
  }
  const Envelope& first = envs.front();
  for (const Envelope& e : envs) {
    if (e.values.size() != first.values.size() || e.fps != first.fps) {
      throw Error(Errc::GridMismatch, "envelopes differ in length or fps");
    }
  }

  Envelope out;
  out.fps = first.fps;
  out.kind = first.kind;
  out.values.assign(first.values.size(), 0.0);
  for (std::size_t k = 0; k < envs.size(); ++k) {
    for (std::size_t t = 0; t < out.values.size(); ++t) {
      out.values[t] += weights[k] * envs[k].values[t];
    }
  }
  return out;
}

double total_variation(std::span<const double> values) {
  double tv = 0.0;
  for (std::size_t t = 1; t < values.size(); ++t) tv += std::abs(values[t] - values[t - 1]);
  return tv;
}

double total_variation(const Envelope& env) { return total_variation(env.values); }

std::string envelopes_to_csv(std::span<const Envelope> envs, std::span<const std::string> names) {
  if (envs.size() != names.size() || envs.empty()) {
    throw Error(Errc::ConfigError, "need one name per envelope");
  }
  const std::size_t n = envs.front().values.size();
  for (const Envelope& e : envs) {
    if (e.values.size() != n) throw Error(Errc::GridMismatch, "envelopes differ in length");
  }
  std::ostringstream out;
  out << "frame";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < n; ++t) {
    out << t;
    for (const Envelope& e : envs) out << ',' << io::format_double(e.values[t]);
    out << '\n';
  }
  return out.str();
}

std::string_view to_string(MagnitudeMetric metric) {
  return metric == MagnitudeMetric::rms ? "rms" : "peak";
}

std::string_view to_string(SmoothingMode mode) {
  return mode == SmoothingMode::centered ? "centered" : "causal";
}

MagnitudeMetric parse_metric(std::string_view text) {
  if (text == "rms") return MagnitudeMetric::rms;
  if (text == "peak") return MagnitudeMetric::peak;
  throw Error(Errc::ConfigError, "unknown metric '" + std::string(text) + "'");
}

SmoothingMode parse_mode(std::string_view text) {
  if (text == "centered") return SmoothingMode::centered;
  if (text == "causal") return SmoothingMode::causal;
  throw Error(Errc::ConfigError, "unknown smoothing mode '" + std::string(text) + "'");
}

}  // namespace aadiff
