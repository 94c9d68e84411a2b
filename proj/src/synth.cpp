#include "aadiff/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace aadiff::synth {
namespace {

std::size_t sample_count(double seconds, std::uint32_t sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

class Noise {
 public:
  explicit Noise(std::uint64_t seed) : engine_(seed) {}
  double next() {
    // 53 random bits -> [0, 1) -> [-1, 1)
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

AudioClip silence(double seconds, std::uint32_t sample_rate) {
  return constant(seconds, sample_rate, 0.0f);
}

AudioClip constant(double seconds, std::uint32_t sample_rate, float amplitude) {
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(sample_count(seconds, sample_rate), amplitude);
  clip.source_label = "synthetic:constant";
  return clip;
}

AudioClip sine(double seconds, std::uint32_t sample_rate, double hz, float amplitude) {
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(sample_count(seconds, sample_rate));
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    clip.samples[i] = static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * hz * t));
  }
  clip.source_label = "synthetic:sine";
  return clip;
}

AudioClip thunder(double seconds, std::uint32_t sample_rate, const std::vector<double>& onsets,
                  std::uint64_t seed) {
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(sample_count(seconds, sample_rate));
  clip.source_label = "synthetic:thunder";
  Noise noise(seed);
  constexpr double kBackground = 0.02;
  constexpr double kDecaySeconds = 0.35;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double level = kBackground;
    for (double onset : onsets) {
      if (t >= onset) level += 0.9 * std::exp(-(t - onset) / kDecaySeconds);
    }
    clip.samples[i] = static_cast<float>(std::clamp(level * noise.next(), -1.0, 1.0));
  }
  return clip;
}

AudioClip wildfire(double seconds, std::uint32_t sample_rate, std::uint64_t seed) {
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(sample_count(seconds, sample_rate));
  clip.source_label = "synthetic:wildfire";
  Noise noise(seed);
  Noise crackle(seed + 1);
  const double n = static_cast<double>(clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const double progress = static_cast<double>(i) / n;
    double level = 0.05 + 0.6 * progress;
    if (crackle.next() > 0.9995) level += 0.3;
    clip.samples[i] = static_cast<float>(std::clamp(level * noise.next(), -1.0, 1.0));
  }
  return clip;
}

Envelope thunder_envelope(std::size_t frames, const std::vector<std::size_t>& strikes,
                          double height, double decay, double fps) {
  Envelope env;
  env.fps = fps;
  env.values.assign(frames, 0.02);
  for (std::size_t strike : strikes) {
    double level = height;
    for (std::size_t t = strike; t < frames && level > 1e-4; ++t) {
      env.values[t] += level;
      level *= decay;
    }
  }
  return env;
}

Envelope ramp_envelope(std::size_t frames, double from, double to, double fps) {
  Envelope env;
  env.fps = fps;
  env.values.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const double x = frames > 1 ? static_cast<double>(t) / static_cast<double>(frames - 1) : 0.0;
    const double ripple = 0.05 * std::abs(to - from) * std::sin(0.9 * static_cast<double>(t));
    env.values[t] = std::max(0.0, from + (to - from) * x + ripple);
  }
  return env;
}

}  // namespace aadiff::synth
