#pragma once

#include <cstdint>
#include <vector>

#include "aadiff/audio.hpp"
#include "aadiff/envelope.hpp"

// Deterministic synthetic signals for demos and tests. The noise source is a
// fixed-seed mt19937_64 mapped to [-1, 1) without std distributions, so
// outputs are identical across standard libraries.
namespace aadiff::synth {

AudioClip silence(double seconds, std::uint32_t sample_rate);
AudioClip constant(double seconds, std::uint32_t sample_rate, float amplitude);
AudioClip sine(double seconds, std::uint32_t sample_rate, double hz, float amplitude);

/// Noise bursts with sharp attacks and exponential decay, at the given onsets.
AudioClip thunder(double seconds, std::uint32_t sample_rate, const std::vector<double>& onsets,
                  std::uint64_t seed = 7);

/// Crackling noise whose loudness ramps up slowly over the clip.
AudioClip wildfire(double seconds, std::uint32_t sample_rate, std::uint64_t seed = 11);

/// Per-frame impulse train: each impulse jumps to `height` and decays by
/// `decay` per frame.
Envelope thunder_envelope(std::size_t frames, const std::vector<std::size_t>& strikes,
                          double height = 1.0, double decay = 0.8, double fps = 30.0);

/// Slow ramp from `from` to `to` with a gentle ripple.
Envelope ramp_envelope(std::size_t frames, double from, double to, double fps = 30.0);

}  // namespace aadiff::synth
