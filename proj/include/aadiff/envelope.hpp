#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aadiff/audio.hpp"

namespace aadiff {

enum class EnvelopeKind { raw, smoothed, multiplier };
enum class MagnitudeMetric { rms, peak };
enum class SmoothingMode { centered, causal };
enum class Normalization { max, none };

/// One non-negative magnitude per video frame.
struct Envelope {
  std::vector<double> values;
  double fps = 0.0;
  EnvelopeKind kind = EnvelopeKind::raw;

  std::size_t size() const { return values.size(); }
};

struct SmoothingConfig {
  int window_size = 75;
  SmoothingMode mode = SmoothingMode::centered;
};

/// Defaults reduce to multiplying by the max-normalized magnitude.
struct GainConfig {
  double gain = 1.0;
  double floor = 0.0;
  Normalization normalization = Normalization::max;
};

Envelope compute_envelope(const AudioClip& clip, const FrameGrid& grid,
                          MagnitudeMetric metric = MagnitudeMetric::rms);

/// Sliding-window mean over frames. Centered windows cover
/// [t - (s-1)/2, t + s/2] and causal windows [t - s + 1, t], both truncated
/// at the clip bounds.
Envelope smooth(const Envelope& env, const SmoothingConfig& cfg);

/// Maps magnitudes to attention multipliers:
///   max:  floor + (gain - floor) * v / max(v)   (floor everywhere if max(v) == 0)
///   none: gain * v
Envelope to_multipliers(const Envelope& env, const GainConfig& cfg);

/// Pointwise weighted sum of envelopes that share fps and length.
Envelope mix_envelopes(std::span<const Envelope> envs, std::span<const double> weights);

double total_variation(const Envelope& env);
double total_variation(std::span<const double> values);

/// CSV with header "frame,<name>..." and one row per frame.
std::string envelopes_to_csv(std::span<const Envelope> envs, std::span<const std::string> names);

std::string_view to_string(MagnitudeMetric metric);
std::string_view to_string(SmoothingMode mode);
MagnitudeMetric parse_metric(std::string_view text);
SmoothingMode parse_mode(std::string_view text);

}  // namespace aadiff
