#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "aadiff/envelope.hpp"
#include "aadiff/matching.hpp"

namespace aadiff {

struct EditSource {
  std::string audio_label;
  MatchResult match;
  Envelope multipliers;  // kind == multiplier, one value per frame
  double weight = 1.0;
};

struct ScheduleToken {
  int index = 0;
  std::string token;

  friend bool operator==(const ScheduleToken&, const ScheduleToken&) = default;
};

// token index -> attention multiplier. A token missing from a frame means its
// attention is left untouched.
using FrameEdits = std::map<int, double>;

struct EditSchedule {
  double fps = 30.0;
  std::size_t frame_count = 0;
  std::string prompt;
  std::vector<ScheduleToken> tokens;  // ascending index
  std::vector<FrameEdits> frames;

  friend bool operator==(const EditSchedule&, const EditSchedule&) = default;
};

/// Frame t, token i receives the sum over sources selecting i of
/// weight * multipliers[t].
EditSchedule build_schedule(std::span<const EditSource> sources, double fps,
                            std::size_t frame_count, std::string prompt);

/// Canonical JSON: fixed key order, frame-map keys in ascending numeric order,
/// shortest round-trip floats.
std::string serialize(const EditSchedule& schedule);
EditSchedule parse_schedule(std::string_view text);

void validate(const EditSchedule& schedule);

}  // namespace aadiff
