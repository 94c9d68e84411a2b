#include "aadiff/attention.hpp"

#include <cmath>
#include <string>

#include "aadiff/error.hpp"

namespace aadiff {

AttentionMap::AttentionMap(std::size_t tokens, std::size_t cells, std::vector<double> weights,
                           bool normalized)
    : tokens_(tokens), cells_(cells), weights_(std::move(weights)), normalized_(normalized) {
  if (weights_.size() != tokens_ * cells_) {
    throw Error(Errc::DimensionError, "attention weights do not fill a " +
                                          std::to_string(tokens_) + "x" + std::to_string(cells_) +
                                          " grid");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(Errc::ValidationError, "attention weights must be finite and non-negative");
    }
  }
  if (normalized_ && !columns_normalized()) {
    throw Error(Errc::ValidationError, "attention map marked normalized has a column sum != 1");
  }
}

AttentionMap AttentionMap::zeros(std::size_t tokens, std::size_t cells) {
  return AttentionMap(tokens, cells, std::vector<double>(tokens * cells, 0.0));
}

std::span<const double> AttentionMap::row(std::size_t token) const {
  if (token >= tokens_) throw Error(Errc::IndexError, "token row " + std::to_string(token));
  return std::span<const double>(weights_).subspan(token * cells_, cells_);
}

std::span<double> AttentionMap::row(std::size_t token) {
  if (token >= tokens_) throw Error(Errc::IndexError, "token row " + std::to_string(token));
  return std::span<double>(weights_).subspan(token * cells_, cells_);
}

bool AttentionMap::columns_normalized(double tol) const {
  for (std::size_t c = 0; c < cells_; ++c) {
    double sum = 0.0;
    for (std::size_t t = 0; t < tokens_; ++t) sum += weights_[t * cells_ + c];
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

AttentionMap reweight(const AttentionMap& map, const ReweightSpec& spec) {
  for (const auto& [index, m] : spec.targets) {
    if (index < 0 || static_cast<std::size_t>(index) >= map.tokens()) {
      throw Error(Errc::IndexError, "target token " + std::to_string(index) + " outside " +
                                        std::to_string(map.tokens()) + " tokens");
    }
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw Error(Errc::ValidationError, "multiplier for token " + std::to_string(index) +
                                             " must be finite and non-negative");
    }
  }

  AttentionMap out = map;
  for (const auto& [index, m] : spec.targets) {
    for (double& w : out.row(static_cast<std::size_t>(index))) w = m * w;
  }
  if (!spec.renormalize) return out;

  std::vector<double> renormed = out.weights();
  const std::size_t tokens = out.tokens();
  const std::size_t cells = out.cells();
  for (std::size_t c = 0; c < cells; ++c) {
    double sum = 0.0;
    for (std::size_t t = 0; t < tokens; ++t) sum += renormed[t * cells + c];
    if (sum <= 0.0) continue;
    for (std::size_t t = 0; t < tokens; ++t) renormed[t * cells + c] /= sum;
  }
  return AttentionMap(tokens, cells, std::move(renormed));
}

AttentionMap apply_schedule_step(const AttentionMap& map, const EditSchedule& schedule,
                                 std::size_t frame, bool renormalize) {
  if (frame >= schedule.frame_count || frame >= schedule.frames.size()) {
    throw Error(Errc::IndexError, "frame " + std::to_string(frame) + " of " +
                                      std::to_string(schedule.frame_count));
  }
  ReweightSpec spec;
  spec.targets = schedule.frames[frame];
  spec.renormalize = renormalize;
  return reweight(map, spec);
}

double region_mass(const AttentionMap& map, int token_index) {
  if (token_index < 0) throw Error(Errc::IndexError, "negative token index");
  double sum = 0.0;
  for (double w : map.row(static_cast<std::size_t>(token_index))) sum += w;
  return sum;
}

}  // namespace aadiff
