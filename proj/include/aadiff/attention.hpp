#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "aadiff/schedule.hpp"

namespace aadiff {

/// Dense token x cell cross-attention grid, row-major by token.
class AttentionMap {
 public:
  AttentionMap() = default;
  AttentionMap(std::size_t tokens, std::size_t cells, std::vector<double> weights,
               bool normalized = false);

  static AttentionMap zeros(std::size_t tokens, std::size_t cells);

  std::size_t tokens() const { return tokens_; }
  std::size_t cells() const { return cells_; }
  bool normalized() const { return normalized_; }

  std::span<const double> row(std::size_t token) const;
  std::span<double> row(std::size_t token);
  double at(std::size_t token, std::size_t cell) const { return weights_[token * cells_ + cell]; }
  const std::vector<double>& weights() const { return weights_; }

  /// Checks that every cell column sums to 1 within `tol`.
  bool columns_normalized(double tol = 1e-6) const;

  friend bool operator==(const AttentionMap&, const AttentionMap&) = default;

 private:
  std::size_t tokens_ = 0;
  std::size_t cells_ = 0;
  std::vector<double> weights_;
  bool normalized_ = false;
};

struct ReweightSpec {
  std::map<int, double> targets;  // token index -> multiplier
  bool renormalize = false;
};

/// Scales each targeted token row by its multiplier. Untargeted rows are
/// copied unchanged. With renormalize, every column with a positive sum is
/// rescaled to sum to 1.
AttentionMap reweight(const AttentionMap& map, const ReweightSpec& spec);

/// reweight() with the schedule's edits for `frame`; applied identically at
/// every denoising step of that frame.
AttentionMap apply_schedule_step(const AttentionMap& map, const EditSchedule& schedule,
                                 std::size_t frame, bool renormalize = false);

double region_mass(const AttentionMap& map, int token_index);

}  // namespace aadiff
