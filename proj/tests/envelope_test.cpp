#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aadiff/envelope.hpp"
#include "aadiff/synth.hpp"
#include "test_support.hpp"

namespace aadiff {
namespace {

Envelope env_of(std::vector<double> values, EnvelopeKind kind = EnvelopeKind::raw) {
  return Envelope{std::move(values), 30.0, kind};
}

// Brute-force truncated windowed mean, written directly from the window bounds.
std::vector<double> windowed_mean_oracle(const std::vector<double>& x, int s, bool centered) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  for (int t = 0; t < n; ++t) {
    const int lo = centered ? t - (s - 1) / 2 : t - s + 1;
    const int hi = centered ? t + s / 2 : t;
    double sum = 0.0;
    int count = 0;
    for (int j = lo; j <= hi; ++j) {
      if (j < 0 || j >= n) continue;
      sum += x[j];
      ++count;
    }
    out[t] = sum / count;
  }
  return out;
}

TEST(ComputeEnvelope, SilentClipGivesZeros) {
  const AudioClip clip = synth::silence(1.0, 8000);
  const Envelope env = compute_envelope(clip, make_frame_grid(clip, 30.0));
  EXPECT_EQ(env.kind, EnvelopeKind::raw);
  EXPECT_EQ(env.size(), 30u);
  for (double v : env.values) EXPECT_EQ(v, 0.0);
}

TEST(ComputeEnvelope, ConstantClipRmsIsAmplitude) {
  const AudioClip clip = synth::constant(1.0, 44100, 0.5f);
  const Envelope env = compute_envelope(clip, make_frame_grid(clip, 30.0));
  for (double v : env.values) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(ComputeEnvelope, MatchesPerFrameLoopOracle) {
  std::mt19937_64 rng(5);
  AudioClip clip;
  clip.sample_rate = 90;  // 3 samples per frame at 30 fps
  clip.samples.resize(8);  // 3 frames, the last one short
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  for (float& s : clip.samples) s = dist(rng);

  const FrameGrid grid = make_frame_grid(clip, 30.0);
  ASSERT_EQ(grid.frame_count, 3u);
  const Envelope rms = compute_envelope(clip, grid, MagnitudeMetric::rms);
  const Envelope peak = compute_envelope(clip, grid, MagnitudeMetric::peak);
  for (std::size_t t = 0; t < 3; ++t) {
    double sq = 0.0, mx = 0.0;
    int count = 0;
    for (std::size_t i = 3 * t; i < std::min<std::size_t>(3 * t + 3, 8); ++i) {
      sq += static_cast<double>(clip.samples[i]) * clip.samples[i];
      mx = std::max(mx, std::fabs(static_cast<double>(clip.samples[i])));
      ++count;
    }
    EXPECT_NEAR(rms.values[t], std::sqrt(sq / count), 1e-15);
    EXPECT_EQ(peak.values[t], mx);
  }
}

TEST(ComputeEnvelope, RejectsForeignGrid) {
  const AudioClip a = synth::silence(1.0, 8000);
  const AudioClip b = synth::silence(2.0, 8000);
  EXPECT_AADIFF_ERROR(compute_envelope(b, make_frame_grid(a, 30.0)), Errc::GridMismatch);
}

TEST(Smooth, WindowOneIsIdentity) {
  const Envelope env = env_of({0.3, 0.9, 0.1, 0.0, 2.5});
  for (auto mode : {SmoothingMode::centered, SmoothingMode::causal}) {
    const Envelope out = smooth(env, {1, mode});
    EXPECT_EQ(out.values, env.values);
    EXPECT_EQ(out.kind, EnvelopeKind::smoothed);
  }
}

TEST(Smooth, CenteredWindowOfThree) {
  const Envelope out = smooth(env_of({1, 2, 3, 4}), {3, SmoothingMode::centered});
  const std::vector<double> expected{1.5, 2.0, 3.0, 3.5};
  EXPECT_EQ(out.values, expected);
  EXPECT_EQ(windowed_mean_oracle({1, 2, 3, 4}, 3, true), expected);
}

TEST(Smooth, CausalWindowOfTwo) {
  const Envelope out = smooth(env_of({1, 2, 3, 4}), {2, SmoothingMode::causal});
  EXPECT_EQ(out.values, (std::vector<double>{1.0, 1.5, 2.5, 3.5}));
}

TEST(Smooth, WideCenteredWindowIsGlobalMean) {
  std::mt19937_64 rng(1);
  const auto x = testing::random_values(rng, 150);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / 150.0;
  const Envelope out = smooth(env_of(x), {299, SmoothingMode::centered});
  for (double v : out.values) EXPECT_NEAR(v, mean, 1e-12);
  EXPECT_EQ(std::adjacent_find(out.values.begin(), out.values.end(), std::not_equal_to<>()),
            out.values.end());
}

TEST(Smooth, WindowEqualToLengthNearlyConstant) {
  std::mt19937_64 rng(2);
  const auto x = testing::random_values(rng, 150);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / 150.0;
  const Envelope out = smooth(env_of(x), {150, SmoothingMode::centered});
  // t = 74 spans [0, 149]
  EXPECT_NEAR(out.values[74], mean, 1e-12);
  const auto oracle = windowed_mean_oracle(x, 150, true);
  for (std::size_t t = 0; t < 150; ++t) {
    const int lo = std::max(0, static_cast<int>(t) - 74);
    const int hi = std::min(149, static_cast<int>(t) + 75);
    EXPECT_GE(hi - lo + 1, 75);
    EXPECT_NEAR(out.values[t], oracle[t], 1e-12);
  }
  EXPECT_LE(total_variation(out), total_variation(env_of(x)));
}

TEST(Smooth, MatchesBruteForceOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    const int s = 1 + static_cast<int>(rng() % 320);
    const bool centered = trial % 2 == 0;
    const auto x = testing::random_values(rng, n, 0.0, 5.0);
    const Envelope out =
        smooth(env_of(x), {s, centered ? SmoothingMode::centered : SmoothingMode::causal});
    const auto oracle = windowed_mean_oracle(x, s, centered);
    for (std::size_t t = 0; t < n; ++t) ASSERT_NEAR(out.values[t], oracle[t], 1e-12);
  }
}

TEST(Smooth, RangeContraction) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    auto x = testing::random_values(rng, n, 0.0, 3.0);
    if (trial % 3 == 0) std::fill(x.begin(), x.end(), 0.1);  // constants expose rounding
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const int s = 1 + static_cast<int>(rng() % 400);
    for (auto mode : {SmoothingMode::centered, SmoothingMode::causal}) {
      for (double v : smooth(env_of(x), {s, mode}).values) {
        ASSERT_GE(v, *lo);
        ASSERT_LE(v, *hi);
      }
    }
  }
}

TEST(Smooth, RejectsBadWindowAndKind) {
  EXPECT_AADIFF_ERROR(smooth(env_of({1, 2}), {0, SmoothingMode::centered}), Errc::InvalidWindow);
  EXPECT_AADIFF_ERROR(smooth(env_of({1, 2}, EnvelopeKind::multiplier), {3}),
                      Errc::ValidationError);
}

TEST(Smooth, TotalVariationShrinksWithWindow) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Envelope e = env_of(testing::random_values(rng, 150, 0.0, 2.0));
    const double tv1 = total_variation(smooth(e, {1}));
    const double tv75 = total_variation(smooth(e, {75}));
    const double tv150 = total_variation(smooth(e, {150}));
    EXPECT_LE(tv75, total_variation(e));
    EXPECT_GE(tv1, tv75);
    EXPECT_GE(tv75, tv150);
  }
}

TEST(ToMultipliers, ZeroEnvelopeFallsBackToFloor) {
  const Envelope m =
      to_multipliers(env_of({0, 0, 0}, EnvelopeKind::smoothed), {2.0, 0.2, Normalization::max});
  EXPECT_EQ(m.kind, EnvelopeKind::multiplier);
  for (double v : m.values) EXPECT_EQ(v, 0.2);
}

TEST(ToMultipliers, MaxNormalizedFormula) {
  const Envelope m = to_multipliers(env_of({0, 0.5, 1.0}, EnvelopeKind::smoothed),
                                    {2.0, 0.0, Normalization::max});
  EXPECT_EQ(m.values, (std::vector<double>{0.0, 1.0, 2.0}));

  const Envelope f = to_multipliers(env_of({0, 0.5, 2.0}, EnvelopeKind::smoothed),
                                    {1.0, 0.5, Normalization::max});
  EXPECT_EQ(f.values, (std::vector<double>{0.5, 0.625, 1.0}));
}

TEST(ToMultipliers, NoNormalizationScalesByGain) {
  const Envelope m = to_multipliers(env_of({0.1, 0.4}, EnvelopeKind::smoothed),
                                    {3.0, 0.0, Normalization::none});
  EXPECT_DOUBLE_EQ(m.values[0], 0.3);
  EXPECT_DOUBLE_EQ(m.values[1], 1.2);
}

TEST(ToMultipliers, DoublingGainDoublesMultipliers) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Envelope e = env_of(testing::random_values(rng, 40), EnvelopeKind::smoothed);
    const double g = 0.1 + trial * 0.05;
    for (auto norm : {Normalization::max, Normalization::none}) {
      const Envelope a = to_multipliers(e, {g, 0.0, norm});
      const Envelope b = to_multipliers(e, {2 * g, 0.0, norm});
      for (std::size_t t = 0; t < e.size(); ++t) ASSERT_EQ(b.values[t], 2 * a.values[t]);
    }
  }
}

TEST(ToMultipliers, PeakMapsExactlyToGain) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Envelope e = env_of(testing::random_values(rng, 1 + rng() % 100), EnvelopeKind::smoothed);
    const double gain = 0.01 + static_cast<double>(rng() % 1000) / 100.0;
    const Envelope m = to_multipliers(e, {gain, 0.0, Normalization::max});
    EXPECT_EQ(*std::max_element(m.values.begin(), m.values.end()), gain);
    for (double v : m.values) EXPECT_GE(v, 0.0);
  }
}

TEST(ToMultipliers, Validation) {
  const Envelope e = env_of({1.0}, EnvelopeKind::smoothed);
  EXPECT_AADIFF_ERROR(to_multipliers(e, {1.0, 2.0, Normalization::max}), Errc::ValidationError);
  EXPECT_AADIFF_ERROR(to_multipliers(e, {-1.0, 0.0, Normalization::none}), Errc::ValidationError);
  EXPECT_AADIFF_ERROR(to_multipliers(env_of({1.0}, EnvelopeKind::multiplier), {}),
                      Errc::ValidationError);
  // raw input is accepted (with a warning)
  EXPECT_EQ(to_multipliers(env_of({2.0}), {}).values, std::vector<double>{1.0});
}

TEST(MixEnvelopes, Cases) {
  const Envelope a = env_of({0.2, 0.7, 0.1});
  const std::vector<Envelope> single{a};
  EXPECT_EQ(mix_envelopes(single, std::vector<double>{1.0}).values, a.values);

  const std::vector<Envelope> twins{a, a};
  EXPECT_EQ(mix_envelopes(twins, std::vector<double>{0.5, 0.5}).values, a.values);

  const std::vector<Envelope> pair{env_of({1, 0}), env_of({0, 1})};
  EXPECT_EQ(mix_envelopes(pair, std::vector<double>{1, 1}).values,
            (std::vector<double>{1, 1}));

  const std::vector<Envelope> ragged{env_of({1, 0}), env_of({0, 1, 2})};
  EXPECT_AADIFF_ERROR(mix_envelopes(ragged, std::vector<double>{1, 1}), Errc::GridMismatch);
  Envelope other_fps = env_of({0, 1});
  other_fps.fps = 24.0;
  const std::vector<Envelope> fps_mix{env_of({1, 0}), other_fps};
  EXPECT_AADIFF_ERROR(mix_envelopes(fps_mix, std::vector<double>{1, 1}), Errc::GridMismatch);
  EXPECT_AADIFF_ERROR(mix_envelopes(pair, std::vector<double>{1}), Errc::GridMismatch);
}

TEST(TotalVariation, Cases) {
  EXPECT_EQ(total_variation(env_of({0.4, 0.4, 0.4})), 0.0);
  EXPECT_EQ(total_variation(env_of({0.4})), 0.0);
  EXPECT_EQ(total_variation(env_of({0, 1, 0, 1})), 3.0);
}

TEST(EnvelopeCsv, HeaderAndRows) {
  const std::vector<Envelope> envs{env_of({0.5, 1}), env_of({0.25, 0})};
  const std::vector<std::string> names{"raw", "smoothed"};
  EXPECT_EQ(envelopes_to_csv(envs, names), "frame,raw,smoothed\n0,0.5,0.25\n1,1,0\n");
}

}  // namespace
}  // namespace aadiff
