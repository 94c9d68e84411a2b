#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aadiff/audio.hpp"
#include "aadiff/cli.hpp"
#include "aadiff/io.hpp"
#include "aadiff/mocksynth.hpp"
#include "aadiff/schedule.hpp"
#include "aadiff/synth.hpp"
#include "test_support.hpp"

namespace aadiff::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

void write_wav(const fs::path& path, const AudioClip& clip) {
  io::write_file_atomic(path, encode_wav_s16(clip));
}

// Four tokens; "thunder.wav" aligns with "storm" (index 2), "fire.wav" with
// "flames" (index 3).
void write_embeddings(const fs::path& path) {
  nlohmann::json doc = {
      {"dim", 3},
      {"entries",
       {{{"token", "a"}, {"index", 0}, {"vector", {0.1, 0.1, 0.1}}},
        {{"token", "valley"}, {"index", 1}, {"vector", {1.0, 0.0, 0.0}}},
        {{"token", "storm"}, {"index", 2}, {"vector", {0.0, 1.0, 0.1}}},
        {{"token", "flames"}, {"index", 3}, {"vector", {0.0, 0.1, 1.0}}}}},
      {"audio",
       {{{"label", "thunder.wav"}, {"vector", {0.1, 0.9, 0.0}}},
        {{"label", "fire.wav"}, {"vector", {0.0, 0.0, 1.0}}}}},
  };
  io::write_file_atomic(path, doc.dump());
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = aadiff::testing::temp_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    thunder_ = dir_ / "thunder.wav";
    fire_ = dir_ / "fire.wav";
    silent_ = dir_ / "silent.wav";
    constant_ = dir_ / "constant.wav";
    embeddings_ = dir_ / "emb.json";
    write_wav(thunder_, synth::thunder(5.0, 16000, {0.5, 2.0, 3.5}));
    write_wav(fire_, synth::wildfire(5.0, 16000));
    write_wav(silent_, synth::silence(5.0, 16000));
    write_wav(constant_, synth::constant(5.0, 16000, 0.5f));
    write_embeddings(embeddings_);
  }

  fs::path dir_, thunder_, fire_, silent_, constant_, embeddings_;
};

TEST_F(CliTest, EnvelopeReportsFrameCount) {
  const Result r = invoke({"envelope", "--audio", thunder_.string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "frames: 150\n");
  EXPECT_TRUE(r.err.empty());
  const auto rows = read_csv(dir_ / "envelope.csv");
  ASSERT_EQ(rows.size(), 151u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"frame", "raw", "smoothed"}));
}

TEST_F(CliTest, EnvelopeWindowOneCopiesRaw) {
  ASSERT_EQ(invoke({"envelope", "--audio", thunder_.string(), "--window", "1", "--out",
                    dir_.string()}).code, 0);
  const auto rows = read_csv(dir_ / "envelope.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][1], rows[i][2]);
}

TEST_F(CliTest, EnvelopeOfSilenceIsZero) {
  ASSERT_EQ(invoke({"envelope", "--audio", silent_.string(), "--out", dir_.string()}).code, 0);
  const auto rows = read_csv(dir_ / "envelope.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], "0");
    EXPECT_EQ(rows[i][2], "0");
  }
}

TEST_F(CliTest, ScheduleWithOneAudioSelectsOneToken) {
  const Result r = invoke({"schedule", "--audio", thunder_.string(), "--embeddings",
                           embeddings_.string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const EditSchedule s = parse_schedule(io::read_text_file(dir_ / "schedule.json"));
  EXPECT_EQ(s.frame_count, 150u);
  EXPECT_EQ(s.prompt, "a valley storm flames");
  std::set<int> seen;
  for (const auto& f : s.frames) {
    for (const auto& [idx, m] : f) seen.insert(idx);
  }
  EXPECT_EQ(seen, std::set<int>{2});
}

TEST_F(CliTest, ScheduleTokenSetIsUnionOfInputs) {
  auto tokens_of = [&](const std::vector<std::string>& audio, const std::string& sub) {
    std::vector<std::string> args{"schedule", "--embeddings", embeddings_.string(), "--out",
                                  (dir_ / sub).string(), "--k", "2"};
    for (const auto& a : audio) {
      args.push_back("--audio");
      args.push_back(a);
    }
    const Result r = invoke(args);
    EXPECT_EQ(r.code, 0) << r.err;
    std::set<int> out;
    for (const auto& t : parse_schedule(io::read_text_file(dir_ / sub / "schedule.json")).tokens) {
      out.insert(t.index);
    }
    return out;
  };
  const auto a = tokens_of({thunder_.string()}, "a");
  const auto b = tokens_of({fire_.string()}, "b");
  const auto both = tokens_of({thunder_.string(), fire_.string()}, "both");
  std::set<int> expected = a;
  expected.insert(b.begin(), b.end());
  EXPECT_EQ(both, expected);
  EXPECT_GT(both.size(), a.size());
}

TEST_F(CliTest, ZeroGainGivesFloorEverywhere) {
  ASSERT_EQ(invoke({"schedule", "--audio", thunder_.string(), "--embeddings",
                    embeddings_.string(), "--gain", "0", "--floor", "0", "--out",
                    dir_.string()}).code, 0);
  const EditSchedule s = parse_schedule(io::read_text_file(dir_ / "schedule.json"));
  for (const auto& f : s.frames) {
    for (const auto& [idx, m] : f) EXPECT_EQ(m, 0.0);
  }
}

TEST_F(CliTest, RenderOfZeroScheduleReproducesBase) {
  EditSchedule s;
  s.frame_count = 5;
  s.prompt = "x";
  s.tokens = {{1, "storm"}};
  s.frames.assign(5, FrameEdits{{1, 0.0}});
  io::write_file_atomic(dir_ / "zero.json", serialize(s));
  MockImage base = MockImage::uniform(6, 9, {0, 0, 0});
  for (std::size_t p = 0; p < base.pixels.size(); ++p) {
    base.pixels[p] = {static_cast<double>(p % 7) / 255.0, 0.5, 1.0};
  }
  write_ppm(base, dir_ / "base.ppm");

  const Result r = invoke({"render", "--schedule", (dir_ / "zero.json").string(), "--base",
                           (dir_ / "base.ppm").string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("undefined"), std::string::npos);
  const io::Bytes base_bytes = io::read_file(dir_ / "base.ppm");
  for (int t = 0; t < 5; ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05d.ppm", t);
    EXPECT_EQ(io::read_file(dir_ / "frames" / name), base_bytes);
  }
}

TEST_F(CliTest, MonotoneScheduleGivesMonotoneProxy) {
  EditSchedule s;
  s.frame_count = 20;
  s.tokens = {{0, "t"}};
  for (int t = 0; t < 20; ++t) s.frames.push_back({{0, 0.05 * t}});
  io::write_file_atomic(dir_ / "ramp.json", serialize(s));
  const Result r = invoke({"render", "--schedule", (dir_ / "ramp.json").string(), "--out",
                           dir_.string(), "--size", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "metrics.csv");
  ASSERT_EQ(rows[0], (std::vector<std::string>{"frame", "multiplier_0", "proxy_0"}));
  for (std::size_t i = 2; i < rows.size(); ++i) {
    EXPECT_GT(std::stod(rows[i][2]), std::stod(rows[i - 1][2]));
  }
}

TEST_F(CliTest, DemoPipelinePrintsHighCorrelation) {
  ASSERT_EQ(invoke({"schedule", "--audio", thunder_.string(), "--embeddings",
                    embeddings_.string(), "--out", dir_.string()}).code, 0);
  const Result r = invoke({"render", "--schedule", (dir_ / "schedule.json").string(), "--out",
                           dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto colon = r.out.rfind(": ");
  ASSERT_NE(colon, std::string::npos);
  EXPECT_GE(std::stod(r.out.substr(colon + 2)), 0.9) << r.out;
  EXPECT_EQ(r.out.rfind("pearson_r token 2 (storm): ", 0), 0u);
}

TEST_F(CliTest, AblateDefaultWindows) {
  ASSERT_EQ(invoke({"ablate", "--audio", thunder_.string(), "--out", dir_.string()}).code, 0);
  const auto rows = read_csv(dir_ / "ablation.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"window", "tv_envelope", "tv_proxy"}));
  for (std::size_t i = 2; i < rows.size(); ++i) {
    EXPECT_LE(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));
    EXPECT_LE(std::stod(rows[i][2]), std::stod(rows[i - 1][2]));
  }
}

TEST_F(CliTest, AblateConstantAudioHasNoVariation) {
  ASSERT_EQ(invoke({"ablate", "--audio", constant_.string(), "--out", dir_.string()}).code, 0);
  const auto rows = read_csv(dir_ / "ablation.csv");
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], "0");
    EXPECT_EQ(rows[i][2], "0");
  }
}

TEST_F(CliTest, AblateSingleWindow) {
  ASSERT_EQ(invoke({"ablate", "--audio", thunder_.string(), "--windows", "30", "--out",
                    dir_.string()}).code, 0);
  const auto rows = read_csv(dir_ / "ablation.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "30");
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  nlohmann::json cfg = {{"audio", {thunder_.string()}}, {"fps", 10}, {"window", 1},
                        {"out", dir_.string()}};
  io::write_file_atomic(dir_ / "cfg.json", cfg.dump());
  Result r = invoke({"envelope", "--config", (dir_ / "cfg.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "frames: 50\n");
  r = invoke({"envelope", "--config", (dir_ / "cfg.json").string(), "--fps", "24"});
  EXPECT_EQ(r.out, "frames: 120\n");
}

TEST_F(CliTest, ExitCodes) {
  Result r = invoke({});
  EXPECT_EQ(r.code, kUsage);
  r = invoke({"envelope", "--bogus"});
  EXPECT_EQ(r.code, kUsage);
  r = invoke({"envelope"});
  EXPECT_EQ(r.code, kUsage);

  io::write_file_atomic(dir_ / "junk.wav", std::string("not a wav"));
  r = invoke({"envelope", "--audio", (dir_ / "junk.wav").string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, kFormat);
  r = invoke({"envelope", "--audio", (dir_ / "nope.wav").string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, kFormat);

  r = invoke({"envelope", "--audio", thunder_.string(), "--window", "0", "--out", dir_.string()});
  EXPECT_EQ(r.code, kValidation);
  r = invoke({"envelope", "--audio", thunder_.string(), "--fps", "-1", "--out", dir_.string()});
  EXPECT_EQ(r.code, kValidation);

  // each diagnostic is a single line on stderr
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, RenderIsDeterministic) {
  ASSERT_EQ(invoke({"schedule", "--audio", thunder_.string(), "--audio", fire_.string(),
                    "--embeddings", embeddings_.string(), "--out", dir_.string()}).code, 0);
  for (const char* sub : {"run1", "run2"}) {
    ASSERT_EQ(invoke({"render", "--schedule", (dir_ / "schedule.json").string(), "--size", "24",
                      "--out", (dir_ / sub).string()}).code, 0);
  }
  EXPECT_EQ(io::read_file(dir_ / "run1" / "metrics.csv"), io::read_file(dir_ / "run2" / "metrics.csv"));
  EXPECT_EQ(io::read_file(dir_ / "run1" / "frames" / "frame_00077.ppm"),
            io::read_file(dir_ / "run2" / "frames" / "frame_00077.ppm"));
}

}  // namespace
}  // namespace aadiff::cli
