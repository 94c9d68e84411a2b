#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aadiff/envelope.hpp"
#include "aadiff/error.hpp"

namespace aadiff::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kFormat = 2, kValidation = 3 };

/// Settings shared by all subcommands. Precedence: flags, then the --config
/// JSON file, then these defaults.
struct RunConfig {
  std::vector<std::filesystem::path> audio;
  std::filesystem::path embeddings;
  double fps = 30.0;
  int window = 75;
  SmoothingMode mode = SmoothingMode::centered;
  MagnitudeMetric metric = MagnitudeMetric::rms;
  int k = 1;
  double gain = 1.0;
  double floor = 0.0;
  std::filesystem::path out = ".";
  std::optional<std::string> prompt;

  // render
  std::filesystem::path schedule;
  std::optional<std::filesystem::path> base;
  std::vector<std::string> effects;  // "index=r,g,b"
  std::size_t size = 64;

  // ablate
  std::vector<int> windows{1, 75, 150};
};

void cmd_envelope(const RunConfig& cfg, std::ostream& out);
void cmd_schedule(const RunConfig& cfg, std::ostream& out);
void cmd_render(const RunConfig& cfg, std::ostream& out);
void cmd_ablate(const RunConfig& cfg, std::ostream& out);

int exit_code_for(Errc code);

/// Full command-line entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aadiff::cli
