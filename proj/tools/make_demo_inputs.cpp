// Writes a small deterministic demo set: two 5 s WAV files (a thunderstorm
// with three strikes and a slowly growing wildfire) and an embedding file
// whose audio vectors point at the matching prompt tokens.
#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "aadiff/audio.hpp"
#include "aadiff/error.hpp"
#include "aadiff/io.hpp"
#include "aadiff/synth.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("demo");
  try {
    fs::create_directories(dir);
    constexpr std::uint32_t kRate = 44100;
    aadiff::io::write_file_atomic(
        dir / "thunder.wav",
        aadiff::encode_wav_s16(aadiff::synth::thunder(5.0, kRate, {0.6, 2.1, 3.4})));
    aadiff::io::write_file_atomic(dir / "wildfire.wav",
                                  aadiff::encode_wav_s16(aadiff::synth::wildfire(5.0, kRate)));

    using nlohmann::json;
    // dim 6: axes roughly {scene, sky, storm, flash, fire, smoke}
    json doc = {
        {"dim", 6},
        {"prompt", "a forest with lightning and wildfire"},
        {"entries",
         {
             {{"token", "a"}, {"index", 0}, {"vector", {0.1, 0.1, 0.0, 0.0, 0.0, 0.0}}},
             {{"token", "forest"}, {"index", 1}, {"vector", {1.0, 0.2, 0.0, 0.0, 0.1, 0.0}}},
             {{"token", "with"}, {"index", 2}, {"vector", {0.1, 0.0, 0.1, 0.0, 0.0, 0.1}}},
             {{"token", "lightning"}, {"index", 3}, {"vector", {0.0, 0.4, 0.8, 1.0, 0.0, 0.0}}},
             {{"token", "and"}, {"index", 4}, {"vector", {0.0, 0.1, 0.0, 0.0, 0.1, 0.1}}},
             {{"token", "wildfire"}, {"index", 5}, {"vector", {0.3, 0.0, 0.0, 0.2, 1.0, 0.7}}},
         }},
        {"audio",
         {
             {{"label", "thunder.wav"}, {"vector", {0.0, 0.3, 1.0, 0.7, 0.0, 0.1}}},
             {{"label", "wildfire.wav"}, {"vector", {0.2, 0.0, 0.0, 0.1, 0.9, 0.9}}},
         }},
    };
    aadiff::io::write_file_atomic(dir / "embeddings.json", doc.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
