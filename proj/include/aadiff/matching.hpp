#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace aadiff {

struct TokenEmbedding {
  std::string token;
  int index = 0;  // position in the prompt
  std::vector<double> vector;
};

struct AudioEmbedding {
  std::vector<double> vector;
  std::string source_label;
};

struct EmbeddingSet {
  int dim = 0;
  std::vector<TokenEmbedding> entries;
  // Optional extras carried by the same file.
  std::string prompt;
  std::vector<AudioEmbedding> audio;  // listed in the same order as the audio inputs
};

struct RankedToken {
  std::string token;
  int index = 0;
  double similarity = 0.0;
};

struct MatchResult {
  std::vector<RankedToken> ranked;  // similarity descending, ties by ascending index
  int k = 1;
};

/// Parses the JSON embedding file format. Entries either carry "vector"
/// inline or reference a little-endian float32 sidecar through
/// "vector_file" + "row"; sidecar paths resolve against `base_dir`.
EmbeddingSet load_embeddings(std::span<const std::uint8_t> bytes,
                             const std::filesystem::path& base_dir = {});
EmbeddingSet load_embeddings_file(const std::filesystem::path& path);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

MatchResult top_k_tokens(const AudioEmbedding& audio, const EmbeddingSet& tokens, int k = 1);

}  // namespace aadiff
