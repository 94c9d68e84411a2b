#include "aadiff/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include <json.hpp>

#include "aadiff/error.hpp"
#include "aadiff/io.hpp"

namespace aadiff {
namespace {

using nlohmann::json;

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

std::vector<double> read_vector(const json& node, const char* what) {
  if (!node.is_array()) throw Error(Errc::FormatError, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& x : node) {
    if (!x.is_number()) throw Error(Errc::FormatError, std::string(what) + " holds a non-number");
    const double v = x.get<double>();
    if (!std::isfinite(v)) throw Error(Errc::FormatError, std::string(what) + " is not finite");
    out.push_back(v);
  }
  return out;
}

std::vector<double> read_sidecar_row(const std::filesystem::path& file, std::int64_t row, int dim) {
  if (row < 0) throw Error(Errc::FormatError, "sidecar row must be non-negative");
  const io::Bytes raw = io::read_file(file);
  const std::size_t row_bytes = static_cast<std::size_t>(dim) * 4;
  if (raw.size() % row_bytes != 0) {
    throw Error(Errc::FormatError, "sidecar size is not a multiple of dim floats");
  }
  const std::size_t offset = static_cast<std::size_t>(row) * row_bytes;
  if (offset + row_bytes > raw.size()) throw Error(Errc::FormatError, "sidecar row out of range");
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    const std::size_t p = offset + static_cast<std::size_t>(i) * 4;
    const std::uint32_t bits = static_cast<std::uint32_t>(raw[p]) |
                               (static_cast<std::uint32_t>(raw[p + 1]) << 8) |
                               (static_cast<std::uint32_t>(raw[p + 2]) << 16) |
                               (static_cast<std::uint32_t>(raw[p + 3]) << 24);
    const float v = std::bit_cast<float>(bits);
    if (!std::isfinite(v)) throw Error(Errc::FormatError, "sidecar holds a non-finite value");
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

}  // namespace

EmbeddingSet load_embeddings(std::span<const std::uint8_t> bytes,
                             const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::FormatError, e.what());
  }
  if (!doc.is_object()) throw Error(Errc::FormatError, "embedding file must be a JSON object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) {
    throw Error(Errc::FormatError, "\"dim\" must be an integer");
  }
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    throw Error(Errc::FormatError, "\"entries\" must be an array");
  }

  EmbeddingSet set;
  set.dim = doc["dim"].get<int>();
  if (set.dim <= 0) throw Error(Errc::FormatError, "\"dim\" must be positive");
  if (doc["entries"].empty()) throw Error(Errc::FormatError, "no token entries");

  std::set<int> seen;
  for (const auto& node : doc["entries"]) {
    if (!node.is_object()) throw Error(Errc::FormatError, "entry must be an object");
    if (!node.contains("token") || !node["token"].is_string()) {
      throw Error(Errc::FormatError, "entry lacks a string \"token\"");
    }
    if (!node.contains("index") || !node["index"].is_number_integer()) {
      throw Error(Errc::FormatError, "entry lacks an integer \"index\"");
    }
    TokenEmbedding entry;
    entry.token = node["token"].get<std::string>();
    entry.index = node["index"].get<int>();
    if (entry.index < 0) throw Error(Errc::FormatError, "token index must be non-negative");
    if (!seen.insert(entry.index).second) {
      throw Error(Errc::FormatError, "duplicate token index " + std::to_string(entry.index));
    }

    if (node.contains("vector")) {
      entry.vector = read_vector(node["vector"], "vector");
    } else if (node.contains("vector_file") && node.contains("row")) {
      if (!node["vector_file"].is_string() || !node["row"].is_number_integer()) {
        throw Error(Errc::FormatError, "\"vector_file\"/\"row\" have the wrong types");
      }
      entry.vector = read_sidecar_row(base_dir / node["vector_file"].get<std::string>(),
                                      node["row"].get<std::int64_t>(), set.dim);
    } else {
      throw Error(Errc::FormatError, "entry has neither \"vector\" nor \"vector_file\"");
    }

    if (entry.vector.size() != static_cast<std::size_t>(set.dim)) {
      throw Error(Errc::FormatError, "token '" + entry.token + "' has dimension " +
                                         std::to_string(entry.vector.size()) + ", expected " +
                                         std::to_string(set.dim));
    }
    if (all_zero(entry.vector)) {
      throw Error(Errc::DegenerateEmbedding, "token '" + entry.token + "' has a zero vector");
    }
    set.entries.push_back(std::move(entry));
  }

  if (doc.contains("prompt")) {
    if (!doc["prompt"].is_string()) throw Error(Errc::FormatError, "\"prompt\" must be a string");
    set.prompt = doc["prompt"].get<std::string>();
  }
  if (doc.contains("audio")) {
    if (!doc["audio"].is_array()) throw Error(Errc::FormatError, "\"audio\" must be an array");
    for (const auto& node : doc["audio"]) {
      if (!node.is_object()) throw Error(Errc::FormatError, "audio entry must be an object");
      AudioEmbedding a;
      a.vector = read_vector(node.value("vector", json()), "audio vector");
      a.source_label = node.value("label", std::string());
      if (a.vector.size() != static_cast<std::size_t>(set.dim)) {
        throw Error(Errc::FormatError, "audio embedding dimension differs from \"dim\"");
      }
      if (all_zero(a.vector)) throw Error(Errc::DegenerateEmbedding, "zero audio embedding");
      set.audio.push_back(std::move(a));
    }
  }
  return set;
}

EmbeddingSet load_embeddings_file(const std::filesystem::path& path) {
  const io::Bytes bytes = io::read_file(path);
  return load_embeddings(bytes, path.parent_path());
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionError, "vector dimensions differ");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(Errc::DegenerateEmbedding, "zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

MatchResult top_k_tokens(const AudioEmbedding& audio, const EmbeddingSet& tokens, int k) {
  if (k < 1) throw Error(Errc::ValidationError, "k must be >= 1");
  if (audio.vector.size() != static_cast<std::size_t>(tokens.dim)) {
    throw Error(Errc::DimensionError, "audio embedding has dimension " +
                                          std::to_string(audio.vector.size()) + ", tokens have " +
                                          std::to_string(tokens.dim));
  }

  std::vector<RankedToken> all;
  all.reserve(tokens.entries.size());
  for (const auto& e : tokens.entries) {
    if (e.vector.size() != audio.vector.size()) {
      throw Error(Errc::DimensionError, "token '" + e.token + "' has the wrong dimension");
    }
    all.push_back({e.token, e.index, cosine_similarity(audio.vector, e.vector)});
  }

  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    [](const RankedToken& x, const RankedToken& y) {
                      if (x.similarity != y.similarity) return x.similarity > y.similarity;
                      return x.index < y.index;
                    });
  all.resize(take);
  return MatchResult{std::move(all), k};
}

}  // namespace aadiff
