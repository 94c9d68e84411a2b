#include "aadiff/schedule.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aadiff/error.hpp"
#include "aadiff/io.hpp"

namespace aadiff {
namespace {

using nlohmann::json;

constexpr int kScheduleVersion = 1;

void write_json_string(std::ostringstream& out, const std::string& s) {
  out << json(s).dump();
}

std::string format_number(double v) {
  // Integral values that fit exactly are written without a fraction ("fps":30).
  if (std::trunc(v) == v && std::abs(v) < 9.0e15) {
    return std::to_string(static_cast<long long>(v));
  }
  return io::format_double(v);
}

int parse_index_key(const std::string& key) {
  int value = 0;
  const char* end = key.data() + key.size();
  auto [ptr, ec] = std::from_chars(key.data(), end, value);
  if (ec != std::errc{} || ptr != end || key.empty() || value < 0 ||
      std::to_string(value) != key) {
    throw Error(Errc::FormatError, "frame key '" + key + "' is not a token index");
  }
  return value;
}

}  // namespace

void validate(const EditSchedule& schedule) {
  if (!(schedule.fps > 0.0) || !std::isfinite(schedule.fps)) {
    throw Error(Errc::ValidationError, "fps must be positive");
  }
  if (schedule.frame_count == 0) throw Error(Errc::ValidationError, "frame_count must be positive");
  if (schedule.frames.size() != schedule.frame_count) {
    throw Error(Errc::ValidationError, "schedule has " + std::to_string(schedule.frames.size()) +
                                           " frame maps for frame_count " +
                                           std::to_string(schedule.frame_count));
  }
  std::set<int> known;
  for (const auto& t : schedule.tokens) {
    if (t.index < 0) throw Error(Errc::ValidationError, "negative token index");
    if (!known.insert(t.index).second) {
      throw Error(Errc::ValidationError, "duplicate token index " + std::to_string(t.index));
    }
  }
  for (std::size_t f = 0; f < schedule.frames.size(); ++f) {
    for (const auto& [index, m] : schedule.frames[f]) {
      if (!known.contains(index)) {
        throw Error(Errc::ValidationError, "frame " + std::to_string(f) + " edits unknown token " +
                                               std::to_string(index));
      }
      if (!(m >= 0.0) || !std::isfinite(m)) {
        throw Error(Errc::ValidationError, "frame " + std::to_string(f) +
                                               " has a negative or non-finite multiplier");
      }
    }
  }
}

EditSchedule build_schedule(std::span<const EditSource> sources, double fps,
                            std::size_t frame_count, std::string prompt) {
  if (sources.empty()) throw Error(Errc::EmptySchedule, "no edit sources");
  if (frame_count == 0) throw Error(Errc::ValidationError, "frame_count must be positive");

  EditSchedule schedule;
  schedule.fps = fps;
  schedule.frame_count = frame_count;
  schedule.prompt = std::move(prompt);
  schedule.frames.resize(frame_count);

  std::map<int, std::string> token_names;
  for (const EditSource& src : sources) {
    if (src.multipliers.values.size() != frame_count) {
      throw Error(Errc::GridMismatch, "source '" + src.audio_label + "' has " +
                                          std::to_string(src.multipliers.values.size()) +
                                          " multipliers for " + std::to_string(frame_count) +
                                          " frames");
    }
    if (src.multipliers.kind != EnvelopeKind::multiplier) {
      throw Error(Errc::ValidationError, "source '" + src.audio_label +
                                             "' does not carry a multiplier envelope");
    }
    if (!(src.weight >= 0.0)) throw Error(Errc::ValidationError, "source weight must be >= 0");
    for (const RankedToken& tok : src.match.ranked) {
      token_names.emplace(tok.index, tok.token);
      for (std::size_t t = 0; t < frame_count; ++t) {
        schedule.frames[t][tok.index] += src.weight * src.multipliers.values[t];
      }
    }
  }
  for (const auto& [index, name] : token_names) schedule.tokens.push_back({index, name});
  validate(schedule);
  return schedule;
}

std::string serialize(const EditSchedule& schedule) {
  validate(schedule);
  std::ostringstream out;
  out << "{\"version\":" << kScheduleVersion << ",\"fps\":" << format_number(schedule.fps)
      << ",\"frame_count\":" << schedule.frame_count << ",\"prompt\":";
  write_json_string(out, schedule.prompt);
  out << ",\"tokens\":[";
  for (std::size_t i = 0; i < schedule.tokens.size(); ++i) {
    if (i) out << ',';
    out << "{\"index\":" << schedule.tokens[i].index << ",\"token\":";
    write_json_string(out, schedule.tokens[i].token);
    out << '}';
  }
  out << "],\"frames\":[";
  for (std::size_t f = 0; f < schedule.frames.size(); ++f) {
    if (f) out << ',';
    out << '{';
    bool first = true;
    for (const auto& [index, m] : schedule.frames[f]) {
      if (!first) out << ',';
      first = false;
      out << '"' << index << "\":" << io::format_double(m);
    }
    out << '}';
  }
  out << "]}\n";
  return out.str();
}

EditSchedule parse_schedule(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::FormatError, e.what());
  }
  auto require = [&](const char* key, auto pred, const char* what) -> const json& {
    if (!doc.is_object() || !doc.contains(key) || !pred(doc[key])) {
      throw Error(Errc::FormatError, std::string("\"") + key + "\" must be " + what);
    }
    return doc[key];
  };

  const json& version = require("version", [](const json& j) { return j.is_number_integer(); },
                                "an integer");
  if (version.get<int>() != kScheduleVersion) {
    throw Error(Errc::FormatError, "unsupported schedule version " + version.dump());
  }

  EditSchedule schedule;
  schedule.fps = require("fps", [](const json& j) { return j.is_number(); }, "a number")
                     .get<double>();
  const json& fc = require("frame_count", [](const json& j) { return j.is_number_integer(); },
                           "an integer");
  if (fc.get<long long>() <= 0) throw Error(Errc::ValidationError, "frame_count must be positive");
  schedule.frame_count = fc.get<std::size_t>();
  schedule.prompt = require("prompt", [](const json& j) { return j.is_string(); }, "a string")
                        .get<std::string>();

  for (const json& t : require("tokens", [](const json& j) { return j.is_array(); }, "an array")) {
    if (!t.is_object() || !t.contains("index") || !t["index"].is_number_integer() ||
        !t.contains("token") || !t["token"].is_string()) {
      throw Error(Errc::FormatError, "token entries need integer \"index\" and string \"token\"");
    }
    schedule.tokens.push_back({t["index"].get<int>(), t["token"].get<std::string>()});
  }

  for (const json& frame : require("frames", [](const json& j) { return j.is_array(); },
                                   "an array")) {
    if (!frame.is_object()) throw Error(Errc::FormatError, "frame entries must be objects");
    FrameEdits edits;
    for (const auto& [key, value] : frame.items()) {
      if (!value.is_number()) throw Error(Errc::FormatError, "multipliers must be numbers");
      edits[parse_index_key(key)] = value.get<double>();
    }
    schedule.frames.push_back(std::move(edits));
  }

  validate(schedule);
  return schedule;
}

}  // namespace aadiff
