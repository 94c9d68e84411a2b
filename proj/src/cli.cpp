#include "aadiff/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aadiff/audio.hpp"
#include "aadiff/io.hpp"
#include "aadiff/matching.hpp"
#include "aadiff/mocksynth.hpp"
#include "aadiff/schedule.hpp"

namespace aadiff::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr Rgb kBaseColor{0.2, 0.2, 0.2};
constexpr std::array<Rgb, 4> kPalette{{
    {1.0, 1.0, 1.0},
    {1.0, 0.5, 0.0},
    {0.2, 0.4, 1.0},
    {0.1, 0.9, 0.3},
}};

fs::path prepare_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(Errc::WriteError, "cannot create " + cfg.out.string());
  return cfg.out;
}

struct AnalyzedAudio {
  AudioClip clip;
  Envelope raw;
  Envelope smoothed;
};

AnalyzedAudio analyze(const fs::path& path, const RunConfig& cfg, int window) {
  AnalyzedAudio a;
  a.clip = read_wav_file(path);
  const FrameGrid grid = make_frame_grid(a.clip, cfg.fps);
  a.raw = compute_envelope(a.clip, grid, cfg.metric);
  a.smoothed = smooth(a.raw, SmoothingConfig{window, cfg.mode});
  return a;
}

void require_audio(const RunConfig& cfg) {
  if (cfg.audio.empty()) throw Error(Errc::ConfigError, "at least one --audio file is required");
}

Rgb parse_rgb(const std::string& text) {
  Rgb rgb{};
  std::istringstream in(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= 3) break;
    try {
      std::size_t used = 0;
      rgb[i] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(Errc::ConfigError, "bad color component '" + part + "'");
    }
    ++i;
  }
  if (i != 3 || in.rdbuf()->in_avail() > 0) {
    throw Error(Errc::ConfigError, "color must be r,g,b: '" + text + "'");
  }
  return rgb;
}

// One effect per scheduled token: a Gaussian attention blob, spaced evenly
// along the horizontal midline. Colors come from --effect or the palette.
std::vector<EffectSpec> make_effects(const RunConfig& cfg, const std::vector<int>& token_indices,
                                     std::size_t height, std::size_t width) {
  std::map<int, Rgb> colors;
  for (const std::string& spec : cfg.effects) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(Errc::ConfigError, "--effect expects index=r,g,b");
    int index = -1;
    try {
      index = std::stoi(spec.substr(0, eq));
    } catch (const std::exception&) {
      throw Error(Errc::ConfigError, "bad effect index in '" + spec + "'");
    }
    colors[index] = parse_rgb(spec.substr(eq + 1));
  }

  std::vector<EffectSpec> effects;
  const double n = static_cast<double>(token_indices.size());
  for (std::size_t j = 0; j < token_indices.size(); ++j) {
    EffectSpec e;
    e.token_index = token_indices[j];
    const auto it = colors.find(e.token_index);
    e.color = it != colors.end() ? it->second : kPalette[j % kPalette.size()];
    const double cx = (static_cast<double>(j) + 1.0) * static_cast<double>(width) / (n + 1.0);
    const double cy = 0.5 * static_cast<double>(height - 1);
    const double sigma = static_cast<double>(std::min(height, width)) / (4.0 * n + 2.0);
    e.attention = blob_attention(height, width, cy, cx, sigma);
    effects.push_back(std::move(e));
  }
  return effects;
}

MockImage load_base(const RunConfig& cfg) {
  if (cfg.base) return read_ppm(*cfg.base);
  if (cfg.size == 0) throw Error(Errc::ConfigError, "--size must be positive");
  return MockImage::uniform(cfg.size, cfg.size, kBaseColor);
}

std::string frame_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.ppm", t);
  return buf;
}

const AudioEmbedding& audio_embedding_for(const EmbeddingSet& set, const fs::path& audio,
                                          std::size_t position) {
  for (const AudioEmbedding& a : set.audio) {
    if (!a.source_label.empty() &&
        (a.source_label == audio.filename().string() || a.source_label == audio.string())) {
      return a;
    }
  }
  if (position < set.audio.size()) return set.audio[position];
  throw Error(Errc::ValidationError,
              "embedding file has no audio embedding for " + audio.filename().string());
}

void apply_config_file(RunConfig& cfg, const fs::path& path) {
  json doc;
  try {
    doc = json::parse(io::read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(Errc::FormatError, "config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::FormatError, "config must be a JSON object");
  try {
    if (doc.contains("audio")) {
      cfg.audio.clear();
      if (doc["audio"].is_string()) {
        cfg.audio.emplace_back(doc["audio"].get<std::string>());
      } else {
        for (const auto& a : doc["audio"]) cfg.audio.emplace_back(a.get<std::string>());
      }
    }
    if (doc.contains("embeddings")) cfg.embeddings = doc["embeddings"].get<std::string>();
    if (doc.contains("fps")) cfg.fps = doc["fps"].get<double>();
    if (doc.contains("window")) cfg.window = doc["window"].get<int>();
    if (doc.contains("mode")) cfg.mode = parse_mode(doc["mode"].get<std::string>());
    if (doc.contains("metric")) cfg.metric = parse_metric(doc["metric"].get<std::string>());
    if (doc.contains("k")) cfg.k = doc["k"].get<int>();
    if (doc.contains("gain")) cfg.gain = doc["gain"].get<double>();
    if (doc.contains("floor")) cfg.floor = doc["floor"].get<double>();
    if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
    if (doc.contains("prompt")) cfg.prompt = doc["prompt"].get<std::string>();
    if (doc.contains("schedule")) cfg.schedule = doc["schedule"].get<std::string>();
    if (doc.contains("base")) cfg.base = fs::path(doc["base"].get<std::string>());
    if (doc.contains("effects")) cfg.effects = doc["effects"].get<std::vector<std::string>>();
    if (doc.contains("size")) cfg.size = doc["size"].get<std::size_t>();
    if (doc.contains("windows")) cfg.windows = doc["windows"].get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw Error(Errc::FormatError, "config " + path.string() + ": " + e.what());
  }
}

}  // namespace

void cmd_envelope(const RunConfig& cfg, std::ostream& out) {
  require_audio(cfg);
  std::vector<Envelope> columns;
  std::vector<std::string> names;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < cfg.audio.size(); ++i) {
    AnalyzedAudio a = analyze(cfg.audio[i], cfg, cfg.window);
    const std::string suffix = cfg.audio.size() == 1 ? "" : "_" + std::to_string(i + 1);
    if (i > 0 && a.raw.size() != frames) {
      throw Error(Errc::GridMismatch, "audio inputs yield different frame counts");
    }
    frames = a.raw.size();
    names.push_back("raw" + suffix);
    names.push_back("smoothed" + suffix);
    columns.push_back(std::move(a.raw));
    columns.push_back(std::move(a.smoothed));
  }
  const fs::path dir = prepare_out_dir(cfg);
  io::write_file_atomic(dir / "envelope.csv", envelopes_to_csv(columns, names));
  out << "frames: " << frames << '\n';
}

void cmd_schedule(const RunConfig& cfg, std::ostream& /*out*/) {
  require_audio(cfg);
  if (cfg.embeddings.empty()) throw Error(Errc::ConfigError, "--embeddings is required");
  const EmbeddingSet set = load_embeddings_file(cfg.embeddings);

  std::vector<EditSource> sources;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < cfg.audio.size(); ++i) {
    const AnalyzedAudio a = analyze(cfg.audio[i], cfg, cfg.window);
    if (i > 0 && a.smoothed.size() != frames) {
      throw Error(Errc::GridMismatch, "audio inputs yield different frame counts");
    }
    frames = a.smoothed.size();
    EditSource src;
    src.audio_label = cfg.audio[i].filename().string();
    src.match = top_k_tokens(audio_embedding_for(set, cfg.audio[i], i), set, cfg.k);
    src.multipliers = to_multipliers(a.smoothed, GainConfig{cfg.gain, cfg.floor, Normalization::max});
    sources.push_back(std::move(src));
  }

  std::string prompt;
  if (cfg.prompt) {
    prompt = *cfg.prompt;
  } else if (!set.prompt.empty()) {
    prompt = set.prompt;
  } else {
    std::vector<const TokenEmbedding*> ordered;
    for (const auto& e : set.entries) ordered.push_back(&e);
    std::sort(ordered.begin(), ordered.end(),
              [](const TokenEmbedding* a, const TokenEmbedding* b) { return a->index < b->index; });
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      prompt += (i ? " " : "") + ordered[i]->token;
    }
  }

  const EditSchedule schedule = build_schedule(sources, cfg.fps, frames, std::move(prompt));
  const fs::path dir = prepare_out_dir(cfg);
  io::write_file_atomic(dir / "schedule.json", serialize(schedule));
}

void cmd_render(const RunConfig& cfg, std::ostream& out) {
  if (cfg.schedule.empty()) throw Error(Errc::ConfigError, "--schedule is required");
  const EditSchedule schedule = parse_schedule(io::read_text_file(cfg.schedule));
  const MockImage base = load_base(cfg);

  std::vector<int> indices;
  for (const ScheduleToken& t : schedule.tokens) indices.push_back(t.index);
  const std::vector<EffectSpec> effects = make_effects(cfg, indices, base.height, base.width);
  const std::vector<MockImage> frames = render_video(base, effects, schedule);

  const fs::path dir = prepare_out_dir(cfg);
  const fs::path frame_dir = dir / "frames";
  std::error_code ec;
  fs::create_directories(frame_dir, ec);
  if (ec) throw Error(Errc::WriteError, "cannot create " + frame_dir.string());
  for (std::size_t t = 0; t < frames.size(); ++t) write_ppm(frames[t], frame_dir / frame_name(t));

  std::vector<MetricSeries> series;
  for (const EffectSpec& e : effects) {
    MetricSeries m{"multiplier_" + std::to_string(e.token_index), {}};
    for (const FrameEdits& edits : schedule.frames) {
      const auto it = edits.find(e.token_index);
      m.values.push_back(it != edits.end() ? it->second : 0.0);
    }
    series.push_back(std::move(m));
    series.push_back(proxy_series(frames, e, "proxy_" + std::to_string(e.token_index)));
  }
  if (series.empty()) throw Error(Errc::ConfigError, "schedule has no tokens to render");
  emit_plot_data(series, dir / "metrics.csv");

  for (std::size_t j = 0; j < effects.size(); ++j) {
    const MetricSeries& mult = series[2 * j];
    const MetricSeries& proxy = series[2 * j + 1];
    out << "pearson_r token " << effects[j].token_index << " ("
        << schedule.tokens[j].token << "): ";
    try {
      out << std::fixed << std::setprecision(6) << pearson(mult, proxy) << '\n';
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateSeries) throw;
      out << "undefined (constant series)\n";
    }
  }
}

void cmd_ablate(const RunConfig& cfg, std::ostream& /*out*/) {
  require_audio(cfg);
  if (cfg.windows.empty()) throw Error(Errc::ConfigError, "--windows needs at least one size");
  if (!(cfg.gain >= 0.0) || !(cfg.floor >= 0.0) || cfg.floor > cfg.gain) {
    throw Error(Errc::ValidationError, "need 0 <= floor <= gain");
  }
  const AnalyzedAudio a = analyze(cfg.audio.front(), cfg, 1);
  const MockImage base = load_base(cfg);
  const EffectSpec effect = make_effects(cfg, {0}, base.height, base.width).front();

  // Every window size is normalized against the raw peak so multipliers stay
  // comparable across rows.
  const double peak =
      a.raw.values.empty() ? 0.0 : *std::max_element(a.raw.values.begin(), a.raw.values.end());

  std::ostringstream csv;
  csv << "window,tv_envelope,tv_proxy\n";
  for (int s : cfg.windows) {
    const Envelope smoothed = smooth(a.raw, SmoothingConfig{s, cfg.mode});
    std::vector<double> proxy;
    proxy.reserve(smoothed.size());
    for (double v : smoothed.values) {
      const double m = peak > 0.0 ? cfg.floor + (cfg.gain - cfg.floor) * (v / peak) : cfg.floor;
      proxy.push_back(proxy_score(render_frame(base, effect, m), effect));
    }
    csv << s << ',' << io::format_double(total_variation(smoothed)) << ','
        << io::format_double(total_variation(proxy)) << '\n';
  }
  const fs::path dir = prepare_out_dir(cfg);
  io::write_file_atomic(dir / "ablation.csv", csv.str());
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigError:
      return kUsage;
    case Errc::DecodeError:
    case Errc::UnsupportedFormat:
    case Errc::EmptyAudio:
    case Errc::FormatError:
    case Errc::IoError:
    case Errc::WriteError:
      return kFormat;
    default:
      return kValidation;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audio-synchronized attention edit schedules"};
  app.require_subcommand(1);

  RunConfig defaults;
  std::vector<std::string> audio;
  std::string embeddings, out_dir, config_path, mode, metric, prompt, schedule, base;
  double fps = defaults.fps, gain = defaults.gain, floor = defaults.floor;
  int window = defaults.window, k = defaults.k;
  std::size_t size = defaults.size;
  std::vector<std::string> effects;
  std::vector<int> windows;

  // Keyed "<subcommand>:<flag>".
  std::map<std::string, CLI::Option*> flags;
  auto add = [&](CLI::App* sub, const std::string& name, CLI::Option* opt) {
    flags[sub->get_name() + ":" + name] = opt;
    return opt;
  };
  auto add_common = [&](CLI::App* sub) {
    add(sub, "audio", sub->add_option("--audio", audio, "WAV input (repeatable)"));
    add(sub, "fps", sub->add_option("--fps", fps, "video frame rate"));
    add(sub, "window", sub->add_option("--window", window, "sliding window size in frames"));
    add(sub, "mode", sub->add_option("--mode", mode, "centered | causal"));
    add(sub, "metric", sub->add_option("--metric", metric, "rms | peak"));
    add(sub, "gain", sub->add_option("--gain", gain, "multiplier gain"));
    add(sub, "floor", sub->add_option("--floor", floor, "minimum multiplier"));
    add(sub, "out", sub->add_option("--out", out_dir, "output directory"));
    sub->add_option("--config", config_path, "JSON config file");
  };

  CLI::App* envelope = app.add_subcommand("envelope", "write raw and smoothed envelope CSV");
  add_common(envelope);

  CLI::App* sched = app.add_subcommand("schedule", "build the per-frame edit schedule JSON");
  add_common(sched);
  add(sched, "embeddings", sched->add_option("--embeddings", embeddings, "embedding JSON file"));
  add(sched, "k", sched->add_option("--k", k, "tokens selected per audio input"));
  add(sched, "prompt", sched->add_option("--prompt", prompt, "prompt text stored in the schedule"));

  CLI::App* render = app.add_subcommand("render", "render mock frames and metrics from a schedule");
  add_common(render);
  add(render, "schedule", render->add_option("--schedule", schedule, "schedule JSON file"));

  CLI::App* ablate = app.add_subcommand("ablate", "total variation over window sizes");
  add_common(ablate);
  add(ablate, "windows", ablate->add_option("--windows", windows, "window sizes")->delimiter(','));

  for (CLI::App* sub : {render, ablate}) {
    add(sub, "base", sub->add_option("--base", base, "base image (PPM)"));
    add(sub, "effect", sub->add_option("--effect", effects, "effect color per token, index=r,g,b"));
    add(sub, "size", sub->add_option("--size", size, "default base image size"));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  std::string active;
  for (CLI::App* sub : {envelope, sched, render, ablate}) {
    if (sub->parsed()) active = sub->get_name();
  }
  auto given = [&](const std::string& name) {
    const auto it = flags.find(active + ":" + name);
    return it != flags.end() && it->second->count() > 0;
  };

  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    if (!audio.empty()) cfg.audio.assign(audio.begin(), audio.end());
    if (given("fps")) cfg.fps = fps;
    if (given("window")) cfg.window = window;
    if (!mode.empty()) cfg.mode = parse_mode(mode);
    if (!metric.empty()) cfg.metric = parse_metric(metric);
    if (given("gain")) cfg.gain = gain;
    if (given("floor")) cfg.floor = floor;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (!embeddings.empty()) cfg.embeddings = embeddings;
    if (given("k")) cfg.k = k;
    if (given("prompt")) cfg.prompt = prompt;
    if (!schedule.empty()) cfg.schedule = schedule;
    if (!windows.empty()) cfg.windows = windows;
    if (!base.empty()) cfg.base = fs::path(base);
    if (!effects.empty()) cfg.effects = effects;
    if (given("size")) cfg.size = size;

    if (envelope->parsed()) cmd_envelope(cfg, out);
    else if (sched->parsed()) cmd_schedule(cfg, out);
    else if (render->parsed()) cmd_render(cfg, out);
    else if (ablate->parsed()) cmd_ablate(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}

}  // namespace aadiff::cli
