#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tdet/annotations.hpp"
#include "tdet/checkpoint.hpp"
#include "tdet/error.hpp"
#include "tdet/features.hpp"
#include "tdet/grounding.hpp"
#include "tdet/io.hpp"
#include "tdet/metrics.hpp"
#include "tdet/npy.hpp"
#include "tdet/postprocess.hpp"
#include "tdet/replay_stats.hpp"
#include "tdet/spotting.hpp"
#include "tdet/synth.hpp"

#ifndef TDET_GIT_DESCRIBE
#define TDET_GIT_DESCRIBE "unknown"
#endif
#ifndef TDET_VERSION
#define TDET_VERSION "0.0.0"
#endif

namespace tdet::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kClassesFile = "classes.json";
constexpr const char* kSplitsFile = "splits.json";
constexpr const char* kEventsFile = "Labels-v2.json";
constexpr const char* kReplaysFile = "Labels-replays.json";
constexpr const char* kSpotResults = "results_spotting.json";
constexpr const char* kGroundResults = "results_grounding.json";
constexpr const char* kManifest = "manifest.json";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- config

/// Reads a JSON config file: a flat object of option names (without dashes)
/// to values, or a run manifest whose "config" object is used.
std::vector<std::pair<std::string, std::vector<std::string>>> read_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (j.is_object() && j.contains("subcommand") && j.contains("config")) j = j["config"];
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  const auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw UsageError("config values must be scalars or arrays of scalars");
  };
  std::vector<std::pair<std::string, std::vector<std::string>>> items;
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;
    std::vector<std::string> inputs;
    if (value.is_array()) {
      for (const auto& v : value) inputs.push_back(scalar(v));
    } else {
      inputs.push_back(scalar(value));
    }
    items.emplace_back(key, std::move(inputs));
  }
  return items;
}

std::string config_path_of(CLI::App* app) {
  const CLI::Option* opt = app->get_option_no_throw("--config");
  return opt && opt->count() > 0 ? opt->as<std::string>() : std::string();
}

/// Fills options not given on the command line from the config file, then
/// enforces required options.
void apply_config(CLI::App* app, const std::vector<std::string>& required) {
  const std::string path = config_path_of(app);
  if (!path.empty()) {
    for (const auto& [key, inputs] : read_config(path)) {
      CLI::Option* opt = key == "config" ? nullptr : app->get_option_no_throw("--" + key);
      if (!opt) throw UsageError("unknown config key '" + key + "'");
      if (opt->count() > 0) continue;
      for (const auto& v : inputs) opt->add_result(v);
      opt->run_callback();
    }
  }
  for (const auto& name : required) {
    if (app->get_option(name)->count() == 0) throw UsageError(name + " is required");
  }
}

void add_config(CLI::App* app) {
  app->add_option("--config", "JSON file of option values; command-line flags override it");
}

json option_values(const CLI::App* app) {
  json out = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    const bool multi = opt->get_expected_max() > 1;
    std::vector<std::string> values = opt->results();
    if (values.empty()) {
      const std::string d = opt->get_default_str();
      if (!d.empty()) values.push_back(d);
      else if (opt->get_expected_max() == 0) values.push_back("false");
    }
    if (multi) {
      out[name] = values;
    } else if (!values.empty()) {
      out[name] = values.back();
    } else {
      out[name] = nullptr;
    }
  }
  return out;
}

std::string command_path(const CLI::App* app) {
  std::vector<std::string> names;
  for (const CLI::App* a = app; a && a->get_parent(); a = a->get_parent()) names.push_back(a->get_name());
  std::string out;
  for (auto it = names.rbegin(); it != names.rend(); ++it) out += (out.empty() ? "" : " ") + *it;
  return out;
}

// ---------------------------------------------------------------- helpers

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
}

/// Runs f(i) for i in [0, n) on up to `jobs` threads; rethrows the error of
/// the lowest failing index.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(jobs));
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct DataDir {
  fs::path root;
  ClassVocabulary vocabulary = ClassVocabulary::soccernet_v2();
  std::map<std::string, std::vector<std::string>> splits;
};

const std::vector<std::string> kSplitNames = {"train", "valid", "test"};

DataDir open_data(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::io, "no such data directory " + root.string());
  DataDir d;
  d.root = root;
  if (fs::exists(root / kClassesFile)) {
    d.vocabulary = ClassVocabulary::from_json(read_file(root / kClassesFile));
  }
  if (fs::exists(root / kSplitsFile)) {
    const json j = read_json(root / kSplitsFile);
    for (const auto& [name, games] : j.items()) {
      if (std::find(kSplitNames.begin(), kSplitNames.end(), name) == kSplitNames.end()) {
        throw Error(ErrorKind::split, "unknown split '" + name + "' in " + kSplitsFile);
      }
      d.splits[name] = games.get<std::vector<std::string>>();
    }
  } else {
    std::vector<std::string> games;
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory()) games.push_back(e.path().filename().string());
    }
    std::sort(games.begin(), games.end());
    d.splits["train"] = games;
  }
  return d;
}

std::vector<std::string> games_in(const DataDir& d, const std::string& split) {
  std::vector<std::string> out;
  for (const auto& name : kSplitNames) {
    if (split != "all" && split != name) continue;
    const auto it = d.splits.find(name);
    if (it != d.splits.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

std::vector<int> halves_of(const fs::path& game_dir) {
  std::vector<int> out;
  for (int h = 1; h <= 2; ++h) {
    const std::string prefix = std::to_string(h) + "_";
    for (const auto& e : fs::directory_iterator(game_dir)) {
      const auto name = e.path().filename().string();
      if (name.starts_with(prefix) && name.ends_with(".npy")) {
        out.push_back(h);
        break;
      }
    }
  }
  return out;
}

LabelFile read_game_labels(const fs::path& game_dir, const std::string& game,
                           const ClassVocabulary& vocab) {
  LabelFile out;
  if (fs::exists(game_dir / kEventsFile)) {
    out = parse_labels(read_file(game_dir / kEventsFile), game, vocab, false);
  }
  if (fs::exists(game_dir / kReplaysFile)) {
    LabelFile r = parse_labels(read_file(game_dir / kReplaysFile), game, vocab, false);
    out.replays = std::move(r.replays);
  }
  return out;
}

// ---------------------------------------------------------------- prediction files

json spot_predictions_to_json(const std::string& game, const std::vector<SpotPrediction>& preds,
                              const ClassVocabulary& vocab) {
  json arr = json::array();
  for (const auto& p : preds) {
    arr.push_back({{"gameTime", format_game_time(p.half, p.time_s)},
                   {"label", vocab.name(p.class_index)},
                   {"half", p.half},
                   {"position_s", p.time_s},
                   {"confidence", p.confidence}});
  }
  return {{"version", 1}, {"game", game}, {"predictions", arr}};
}

std::vector<SpotPrediction> read_spot_predictions(const fs::path& path, const std::string& game,
                                                  const ClassVocabulary& vocab) {
  const json j = read_json(path);
  std::vector<SpotPrediction> out;
  try {
    for (const auto& p : j.at("predictions")) {
      const auto label = p.at("label").get<std::string>();
      const auto idx = vocab.index_of(label);
      if (!idx) throw Error(ErrorKind::vocabulary, "unknown label '" + label + "' in " + path.string());
      SpotPrediction s;
      s.game_id = game;
      if (p.contains("position_s")) {
        s.half = p.at("half").get<int>();
        s.time_s = p.at("position_s").get<int>();
      } else {
        const GameTime t = parse_game_time(p.at("gameTime").get<std::string>());
        s.half = t.half;
        s.time_s = t.seconds;
      }
      s.class_index = *idx;
      s.confidence = p.at("confidence").get<double>();
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  return out;
}

struct QueryResult {
  ReplayQuery query;
  std::vector<GroundingPrediction> predictions;
};

json grounding_results_to_json(const std::string& game, const std::vector<QueryResult>& results) {
  json arr = json::array();
  for (const auto& r : results) {
    json preds = json::array();
    for (const auto& p : r.predictions) {
      preds.push_back({{"position_s", p.time_s}, {"confidence", p.confidence}});
    }
    arr.push_back({{"query",
                    {{"start", format_game_time(r.query.half, r.query.start_s)},
                     {"end", format_game_time(r.query.half, r.query.end_s)}}},
                   {"predictions", preds}});
  }
  return {{"version", 1}, {"game", game}, {"results", arr}};
}

std::pair<std::string, std::vector<QueryResult>> read_grounding_results(const fs::path& path) {
  const json j = read_json(path);
  std::vector<QueryResult> out;
  std::string game;
  try {
    game = j.at("game").get<std::string>();
    for (const auto& r : j.at("results")) {
      QueryResult q;
      const GameTime s = parse_game_time(r.at("query").at("start").get<std::string>());
      const GameTime e = parse_game_time(r.at("query").at("end").get<std::string>());
      q.query = {game, s.half, s.seconds, e.seconds};
      for (const auto& p : r.at("predictions")) {
        q.predictions.push_back(
            {game, s.half, p.at("position_s").get<int>(), p.at("confidence").get<double>()});
      }
      out.push_back(std::move(q));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  return {game, out};
}

ReplayQuery query_of(const ReplayAnnotation& r) {
  return {r.game_id, r.half, r.replay_start_s, r.replay_end_s};
}

bool same_query(const ReplayQuery& a, const ReplayQuery& b) {
  return a.half == b.half && a.start_s == b.start_s && a.end_s == b.end_s;
}

// ---------------------------------------------------------------- commands

struct Context {
  const CLI::App* app = nullptr;
  std::optional<std::uint64_t> seed;
  fs::path manifest_path;
};

void write_manifest(const Context& ctx, std::chrono::steady_clock::time_point started,
                    const json& extra = json::object()) {
  if (ctx.manifest_path.empty()) return;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json m = {{"version", 1},
            {"tool_version", TDET_VERSION},
            {"git_describe", TDET_GIT_DESCRIBE},
            {"subcommand", command_path(ctx.app)},
            {"config", option_values(ctx.app)},
            {"wall_time_s", wall}};
  if (ctx.seed) m["seed"] = *ctx.seed;
  if (!extra.empty()) m["summary"] = extra;
  write_json(ctx.manifest_path, m);
}

// synth

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 0;
  int games = 4;
  int valid_games = 0;
  int test_games = 0;
  int halves = 2;
  int length = 600;
  int dim = 32;
  int classes = 3;
  int events_per_class = 4;
  double sigma = 0.25;
  int min_gap = 25;
  double replay_fraction = 1.0;
  int delay_min = 10;
  int delay_max = 110;
};

json run_synth(const SynthArgs& a) {
  if (a.valid_games + a.test_games >= a.games) {
    throw UsageError("--valid-games + --test-games must leave at least one training game");
  }
  const fs::path root(a.out);
  const ClassVocabulary vocab = ClassVocabulary::soccernet_v2();
  write_file(root / kClassesFile, vocab.to_json());
  json splits = {{"train", json::array()}, {"valid", json::array()}, {"test", json::array()}};
  long events = 0, replays = 0;
  for (int g = 0; g < a.games; ++g) {
    char id[32];
    std::snprintf(id, sizeof id, "synth_%03d", g);
    std::vector<EventAnnotation> all_events;
    std::vector<ReplayAnnotation> all_replays;
    for (int h = 1; h <= a.halves; ++h) {
      SynthConfig c;
      c.game_id = id;
      c.half = h;
      c.length_s = a.length;
      c.dim = a.dim;
      c.num_classes = a.classes;
      c.events_per_class = a.events_per_class;
      c.noise_sigma = a.sigma;
      c.min_event_gap_s = a.min_gap;
      c.replay_fraction = a.replay_fraction;
      c.delay_min_s = a.delay_min;
      c.delay_max_s = a.delay_max;
      c.pattern_seed = derive_seed(a.seed, 0x70617474ULL);
      const SynthHalf half = synth_generate(c, derive_seed(a.seed, static_cast<std::uint64_t>(g * 2 + h)), vocab);
      write_npy_file(root / id / (std::to_string(h) + "_synth.npy"), half.features.data);
      all_events.insert(all_events.end(), half.events.begin(), half.events.end());
      all_replays.insert(all_replays.end(), half.replays.begin(), half.replays.end());
    }
    events += static_cast<long>(all_events.size());
    replays += static_cast<long>(all_replays.size());
    write_file(root / id / kEventsFile, events_to_json(all_events));
    write_file(root / id / kReplaysFile, replays_to_json(all_replays));
    const char* split = g < a.games - a.valid_games - a.test_games ? "train"
                        : g < a.games - a.test_games              ? "valid"
                                                                  : "test";
    splits[split].push_back(id);
  }
  write_json(root / kSplitsFile, splits);
  return {{"games", a.games}, {"events", events}, {"replays", replays}};
}

// spot train

struct SpotTrainArgs {
  std::string data, out;
  std::string head = "transformer";
  std::string mode = "ultra";
  std::optional<double> lr;
  std::optional<int> epochs;
  int batch = 32;
  int chunk = 7;
  int chunk_stride = 0;
  double mixup = 0.2;
  std::uint64_t seed = 0;
  int layers = 3, heads = 4, model_dim = 64, hidden = 256;
  double dropout = 0.1;
  int clusters = 64;
};

json run_spot_train(const SpotTrainArgs& a) {
  const SpottingHead head = parse_spotting_head(a.head);
  if (head == SpottingHead::netvlad && a.chunk % 2 != 0) {
    throw UsageError("the netvlad head splits each chunk into two halves; --chunk must be even");
  }
  TrainSpec spec = TrainSpec::defaults(head, parse_train_mode(a.mode));
  if (a.lr) spec.lr = *a.lr;
  if (a.epochs) spec.epochs = *a.epochs;
  spec.batch_size = a.batch;
  spec.chunk_size_s = a.chunk;
  spec.chunk_stride_s = a.chunk_stride;
  spec.mixup_alpha = a.mixup;
  spec.seed = a.seed;

  const DataDir d = open_data(a.data);
  ChunkSplits splits;
  int dim = -1;
  for (const auto& split : kSplitNames) {
    std::vector<Chunk>& dst = split == "train" ? splits.train : split == "valid" ? splits.valid : splits.test;
    for (const auto& game : games_in(d, split)) {
      const fs::path gdir = d.root / game;
      const LabelFile labels = read_game_labels(gdir, game, d.vocabulary);
      for (int h : halves_of(gdir)) {
        const FeatureSequence f = load_game_half(gdir, game, h);
        dim = f.dim();
        auto chunks = make_chunks(f, labels.events, a.chunk, a.chunk_stride > 0 ? a.chunk_stride : a.chunk);
        for (auto& c : chunks) dst.push_back(std::move(c));
      }
    }
  }
  if (dim < 0) throw Error(ErrorKind::empty_dataset, "no feature files found under " + a.data);

  SpottingModel initial;
  if (head == SpottingHead::transformer) {
    EncoderConfig c = spotting_encoder_config(dim);
    c.num_layers = a.layers;
    c.num_heads = a.heads;
    c.model_dim = a.model_dim;
    c.hidden_dim = a.hidden;
    c.dropout_p = a.dropout;
    initial = make_transformer_spotter(c, a.chunk, derive_seed(a.seed, 1));
  } else {
    NetVladConfig c;
    c.input_dim = dim;
    c.clusters = a.clusters;
    initial = make_netvlad_spotter(c, a.chunk, derive_seed(a.seed, 1));
  }
  const SpottingTrainResult r = train_spotting(splits, spec, std::move(initial));
  const fs::path out(a.out);
  save_checkpoint(out / "model.ckpt", r.model.to_checkpoint(d.vocabulary.names(), r.optimizer));
  write_json(out / "history.json", {{"train_loss", r.history.train_loss},
                                    {"valid_loss", r.history.valid_loss},
                                    {"selected_epoch", r.history.selected_epoch}});
  return {{"chunks", splits.train.size() + splits.valid.size() + splits.test.size()},
          {"selected_epoch", r.history.selected_epoch},
          {"final_train_loss", r.history.train_loss.back()}};
}

// spot infer

struct SpotInferArgs {
  std::string model, data, out;
  std::string split = "all";
  std::optional<int> chunk;
  int nms = 20;
  double threshold = 0.05;
  int jobs = 1;
};

json run_spot_infer(const SpotInferArgs& a) {
  const Checkpoint ck = load_checkpoint(a.model);
  const SpottingModel model = SpottingModel::from_checkpoint(ck);
  const ClassVocabulary vocab(ck.vocabulary);
  const int chunk = a.chunk.value_or(model.chunk_size_s);
  if (model.head == SpottingHead::netvlad && chunk % 2 != 0) {
    throw UsageError("the netvlad head needs an even --chunk");
  }
  const DataDir d = open_data(a.data);
  const std::vector<std::string> games = games_in(d, a.split);
  std::vector<std::size_t> counts(games.size());
  parallel_for(games.size(), a.jobs, [&](std::size_t i) {
    const fs::path gdir = d.root / games[i];
    std::vector<SpotPrediction> preds;
    for (int h : halves_of(gdir)) {
      const FeatureSequence f = load_game_half(gdir, games[i], h);
      auto p = spot_game(model, f, chunk, a.nms, a.threshold);
      preds.insert(preds.end(), p.begin(), p.end());
    }
    counts[i] = preds.size();
    write_json(fs::path(a.out) / games[i] / kSpotResults, spot_predictions_to_json(games[i], preds, vocab));
  });
  return {{"games", games.size()},
          {"predictions", std::accumulate(counts.begin(), counts.end(), std::size_t{0})}};
}

// ground train

struct GroundTrainArgs {
  std::string data, out;
  std::string mode = "ultra";
  double lr = 2e-4;
  int epochs = 40;
  int batch = 32;
  double offset_weight = 1.0;
  std::uint64_t seed = 0;
  int layers = 4, heads = 4, model_dim = 32, hidden = 128;
  double dropout = 0.1;
  int window = 120;
  int positives = 4, negatives = 4;
};

json run_ground_train(const GroundTrainArgs& a) {
  GroundingTrainSpec spec;
  spec.mode = parse_train_mode(a.mode);
  spec.lr = a.lr;
  spec.epochs = a.epochs;
  spec.batch_size = a.batch;
  spec.offset_weight = a.offset_weight;
  spec.seed = a.seed;
  GroundingSampling sampling;
  sampling.window_s = a.window;
  sampling.positives = a.positives;
  sampling.negatives = a.negatives;

  const DataDir d = open_data(a.data);
  EpisodeSplits splits;
  int dim = -1;
  for (const auto& split : kSplitNames) {
    auto& dst = split == "train" ? splits.train : split == "valid" ? splits.valid : splits.test;
    for (const auto& game : games_in(d, split)) {
      const fs::path gdir = d.root / game;
      const LabelFile labels = read_game_labels(gdir, game, d.vocabulary);
      std::map<int, std::shared_ptr<const FeatureSequence>> halves;
      for (int h : halves_of(gdir)) {
        halves[h] = std::make_shared<const FeatureSequence>(load_game_half(gdir, game, h));
        dim = halves[h]->dim();
      }
      for (const auto& r : labels.replays) {
        const auto it = halves.find(r.half);
        if (it == halves.end()) {
          throw Error(ErrorKind::io, "replay in " + game + " half " + std::to_string(r.half) +
                                         " has no feature file");
        }
        dst.push_back({r, it->second});
      }
    }
  }
  if (dim < 0) throw Error(ErrorKind::empty_dataset, "no feature files found under " + a.data);
  EncoderConfig c = grounding_encoder_config(dim);
  c.num_layers = a.layers;
  c.num_heads = a.heads;
  c.model_dim = a.model_dim;
  c.hidden_dim = a.hidden;
  c.dropout_p = a.dropout;
  GroundingModel initial = make_grounding_model(c, derive_seed(a.seed, 1), sampling);
  const GroundingTrainResult r = train_grounding(splits, spec, std::move(initial));
  const fs::path out(a.out);
  save_checkpoint(out / "model.ckpt", r.model.to_checkpoint(d.vocabulary.names(), r.optimizer));
  write_json(out / "history.json", {{"train_loss", r.history.train_loss},
                                    {"valid_loss", r.history.valid_loss},
                                    {"selected_epoch", r.history.selected_epoch},
                                    {"skipped_replays", r.skipped_replays}});
  return {{"replays", splits.train.size() + splits.valid.size() + splits.test.size()},
          {"skipped_replays", r.skipped_replays},
          {"selected_epoch", r.history.selected_epoch},
          {"final_train_loss", r.history.train_loss.back()}};
}

// ground infer

struct GroundInferArgs {
  std::string model, data, out;
  std::string split = "all";
  int stride = 5;
  int filter = 120;
  int nms = 0;
  int jobs = 1;
};

json run_ground_infer(const GroundInferArgs& a) {
  const GroundingModel model = GroundingModel::from_checkpoint(load_checkpoint(a.model));
  const DataDir d = open_data(a.data);
  const std::vector<std::string> games = games_in(d, a.split);
  std::vector<std::size_t> counts(games.size());
  parallel_for(games.size(), a.jobs, [&](std::size_t i) {
    const fs::path gdir = d.root / games[i];
    const LabelFile labels = read_game_labels(gdir, games[i], d.vocabulary);
    std::map<int, FeatureSequence> halves;
    for (int h : halves_of(gdir)) halves.emplace(h, load_game_half(gdir, games[i], h));
    std::vector<QueryResult> results;
    for (const auto& r : labels.replays) {
      const auto it = halves.find(r.half);
      if (it == halves.end()) throw Error(ErrorKind::io, "replay half without features in " + games[i]);
      QueryResult q{query_of(r), infer_grounding(model, query_of(r), it->second, a.stride)};
      if (a.filter > 0) q.predictions = filter_predictions(q.predictions, r.replay_end_s, a.filter);
      if (a.nms > 0) q.predictions = nms_grounding(q.predictions, a.nms);
      results.push_back(std::move(q));
    }
    counts[i] = results.size();
    write_json(fs::path(a.out) / games[i] / kGroundResults, grounding_results_to_json(games[i], results));
  });
  return {{"games", games.size()},
          {"queries", std::accumulate(counts.begin(), counts.end(), std::size_t{0})}};
}

// ground fuse

struct GroundFuseArgs {
  std::string spots, data, out;
  std::string split = "all";
  int window = 42;
  double min_confidence = 0.02;
  double beta1 = 1.25;
  double beta2 = 0.8;
  std::vector<std::string> labels = {"Foul", "Goal", "Shots off target"};
};

json run_ground_fuse(const GroundFuseArgs& a) {
  const DataDir d = open_data(a.data);
  FusionConfig cfg;
  cfg.window_s = a.window;
  cfg.min_confidence = a.min_confidence;
  cfg.beta1 = a.beta1;
  cfg.beta2 = a.beta2;
  for (const auto& l : a.labels) {
    const auto idx = d.vocabulary.index_of(l);
    if (!idx) throw UsageError("unknown label '" + l + "' in --labels");
    cfg.allowed_classes.insert(*idx);
  }
  std::size_t queries = 0;
  for (const auto& game : games_in(d, a.split)) {
    const LabelFile labels = read_game_labels(d.root / game, game, d.vocabulary);
    const fs::path spot_file = fs::path(a.spots) / game / kSpotResults;
    const std::vector<SpotPrediction> spots =
        fs::exists(spot_file) ? read_spot_predictions(spot_file, game, d.vocabulary)
                              : std::vector<SpotPrediction>{};
    std::vector<QueryResult> results;
    for (const auto& r : labels.replays) {
      std::vector<SpotPrediction> same_half;
      for (const auto& s : spots) {
        if (s.half == r.half) same_half.push_back(s);
      }
      results.push_back({query_of(r), fuse_with_spotting(same_half, r.replay_start_s, cfg)});
    }
    queries += results.size();
    write_json(fs::path(a.out) / game / kGroundResults, grounding_results_to_json(game, results));
  }
  return {{"queries", queries}};
}

// ground merge

struct GroundMergeArgs {
  std::vector<std::string> inputs;
  std::string out;
  int nms = 25;
};

std::vector<fs::path> result_files(const fs::path& p) {
  if (fs::is_regular_file(p)) return {p};
  if (!fs::is_directory(p)) throw Error(ErrorKind::io, "no such file or directory " + p.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_directory() && fs::exists(e.path() / kGroundResults)) out.push_back(e.path() / kGroundResults);
  }
  std::sort(out.begin(), out.end());
  return out;
}

json run_ground_merge(const GroundMergeArgs& a) {
  if (a.inputs.size() != 2) throw UsageError("ground merge takes exactly two inputs");
  std::map<std::string, std::vector<QueryResult>> first, second;
  for (const auto& f : result_files(a.inputs[0])) {
    auto [game, r] = read_grounding_results(f);
    first[game] = std::move(r);
  }
  for (const auto& f : result_files(a.inputs[1])) {
    auto [game, r] = read_grounding_results(f);
    second[game] = std::move(r);
  }
  std::set<std::string> games;
  for (const auto& [g, _] : first) games.insert(g);
  for (const auto& [g, _] : second) games.insert(g);
  std::size_t queries = 0;
  for (const auto& game : games) {
    std::vector<QueryResult> merged;
    const auto& a_list = first[game];
    const auto& b_list = second[game];
    std::vector<bool> b_used(b_list.size(), false);
    for (const auto& qa : a_list) {
      std::vector<GroundingPrediction> other;
      for (std::size_t j = 0; j < b_list.size(); ++j) {
        if (!b_used[j] && same_query(qa.query, b_list[j].query)) {
          other = b_list[j].predictions;
          b_used[j] = true;
          break;
        }
      }
      merged.push_back({qa.query, merge_nms(qa.predictions, other, a.nms)});
    }
    for (std::size_t j = 0; j < b_list.size(); ++j) {
      if (!b_used[j]) merged.push_back({b_list[j].query, merge_nms({}, b_list[j].predictions, a.nms)});
    }
    queries += merged.size();
    write_json(fs::path(a.out) / game / kGroundResults, grounding_results_to_json(game, merged));
  }
  return {{"games", games.size()}, {"queries", queries}};
}

// eval spot

struct EvalArgs {
  std::string preds, labels, out;
  std::string split = "all";
  std::string tolerances = "5:60:5";
  int jobs = 1;
};

json run_eval_spot(const EvalArgs& a) {
  const std::vector<int> tol = parse_tolerances(a.tolerances);
  const DataDir d = open_data(a.labels);
  const std::vector<std::string> games = games_in(d, a.split);
  std::vector<std::vector<SpotPrediction>> preds(games.size());
  std::vector<std::vector<EventAnnotation>> gts(games.size());
  parallel_for(games.size(), a.jobs, [&](std::size_t i) {
    gts[i] = read_game_labels(d.root / games[i], games[i], d.vocabulary).events;
    const fs::path f = fs::path(a.preds) / games[i] / kSpotResults;
    if (fs::exists(f)) preds[i] = read_spot_predictions(f, games[i], d.vocabulary);
  });
  std::vector<SpotPrediction> all_preds;
  std::vector<EventAnnotation> all_gts;
  for (std::size_t i = 0; i < games.size(); ++i) {
    all_preds.insert(all_preds.end(), preds[i].begin(), preds[i].end());
    all_gts.insert(all_gts.end(), gts[i].begin(), gts[i].end());
  }
  const EvalReport r = average_map(all_preds, all_gts, tol);
  const std::string text = r.to_json(d.vocabulary);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(fs::path(a.out) / "report.json", text);
    write_file(fs::path(a.out) / "report.csv", r.to_csv(d.vocabulary));
  }
  return {{"average_map", r.average_map}, {"games", games.size()}};
}

json run_eval_ground(const EvalArgs& a) {
  const std::vector<int> tol = parse_tolerances(a.tolerances);
  const DataDir d = open_data(a.labels);
  std::vector<std::vector<GroundingPrediction>> preds;
  std::vector<int> gt;
  for (const auto& game : games_in(d, a.split)) {
    const LabelFile labels = read_game_labels(d.root / game, game, d.vocabulary);
    const fs::path f = fs::path(a.preds) / game / kGroundResults;
    std::vector<QueryResult> results;
    if (fs::exists(f)) results = read_grounding_results(f).second;
    std::vector<bool> used(results.size(), false);
    for (const auto& r : labels.replays) {
      std::vector<GroundingPrediction> p;
      for (std::size_t j = 0; j < results.size(); ++j) {
        if (!used[j] && same_query(query_of(r), results[j].query)) {
          p = results[j].predictions;
          used[j] = true;
          break;
        }
      }
      preds.push_back(std::move(p));
      gt.push_back(r.event_time_s);
    }
  }
  const GroundingEvalReport r = replay_average_ap(preds, gt, tol);
  if (a.out.empty()) {
    std::cout << r.to_json();
  } else {
    write_file(fs::path(a.out) / "report.json", r.to_json());
  }
  return {{"average_ap", r.average_ap}, {"queries", gt.size()}};
}

// analyze replays

struct AnalyzeArgs {
  std::string labels, out, svg;
  std::string split = "all";
  int buckets = 10;
  bool exclude_anomalous = false;
};

json run_analyze(const AnalyzeArgs& a) {
  const DataDir d = open_data(a.labels);
  std::vector<ReplayAnnotation> replays;
  for (const auto& game : games_in(d, a.split)) {
    const auto r = read_game_labels(d.root / game, game, d.vocabulary).replays;
    replays.insert(replays.end(), r.begin(), r.end());
  }
  const ReplayStats s = replay_stats(replays, {a.buckets, a.exclude_anomalous});
  if (a.out.empty()) {
    std::cout << s.to_json();
  } else {
    write_file(a.out, s.to_json());
  }
  if (!a.svg.empty()) write_file(a.svg, s.to_svg());
  return {{"replays", s.total}, {"fraction_in_0_120", s.fraction_in_0_120}};
}

// gradcheck

struct GradcheckArgs {
  int trials = 64;
  double h = 1e-5;
  double threshold = 1e-5;
  int dim = 16;
  std::uint64_t seed = 0;
};

int run_gradcheck(const GradcheckArgs& a) {
  SpottingModel spot = make_spotting_model(SpottingHead::transformer, a.dim, 7, derive_seed(a.seed, 1));
  const GradCheckReport rs = spotting_grad_check(spot, 7, a.trials, a.h, derive_seed(a.seed, 2));
  GroundingModel ground =
      make_grounding_model(grounding_encoder_config(a.dim), derive_seed(a.seed, 3));
  const GradCheckReport rg = grounding_grad_check(ground, a.trials, a.h, derive_seed(a.seed, 4));
  bool ok = true;
  for (const auto& [name, r] : {std::pair{"spotting_transformer", rs}, std::pair{"grounding_transformer", rg}}) {
    const bool pass = r.max_relative_error < a.threshold;
    ok = ok && pass;
    std::cout << json{{"head", name},
                      {"max_relative_error", r.max_relative_error},
                      {"coordinates", r.coordinates},
                      {"worst_tensor", r.worst_tensor},
                      {"pass", pass}}
                     .dump()
              << "\n";
  }
  return ok ? 0 : 1;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  const auto started = std::chrono::steady_clock::now();
  CLI::App app{"Temporal event spotting and replay grounding on per-second feature sequences", "tdet"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(TDET_VERSION) + " (" + TDET_GIT_DESCRIBE + ")");

  Context ctx;
  std::function<int()> action;
  std::map<CLI::App*, std::vector<std::string>> required;
  const auto bind = [&](CLI::App* cmd, std::function<json()> body, std::string manifest_dir,
                        std::uint64_t* seed) {
    add_config(cmd);
    cmd->callback([&ctx, &action, &required, cmd, body = std::move(body), manifest_dir, seed, started]() {
      action = [&ctx, &required, cmd, body, manifest_dir, seed, started]() {
        apply_config(cmd, required[cmd]);
        ctx.app = cmd;
        if (seed) ctx.seed = *seed;
        const json summary = body();
        const auto opt = cmd->get_option_no_throw(manifest_dir);
        if (opt && opt->count() > 0) {
          const std::string out = opt->as<std::string>();
          ctx.manifest_path = manifest_dir == "--out-file" ? fs::path(out + ".manifest.json")
                                                           : fs::path(out) / kManifest;
        }
        write_manifest(ctx, started, summary);
        return 0;
      };
    });
  };

  // synth
  SynthArgs synth;
  {
    auto* c = app.add_subcommand("synth", "Generate a synthetic dataset with planted events and replays");
    c->add_option("--out", synth.out, "Output directory")->required();
    c->add_option("--seed", synth.seed, "Random seed");
    c->add_option("--games", synth.games, "Number of games")->check(CLI::PositiveNumber);
    c->add_option("--valid-games", synth.valid_games, "Games assigned to the validation split")->check(CLI::NonNegativeNumber);
    c->add_option("--test-games", synth.test_games, "Games assigned to the test split")->check(CLI::NonNegativeNumber);
    c->add_option("--halves", synth.halves, "Halves per game")->check(CLI::Range(1, 2));
    c->add_option("--length", synth.length, "Seconds per half")->check(CLI::PositiveNumber);
    c->add_option("--dim", synth.dim, "Feature width")->check(CLI::PositiveNumber);
    c->add_option("--classes", synth.classes, "Number of planted event classes")->check(CLI::Range(1, kNumEventClasses));
    c->add_option("--events-per-class", synth.events_per_class, "Events per class and half")->check(CLI::NonNegativeNumber);
    c->add_option("--sigma", synth.sigma, "Gaussian noise standard deviation")->check(CLI::NonNegativeNumber);
    c->add_option("--min-gap", synth.min_gap, "Minimum seconds between events")->check(CLI::NonNegativeNumber);
    c->add_option("--replay-fraction", synth.replay_fraction, "Fraction of events that get a replay")->check(CLI::Range(0.0, 1.0));
    c->add_option("--delay-min", synth.delay_min, "Minimum replay end minus event time")->check(CLI::PositiveNumber);
    c->add_option("--delay-max", synth.delay_max, "Maximum replay end minus event time")->check(CLI::PositiveNumber);
    bind(c, [&] { return run_synth(synth); }, "--out", &synth.seed);
  }

  auto* spot = app.add_subcommand("spot", "Action spotting");
  spot->require_subcommand(1);
  SpotTrainArgs st;
  {
    auto* c = spot->add_subcommand("train", "Train a spotting head");
    c->add_option("--data", st.data, "Dataset directory")->required();
    c->add_option("--out", st.out, "Output directory for model.ckpt and history.json")->required();
    c->add_option("--head", st.head, "Spotting head")->check(CLI::IsMember({"transformer", "netvlad"}));
    c->add_option("--mode", st.mode, "regular: train split with validation selection; ultra: all splits, last epoch")
        ->check(CLI::IsMember({"regular", "ultra"}));
    c->add_option("--lr", st.lr, "Learning rate (transformer 5e-4, netvlad 1e-4)")->check(CLI::PositiveNumber);
    c->add_option("--epochs", st.epochs, "Epochs (transformer 50, netvlad 40)")->check(CLI::PositiveNumber);
    c->add_option("--batch", st.batch, "Batch size")->check(CLI::PositiveNumber);
    c->add_option("--chunk", st.chunk, "Chunk length in seconds")->check(CLI::PositiveNumber);
    c->add_option("--chunk-stride", st.chunk_stride, "Training chunk stride in seconds; 0 uses --chunk")->check(CLI::NonNegativeNumber);
    c->add_option("--mixup", st.mixup, "Mix-up Beta(alpha, alpha) parameter; 0 disables")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", st.seed, "Random seed");
    c->add_option("--layers", st.layers, "Encoder layers")->check(CLI::PositiveNumber);
    c->add_option("--heads", st.heads, "Attention heads")->check(CLI::PositiveNumber);
    c->add_option("--model-dim", st.model_dim, "Encoder width")->check(CLI::PositiveNumber);
    c->add_option("--hidden", st.hidden, "Feed-forward width")->check(CLI::PositiveNumber);
    c->add_option("--dropout", st.dropout, "Dropout probability")->check(CLI::Range(0.0, 0.99));
    c->add_option("--clusters", st.clusters, "NetVLAD clusters")->check(CLI::PositiveNumber);
    bind(c, [&] { return run_spot_train(st); }, "--out", &st.seed);
  }
  SpotInferArgs si;
  {
    auto* c = spot->add_subcommand("infer", "Run a spotting model over every game of a split");
    c->add_option("--model", si.model, "Checkpoint file")->required()->check(CLI::ExistingFile);
    c->add_option("--data", si.data, "Dataset directory")->required();
    c->add_option("--out", si.out, "Output directory")->required();
    c->add_option("--split", si.split, "Split to process")->check(CLI::IsMember({"all", "train", "valid", "test"}));
    c->add_option("--chunk", si.chunk, "Chunk length in seconds (default: the model's)")->check(CLI::PositiveNumber);
    c->add_option("--nms", si.nms, "NMS window in seconds")->check(CLI::NonNegativeNumber);
    c->add_option("--threshold", si.threshold, "Minimum class score kept before NMS")->check(CLI::Range(0.0, 1.0));
    c->add_option("--jobs", si.jobs, "Parallel games")->check(CLI::PositiveNumber);
    bind(c, [&] { return run_spot_infer(si); }, "--out", nullptr);
  }

  auto* ground = app.add_subcommand("ground", "Replay grounding");
  ground->require_subcommand(1);
  GroundTrainArgs gt;
  {
    auto* c = ground->add_subcommand("train", "Train the grounding head");
    c->add_option("--data", gt.data, "Dataset directory")->required();
    c->add_option("--out", gt.out, "Output directory for model.ckpt and history.json")->required();
    c->add_option("--mode", gt.mode, "regular or ultra")->check(CLI::IsMember({"regular", "ultra"}));
    c->add_option("--lr", gt.lr, "Learning rate")->check(CLI::PositiveNumber);
    c->add_option("--epochs", gt.epochs, "Epochs")->check(CLI::PositiveNumber);
    c->add_option("--batch", gt.batch, "Batch size")->check(CLI::PositiveNumber);
    c->add_option("--offset-weight", gt.offset_weight, "Weight of the offset regression loss")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", gt.seed, "Random seed");
    c->add_option("--layers", gt.layers, "Encoder layers")->check(CLI::PositiveNumber);
    c->add_option("--heads", gt.heads, "Attention heads")->check(CLI::PositiveNumber);
    c->add_option("--model-dim", gt.model_dim, "Encoder width")->check(CLI::PositiveNumber);
    c->add_option("--hidden", gt.hidden, "Feed-forward width")->check(CLI::PositiveNumber);
    c->add_option("--dropout", gt.dropout, "Dropout probability")->check(CLI::Range(0.0, 0.99));
    c->add_option("--window", gt.window, "Seconds before the replay start searched for the event")->check(CLI::Range(30, 100000));
    c->add_option("--positives", gt.positives, "Positive pairs per replay and epoch")->check(CLI::NonNegativeNumber);
    c->add_option("--negatives", gt.negatives, "Negative pairs per replay and epoch")->check(CLI::NonNegativeNumber);
    bind(c, [&] { return run_ground_train(gt); }, "--out", &gt.seed);
  }
  GroundInferArgs gi;
  {
    auto* c = ground->add_subcommand("infer", "Predict replayed-event times for every replay query");
    c->add_option("--model", gi.model, "Checkpoint file")->required()->check(CLI::ExistingFile);
    c->add_option("--data", gi.data, "Dataset directory holding features and replay queries")->required();
    c->add_option("--out", gi.out, "Output directory")->required();
    c->add_option("--split", gi.split, "Split to process")->check(CLI::IsMember({"all", "train", "valid", "test"}));
    c->add_option("--stride", gi.stride, "Candidate chunk stride in seconds")->check(CLI::PositiveNumber);
    c->add_option("--filter", gi.filter, "Keep predictions within this many seconds before the replay end; 0 disables")->check(CLI::NonNegativeNumber);
    c->add_option("--nms", gi.nms, "Per-query NMS window in seconds; 0 disables")->check(CLI::NonNegativeNumber);
    c->add_option("--jobs", gi.jobs, "Parallel games")->check(CLI::PositiveNumber);
    bind(c, [&] { return run_ground_infer(gi); }, "--out", nullptr);
  }
  GroundFuseArgs gf;
  {
    auto* c = ground->add_subcommand("fuse", "Turn spotting predictions near each replay into grounding predictions");
    c->add_option("--spots", gf.spots, "Directory of spotting results")->required();
    c->add_option("--data", gf.data, "Dataset directory holding replay queries")->required();
    c->add_option("--out", gf.out, "Output directory")->required();
    c->add_option("--split", gf.split, "Split to process")->check(CLI::IsMember({"all", "train", "valid", "test"}));
    c->add_option("--W", gf.window, "Seconds before the replay start searched for spots")->check(CLI::NonNegativeNumber);
    c->add_option("--S", gf.min_confidence, "Minimum spot confidence (exclusive)")->check(CLI::Range(0.0, 1.0));
    c->add_option("--b1", gf.beta1, "Scale for the nearest spot")->check(CLI::NonNegativeNumber);
    c->add_option("--b2", gf.beta2, "Scale for the second-nearest spot")->check(CLI::NonNegativeNumber);
    c->add_option("--labels", gf.labels, "Spot labels eligible for fusion")->delimiter(',');
    bind(c, [&] { return run_ground_fuse(gf); }, "--out", nullptr);
  }
  GroundMergeArgs gm;
  {
    auto* c = ground->add_subcommand("merge", "Normalize and NMS-merge two grounding result sets");
    c->add_option("--inputs,inputs", gm.inputs, "Two result files or result directories")->expected(2)->required();
    c->add_option("--out", gm.out, "Output directory")->required();
    c->add_option("--nms", gm.nms, "NMS window in seconds")->check(CLI::NonNegativeNumber);
    bind(c, [&] { return run_ground_merge(gm); }, "--out", nullptr);
  }

  auto* eval = app.add_subcommand("eval", "Evaluation");
  eval->require_subcommand(1);
  EvalArgs es, eg;
  for (auto [args, name, desc] : {std::tuple{&es, "spot", "Average-mAP of spotting results"},
                                  std::tuple{&eg, "ground", "average-AP of grounding results"}}) {
    auto* c = eval->add_subcommand(name, desc);
    c->add_option("--preds", args->preds, "Directory of results")->required();
    c->add_option("--labels", args->labels, "Dataset directory with labels")->required();
    c->add_option("--out", args->out, "Output directory for report.json (stdout when omitted)");
    c->add_option("--split", args->split, "Split to evaluate")->check(CLI::IsMember({"all", "train", "valid", "test"}));
    c->add_option("--tolerances", args->tolerances, "Tolerances in seconds as lo:hi:step or a comma list");
    if (args == &es) {
      c->add_option("--jobs", args->jobs, "Parallel games")->check(CLI::PositiveNumber);
      bind(c, [&] { return run_eval_spot(es); }, "--out", nullptr);
    } else {
      bind(c, [&] { return run_eval_ground(eg); }, "--out", nullptr);
    }
  }

  auto* analyze = app.add_subcommand("analyze", "Dataset analysis");
  analyze->require_subcommand(1);
  AnalyzeArgs an;
  {
    auto* c = analyze->add_subcommand("replays", "Replay interval histogram and label counts");
    c->add_option("--labels", an.labels, "Dataset directory with replay labels")->required();
    c->add_option("--out-file,--out", an.out, "JSON output file (stdout when omitted)");
    c->add_option("--svg", an.svg, "SVG histogram output file");
    c->add_option("--split", an.split, "Split to analyze")->check(CLI::IsMember({"all", "train", "valid", "test"}));
    c->add_option("--buckets", an.buckets, "Histogram bucket width in seconds")->check(CLI::PositiveNumber);
    c->add_flag("--exclude-anomalous", an.exclude_anomalous, "Drop negative intervals from the fraction's denominator");
    bind(c, [&] { return run_analyze(an); }, "--out-file", nullptr);
  }

  GradcheckArgs gc;
  {
    auto* c = app.add_subcommand("gradcheck", "Finite-difference check of both transformer heads");
    add_config(c);
    c->add_option("--trials", gc.trials, "Coordinates checked per head")->check(CLI::PositiveNumber);
    c->add_option("--step", gc.h, "Central difference step")->check(CLI::PositiveNumber);
    c->add_option("--threshold", gc.threshold, "Maximum accepted relative error")->check(CLI::PositiveNumber);
    c->add_option("--dim", gc.dim, "Input feature width")->check(CLI::PositiveNumber);
    c->add_option("--seed", gc.seed, "Random seed");
    c->callback([&, c] {
      action = [&, c] {
        apply_config(c, required[c]);
        return run_gradcheck(gc);
      };
    });
  }

  // Required options are enforced after the config file is applied.
  std::function<void(CLI::App*)> relax = [&](CLI::App* a) {
    for (CLI::Option* opt : a->get_options()) {
      if (opt->get_required()) {
        required[a].push_back("--" + opt->get_single_name());
        opt->required(false);
      }
    }
    for (CLI::App* sub : a->get_subcommands({})) relax(sub);
  };
  relax(&app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }
  try {
    if (!action) throw UsageError("no subcommand selected");
    return action();
  } catch (const UsageError& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const CLI::Error& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const Error& e) {
    print_error(std::string(to_string(e.kind())), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace tdet::cli
