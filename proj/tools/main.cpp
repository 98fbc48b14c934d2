// hyperloc: learn geo-specific n-grams from a geotagged corpus, assign
// hyper-local locations to text items, and run the evaluation harnesses.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperloc/corpus.hpp"
#include "hyperloc/errors.hpp"
#include "hyperloc/evaluator.hpp"
#include "hyperloc/locator.hpp"
#include "hyperloc/modeler.hpp"
#include "hyperloc/synth.hpp"
#include "hyperloc/textproc.hpp"

#ifndef HYPERLOC_STOPWORDS_FILE
#define HYPERLOC_STOPWORDS_FILE "data/stopwords_en.txt"
#endif

namespace {

using nlohmann::json;
using namespace hyperloc;

constexpr int kExitRuntime = 1;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitConfig = 5;

struct IoOpts {
  std::string format = "tsv";
  std::string stopwords = HYPERLOC_STOPWORDS_FILE;

  RecordFormat record_format() const {
    const auto f = record_format_from_name(format);
    if (!f) throw config_error("unknown record format '" + format + "' (use tsv or kv)");
    return *f;
  }
  StopwordSet load_stopwords() const { return StopwordSet::load(stopwords); }
};

void add_io_opts(CLI::App* cmd, IoOpts& io) {
  cmd->add_option("--format", io.format, "corpus record format: tsv or kv")
      ->capture_default_str();
  cmd->add_option("--stopwords", io.stopwords, "stopword file, one token per line")
      ->capture_default_str();
}

struct ModelOpts {
  ModelParams params;
  IndexParams index;
  unsigned threads = 1;
};

void add_model_opts(CLI::App* cmd, ModelOpts& opts) {
  cmd->add_option("--max-area", opts.params.max_area_km2,
                  "largest accepted core-ellipse area s, km^2")
      ->capture_default_str();
  cmd->add_option("--min-ratio", opts.params.min_ratio,
                  "smallest retained fraction tau, in (0,1]")
      ->capture_default_str();
  cmd->add_option("--max-iterations", opts.params.max_iterations,
                  "outlier-removal iteration limit k")
      ->capture_default_str();
  cmd->add_option("--mahalanobis-radius", opts.params.mahalanobis_radius,
                  "core-ellipse scale in standard deviations")
      ->capture_default_str();
  cmd->add_option("--min-users", opts.index.min_users, "drop grams used by fewer unique users")
      ->capture_default_str();
  cmd->add_option("--min-tweets", opts.index.min_tweets,
                  "drop grams appearing in fewer unique items")
      ->capture_default_str();
  cmd->add_option("--max-ngram", opts.index.max_ngram, "longest gram length")
      ->capture_default_str();
  cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)")
      ->capture_default_str();
}

json json_of(const ModelOpts& opts) {
  return {{"max_area_km2", opts.params.max_area_km2},
          {"min_ratio", opts.params.min_ratio},
          {"max_iterations", opts.params.max_iterations},
          {"mahalanobis_radius", opts.params.mahalanobis_radius},
          {"min_users", opts.index.min_users},
          {"min_tweets", opts.index.min_tweets},
          {"max_ngram", opts.index.max_ngram},
          {"threads", opts.threads}};
}

json json_of(const IoOpts& io) {
  return {{"format", io.format}, {"stopwords", io.stopwords}};
}

// Every run leaves its resolved configuration next to the primary output.
void emit_config(const std::string& primary_out, const std::string& config_out, json config) {
  std::string path = config_out;
  if (path.empty()) {
    if (primary_out == "-") return;  // stdout runs need an explicit --config-out
    path = primary_out + ".config.json";
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write config file: " + path);
  out << config.dump(2) << '\n';
}

Instant parse_instant_or_fail(const std::string& text, const char* flag) {
  const auto t = parse_instant(text);
  if (!t)
    throw config_error(std::string(flag) + ": expected YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ, got '" +
                       text + "'");
  return *t;
}

std::vector<ContentItem> load_and_log(const std::string& path, RecordFormat format) {
  auto result = load_corpus(path, format);
  if (result.skipped > 0) {
    std::cerr << "warning: skipped " << result.skipped << " malformed record(s) in " << path
              << '\n';
    for (const auto& w : result.warnings) std::cerr << "  " << w << '\n';
  }
  return std::move(result.items);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write output file: " + path);
  return out;
}

// TAG=PATH pairs for the multi-corpus commands.
std::pair<std::string, std::string> split_tagged(const std::string& spec, const char* flag) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size())
    throw config_error(std::string(flag) + ": expected TAG=PATH, got '" + spec + "'");
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------- synth ----

struct SynthCli {
  SynthParams params;
  IoOpts io;
  std::string out;
  std::string manifest;
  std::string config_out;
  std::string sources = "iphone";
  std::string start = "2013-01-01";
  std::string end = "2014-07-23";
};

int run_synth(const SynthCli& cli) {
  SynthParams params = cli.params;
  params.sources.clear();
  std::string tag;
  std::istringstream src(cli.sources);
  while (std::getline(src, tag, ','))
    if (!tag.empty()) params.sources.push_back(tag);
  params.start = parse_instant_or_fail(cli.start, "--start");
  params.end = parse_instant_or_fail(cli.end, "--end");

  const auto corpus = generate_synthetic(params);
  write_corpus(cli.out, corpus.items, cli.io.record_format());

  const std::string manifest_path =
      cli.manifest.empty() ? cli.out + ".manifest.tsv" : cli.manifest;
  auto manifest = open_out(manifest_path);
  write_manifest(manifest, corpus.manifest);

  emit_config(cli.out, cli.config_out,
              {{"command", "synth"},
               {"out", cli.out},
               {"manifest", manifest_path},
               {"seed", params.seed},
               {"sources", params.sources},
               {"disjoint_vocabulary", params.disjoint_vocabulary},
               {"planted_per_source", params.planted_per_source},
               {"dispersed_per_source", params.dispersed_per_source},
               {"background_per_source", params.background_per_source},
               {"min_phrase_tweets", params.min_phrase_tweets},
               {"max_phrase_tweets", params.max_phrase_tweets},
               {"min_phrase_users", params.min_phrase_users},
               {"max_phrase_users", params.max_phrase_users},
               {"cluster_sigma_km", params.cluster_sigma_km},
               {"noise_fraction", params.noise_fraction},
               {"bbox",
                {params.bbox.lat_min, params.bbox.lon_min, params.bbox.lat_max,
                 params.bbox.lon_max}},
               {"start", cli.start},
               {"end", cli.end},
               {"io", json_of(cli.io)}});
  std::cerr << "synth: wrote " << corpus.items.size() << " items, " << corpus.manifest.size()
            << " manifest phrases\n";
  return 0;
}

// ---------------------------------------------------------------- train ----

struct TrainCli {
  std::string input;
  IoOpts io;
  ModelOpts model;
  std::string source;
  std::size_t sample_size = 0;
  std::uint64_t seed = 1;
  std::string train_end;
  std::string registry_out;
  std::string index_dump;
  std::string config_out;
};

int run_train(const TrainCli& cli) {
  const auto start = std::chrono::steady_clock::now();
  auto items = load_and_log(cli.input, cli.io.record_format());

  if (!cli.source.empty()) items = filter_by_source(items, cli.source, cli.sample_size, cli.seed);
  if (!cli.train_end.empty()) {
    const Instant cutoff = parse_instant_or_fail(cli.train_end, "--train-end");
    std::erase_if(items, [&](const ContentItem& it) { return it.timestamp > cutoff; });
  }

  const std::size_t before = items.size();
  items = with_location(items);
  if (items.size() < before)
    std::cerr << "warning: dropped " << before - items.size()
              << " unlocated item(s) from training\n";
  if (cli.source != "all" && cli.sample_size > 0)
    items = downsample(items, cli.sample_size, cli.seed);
  if (items.empty()) throw config_error("training corpus is empty");

  const auto stopwords = cli.io.load_stopwords();
  const auto index = build_index(items, stopwords, cli.model.index, cli.model.threads);
  if (!cli.index_dump.empty()) {
    auto dump = open_out(cli.index_dump);
    dump_index(dump, index);
  }
  const auto registry =
      build_models(index, cli.model.params, corpus_centroid(items), cli.model.threads);
  save_registry(registry, cli.registry_out);

  emit_config(cli.registry_out, cli.config_out,
              {{"command", "train"},
               {"input", cli.input},
               {"registry_out", cli.registry_out},
               {"source", cli.source},
               {"sample_size", cli.sample_size},
               {"seed", cli.seed},
               {"train_end", cli.train_end},
               {"index_dump", cli.index_dump},
               {"model", json_of(cli.model)},
               {"io", json_of(cli.io)}});

  std::cout << "items\t" << items.size() << "\ncandidates\t" << index.size()
            << "\ngeo_specific\t" << registry.geo_specific_count() << "\nelapsed_s\t"
            << seconds_since(start) << '\n';
  return 0;
}

// -------------------------------------------------------------- predict ----

struct PredictCli {
  std::string input;
  std::string registry;
  IoOpts io;
  double adjacency_km = 0.5;
  unsigned threads = 1;
  std::string out;
  std::string config_out;
};

int run_predict(const PredictCli& cli) {
  const auto registry = load_registry(cli.registry);
  const auto items = load_and_log(cli.input, cli.io.record_format());
  const auto stopwords = cli.io.load_stopwords();
  const auto predictions =
      predict_batch(items, registry, stopwords, cli.adjacency_km, cli.threads);

  if (cli.out == "-") {
    write_predictions(std::cout, predictions);
  } else {
    auto out = open_out(cli.out);
    write_predictions(out, predictions);
  }
  emit_config(cli.out, cli.config_out,
              {{"command", "predict"},
               {"input", cli.input},
               {"registry", cli.registry},
               {"out", cli.out},
               {"adjacency_km", cli.adjacency_km},
               {"threads", cli.threads},
               {"io", json_of(cli.io)}});
  std::cerr << "predict: " << predictions.size() << " item(s)\n";
  return 0;
}

// ------------------------------------------------- evaluate and sweep ------

struct EvalInputs {
  std::string train_file;
  std::string test_file;
  std::string input;
  std::string train_end;
  std::string test_start;
  std::string source;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 1;
  std::string train_label;
  std::string test_label;
};

struct EvalCli {
  EvalInputs in;
  IoOpts io;
  ModelOpts model;
  double delta_km = 1.0;
  double adjacency_km = 0.5;
  std::string report_out;
  std::string config_out;
  std::string vary;          // sweep only
  std::vector<double> grid;  // sweep only
};

std::pair<std::vector<ContentItem>, std::vector<ContentItem>> resolve_eval_inputs(
    const EvalCli& cli) {
  const RecordFormat format = cli.io.record_format();
  std::vector<ContentItem> train, test;

  if (!cli.in.input.empty()) {
    if (cli.in.train_end.empty() || cli.in.test_start.empty())
      throw config_error("--input needs --train-end and --test-start");
    auto items = load_and_log(cli.in.input, format);
    auto split = temporal_split(items, parse_instant_or_fail(cli.in.train_end, "--train-end"),
                                parse_instant_or_fail(cli.in.test_start, "--test-start"));
    for (const auto& w : split.warnings) std::cerr << "warning: " << w << '\n';
    train = std::move(split.train);
    test = std::move(split.test);
  } else {
    if (cli.in.train_file.empty() || cli.in.test_file.empty())
      throw config_error("give either --input with instants, or --train and --test");
    train = load_and_log(cli.in.train_file, format);
    test = load_and_log(cli.in.test_file, format);
  }

  if (!cli.in.source.empty()) {
    train = filter_by_source(train, cli.in.source, cli.in.train_size, cli.in.seed);
    test = filter_by_source(test, cli.in.source, cli.in.test_size, cli.in.seed + 1);
  }
  if (cli.in.source != "all") {
    if (cli.in.train_size > 0) train = downsample(train, cli.in.train_size, cli.in.seed);
    if (cli.in.test_size > 0) test = downsample(test, cli.in.test_size, cli.in.seed + 1);
  }
  return {std::move(train), std::move(test)};
}

json json_of(const EvalInputs& in) {
  return {{"train", in.train_file},     {"test", in.test_file},
          {"input", in.input},          {"train_end", in.train_end},
          {"test_start", in.test_start}, {"source", in.source},
          {"train_size", in.train_size}, {"test_size", in.test_size},
          {"seed", in.seed}};
}

int run_evaluate(const EvalCli& cli, bool is_sweep) {
  auto [train, test] = resolve_eval_inputs(cli);

  EvalOptions opts;
  opts.index = cli.model.index;
  opts.delta_km = cli.delta_km;
  opts.adjacency_km = cli.adjacency_km;
  opts.threads = cli.model.threads;

  const std::string train_label =
      cli.in.train_label.empty() ? (cli.in.source.empty() ? "train" : cli.in.source)
                                 : cli.in.train_label;
  const std::string test_label =
      cli.in.test_label.empty() ? (cli.in.source.empty() ? "test" : cli.in.source)
                                : cli.in.test_label;

  const auto stopwords = cli.io.load_stopwords();
  std::vector<EvalReport> reports;
  if (is_sweep) {
    const auto axis = sweep_axis_from_name(cli.vary);
    if (!axis) throw config_error("--vary must be tau or s, got '" + cli.vary + "'");
    reports = sweep(train, test, *axis, cli.grid, cli.model.params, stopwords, opts, train_label,
                    test_label);
  } else {
    reports.push_back(
        evaluate(train, test, cli.model.params, stopwords, opts, train_label, test_label));
  }

  if (cli.report_out == "-") {
    write_reports(std::cout, reports);
  } else {
    auto out = open_out(cli.report_out);
    write_reports(out, reports);
  }

  json config{{"command", is_sweep ? "sweep" : "evaluate"},
              {"report_out", cli.report_out},
              {"delta_km", cli.delta_km},
              {"adjacency_km", cli.adjacency_km},
              {"inputs", json_of(cli.in)},
              {"model", json_of(cli.model)},
              {"io", json_of(cli.io)}};
  if (is_sweep) {
    config["vary"] = cli.vary;
    config["grid"] = cli.grid;
  }
  emit_config(cli.report_out, cli.config_out, std::move(config));
  std::cerr << (is_sweep ? "sweep" : "evaluate") << ": " << reports.size() << " report row(s)\n";
  return 0;
}

// ----------------------------------------------------------- crossmodel ----

struct CrossCli {
  std::vector<std::string> trains;  // TAG=PATH
  std::string test;                 // TAG=PATH
  IoOpts io;
  ModelOpts model;
  double delta_km = 1.0;
  double adjacency_km = 0.5;
  std::string train_end;
  std::string test_start;
  std::string report_out;
  std::string config_out;
};

int run_crossmodel(const CrossCli& cli) {
  const RecordFormat format = cli.io.record_format();

  std::vector<SourceCorpus> trains;
  for (const auto& spec : cli.trains) {
    const auto [tag, path] = split_tagged(spec, "--train");
    trains.push_back({tag, load_and_log(path, format)});
    if (!cli.train_end.empty()) {
      const Instant cutoff = parse_instant_or_fail(cli.train_end, "--train-end");
      std::erase_if(trains.back().items,
                    [&](const ContentItem& it) { return it.timestamp > cutoff; });
    }
  }
  const auto [test_tag, test_path] = split_tagged(cli.test, "--test");
  SourceCorpus test{test_tag, load_and_log(test_path, format)};
  if (!cli.test_start.empty()) {
    const Instant cutoff = parse_instant_or_fail(cli.test_start, "--test-start");
    std::erase_if(test.items, [&](const ContentItem& it) { return it.timestamp < cutoff; });
  }

  EvalOptions opts;
  opts.index = cli.model.index;
  opts.delta_km = cli.delta_km;
  opts.adjacency_km = cli.adjacency_km;
  opts.threads = cli.model.threads;

  const auto stopwords = cli.io.load_stopwords();
  const auto reports = cross_model(trains, test, cli.model.params, stopwords, opts);

  auto out = open_out(cli.report_out);
  write_reports(out, reports);

  emit_config(cli.report_out, cli.config_out,
              {{"command", "crossmodel"},
               {"trains", cli.trains},
               {"test", cli.test},
               {"train_end", cli.train_end},
               {"test_start", cli.test_start},
               {"report_out", cli.report_out},
               {"delta_km", cli.delta_km},
               {"adjacency_km", cli.adjacency_km},
               {"model", json_of(cli.model)},
               {"io", json_of(cli.io)}});
  std::cerr << "crossmodel: " << reports.size() << " report row(s)\n";
  return 0;
}

// -------------------------------------------------------------- gravity ----

struct GravityCli {
  std::vector<std::string> inputs;  // TAG=PATH
  IoOpts io;
  ModelOpts model;
  std::size_t top = 13;
  std::string train_end;
  std::string out;
  std::string config_out;
};

int run_gravity(const GravityCli& cli) {
  const RecordFormat format = cli.io.record_format();

  struct PerSource {
    std::string tag;
    NGramIndex index;
    ModelRegistry registry;
  };
  std::vector<PerSource> built;
  const auto stopwords = cli.io.load_stopwords();

  for (const auto& spec : cli.inputs) {
    const auto [tag, path] = split_tagged(spec, "--input");
    auto items = load_and_log(path, format);
    if (!cli.train_end.empty()) {
      const Instant cutoff = parse_instant_or_fail(cli.train_end, "--train-end");
      std::erase_if(items, [&](const ContentItem& it) { return it.timestamp > cutoff; });
    }
    items = with_location(items);
    if (items.empty()) throw config_error("gravity: source '" + tag + "' has no located items");

    PerSource src;
    src.tag = tag;
    src.index = build_index(items, stopwords, cli.model.index, cli.model.threads);
    src.registry =
        build_models(src.index, cli.model.params, corpus_centroid(items), cli.model.threads);
    built.push_back(std::move(src));
  }

  std::vector<GravitySource> sources;
  sources.reserve(built.size());
  for (const auto& src : built) sources.push_back({src.tag, &src.registry, &src.index});
  const auto records = gravity(sources, cli.top);

  auto out = open_out(cli.out);
  write_gravity(out, records);

  emit_config(cli.out, cli.config_out,
              {{"command", "gravity"},
               {"inputs", cli.inputs},
               {"top", cli.top},
               {"train_end", cli.train_end},
               {"out", cli.out},
               {"model", json_of(cli.model)},
               {"io", json_of(cli.io)}});
  std::cerr << "gravity: " << records.size() << " record(s)\n";
  return 0;
}

// -------------------------------------------------------------- heatmap ----

struct HeatmapCli {
  std::string input;
  std::string points = "corpus";  // corpus | predictions
  IoOpts io;
  BoundingBox bbox;
  double cell_km = 0.0;
  std::size_t sample = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string config_out;
};

int run_heatmap(const HeatmapCli& cli) {
  std::vector<GeoPoint> locations;
  if (cli.points == "corpus") {
    for (const auto& item : load_and_log(cli.input, cli.io.record_format()))
      if (item.location) locations.push_back(*item.location);
  } else if (cli.points == "predictions") {
    std::ifstream in(cli.input);
    if (!in) throw io_error("cannot open predictions file: " + cli.input);
    for (const auto& pred : read_predictions(in))
      if (pred.location) locations.push_back(*pred.location);
  } else {
    throw config_error("--points must be corpus or predictions, got '" + cli.points + "'");
  }

  if (cli.sample > 0) locations = sample_locations(locations, cli.sample, cli.seed);
  const auto grid = heatmap_grid(locations, cli.bbox, cli.cell_km);
  if (grid.overflow > 0)
    std::cerr << "warning: " << grid.overflow << " location(s) outside the bounding box\n";

  auto out = open_out(cli.out);
  write_heatmap(out, grid);

  emit_config(cli.out, cli.config_out,
              {{"command", "heatmap"},
               {"input", cli.input},
               {"points", cli.points},
               {"bbox", {cli.bbox.lat_min, cli.bbox.lon_min, cli.bbox.lat_max, cli.bbox.lon_max}},
               {"cell_km", cli.cell_km},
               {"sample", cli.sample},
               {"seed", cli.seed},
               {"out", cli.out},
               {"io", json_of(cli.io)}});
  std::cerr << "heatmap: " << grid.rows << "x" << grid.cols << " grid, " << grid.total()
            << " location(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyper-local geotagging of short social-media text"};
  app.require_subcommand(1);

  SynthCli synth_cli;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic benchmark corpus");
  synth_cmd->add_option("--out", synth_cli.out, "corpus output file")->required();
  synth_cmd->add_option("--manifest", synth_cli.manifest,
                        "ground-truth manifest (default: OUT.manifest.tsv)");
  synth_cmd->add_option("--seed", synth_cli.params.seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--sources", synth_cli.sources, "comma-separated source tags")
      ->capture_default_str();
  synth_cmd->add_flag("--disjoint-vocab", synth_cli.params.disjoint_vocabulary,
                      "prefix each source's vocabulary so sources share no grams");
  synth_cmd->add_option("--planted", synth_cli.params.planted_per_source,
                        "clustered phrases per source")
      ->capture_default_str();
  synth_cmd->add_option("--dispersed", synth_cli.params.dispersed_per_source,
                        "dispersed phrases per source")
      ->capture_default_str();
  synth_cmd->add_option("--background", synth_cli.params.background_per_source,
                        "background items per source")
      ->capture_default_str();
  synth_cmd->add_option("--min-phrase-tweets", synth_cli.params.min_phrase_tweets,
                        "fewest tweets per phrase")
      ->capture_default_str();
  synth_cmd->add_option("--max-phrase-tweets", synth_cli.params.max_phrase_tweets,
                        "most tweets per phrase")
      ->capture_default_str();
  synth_cmd->add_option("--cluster-sigma-km", synth_cli.params.cluster_sigma_km,
                        "planted cluster spread")
      ->capture_default_str();
  synth_cmd->add_option("--noise-frac", synth_cli.params.noise_fraction,
                        "fraction of planted tweets drawn from the whole bbox")
      ->capture_default_str();
  synth_cmd->add_option("--start", synth_cli.start, "first timestamp")->capture_default_str();
  synth_cmd->add_option("--end", synth_cli.end, "last timestamp (exclusive)")
      ->capture_default_str();
  synth_cmd->add_option("--lat-min", synth_cli.params.bbox.lat_min, "bbox south edge")
      ->capture_default_str();
  synth_cmd->add_option("--lon-min", synth_cli.params.bbox.lon_min, "bbox west edge")
      ->capture_default_str();
  synth_cmd->add_option("--lat-max", synth_cli.params.bbox.lat_max, "bbox north edge")
      ->capture_default_str();
  synth_cmd->add_option("--lon-max", synth_cli.params.bbox.lon_max, "bbox east edge")
      ->capture_default_str();
  synth_cmd->add_option("--config-out", synth_cli.config_out, "resolved config path");
  add_io_opts(synth_cmd, synth_cli.io);

  TrainCli train_cli;
  auto* train_cmd = app.add_subcommand("train", "learn geo-specific n-gram models");
  train_cmd->add_option("--input", train_cli.input, "training corpus file")->required();
  train_cmd->add_option("--registry-out", train_cli.registry_out, "model registry output")
      ->required();
  train_cmd->add_option("--source", train_cli.source,
                        "keep only this source tag ('all' draws a uniform sample)");
  train_cmd->add_option("--sample-size", train_cli.sample_size,
                        "downsample the training corpus to this size (0 = off)")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_cli.seed, "sampling seed")->capture_default_str();
  train_cmd->add_option("--train-end", train_cli.train_end,
                        "drop items after this instant before training");
  train_cmd->add_option("--index-dump", train_cli.index_dump,
                        "also write the candidate index (gram, users, tweets)");
  train_cmd->add_option("--config-out", train_cli.config_out, "resolved config path");
  add_io_opts(train_cmd, train_cli.io);
  add_model_opts(train_cmd, train_cli.model);

  PredictCli predict_cli;
  auto* predict_cmd = app.add_subcommand("predict", "assign locations to test items");
  predict_cmd->add_option("--input", predict_cli.input, "test corpus file")->required();
  predict_cmd->add_option("--registry", predict_cli.registry, "model registry file")->required();
  predict_cmd->add_option("--out", predict_cli.out, "predictions output ('-' for stdout)")
      ->required();
  predict_cmd->add_option("--adjacency-km", predict_cli.adjacency_km,
                          "largest pairwise center distance still treated as one place")
      ->capture_default_str();
  predict_cmd->add_option("--threads", predict_cli.threads, "worker threads")
      ->capture_default_str();
  predict_cmd->add_option("--config-out", predict_cli.config_out, "resolved config path");
  add_io_opts(predict_cmd, predict_cli.io);

  auto add_eval_options = [](CLI::App* cmd, EvalCli& cli) {
    cmd->add_option("--train", cli.in.train_file, "training corpus file (pre-split mode)");
    cmd->add_option("--test", cli.in.test_file, "test corpus file (pre-split mode)");
    cmd->add_option("--input", cli.in.input, "single corpus, split temporally");
    cmd->add_option("--train-end", cli.in.train_end, "last training instant (split mode)");
    cmd->add_option("--test-start", cli.in.test_start, "first test instant (split mode)");
    cmd->add_option("--source", cli.in.source, "filter both partitions to this source tag");
    cmd->add_option("--train-size", cli.in.train_size, "downsample training items (0 = off)")
        ->capture_default_str();
    cmd->add_option("--test-size", cli.in.test_size, "downsample test items (0 = off)")
        ->capture_default_str();
    cmd->add_option("--seed", cli.in.seed, "sampling seed")->capture_default_str();
    cmd->add_option("--train-label", cli.in.train_label, "train_source label in the report");
    cmd->add_option("--test-label", cli.in.test_label, "test_source label in the report");
    cmd->add_option("--delta-km", cli.delta_km, "accuracy distance threshold delta")
        ->capture_default_str();
    cmd->add_option("--adjacency-km", cli.adjacency_km,
                    "largest pairwise center distance still treated as one place")
        ->capture_default_str();
    cmd->add_option("--report-out", cli.report_out, "report table output ('-' for stdout)")
        ->required();
    cmd->add_option("--config-out", cli.config_out, "resolved config path");
  };

  EvalCli eval_cli;
  auto* eval_cmd = app.add_subcommand("evaluate", "score one train/test cell");
  add_eval_options(eval_cmd, eval_cli);
  add_io_opts(eval_cmd, eval_cli.io);
  add_model_opts(eval_cmd, eval_cli.model);

  EvalCli sweep_cli;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate across a parameter grid");
  add_eval_options(sweep_cmd, sweep_cli);
  sweep_cmd->add_option("--vary", sweep_cli.vary, "swept parameter: tau or s")->required();
  sweep_cmd->add_option("--grid", sweep_cli.grid, "grid values")->required()->delimiter(',');
  add_io_opts(sweep_cmd, sweep_cli.io);
  add_model_opts(sweep_cmd, sweep_cli.model);

  CrossCli cross_cli;
  auto* cross_cmd = app.add_subcommand("crossmodel", "train on several sources, test on one");
  cross_cmd->add_option("--train", cross_cli.trains, "training corpus as TAG=PATH (repeatable)")
      ->required();
  cross_cmd->add_option("--test", cross_cli.test, "test corpus as TAG=PATH")->required();
  cross_cmd->add_option("--train-end", cross_cli.train_end,
                        "drop training items after this instant");
  cross_cmd->add_option("--test-start", cross_cli.test_start,
                        "drop test items before this instant");
  cross_cmd->add_option("--delta-km", cross_cli.delta_km, "accuracy distance threshold delta")
      ->capture_default_str();
  cross_cmd->add_option("--adjacency-km", cross_cli.adjacency_km, "adjacency threshold")
      ->capture_default_str();
  cross_cmd->add_option("--report-out", cross_cli.report_out, "report table output")->required();
  cross_cmd->add_option("--config-out", cross_cli.config_out, "resolved config path");
  add_io_opts(cross_cmd, cross_cli.io);
  add_model_opts(cross_cmd, cross_cli.model);

  GravityCli gravity_cli;
  auto* gravity_cmd =
      app.add_subcommand("gravity", "per-source dispersion of geo-specific grams");
  gravity_cmd->add_option("--input", gravity_cli.inputs,
                          "training corpus as TAG=PATH (repeatable)")
      ->required();
  gravity_cmd->add_option("--top", gravity_cli.top, "keep the m most supported grams per source")
      ->capture_default_str();
  gravity_cmd->add_option("--train-end", gravity_cli.train_end, "drop items after this instant");
  gravity_cmd->add_option("--out", gravity_cli.out, "gravity table output")->required();
  gravity_cmd->add_option("--config-out", gravity_cli.config_out, "resolved config path");
  add_io_opts(gravity_cmd, gravity_cli.io);
  add_model_opts(gravity_cmd, gravity_cli.model);

  HeatmapCli heatmap_cli;
  auto* heatmap_cmd =
      app.add_subcommand("heatmap", "grid counts of corpus or predicted locations");
  heatmap_cmd->add_option("--input", heatmap_cli.input, "corpus or predictions file")->required();
  heatmap_cmd->add_option("--points", heatmap_cli.points, "corpus or predictions")
      ->capture_default_str();
  heatmap_cmd->add_option("--lat-min", heatmap_cli.bbox.lat_min, "bbox south edge")->required();
  heatmap_cmd->add_option("--lon-min", heatmap_cli.bbox.lon_min, "bbox west edge")->required();
  heatmap_cmd->add_option("--lat-max", heatmap_cli.bbox.lat_max, "bbox north edge")->required();
  heatmap_cmd->add_option("--lon-max", heatmap_cli.bbox.lon_max, "bbox east edge")->required();
  heatmap_cmd->add_option("--cell-km", heatmap_cli.cell_km, "grid cell edge in km")->required();
  heatmap_cmd->add_option("--sample", heatmap_cli.sample,
                          "subsample to this many points (0 = all)")
      ->capture_default_str();
  heatmap_cmd->add_option("--seed", heatmap_cli.seed, "sampling seed")->capture_default_str();
  heatmap_cmd->add_option("--out", heatmap_cli.out, "grid output file")->required();
  heatmap_cmd->add_option("--config-out", heatmap_cli.config_out, "resolved config path");
  add_io_opts(heatmap_cmd, heatmap_cli.io);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) return run_synth(synth_cli);
    if (train_cmd->parsed()) return run_train(train_cli);
    if (predict_cmd->parsed()) return run_predict(predict_cli);
    if (eval_cmd->parsed()) return run_evaluate(eval_cli, false);
    if (sweep_cmd->parsed()) return run_evaluate(sweep_cli, true);
    if (cross_cmd->parsed()) return run_crossmodel(cross_cli);
    if (gravity_cmd->parsed()) return run_gravity(gravity_cli);
    if (heatmap_cmd->parsed()) return run_heatmap(heatmap_cli);
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
