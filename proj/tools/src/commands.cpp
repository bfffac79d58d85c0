// Copyright 2026 The attri2vec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "attri2vec/inference.hpp"
#include "attri2vec/sampler.hpp"
#include "cli.hpp"
#include "manifest.hpp"

namespace attri2vec::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_text(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_text(path);
  out << text;
  close_text(out, path);
}

void finish_manifest(Manifest& manifest, const Context& ctx, const fs::path& primary) {
  fs::path path = ctx.manifest;
  if (path.empty()) {
    if (primary.empty()) return;
    path = primary;
    path += ".manifest.json";
  }
  manifest.write(path);
}

Manifest start_manifest(const std::string& subcommand, const Context& ctx) {
  Manifest m(subcommand, ctx.argv);
  m.config()["working_directory"] = fs::current_path().string();
  return m;
}

AttributedGraph load_inputs(const GraphInputs& in, Manifest& manifest) {
  std::optional<fs::path> labels;
  if (!in.labels.empty()) labels = in.labels;
  auto g = load_graph(in.edges, in.attributes, labels, IngestOptions{in.normalize_l2});
  manifest.add_input(in.edges);
  manifest.add_input(in.attributes);
  if (labels) manifest.add_input(*labels);
  manifest.config()["normalize_l2"] = in.normalize_l2;
  return g;
}

ordered_json walk_json(const WalkConfig& w) {
  return {{"walk_length", w.walk_length}, {"walks_per_node", w.walks_per_node}, {"window", w.window}};
}

void emit_report(const EvalReport& report, const ReportOutput& where, Context& ctx, Manifest& manifest) {
  std::string text;
  if (where.format == "json") {
    text = report.to_json() + "\n";
  } else if (where.format == "csv") {
    text = report.to_csv();
  } else {
    text = report.to_table();
  }
  manifest.config()["format"] = where.format;
  if (where.path.empty()) {
    ctx.out << text;
  } else {
    write_text(where.path, text);
    manifest.add_output(where.path);
  }
  finish_manifest(manifest, ctx, where.path);
}

/// Prints about twenty progress lines per run.
class ProgressPrinter {
 public:
  ProgressPrinter(std::ostream& err, std::uint64_t total, bool quiet)
      : err_(err), total_(total), step_(std::max<std::uint64_t>(1, total / 20)), quiet_(quiet) {}

  void operator()(const TrainProgress& p) {
    last_loss_ = p.running_loss;
    if (quiet_ || p.iteration < next_) return;
    next_ = p.iteration + step_;
    err_ << fmt::format("train: {:>6.2f}% iter {}/{} lr {:.3e} loss {:.4f}\n",
                        100.0 * static_cast<double>(p.iteration) / static_cast<double>(total_),
                        p.iteration, total_, p.learning_rate, p.running_loss);
  }

  std::optional<double> last_loss() const { return last_loss_; }

 private:
  std::ostream& err_;
  std::uint64_t total_;
  std::uint64_t step_;
  std::uint64_t next_ = 0;
  bool quiet_;
  std::optional<double> last_loss_;
};

void log(Context& ctx, const std::string& line) {
  if (!ctx.quiet) ctx.err << line << "\n";
}

}  // namespace

void run_walk(const WalkCommand& cmd, Context& ctx) {
  cmd.walk.validate();
  auto manifest = start_manifest("walk", ctx);
  const auto g = load_inputs(cmd.graph, manifest);
  manifest.config()["walk"] = walk_json(cmd.walk);
  manifest.config()["threads"] = cmd.threads;
  manifest.set_seed("walk", cmd.walk.seed);

  const auto corpus = build_corpus(g, cmd.walk, cmd.threads);
  save_corpus(corpus, cmd.output);
  manifest.add_output(cmd.output);
  if (!cmd.dump_walks.empty()) {
    auto out = open_text(cmd.dump_walks);
    dump_walks(g, cmd.walk, out);
    close_text(out, cmd.dump_walks);
    manifest.add_output(cmd.dump_walks);
  }
  log(ctx, fmt::format("walk: {} nodes, {} distinct pairs, {} co-occurrences", g.num_nodes(),
                       corpus.num_pairs(), corpus.total_pairs()));
  finish_manifest(manifest, ctx, cmd.output);
}

void run_train(const TrainCommand& cmd, Context& ctx) {
  const auto kind = parse_mapping_kind(cmd.mapping);
  const auto scale = parse_kernel_scale(cmd.kernel_scale);
  // Shape checks before any expensive work.
  MappingModel{kind, 1, cmd.dim, scale};
  cmd.train.validate();
  if (cmd.corpus.empty()) cmd.walk.validate();

  auto manifest = start_manifest("train", ctx);
  const auto g = load_inputs(cmd.graph, manifest);
  ContextCorpus corpus;
  if (cmd.corpus.empty()) {
    corpus = build_corpus(g, cmd.walk, cmd.train.threads);
    manifest.config()["walk"] = walk_json(cmd.walk);
    manifest.set_seed("walk", cmd.walk.seed);
  } else {
    corpus = load_corpus(cmd.corpus, g.num_nodes());
    manifest.add_input(cmd.corpus);
  }
  log(ctx, fmt::format("train: {} nodes, {} edges, {} co-occurrences", g.num_nodes(), g.num_edges(),
                       corpus.total_pairs()));

  MappingModel model;
  if (cmd.warm_model.empty()) {
    model = initial_model(kind, g.feature_dim(), cmd.dim, cmd.train.seed, scale);
  } else {
    model = load_model(cmd.warm_model);
    manifest.add_input(cmd.warm_model);
    if (model.kind() != kind || model.input_dim() != g.feature_dim() || model.output_dim() != cmd.dim ||
        model.kernel_scale() != scale) {
      throw ConfigError("warm-start model does not match --mapping, --dim, --kernel-scale or the attributes");
    }
  }

  TrainConfig config = cmd.train;
  const std::uint64_t iterations = config.max_iterations.value_or(default_iterations(corpus));
  config.max_iterations = iterations;
  Trainer trainer(g, std::move(model), config);
  if (!cmd.warm_wout.empty()) {
    load_output_weights(trainer, cmd.warm_wout);
    manifest.add_input(cmd.warm_wout);
  }

  auto& c = manifest.config();
  c["mapping"] = to_string(kind);
  c["dim"] = cmd.dim;
  c["kernel_scale"] = to_string(scale);
  c["iterations"] = iterations;
  c["initial_lr"] = config.initial_lr;
  c["min_lr"] = config.min_lr;
  c["negatives"] = config.negatives;
  c["noise_exponent"] = config.noise_exponent;
  c["gradient_clip"] = config.gradient_clip;
  c["divergence_factor"] = config.divergence_factor;
  c["threads"] = config.threads;
  manifest.set_seed("train", config.seed);

  ProgressPrinter printer(ctx.err, iterations, ctx.quiet);
  trainer.train(corpus, [&](const TrainProgress& p) { printer(p); });

  ordered_json sidecar;
  sidecar["mapping"] = to_string(kind);
  sidecar["input_dim"] = g.feature_dim();
  sidecar["dim"] = cmd.dim;
  sidecar["kernel_scale"] = to_string(scale);
  sidecar["iterations"] = iterations;
  sidecar["initial_lr"] = config.initial_lr;
  sidecar["min_lr"] = config.min_lr;
  sidecar["negatives"] = config.negatives;
  sidecar["noise_exponent"] = config.noise_exponent;
  sidecar["seed"] = config.seed;
  sidecar["threads"] = config.threads;
  sidecar["corpus_pairs"] = corpus.total_pairs();
  if (auto loss = printer.last_loss()) sidecar["final_loss"] = *loss;
  sidecar["graph"] = ordered_json::parse(summary_json(g));
  save_model(trainer.model(), cmd.model, sidecar.dump(2));
  manifest.add_output(cmd.model);
  fs::path sidecar_path = cmd.model;
  sidecar_path += ".json";
  manifest.add_output(sidecar_path);

  if (!cmd.embeddings.empty()) {
    // Embed with the stored float32 weights so these match a later 'infer'.
    save_embeddings(embed_graph(load_model(cmd.model), g), cmd.embeddings);
    manifest.add_output(cmd.embeddings);
  }
  if (!cmd.save_wout.empty()) {
    save_output_weights(trainer, cmd.save_wout);
    manifest.add_output(cmd.save_wout);
  }
  finish_manifest(manifest, ctx, cmd.model);
}

void run_infer(const InferCommand& cmd, Context& ctx) {
  auto manifest = start_manifest("infer", ctx);
  const auto model = load_model(cmd.model);
  manifest.add_input(cmd.model);
  const auto attributes = load_attributes(cmd.attributes, IngestOptions{cmd.normalize_l2});
  manifest.add_input(cmd.attributes);
  manifest.config()["normalize_l2"] = cmd.normalize_l2;
  save_embeddings(infer(model, attributes), cmd.output);
  manifest.add_output(cmd.output);
  log(ctx, fmt::format("infer: embedded {} nodes with the {} mapping", attributes.size(),
                       to_string(model.kind())));
  finish_manifest(manifest, ctx, cmd.output);
}

void run_classify(const ClassifyCommand& cmd, Context& ctx) {
  auto manifest = start_manifest("eval classify", ctx);
  const auto embeddings = load_embeddings(cmd.embeddings);
  const auto labels = load_labels(cmd.labels);
  manifest.add_input(cmd.embeddings);
  manifest.add_input(cmd.labels);
  auto& c = manifest.config();
  c["train_ratio"] = cmd.options.train_ratio;
  c["repeats"] = cmd.options.repeats;
  c["C"] = cmd.options.regularization;
  c["standardize"] = cmd.options.standardize;
  manifest.set_seed("split", cmd.options.seed);

  EvalReport report;
  if (cmd.test_embeddings.empty()) {
    report = classify(embeddings, labels, cmd.options);
  } else {
    const auto test_embeddings = load_embeddings(cmd.test_embeddings);
    const auto test_labels = load_labels(cmd.test_labels);
    manifest.add_input(cmd.test_embeddings);
    manifest.add_input(cmd.test_labels);
    report = classify_out_of_sample(embeddings, labels, test_embeddings, test_labels, cmd.options);
  }
  emit_report(report, cmd.report, ctx, manifest);
}

void run_cluster(const ClusterCommand& cmd, Context& ctx) {
  ClusterOptions options = cmd.options;
  options.nmi = parse_nmi_normalization(cmd.nmi);
  auto manifest = start_manifest("eval cluster", ctx);
  const auto embeddings = load_embeddings(cmd.embeddings);
  const auto labels = load_labels(cmd.labels);
  manifest.add_input(cmd.embeddings);
  manifest.add_input(cmd.labels);
  auto& c = manifest.config();
  c["k"] = options.k;
  c["repeats"] = options.repeats;
  c["nmi"] = cmd.nmi;
  c["max_iterations"] = options.max_iterations;
  manifest.set_seed("kmeans", options.seed);
  emit_report(cluster(embeddings, labels, options), cmd.report, ctx, manifest);
}

void run_linkpred(const LinkPredCommand& cmd, Context& ctx) {
  const auto op = parse_edge_operator(cmd.op);
  auto manifest = start_manifest("eval linkpred", ctx);
  AttributedGraph graph;
  if (cmd.attributes.empty()) {
    GraphBuilder builder(0);
    for (const auto& [a, b] : load_edge_list(cmd.edges)) builder.add_edge(a, b);
    graph = std::move(builder).build();
  } else {
    graph = load_graph(cmd.edges, cmd.attributes);
    manifest.add_input(cmd.attributes);
  }
  manifest.add_input(cmd.edges);
  const auto test_edges = load_edge_list(cmd.test_edges);
  manifest.add_input(cmd.test_edges);
  const auto embeddings = load_embeddings(cmd.embeddings);
  manifest.add_input(cmd.embeddings);

  LinkPredictOptions options = cmd.options;
  if (!cmd.test_negatives.empty()) {
    options.test_negatives = load_edge_list(cmd.test_negatives);
    manifest.add_input(cmd.test_negatives);
  }
  auto& c = manifest.config();
  c["operator"] = to_string(op);
  c["negative_ratio"] = options.negative_ratio;
  c["C"] = options.regularization;
  c["standardize"] = options.standardize;
  manifest.set_seed("negatives", options.seed);

  const auto result = link_predict(graph, test_edges, embeddings, op, options);
  if (!cmd.save_negatives.empty()) {
    auto out = open_text(cmd.save_negatives);
    write_edge_list(result.test_negatives, out);
    close_text(out, cmd.save_negatives);
    manifest.add_output(cmd.save_negatives);
  }
  emit_report(result.report, cmd.report, ctx, manifest);
}

void run_stats(const StatsCommand& cmd, Context& ctx) {
  auto manifest = start_manifest("stats", ctx);
  const auto g = load_inputs(cmd.graph, manifest);
  auto summary = ordered_json::parse(summary_json(g));
  if (cmd.histogram) {
    auto& hist = summary["degree_histogram"] = ordered_json::object();
    for (const auto& [degree, count] : degree_histogram(g)) hist[std::to_string(degree)] = count;
  }
  const std::string text = summary.dump(2) + "\n";
  if (cmd.output.empty()) {
    ctx.out << text;
  } else {
    write_text(cmd.output, text);
    manifest.add_output(cmd.output);
  }
  finish_manifest(manifest, ctx, cmd.output);
}

void run_split(const SplitCommand& cmd, Context& ctx) {
  auto manifest = start_manifest("split", ctx);
  const auto g = load_inputs(cmd.graph, manifest);
  manifest.config()["fraction"] = cmd.fraction;
  manifest.set_seed("split", cmd.seed);
  const auto split = hold_out_nodes(g, cmd.fraction, cmd.seed);

  const fs::path dir = cmd.output_dir;
  fs::create_directories(dir);
  std::optional<fs::path> in_labels;
  if (split.in_sample.labels()) in_labels = dir / "in_sample.labels";
  save_graph(split.in_sample, dir / "in_sample.edges", dir / "in_sample.attr", in_labels);
  manifest.add_output(dir / "in_sample.edges");
  manifest.add_output(dir / "in_sample.attr");
  if (in_labels) manifest.add_output(*in_labels);

  auto write = [&](const fs::path& path, auto&& body) {
    auto out = open_text(path);
    body(out);
    close_text(out, path);
    manifest.add_output(path);
  };
  write(dir / "held_out.attr", [&](std::ostream& out) { write_attributes(split.held_out, out); });
  if (g.labels()) {
    write(dir / "held_out.labels", [&](std::ostream& out) { write_labels(split.held_out_labels, out); });
  }
  write(dir / "test.edges", [&](std::ostream& out) { write_edge_list(split.test_edges, out); });
  log(ctx, fmt::format("split: {} in-sample nodes, {} held out, {} test edges", split.in_sample.num_nodes(),
                       split.held_out.size(), split.test_edges.size()));
  finish_manifest(manifest, ctx, dir / "split");
}

void run_synth_sbm(const SynthSbmCommand& cmd, Context& ctx) {
  auto manifest = start_manifest("synth sbm", ctx);
  const auto& s = cmd.sbm;
  auto& c = manifest.config();
  c["nodes"] = s.num_nodes;
  c["blocks"] = s.blocks;
  c["p_in"] = s.p_in;
  c["p_out"] = s.p_out;
  c["features"] = s.feature_dim;
  c["indicative"] = s.indicative_dims;
  c["p_on"] = s.p_on;
  c["p_off"] = s.p_off;
  c["noise_density"] = s.noise_density;
  manifest.set_seed("graph", s.seed);
  const auto g = generate_sbm(s);
  const fs::path dir = cmd.output_dir;
  fs::create_directories(dir);
  save_graph(g, dir / "graph.edges", dir / "graph.attr", dir / "graph.labels");
  for (const char* name : {"graph.edges", "graph.attr", "graph.labels"}) manifest.add_output(dir / name);
  log(ctx, fmt::format("synth: {} nodes, {} edges", g.num_nodes(), g.num_edges()));
  finish_manifest(manifest, ctx, dir / "graph");
}

void run_synth_random(const SynthRandomCommand& cmd, Context& ctx) {
  auto manifest = start_manifest("synth random", ctx);
  auto& c = manifest.config();
  c["nodes"] = cmd.nodes;
  c["avg_degree"] = cmd.avg_degree;
  c["features"] = cmd.features;
  c["nnz"] = cmd.nnz;
  manifest.set_seed("graph", cmd.seed);
  const auto g = generate_random_graph(cmd.nodes, cmd.avg_degree, cmd.features, cmd.nnz, cmd.seed);
  const fs::path dir = cmd.output_dir;
  fs::create_directories(dir);
  save_graph(g, dir / "graph.edges", dir / "graph.attr");
  for (const char* name : {"graph.edges", "graph.attr"}) manifest.add_output(dir / name);
  log(ctx, fmt::format("synth: {} nodes, {} edges", g.num_nodes(), g.num_edges()));
  finish_manifest(manifest, ctx, dir / "graph");
}

namespace {

class ScopedWorkingDirectory {
 public:
  explicit ScopedWorkingDirectory(const fs::path& dir) : saved_(fs::current_path()) {
    if (!dir.empty()) fs::current_path(dir);
  }
  ~ScopedWorkingDirectory() {
    std::error_code ec;
    fs::current_path(saved_, ec);
  }
  ScopedWorkingDirectory(const ScopedWorkingDirectory&) = delete;
  ScopedWorkingDirectory& operator=(const ScopedWorkingDirectory&) = delete;

 private:
  fs::path saved_;
};

}  // namespace

int run_replay(const ReplayCommand& cmd, Context& ctx) {
  const fs::path manifest_path = fs::absolute(cmd.manifest);
  const auto j = read_manifest(manifest_path);
  const std::string subcommand = j.value("subcommand", "");
  if (subcommand == "replay" || subcommand == "sweep") {
    throw ConfigError("cannot replay a '" + subcommand + "' manifest");
  }
  std::vector<std::string> args = j["argv"].get<std::vector<std::string>>();
  const auto& config = j["config"];
  if (config.contains("threads")) {
    const auto threads = config["threads"].get<std::size_t>();
    if (threads != 1) log(ctx, "replay: the recorded run used several threads; outputs may differ");
    args.push_back("--threads");
    args.push_back(std::to_string(threads));
  }
  fs::path replay_manifest = manifest_path;
  replay_manifest += ".replay.json";
  args.push_back("--manifest");
  args.push_back(replay_manifest.string());

  ScopedWorkingDirectory cwd(config.value("working_directory", std::string{}));
  for (const auto& [path, hash] : j["inputs"].items()) {
    if (!fs::exists(path)) throw IoError("replay input '" + path + "' is missing");
    if (sha256_file(path) != hash.get<std::string>()) {
      throw ConfigError("replay input '" + path + "' changed since the manifest was written");
    }
  }
  const int status = run(args, ctx.out, ctx.err);
  if (status != kOk) return status;

  std::size_t mismatches = 0;
  for (const auto& [path, hash] : j["outputs"].items()) {
    if (sha256_file(path) != hash.get<std::string>()) {
      ctx.err << "replay: output '" << path << "' differs from the manifest\n";
      ++mismatches;
    }
  }
  if (mismatches) {
    ctx.err << fmt::format("error [replay]: {} of {} outputs differ\n", mismatches, j["outputs"].size());
    return kReplayMismatch;
  }
  log(ctx, fmt::format("replay: {} outputs identical", j["outputs"].size()));
  return kOk;
}

int run_sweep(const SweepCommand& cmd, Context& ctx) {
  std::ifstream in(cmd.file);
  if (!in) throw IoError("cannot open sweep file '" + cmd.file + "'");
  ordered_json plan;
  try {
    plan = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(cmd.file, 1, e.what());
  }
  if (!plan.contains("command") || !plan["command"].is_array()) {
    throw ParseError(cmd.file, 1, "sweep needs a 'command' array");
  }
  const auto base = plan["command"].get<std::vector<std::string>>();
  if (!base.empty() && (base[0] == "sweep" || base[0] == "replay")) {
    throw ConfigError("a sweep cannot run '" + base[0] + "'");
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  if (plan.contains("grid")) {
    for (const auto& [flag, values] : plan["grid"].items()) {
      if (!values.is_array() || values.empty()) {
        throw ParseError(cmd.file, 1, "grid entry '" + flag + "' needs a non-empty array");
      }
      std::vector<std::string> v;
      for (const auto& x : values) v.push_back(x.is_string() ? x.get<std::string>() : x.dump());
      axes.emplace_back(flag, std::move(v));
    }
  }

  ordered_json runs = ordered_json::array();
  int worst = kOk;
  std::vector<std::size_t> pos(axes.size(), 0);
  while (true) {
    std::string tag;
    std::vector<std::string> extra;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& [flag, values] = axes[a];
      std::string name = flag.substr(flag.find_first_not_of('-'));
      if (!tag.empty()) tag += "_";
      tag += name + values[pos[a]];
      extra.push_back(flag);
      extra.push_back(values[pos[a]]);
    }
    if (tag.empty()) tag = "run";
    std::vector<std::string> args;
    for (auto arg : base) {
      for (std::size_t p = arg.find("{tag}"); p != std::string::npos; p = arg.find("{tag}", p + tag.size())) {
        arg.replace(p, 5, tag);
      }
      args.push_back(std::move(arg));
    }
    args.insert(args.end(), extra.begin(), extra.end());
    log(ctx, "sweep: " + tag);
    std::ostringstream report;
    const int status = run(args, report, ctx.err);
    ctx.out << report.str();
    runs.push_back({{"tag", tag}, {"argv", args}, {"status", status}});
    if (status != kOk && worst == kOk) worst = status;

    std::size_t a = 0;
    while (a < axes.size() && ++pos[a] == axes[a].second.size()) pos[a++] = 0;
    if (a == axes.size()) break;
  }

  const ordered_json summary{{"sweep", cmd.file}, {"runs", runs}};
  if (!cmd.output.empty()) write_text(cmd.output, summary.dump(2) + "\n");
  return worst;
}

}  // namespace attri2vec::cli
