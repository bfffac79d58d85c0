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

#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <ostream>

#include "commands.hpp"

namespace attri2vec::cli {

namespace {

void add_graph_inputs(CLI::App* app, GraphInputs& g, bool labels = true) {
  app->add_option("--edges", g.edges, "Edge list, one 'u v' pair per line")->required();
  app->add_option("--attributes", g.attributes, "Sparse attribute file (m=<dim> header)")->required();
  if (labels) app->add_option("--labels", g.labels, "Node labels, 'id<TAB>class' per line");
  app->add_flag("--normalize-l2", g.normalize_l2, "Scale every attribute vector to unit L2 norm");
}

void add_walk_options(CLI::App* app, WalkConfig& w) {
  app->add_option("--walk-length", w.walk_length, "Nodes per random walk (l)")->capture_default_str();
  app->add_option("--walks-per-node", w.walks_per_node, "Walks started at each node (gamma)")
      ->capture_default_str();
  app->add_option("--window", w.window, "Context window size (t)")->capture_default_str();
}

void add_report_output(CLI::App* app, ReportOutput& r) {
  app->add_option("--format", r.format, "Report format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  app->add_option("--output", r.path, "Write the report here instead of stdout");
}

std::size_t parse_thread_count(const char* text) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (end == text || *end != '\0' || v == 0 || v > 4096) {
    throw ConfigError(fmt::format("ATTRI2VEC_THREADS must be an integer in [1, 4096], got '{}'", text));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return kConfig;
    case ErrorCategory::kIo:
      return kIo;
    case ErrorCategory::kParse:
      return kParse;
    case ErrorCategory::kNumeric:
      return kNumeric;
  }
  return kInternal;
}

std::size_t default_threads() {
  const char* env = std::getenv("ATTRI2VEC_THREADS");
  return env && *env ? parse_thread_count(env) : 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, args, {}, false};
  std::function<int()> action;

  try {
    const std::size_t threads = default_threads();

    CLI::App app{"attri2vec: attributed network embedding", "attri2vec"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", "attri2vec 1.0.0");
    app.add_option("--manifest", ctx.manifest, "Where to write the run manifest");
    app.add_flag("--quiet", ctx.quiet, "Suppress progress output");

    WalkCommand walk;
    walk.threads = threads;
    auto* walk_app = app.add_subcommand("walk", "Generate random walks and count window co-occurrences");
    add_graph_inputs(walk_app, walk.graph);
    add_walk_options(walk_app, walk.walk);
    walk_app->add_option("--seed", walk.walk.seed, "Random seed")->capture_default_str();
    walk_app->add_option("--threads", walk.threads, "Worker threads")->check(CLI::PositiveNumber);
    walk_app->add_option("--output", walk.output, "Binary corpus file")->required();
    walk_app->add_option("--dump-walks", walk.dump_walks, "Also write the walks as text");
    walk_app->final_callback([&] { action = [&] { return run_walk(walk, ctx), 0; }; });

    TrainCommand train;
    train.train.threads = threads;
    std::uint64_t iterations = 0;
    auto* train_app = app.add_subcommand("train", "Train a mapping and embed the graph");
    add_graph_inputs(train_app, train.graph);
    add_walk_options(train_app, train.walk);
    train_app->add_option("--corpus", train.corpus, "Reuse a corpus written by 'walk'");
    train_app->add_option("--mapping", train.mapping, "linear, relu, sigmoid or kernel")
        ->capture_default_str();
    train_app->add_option("--dim", train.dim, "Embedding dimension (d)")->capture_default_str();
    train_app->add_option("--kernel-scale", train.kernel_scale, "Kernel output scale: input-dim or output-dim")
        ->capture_default_str();
    train_app->add_option("--negatives", train.train.negatives, "Negative samples per pair (K)")
        ->capture_default_str();
    train_app->add_option("--lr", train.train.initial_lr, "Initial learning rate")->capture_default_str();
    train_app->add_option("--min-lr", train.train.min_lr, "Learning-rate floor")->capture_default_str();
    auto* iter_opt = train_app->add_option("--iterations", iterations,
                                           "SGD steps (default min(1e8, 200 * corpus pairs))");
    train_app->add_option("--noise-exponent", train.train.noise_exponent,
                          "Exponent on context counts for negative sampling")
        ->capture_default_str();
    train_app->add_option("--grad-clip", train.train.gradient_clip, "Clip the per-step gradient norm (0 = off)")
        ->capture_default_str();
    train_app->add_option("--divergence-factor", train.train.divergence_factor,
                          "Abort when the windowed loss grows by this factor")
        ->capture_default_str();
    train_app->add_option("--seed", train.train.seed, "Random seed")->capture_default_str();
    train_app->add_option("--threads", train.train.threads, "Worker threads; 1 is deterministic")
        ->check(CLI::PositiveNumber);
    train_app->add_option("--model", train.model, "Output model file")->required();
    train_app->add_option("--embeddings", train.embeddings, "Output embeddings of the graph's nodes");
    train_app->add_option("--save-wout", train.save_wout, "Also save the output weights");
    train_app->add_option("--warm-model", train.warm_model, "Start from this model");
    train_app->add_option("--warm-wout", train.warm_wout, "Start from these output weights")
        ->needs("--warm-model");
    train_app->final_callback([&] {
      if (iter_opt->count()) train.train.max_iterations = iterations;
      train.walk.seed = train.train.seed;
      action = [&] { return run_train(train, ctx), 0; };
    });

    InferCommand infer;
    auto* infer_app = app.add_subcommand("infer", "Embed nodes from attributes with a trained model");
    infer_app->add_option("--model", infer.model, "Model file")->required();
    infer_app->add_option("--attributes", infer.attributes, "Attribute file")->required();
    infer_app->add_flag("--normalize-l2", infer.normalize_l2, "Scale every attribute vector to unit L2 norm");
    infer_app->add_option("--output", infer.output, "Output embeddings")->required();
    infer_app->final_callback([&] { action = [&] { return run_infer(infer, ctx), 0; }; });

    auto* eval_app = app.add_subcommand("eval", "Evaluate embeddings");
    eval_app->require_subcommand(1);

    ClassifyCommand classify;
    auto* classify_app = eval_app->add_subcommand("classify", "Node classification with random splits");
    classify_app->add_option("--embeddings", classify.embeddings, "Embeddings file")->required();
    classify_app->add_option("--labels", classify.labels, "Labels file")->required();
    classify_app->add_option("--test-embeddings", classify.test_embeddings,
                             "Out-of-sample embeddings to test on");
    classify_app->add_option("--test-labels", classify.test_labels, "Labels of the out-of-sample nodes")
        ->needs("--test-embeddings");
    classify_app->add_option("--train-ratio", classify.options.train_ratio, "Labeled share used for training")
        ->capture_default_str();
    classify_app->add_option("--repeats", classify.options.repeats, "Random splits")->capture_default_str();
    classify_app->add_option("--seed", classify.options.seed, "Random seed")->capture_default_str();
    classify_app->add_option("--C", classify.options.regularization, "Inverse L2 regularization strength")
        ->capture_default_str();
    classify_app->add_flag("--no-standardize{false}", classify.options.standardize,
                           "Use raw features instead of z-scores");
    add_report_output(classify_app, classify.report);
    classify_app->final_callback([&] {
      if (!classify.test_embeddings.empty() && classify.test_labels.empty()) {
        throw ConfigError("--test-embeddings needs --test-labels");
      }
      action = [&] { return run_classify(classify, ctx), 0; };
    });

    ClusterCommand cluster;
    auto* cluster_app = eval_app->add_subcommand("cluster", "k-means node clustering");
    cluster_app->add_option("--embeddings", cluster.embeddings, "Embeddings file")->required();
    cluster_app->add_option("--labels", cluster.labels, "Labels file")->required();
    cluster_app->add_option("--k", cluster.options.k, "Clusters (0 = number of classes)")->capture_default_str();
    cluster_app->add_option("--repeats", cluster.options.repeats, "k-means restarts averaged")
        ->capture_default_str();
    cluster_app->add_option("--seed", cluster.options.seed, "Random seed")->capture_default_str();
    cluster_app->add_option("--nmi", cluster.nmi, "NMI normalization: arithmetic or geometric")
        ->capture_default_str();
    cluster_app->add_option("--max-iterations", cluster.options.max_iterations, "Lloyd iterations")
        ->capture_default_str();
    add_report_output(cluster_app, cluster.report);
    cluster_app->final_callback([&] { action = [&] { return run_cluster(cluster, ctx), 0; }; });

    LinkPredCommand linkpred;
    auto* link_app = eval_app->add_subcommand("linkpred", "Link prediction AUC");
    link_app->add_option("--edges", linkpred.edges, "Training graph edges")->required();
    link_app->add_option("--attributes", linkpred.attributes,
                         "Training graph attributes; fixes the node set when given");
    link_app->add_option("--test-edges", linkpred.test_edges, "Held-out edges")->required();
    link_app->add_option("--embeddings", linkpred.embeddings, "Embeddings of every node involved")->required();
    link_app->add_option("--operator", linkpred.op, "average, hadamard, weighted-l1 or weighted-l2")
        ->capture_default_str();
    link_app->add_option("--negative-ratio", linkpred.options.negative_ratio,
                         "Sampled non-edges per training edge")
        ->capture_default_str();
    link_app->add_option("--test-negatives", linkpred.test_negatives, "Reuse test non-edges from this file");
    link_app->add_option("--save-negatives", linkpred.save_negatives, "Write the sampled test non-edges");
    link_app->add_option("--seed", linkpred.options.seed, "Random seed")->capture_default_str();
    link_app->add_option("--C", linkpred.options.regularization, "Inverse L2 regularization strength")
        ->capture_default_str();
    link_app->add_flag("--no-standardize{false}", linkpred.options.standardize,
                       "Use raw features instead of z-scores");
    add_report_output(link_app, linkpred.report);
    link_app->final_callback([&] { action = [&] { return run_linkpred(linkpred, ctx), 0; }; });

    StatsCommand stats;
    auto* stats_app = app.add_subcommand("stats", "Graph summary");
    add_graph_inputs(stats_app, stats.graph);
    stats_app->add_flag("--histogram", stats.histogram, "Include the degree histogram");
    stats_app->add_option("--output", stats.output, "Write the summary here instead of stdout");
    stats_app->final_callback([&] { action = [&] { return run_stats(stats, ctx), 0; }; });

    SplitCommand split;
    auto* split_app = app.add_subcommand("split", "Hold out nodes for out-of-sample evaluation");
    add_graph_inputs(split_app, split.graph);
    split_app->add_option("--fraction", split.fraction, "Share of nodes held out")->capture_default_str();
    split_app->add_option("--seed", split.seed, "Random seed")->capture_default_str();
    split_app->add_option("--output-dir", split.output_dir, "Directory for the split files")->required();
    split_app->final_callback([&] { action = [&] { return run_split(split, ctx), 0; }; });

    auto* synth_app = app.add_subcommand("synth", "Generate synthetic attributed graphs");
    synth_app->require_subcommand(1);
    SynthSbmCommand sbm;
    auto* sbm_app = synth_app->add_subcommand("sbm", "Stochastic block model with indicative attributes");
    sbm_app->add_option("--nodes", sbm.sbm.num_nodes, "Nodes")->capture_default_str();
    sbm_app->add_option("--blocks", sbm.sbm.blocks, "Communities")->capture_default_str();
    sbm_app->add_option("--p-in", sbm.sbm.p_in, "Edge probability inside a block")->capture_default_str();
    sbm_app->add_option("--p-out", sbm.sbm.p_out, "Edge probability across blocks")->capture_default_str();
    sbm_app->add_option("--features", sbm.sbm.feature_dim, "Attribute dimension")->capture_default_str();
    sbm_app->add_option("--indicative", sbm.sbm.indicative_dims, "Community-indicative dimensions")
        ->capture_default_str();
    sbm_app->add_option("--p-on", sbm.sbm.p_on, "Indicative bit rate inside its block")->capture_default_str();
    sbm_app->add_option("--p-off", sbm.sbm.p_off, "Indicative bit rate elsewhere")->capture_default_str();
    sbm_app->add_option("--noise-density", sbm.sbm.noise_density, "Density of noise dimensions")
        ->capture_default_str();
    sbm_app->add_option("--seed", sbm.sbm.seed, "Random seed")->capture_default_str();
    sbm_app->add_option("--output-dir", sbm.output_dir, "Directory for graph files")->required();
    sbm_app->final_callback([&] { action = [&] { return run_synth_sbm(sbm, ctx), 0; }; });

    SynthRandomCommand random;
    auto* random_app = synth_app->add_subcommand("random", "Uniform random graph with sparse attributes");
    random_app->add_option("--nodes", random.nodes, "Nodes")->capture_default_str();
    random_app->add_option("--avg-degree", random.avg_degree, "Mean degree")->capture_default_str();
    random_app->add_option("--features", random.features, "Attribute dimension")->capture_default_str();
    random_app->add_option("--nnz", random.nnz, "Nonzero attributes per node")->capture_default_str();
    random_app->add_option("--seed", random.seed, "Random seed")->capture_default_str();
    random_app->add_option("--output-dir", random.output_dir, "Directory for graph files")->required();
    random_app->final_callback([&] { action = [&] { return run_synth_random(random, ctx), 0; }; });

    ReplayCommand replay;
    auto* replay_app = app.add_subcommand("replay", "Re-run a manifest and verify its outputs");
    replay_app->add_option("manifest", replay.manifest, "Manifest written by an earlier run")->required();
    replay_app->final_callback([&] { action = [&] { return run_replay(replay, ctx); }; });

    SweepCommand sweep;
    auto* sweep_app = app.add_subcommand("sweep", "Run a command over a parameter grid");
    sweep_app->add_option("file", sweep.file, "Sweep file (JSON)")->required();
    sweep_app->add_option("--output", sweep.output, "Write the run summary here");
    sweep_app->final_callback([&] { action = [&] { return run_sweep(sweep, ctx); }; });

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e, out, err);
      err << "error [config]: " << e.what() << "\n";
      if (dynamic_cast<const CLI::RequiredError*>(&e) || dynamic_cast<const CLI::ExtrasError*>(&e)) {
        err << "run with --help for usage\n";
      }
      return kConfig;
    }
    if (!action) return kConfig;
    return action();
  } catch (const Error& e) {
    err << "error [" << to_string(e.category()) << "]: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::bad_alloc&) {
    err << "error [internal]: out of memory\n";
    return kInternal;
  } catch (const std::exception& e) {
    err << "error [internal]: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace attri2vec::cli
