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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attri2vec/evalkit.hpp"
#include "attri2vec/synthetic.hpp"
#include "attri2vec/trainer.hpp"
#include "attri2vec/walker.hpp"

namespace attri2vec::cli {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> argv;
  /// Empty selects the default next to the primary output.
  std::string manifest;
  bool quiet = false;
};

struct GraphInputs {
  std::string edges;
  std::string attributes;
  std::string labels;
  bool normalize_l2 = false;
};

struct ReportOutput {
  std::string format = "table";
  std::string path;
};

struct WalkCommand {
  GraphInputs graph;
  WalkConfig walk;
  std::size_t threads = 1;
  std::string output;
  std::string dump_walks;
};

struct TrainCommand {
  GraphInputs graph;
  WalkConfig walk;
  std::string corpus;
  std::string mapping = "sigmoid";
  std::size_t dim = 128;
  std::string kernel_scale = "input-dim";
  TrainConfig train;
  std::string model;
  std::string embeddings;
  std::string save_wout;
  std::string warm_model;
  std::string warm_wout;
};

struct InferCommand {
  std::string model;
  std::string attributes;
  bool normalize_l2 = false;
  std::string output;
};

struct ClassifyCommand {
  std::string embeddings;
  std::string labels;
  std::string test_embeddings;
  std::string test_labels;
  ClassifyOptions options;
  ReportOutput report;
};

struct ClusterCommand {
  std::string embeddings;
  std::string labels;
  std::string nmi = "arithmetic";
  ClusterOptions options;
  ReportOutput report;
};

struct LinkPredCommand {
  std::string edges;
  std::string attributes;
  std::string test_edges;
  std::string embeddings;
  std::string op = "weighted-l2";
  std::string test_negatives;
  std::string save_negatives;
  LinkPredictOptions options;
  ReportOutput report;
};

struct StatsCommand {
  GraphInputs graph;
  bool histogram = false;
  std::string output;
};

struct SplitCommand {
  GraphInputs graph;
  double fraction = 0.2;
  std::uint64_t seed = 1;
  std::string output_dir;
};

struct SynthSbmCommand {
  SbmConfig sbm;
  std::string output_dir;
};

struct SynthRandomCommand {
  std::size_t nodes = 1000;
  double avg_degree = 10.0;
  std::size_t features = 1000;
  std::size_t nnz = 20;
  std::uint64_t seed = 1;
  std::string output_dir;
};

struct ReplayCommand {
  std::string manifest;
};

struct SweepCommand {
  std::string file;
  std::string output;
};

void run_walk(const WalkCommand& cmd, Context& ctx);
void run_train(const TrainCommand& cmd, Context& ctx);
void run_infer(const InferCommand& cmd, Context& ctx);
void run_classify(const ClassifyCommand& cmd, Context& ctx);
void run_cluster(const ClusterCommand& cmd, Context& ctx);
void run_linkpred(const LinkPredCommand& cmd, Context& ctx);
void run_stats(const StatsCommand& cmd, Context& ctx);
void run_split(const SplitCommand& cmd, Context& ctx);
void run_synth_sbm(const SynthSbmCommand& cmd, Context& ctx);
void run_synth_random(const SynthRandomCommand& cmd, Context& ctx);
int run_replay(const ReplayCommand& cmd, Context& ctx);
int run_sweep(const SweepCommand& cmd, Context& ctx);

}  // namespace attri2vec::cli
