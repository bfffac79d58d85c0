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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "attri2vec/graph.hpp"
#include "test_support.hpp"

using namespace attri2vec;
using attri2vec::testing::TempDir;
using attri2vec::testing::write_file;

namespace {

AttributeTable parse_attrs(const std::string& text, IngestOptions options = {}) {
  std::istringstream in(text);
  return read_attributes(in, "attrs", options);
}

}  // namespace

TEST_SUITE("attributes") {
  TEST_CASE("parses header and sparse rows") {
    const auto t = parse_attrs("m=5\n# comment\na 0:1 3:0.5\n\nb\nc 4:2\n");
    CHECK(t.feature_dim() == 5);
    REQUIRE(t.size() == 3);
    CHECK(t.nnz() == 3);
    const auto a = t.row(0);
    REQUIRE(a.nnz() == 2);
    CHECK(a.indices[0] == 0);
    CHECK(a.indices[1] == 3);
    CHECK(a.values[1] == 0.5);
    CHECK(t.row(1).nnz() == 0);
    CHECK(t.find("c") == NodeIndex{2});
    CHECK_FALSE(t.find("z"));
  }

  TEST_CASE("unsorted entries are sorted") {
    const auto t = parse_attrs("m=4\nx 3:1 1:2\n");
    CHECK(t.row(0).indices[0] == 1);
    CHECK(t.row(0).values[0] == 2.0);
  }

  TEST_CASE("errors carry the line number") {
    auto line_of = [](const std::string& text) {
      try {
        parse_attrs(text);
      } catch (const ParseError& e) {
        return e.line();
      }
      return std::size_t{0};
    };
    CHECK(line_of("a 0:1\n") == 1);
    CHECK(line_of("m=3\na 0:1\nb 3:1\n") == 3);
    CHECK(line_of("m=3\na 0:1 0:2\n") == 2);
    CHECK(line_of("m=3\na 0:1\na 1:1\n") == 3);
    CHECK(line_of("m=3\na 1-1\n") == 2);
    CHECK(line_of("m=3\na 1:nan\n") == 2);
    CHECK(line_of("m=x\n") == 1);
    CHECK_THROWS_AS(parse_attrs(""), ParseError);
  }

  TEST_CASE("L2 normalisation leaves zero rows alone") {
    const auto t = parse_attrs("m=3\na 0:3 2:4\nb\n", IngestOptions{true});
    CHECK(t.row(0).values[0] == doctest::Approx(0.6));
    CHECK(t.row(0).values[1] == doctest::Approx(0.8));
    CHECK(t.row(1).nnz() == 0);
  }

  TEST_CASE("write then read is the identity") {
    const auto t = parse_attrs("m=6\na 0:0.1 5:1e-300\nb 2:3.3333333333333335\nc\n");
    std::ostringstream out;
    write_attributes(t, out);
    const auto u = parse_attrs(out.str());
    REQUIRE(u.size() == t.size());
    for (NodeIndex i = 0; i < t.size(); ++i) {
      CHECK(u.name(i) == t.name(i));
      const auto r = t.row(i), s = u.row(i);
      CHECK(std::equal(r.values.begin(), r.values.end(), s.values.begin(), s.values.end()));
    }
  }

  TEST_CASE("add_row validation") {
    AttributeTable t(2);
    CHECK_THROWS_AS(t.add_row("a", {{2, 1.0}}), ConfigError);
    CHECK_THROWS_AS(t.add_row("a", {{0, INFINITY}}), ConfigError);
    t.add_row("a", {});
    CHECK_THROWS_AS(t.add_row("a", {}), ConfigError);
  }
}

TEST_SUITE("labels and edges") {
  TEST_CASE("numeric class names sort numerically") {
    std::istringstream in("a\t10\nb\t2\nc\t10\n");
    const auto l = read_labels(in);
    CHECK(l.class_names == std::vector<std::string>{"2", "10"});
    CHECK(l.class_ids == std::vector<int>{1, 0, 1});
  }

  TEST_CASE("text class names sort lexically") {
    std::istringstream in("a beta\nb alpha\n");
    const auto l = read_labels(in);
    CHECK(l.class_names == std::vector<std::string>{"alpha", "beta"});
    CHECK(l.class_ids == std::vector<int>{1, 0});
  }

  TEST_CASE("label errors") {
    std::istringstream dup("a 1\na 2\n");
    CHECK_THROWS_AS(read_labels(dup), ParseError);
    std::istringstream bad("a\n");
    CHECK_THROWS_AS(read_labels(bad), ParseError);
  }

  TEST_CASE("edge list keeps order and rejects odd lines") {
    std::istringstream in("1 2 # trailing\n3 1\n");
    const auto e = read_edge_list(in);
    REQUIRE(e.size() == 2);
    CHECK(e[1] == NamedEdge{"3", "1"});
    std::istringstream bad("1 2 3\n");
    CHECK_THROWS_AS(read_edge_list(bad), ParseError);
  }
}

TEST_SUITE("graph") {
  TEST_CASE("builder symmetrises, deduplicates and drops self-loops") {
    GraphBuilder b(1);
    for (const char* n : {"a", "b", "c"}) b.add_node(n);
    b.add_edge("a", "b");
    b.add_edge("b", "a");
    b.add_edge("c", "c");
    b.add_edge("c", "a");
    const auto g = std::move(b).build();
    CHECK(g.num_edges() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 0));
    CHECK_FALSE(g.has_edge(2, 2));
    CHECK(g.degree(0) == 2);
    CHECK(g.edges() == std::vector<IndexEdge>{{0, 1}, {0, 2}});
  }

  TEST_CASE("random graphs satisfy adjacency invariants") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 2 + rng() % 30;
      GraphBuilder b(0);
      for (std::size_t i = 0; i < n; ++i) b.add_node(std::to_string(i));
      std::set<std::pair<NodeIndex, NodeIndex>> truth;
      const std::size_t m = rng() % (3 * n);
      for (std::size_t e = 0; e < m; ++e) {
        const auto u = static_cast<NodeIndex>(rng() % n), v = static_cast<NodeIndex>(rng() % n);
        b.add_edge(u, v);
        if (u != v) truth.emplace(std::min(u, v), std::max(u, v));
      }
      const auto g = std::move(b).build();
      CHECK(g.num_edges() == truth.size());
      std::size_t degree_sum = 0;
      for (NodeIndex i = 0; i < n; ++i) {
        const auto adj = g.neighbors(i);
        degree_sum += adj.size();
        CHECK(std::is_sorted(adj.begin(), adj.end()));
        CHECK(std::adjacent_find(adj.begin(), adj.end()) == adj.end());
        for (NodeIndex j : adj) {
          CHECK(j != i);
          CHECK(g.has_edge(j, i));
        }
      }
      CHECK(degree_sum == 2 * truth.size());
      const auto edges = g.edges();
      CHECK(std::set<std::pair<NodeIndex, NodeIndex>>(edges.begin(), edges.end()) == truth);
      std::size_t hist_nodes = 0;
      for (const auto& [d, c] : degree_histogram(g)) hist_nodes += c;
      CHECK(hist_nodes == n);
    }
  }

  TEST_CASE("load_graph orders attribute rows first, then edge-only nodes") {
    TempDir dir;
    write_file(dir / "g.edges", "x y\nb x\na b\n");
    write_file(dir / "g.attr", "m=3\nb 0:1\na 1:1 2:2\n");
    write_file(dir / "g.labels", "a\t1\nx\t0\n");
    const auto g = load_graph(dir / "g.edges", dir / "g.attr", dir / "g.labels");
    REQUIRE(g.num_nodes() == 4);
    CHECK(g.name(0) == "b");
    CHECK(g.name(1) == "a");
    CHECK(g.name(2) == "x");
    CHECK(g.name(3) == "y");
    CHECK(g.attributes(3).nnz() == 0);
    CHECK(g.num_edges() == 3);
    REQUIRE(g.labels());
    CHECK(g.labels()->class_of == std::vector<int>{-1, 1, 0, -1});
    CHECK(g.labels()->num_labeled() == 2);
  }

  TEST_CASE("save and reload is idempotent") {
    TempDir dir;
    write_file(dir / "g.edges", "n3 n1\nn1 n2\nn4 n1\n");
    write_file(dir / "g.attr", "m=4\nn1 0:0.25 3:1\nn2 1:0.1\nn3\n");
    write_file(dir / "g.labels", "n2\tred\nn1\tblue\nn4\tred\n");
    const auto g = load_graph(dir / "g.edges", dir / "g.attr", dir / "g.labels");
    save_graph(g, dir / "h.edges", dir / "h.attr", dir / "h.labels");
    const auto h = load_graph(dir / "h.edges", dir / "h.attr", dir / "h.labels");
    CHECK(attri2vec::testing::same_graph(g, h));
  }

  TEST_CASE("labels for unknown nodes are rejected") {
    TempDir dir;
    write_file(dir / "g.edges", "a b\n");
    write_file(dir / "g.attr", "m=1\na\nb\n");
    write_file(dir / "g.labels", "c\t1\n");
    CHECK_THROWS_AS(load_graph(dir / "g.edges", dir / "g.attr", dir / "g.labels"), ConfigError);
  }

  TEST_CASE("missing files raise IoError") {
    TempDir dir;
    CHECK_THROWS_AS(load_graph(dir / "none.edges", dir / "none.attr"), IoError);
  }

  TEST_CASE("induced subgraph keeps relative order, attributes and labels") {
    TempDir dir;
    write_file(dir / "g.edges", "a b\nb c\nc d\nd a\n");
    write_file(dir / "g.attr", "m=2\na 0:1\nb 1:1\nc 0:2\nd 1:2\n");
    write_file(dir / "g.labels", "a 0\nc 1\n");
    const auto g = load_graph(dir / "g.edges", dir / "g.attr", dir / "g.labels");
    const auto s = induced_subgraph(g, {true, false, true, true});
    REQUIRE(s.num_nodes() == 3);
    CHECK(s.name(0) == "a");
    CHECK(s.name(1) == "c");
    CHECK(s.num_edges() == 2);
    CHECK(s.has_edge(1, 2));
    CHECK(s.has_edge(0, 2));
    CHECK(s.attributes(1).values[0] == 2.0);
    CHECK(s.labels()->class_of == std::vector<int>{0, 1, -1});
  }

  TEST_CASE("summary reports counts") {
    const auto g = attri2vec::testing::path_graph(5);
    const auto j = nlohmann::json::parse(summary_json(g));
    CHECK(j["num_nodes"] == 5);
    CHECK(j["num_edges"] == 4);
    CHECK(j["feature_dim"] == 5);
    CHECK(j["nnz"] == 5);
  }
}
