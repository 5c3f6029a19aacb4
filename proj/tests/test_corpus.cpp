#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <queue>
#include <set>

#include "hdtm/corpus.hpp"
#include "support/fixtures.hpp"

using namespace hdtm;
using namespace hdtm::testing;

namespace {

std::string doc_line(const std::string& id, const std::string& text) {
  return "{\"id\":\"" + id + "\",\"title\":\"" + id + "\",\"text\":\"" + text +
         "\"}\n";
}

// Reference reachability used against extract_root_component.
std::set<int32_t> bfs_oracle(const DocumentGraph& g) {
  std::set<int32_t> seen{g.root()};
  std::queue<int32_t> q;
  q.push(g.root());
  while (!q.empty()) {
    int32_t u = q.front();
    q.pop();
    for (int32_t v : g.out_neighbors(u)) {
      if (seen.insert(v).second) q.push(v);
    }
  }
  return seen;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumeric runs") {
  auto t = tokenize("Hello, World!  foo-bar2  BAZ");
  std::vector<std::string> want{"hello", "world", "foo", "bar2", "baz"};
  CHECK(t == want);
  CHECK(tokenize("").empty());
  CHECK(tokenize("...!?").empty());
}

TEST_CASE("load_graph builds a minimal tree-shaped corpus") {
  TempDir dir("load_min");
  write_file(dir.file("docs.jsonl"),
             doc_line("r", "root words") + doc_line("a", "alpha") +
                 doc_line("b", "beta"));
  write_file(dir.file("edges.tsv"), "r\ta\nr\tb\n");
  auto r = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "r");
  CHECK(r.graph.node_count() == 3);
  CHECK(r.graph.edge_count() == 2);
  CHECK(r.graph.node(r.graph.root()).external_id == "r");
}

TEST_CASE("duplicate external ids are fatal") {
  TempDir dir("dup");
  write_file(dir.file("docs.jsonl"), doc_line("a", "x") + doc_line("a", "y"));
  write_file(dir.file("edges.tsv"), "");
  CHECK_THROWS_WITH_AS(
      load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "a"),
      "duplicate node: a", std::runtime_error);
}

TEST_CASE("missing root is fatal") {
  TempDir dir("noroot");
  write_file(dir.file("docs.jsonl"), doc_line("a", "x"));
  write_file(dir.file("edges.tsv"), "");
  CHECK_THROWS(load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "r"));
}

TEST_CASE("vocabulary counts distinct tokens") {
  // 4 documents, 11 distinct words by construction.
  TempDir dir("vocab");
  write_file(dir.file("docs.jsonl"),
             doc_line("d1", "alpha beta gamma") +
                 doc_line("d2", "delta epsilon zeta") +
                 doc_line("d3", "eta theta iota") +
                 doc_line("d4", "kappa lambda alpha beta"));
  write_file(dir.file("edges.tsv"), "d1\td2\nd1\td3\nd1\td4\n");
  auto r = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "d1");
  CHECK(r.vocab.size() == 11);
  CHECK(r.graph.vocab_size() == 11);
}

TEST_CASE("edges with endpoints outside the corpus are dropped and counted") {
  TempDir dir("dropped");
  write_file(dir.file("docs.jsonl"), doc_line("r", "x") + doc_line("a", "y"));
  write_file(dir.file("edges.tsv"), "r\ta\nr\tmissing\nghost\ta\n# comment\n");
  auto r = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "r");
  CHECK(r.graph.edge_count() == 1);
  CHECK(r.stats.dropped_edges == 2);
}

TEST_CASE("token count conservation") {
  TempDir dir("tokens");
  write_file(dir.file("docs.jsonl"),
             doc_line("r", "one two three") + doc_line("a", "four five") +
                 doc_line("b", ""));
  write_file(dir.file("edges.tsv"), "r\ta\nr\tb\n");
  auto r = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "r");
  int64_t sum = 0;
  for (int32_t v = 0; v < r.graph.node_count(); ++v)
    sum += static_cast<int64_t>(r.graph.node(v).tokens.size());
  CHECK(sum == r.stats.total_tokens);
  CHECK(sum == r.graph.total_tokens());
  CHECK(sum == 5);
}

TEST_CASE("load_graph is deterministic byte for byte") {
  TempDir dir("determ");
  write_file(dir.file("docs.jsonl"),
             doc_line("r", "shared words here") + doc_line("b", "more words") +
                 doc_line("a", "shared again"));
  write_file(dir.file("edges.tsv"), "r\tb\nr\ta\na\tb\n");
  auto r1 = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "r");
  auto r2 = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "r");
  save_graph_json(r1.graph, r1.vocab, dir.file("g1.json"));
  save_graph_json(r2.graph, r2.vocab, dir.file("g2.json"));
  CHECK(read_file(dir.file("g1.json")) == read_file(dir.file("g2.json")));

  auto back = load_graph_json(dir.file("g1.json"));
  save_graph_json(back.graph, back.vocab, dir.file("g3.json"));
  CHECK(read_file(dir.file("g1.json")) == read_file(dir.file("g3.json")));
}

TEST_CASE("redirect edges are rewritten to the final target") {
  // x -> y with redirect y -> z becomes x -> z.
  TempDir dir("redir");
  write_file(dir.file("docs.jsonl"),
             doc_line("x", "one") + doc_line("y", "two") + doc_line("z", "three"));
  write_file(dir.file("edges.tsv"), "x\ty\nx\tz\n");
  auto r = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "x");
  auto g = resolve_redirects(r.graph, {{"y", "z"}});
  CHECK(g.node_count() == 2);  // y removed
  REQUIRE(g.node(1).external_id == "z");
  CHECK(g.has_edge(0, 1));
  CHECK(g.edge_count() == 1);  // x->y and x->z collapse onto x->z
}

TEST_CASE("redirect resolution follows chains transitively") {
  TempDir dir("redir_chain");
  write_file(dir.file("docs.jsonl"), doc_line("x", "one") + doc_line("y", "two") +
                                         doc_line("z", "three") +
                                         doc_line("q", "four"));
  write_file(dir.file("edges.tsv"), "x\ty\n");
  auto r = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "x");
  auto g = resolve_redirects(r.graph, {{"y", "z"}, {"z", "q"}});
  CHECK(g.node_count() == 2);
  REQUIRE(g.node(0).external_id == "q");
  CHECK(g.has_edge(1, 0));  // x -> q
}

TEST_CASE("empty redirect map leaves the graph unchanged") {
  auto g = make_graph(3, {{0, 1}, {1, 2}}, 0);
  auto h = resolve_redirects(g, {});
  CHECK(h.node_count() == 3);
  CHECK(h.edge_count() == 2);
  CHECK(h.has_edge(0, 1));
  CHECK(h.has_edge(1, 2));
}

TEST_CASE("redirect cycles are fatal and list the cycle") {
  auto g = make_graph(2, {{0, 1}}, 0);
  try {
    resolve_redirects(g, {{"a", "b"}, {"b", "c"}, {"c", "a"}});
    FAIL("expected redirect cycle error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("redirect cycle") != std::string::npos);
    CHECK(msg.find("a") != std::string::npos);
  }
}

TEST_CASE("extract_root_component removes unreachable nodes") {
  // Isolated node q gets dropped.
  auto g = make_graph(4, {{0, 1}, {0, 2}}, 0);
  auto r = extract_root_component(g);
  CHECK(r.dropped_nodes == 1);
  CHECK(r.graph.node_count() == 3);

  auto full = make_graph(3, {{0, 1}, {1, 2}}, 0);
  auto rf = extract_root_component(full);
  CHECK(rf.dropped_nodes == 0);
  CHECK(rf.graph.node_count() == 3);
}

TEST_CASE("component extraction agrees with an independent BFS") {
  // 10 nodes with a 3-node island on the side.
  auto g = make_graph(10,
                      {{0, 1}, {1, 2}, {2, 3}, {0, 4}, {4, 5}, {5, 6},
                       {7, 8}, {8, 9}, {9, 7}},
                      0);
  auto oracle = bfs_oracle(g);
  CHECK(oracle.size() == 7);
  auto r = extract_root_component(g);
  CHECK(r.graph.node_count() == 7);
  CHECK(r.dropped_nodes == 3);
  // Every surviving external id is in the oracle set.
  for (int32_t v = 0; v < r.graph.node_count(); ++v) {
    bool found = false;
    for (int32_t u : oracle)
      found = found || g.node(u).external_id == r.graph.node(v).external_id;
    CHECK(found);
  }
  // After extraction, BFS from the root visits exactly the node set.
  CHECK(static_cast<int32_t>(r.graph.reachable_from_root().size()) ==
        r.graph.node_count());

  // Property over random graphs: extraction output always root-covering.
  Rng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    auto rg = random_graph(rng, 30, 2, 5, 4);
    auto rr = extract_root_component(rg);
    CHECK(static_cast<int32_t>(rr.graph.reachable_from_root().size()) ==
          rr.graph.node_count());
  }
}

TEST_CASE("self loops and duplicate edges are collapsed") {
  TempDir dir("selfdup");
  write_file(dir.file("docs.jsonl"), doc_line("r", "x") + doc_line("a", "y"));
  write_file(dir.file("edges.tsv"), "r\ta\nr\ta\nr\tr\n");
  auto r = load_graph(dir.file("edges.tsv"), dir.file("docs.jsonl"), "r");
  CHECK(r.graph.edge_count() == 1);
  CHECK(r.stats.dropped_self_loops == 1);
  CHECK(r.stats.duplicate_edges == 1);
}
