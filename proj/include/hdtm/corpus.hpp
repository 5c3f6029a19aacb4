#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hdtm/graph.hpp"

namespace hdtm {

struct LoadStats {
  int64_t nodes = 0;
  int64_t edges = 0;
  int64_t dropped_edges = 0;      // endpoint absent from the document file
  int64_t dropped_self_loops = 0;
  int64_t duplicate_edges = 0;
  int64_t total_tokens = 0;
  int32_t vocabulary_size = 0;
};

struct LoadResult {
  DocumentGraph graph;
  Vocabulary vocab;
  LoadStats stats;
};

// Lowercases and splits on non-alphanumeric runs. No stemming, no stop
// word removal.
std::vector<std::string> tokenize(const std::string& text);

// edge file: `source<TAB>target` lines, `#` comments; document file: one
// JSON object per line with fields id/title/text and optional categories.
// Node ids are assigned by sorted external id.
LoadResult load_graph(const std::string& edge_path, const std::string& doc_path,
                      const std::string& root_external_id);

// `from<TAB>to` per line.
std::vector<std::pair<std::string, std::string>> read_redirect_file(
    const std::string& path);

// Rewrites edges through redirect chains to their final targets and drops
// the redirect nodes. Throws on redirect cycles (the cycle is listed) and
// when the root itself is a redirect source.
DocumentGraph resolve_redirects(
    const DocumentGraph& g,
    const std::vector<std::pair<std::string, std::string>>& redirects,
    int64_t* rewritten_edges = nullptr);

struct ComponentResult {
  DocumentGraph graph;
  int32_t dropped_nodes = 0;
};

// Keeps the root-reachable component; ids stay dense and sorted.
ComponentResult extract_root_component(const DocumentGraph& g);

// Round-trip stable JSON container.
void save_graph_json(const DocumentGraph& g, const Vocabulary& vocab,
                     const std::string& path);

struct LoadedGraph {
  DocumentGraph graph;
  Vocabulary vocab;
};

LoadedGraph load_graph_json(const std::string& path);

}  // namespace hdtm
