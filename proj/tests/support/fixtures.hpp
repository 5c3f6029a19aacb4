#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hdtm/graph.hpp"
#include "hdtm/math_util.hpp"

namespace hdtm::testing {

// Builds a graph directly; external ids are zero-padded so sorted order
// equals id order.
inline DocumentGraph make_graph(int32_t n,
                                std::vector<std::pair<int32_t, int32_t>> edges,
                                int32_t root,
                                std::vector<std::vector<int32_t>> tokens = {}) {
  std::vector<NodeRecord> nodes(n);
  for (int32_t v = 0; v < n; ++v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "n%03d", v);
    nodes[v].external_id = buf;
    nodes[v].title = std::string("node ") + buf;
    if (v < static_cast<int32_t>(tokens.size())) nodes[v].tokens = tokens[v];
  }
  return DocumentGraph::build(std::move(nodes), std::move(edges), root);
}

// Random rooted graph: node v>0 gets in-edges from `fanin` random earlier
// nodes (always at least one, so everything is root-reachable), plus
// random tokens over a small vocabulary.
inline DocumentGraph random_graph(Rng& rng, int32_t n, int32_t fanin,
                                  int32_t vocab, int32_t max_tokens) {
  std::vector<std::pair<int32_t, int32_t>> edges;
  for (int32_t v = 1; v < n; ++v) {
    edges.emplace_back(static_cast<int32_t>(rng.uniform_int(v)), v);
    for (int32_t k = 1; k < fanin; ++k)
      edges.emplace_back(static_cast<int32_t>(rng.uniform_int(v)), v);
  }
  std::vector<std::vector<int32_t>> tokens(n);
  for (int32_t v = 0; v < n; ++v) {
    int32_t len = static_cast<int32_t>(rng.uniform_int(max_tokens + 1));
    for (int32_t i = 0; i < len; ++i)
      tokens[v].push_back(static_cast<int32_t>(rng.uniform_int(vocab)));
  }
  return make_graph(n, std::move(edges), 0, std::move(tokens));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("hdtm_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace hdtm::testing
