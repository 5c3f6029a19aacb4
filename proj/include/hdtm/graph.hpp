#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace hdtm {

struct NodeRecord {
  std::string external_id;
  std::string title;
  std::vector<int32_t> tokens;            // word ids, may be empty
  std::vector<std::string> categories;    // carried for evaluation only
};

// Word <-> dense id bijection. Ids are assigned in first-occurrence order
// over documents visited in sorted-external-id order, so builds are
// reproducible.
class Vocabulary {
 public:
  int32_t intern(const std::string& w);
  int32_t lookup(const std::string& w) const;  // -1 if absent
  const std::string& word(int32_t id) const { return words_.at(id); }
  int32_t size() const { return static_cast<int32_t>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int32_t> index_;
};

// Immutable rooted directed graph over documents. Node ids are dense
// 0..N-1; adjacency lists are sorted, deduplicated and self-loop free.
class DocumentGraph {
 public:
  DocumentGraph() = default;
  static DocumentGraph build(std::vector<NodeRecord> nodes,
                             std::vector<std::pair<int32_t, int32_t>> edges,
                             int32_t root);

  int32_t node_count() const { return static_cast<int32_t>(nodes_.size()); }
  int32_t root() const { return root_; }
  const NodeRecord& node(int32_t v) const { return nodes_.at(v); }
  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<int32_t>& out_neighbors(int32_t v) const { return out_.at(v); }
  const std::vector<int32_t>& in_neighbors(int32_t v) const { return in_.at(v); }
  int32_t in_degree(int32_t v) const { return static_cast<int32_t>(in_.at(v).size()); }
  bool has_edge(int32_t u, int32_t v) const;
  int64_t edge_count() const;
  int64_t total_tokens() const { return total_tokens_; }
  // 1 + max word id over all tokens (0 for a corpus with no text).
  int32_t vocab_size() const { return vocab_size_; }

  // Nodes reachable from the root via directed edges, in BFS order.
  std::vector<int32_t> reachable_from_root() const;

  // Throws unless every node is root-reachable.
  void require_rooted_connected() const;

 private:
  std::vector<NodeRecord> nodes_;
  std::vector<std::vector<int32_t>> out_, in_;
  int32_t root_ = 0;
  int64_t total_tokens_ = 0;
  int32_t vocab_size_ = 0;
};

}  // namespace hdtm
