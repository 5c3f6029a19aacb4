#pragma once

#include <cstdint>
#include <vector>

#include "hdtm/graph.hpp"

namespace hdtm {

// Rooted tree over graph nodes: one parent per non-root node, every tree
// edge must exist in the document graph.
class Hierarchy {
 public:
  Hierarchy() = default;
  Hierarchy(int32_t n, int32_t root);

  // BFS spanning tree; among candidate parents one level up, the lowest
  // node id wins.
  static Hierarchy bfs_tree(const DocumentGraph& g);

  // Rebuilds a tree from a parent array (-1 at the root). Throws if the
  // array does not describe a tree.
  static Hierarchy from_parents(const std::vector<int32_t>& parent, int32_t root);

  int32_t size() const { return static_cast<int32_t>(parent_.size()); }
  int32_t root() const { return root_; }
  int32_t parent(int32_t v) const { return parent_.at(v); }  // -1 for root
  const std::vector<int32_t>& parents() const { return parent_; }
  const std::vector<int32_t>& children(int32_t v) const { return children_.at(v); }
  int32_t out_degree(int32_t v) const { return static_cast<int32_t>(children_.at(v).size()); }
  int32_t depth(int32_t v) const { return depth_.at(v); }
  int32_t max_depth() const;
  double average_depth() const;  // mean over non-root nodes, 0 when N == 1

  // Path [root, ..., v]; v's level range is 1..path length.
  std::vector<int32_t> path_from_root(int32_t v) const;
  // Preorder listing of v's subtree, v first.
  std::vector<int32_t> subtree(int32_t v) const;
  bool in_subtree(int32_t node, int32_t sub_root) const;

  // Initial wiring; parent must already be in the tree.
  void attach(int32_t v, int32_t parent);
  // Moves v (and its whole subtree) under new_parent, refreshing depths.
  void reparent(int32_t v, int32_t new_parent);

  // Tree structure check; with a graph, also checks hierarchy <= graph.
  void validate(const DocumentGraph* g = nullptr) const;

 private:
  int32_t root_ = 0;
  std::vector<int32_t> parent_;
  std::vector<std::vector<int32_t>> children_;  // kept sorted ascending
  std::vector<int32_t> depth_;
};

}  // namespace hdtm
