#include "hdtm/hierarchy.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

namespace hdtm {

Hierarchy::Hierarchy(int32_t n, int32_t root)
    : root_(root), parent_(n, -1), children_(n), depth_(n, -1) {
  depth_[root] = 0;
}

Hierarchy Hierarchy::bfs_tree(const DocumentGraph& g) {
  const int32_t n = g.node_count();
  Hierarchy t(n, g.root());

  // Two passes: BFS depths first, then pick the lowest-id in-neighbor one
  // level up as the parent.
  std::vector<int32_t> dist(n, -1);
  std::queue<int32_t> q;
  dist[g.root()] = 0;
  q.push(g.root());
  while (!q.empty()) {
    int32_t u = q.front();
    q.pop();
    for (int32_t v : g.out_neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  for (int32_t v = 0; v < n; ++v) {
    if (v == g.root()) continue;
    if (dist[v] < 0)
      throw std::runtime_error("bfs_tree: node " + std::to_string(v) +
                               " unreachable from root");
  }
  // Attach in BFS-depth order so parents exist before their children.
  std::vector<int32_t> order(n);
  for (int32_t v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
  });
  for (int32_t v : order) {
    if (v == g.root()) continue;
    int32_t best = -1;
    for (int32_t u : g.in_neighbors(v)) {
      if (dist[u] == dist[v] - 1 && (best < 0 || u < best)) best = u;
    }
    t.attach(v, best);
  }
  return t;
}

int32_t Hierarchy::max_depth() const {
  int32_t m = 0;
  for (int32_t d : depth_) m = std::max(m, d);
  return m;
}

double Hierarchy::average_depth() const {
  if (size() <= 1) return 0.0;
  double s = 0.0;
  for (int32_t v = 0; v < size(); ++v) {
    if (v != root_) s += depth_[v];
  }
  return s / (size() - 1);
}

std::vector<int32_t> Hierarchy::path_from_root(int32_t v) const {
  std::vector<int32_t> path;
  for (int32_t u = v; u >= 0; u = parent_[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int32_t> Hierarchy::subtree(int32_t v) const {
  std::vector<int32_t> out;
  std::vector<int32_t> stack{v};
  while (!stack.empty()) {
    int32_t u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (int32_t c : children_[u]) stack.push_back(c);
  }
  return out;
}

bool Hierarchy::in_subtree(int32_t node, int32_t sub_root) const {
  int32_t u = node;
  while (u >= 0 && depth_[u] >= depth_[sub_root]) {
    if (u == sub_root) return true;
    u = parent_[u];
  }
  return false;
}

void Hierarchy::attach(int32_t v, int32_t parent) {
  if (parent < 0 || parent_[v] >= 0 || v == root_)
    throw std::logic_error("attach: invalid attach");
  parent_[v] = parent;
  auto& kids = children_[parent];
  kids.insert(std::lower_bound(kids.begin(), kids.end(), v), v);
  depth_[v] = depth_[parent] + 1;
}

void Hierarchy::reparent(int32_t v, int32_t new_parent) {
  if (v == root_) throw std::logic_error("reparent: cannot move the root");
  if (in_subtree(new_parent, v))
    throw std::logic_error("reparent: new parent lies inside the subtree");
  int32_t old = parent_[v];
  if (old == new_parent) return;
  auto& kids = children_[old];
  kids.erase(std::lower_bound(kids.begin(), kids.end(), v));
  auto& nk = children_[new_parent];
  nk.insert(std::lower_bound(nk.begin(), nk.end(), v), v);
  parent_[v] = new_parent;
  int32_t delta = depth_[new_parent] + 1 - depth_[v];
  if (delta != 0) {
    for (int32_t u : subtree(v)) depth_[u] += delta;
  }
}

void Hierarchy::validate(const DocumentGraph* g) const {
  const int32_t n = size();
  if (root_ < 0 || root_ >= n || parent_[root_] != -1)
    throw std::runtime_error("hierarchy: bad root");
  for (int32_t v = 0; v < n; ++v) {
    if (v == root_) continue;
    int32_t p = parent_[v];
    if (p < 0 || p >= n)
      throw std::runtime_error("hierarchy: node " + std::to_string(v) +
                               " has no parent");
    if (depth_[v] != depth_[p] + 1)
      throw std::runtime_error("hierarchy: depth mismatch at " + std::to_string(v));
    // Climb to the root; depths strictly decrease, so this also rejects cycles.
    int32_t u = v, steps = 0;
    while (u != root_) {
      u = parent_[u];
      if (u < 0 || ++steps > n)
        throw std::runtime_error("hierarchy: node " + std::to_string(v) +
                                 " does not reach the root");
    }
    if (g && !g->has_edge(p, v))
      throw std::runtime_error("hierarchy: tree edge " + std::to_string(p) +
                               "->" + std::to_string(v) + " missing from graph");
  }
}

}  // namespace hdtm
