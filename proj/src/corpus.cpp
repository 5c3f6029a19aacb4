#include "hdtm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace hdtm {

namespace {

using nlohmann::json;

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

// One `a<TAB>b` pair per line; '#' starts a comment, blank lines skipped.
std::vector<std::pair<std::string, std::string>> read_pair_lines(
    const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected `a<TAB>b`");
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

}  // namespace

int32_t Vocabulary::intern(const std::string& w) {
  auto it = index_.find(w);
  if (it != index_.end()) return it->second;
  int32_t id = static_cast<int32_t>(words_.size());
  words_.push_back(w);
  index_.emplace(w, id);
  return id;
}

int32_t Vocabulary::lookup(const std::string& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? -1 : it->second;
}

DocumentGraph DocumentGraph::build(std::vector<NodeRecord> nodes,
                                   std::vector<std::pair<int32_t, int32_t>> edges,
                                   int32_t root) {
  DocumentGraph g;
  g.nodes_ = std::move(nodes);
  const int32_t n = g.node_count();
  if (root < 0 || root >= n) throw std::runtime_error("build: root id out of range");
  g.root_ = root;
  g.out_.assign(n, {});
  g.in_.assign(n, {});
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (auto [s, t] : edges) {
    if (s < 0 || s >= n || t < 0 || t >= n)
      throw std::runtime_error("build: edge endpoint out of range");
    if (s == t) continue;
    g.out_[s].push_back(t);
    g.in_[t].push_back(s);
  }
  for (auto& v : g.in_) std::sort(v.begin(), v.end());
  g.total_tokens_ = 0;
  g.vocab_size_ = 0;
  for (const auto& nr : g.nodes_) {
    g.total_tokens_ += static_cast<int64_t>(nr.tokens.size());
    for (int32_t t : nr.tokens) {
      if (t < 0) throw std::runtime_error("build: negative word id");
      g.vocab_size_ = std::max(g.vocab_size_, t + 1);
    }
  }
  return g;
}

bool DocumentGraph::has_edge(int32_t u, int32_t v) const {
  const auto& o = out_.at(u);
  return std::binary_search(o.begin(), o.end(), v);
}

int64_t DocumentGraph::edge_count() const {
  int64_t c = 0;
  for (const auto& o : out_) c += static_cast<int64_t>(o.size());
  return c;
}

std::vector<int32_t> DocumentGraph::reachable_from_root() const {
  std::vector<int32_t> order;
  std::vector<char> seen(node_count(), 0);
  std::queue<int32_t> q;
  seen[root_] = 1;
  q.push(root_);
  while (!q.empty()) {
    int32_t u = q.front();
    q.pop();
    order.push_back(u);
    for (int32_t v : out_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  return order;
}

void DocumentGraph::require_rooted_connected() const {
  if (static_cast<int32_t>(reachable_from_root().size()) != node_count())
    throw std::runtime_error("graph has nodes unreachable from the root");
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

LoadResult load_graph(const std::string& edge_path, const std::string& doc_path,
                      const std::string& root_external_id) {
  // Pass 1: read documents, keyed and later ordered by external id.
  std::ifstream docs = open_or_throw(doc_path);
  std::map<std::string, json> records;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(docs, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(doc_path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
    std::string id = j.at("id").get<std::string>();
    if (records.count(id))
      throw std::runtime_error("duplicate node: " + id);
    records.emplace(std::move(id), std::move(j));
  }
  if (!records.count(root_external_id))
    throw std::runtime_error("missing root: " + root_external_id +
                             " not present in document file");

  LoadResult r;
  std::unordered_map<std::string, int32_t> id_of;
  std::vector<NodeRecord> nodes;
  nodes.reserve(records.size());
  for (auto& [ext, j] : records) {
    NodeRecord nr;
    nr.external_id = ext;
    nr.title = j.value("title", std::string{});
    for (const auto& tok : tokenize(j.value("text", std::string{})))
      nr.tokens.push_back(r.vocab.intern(tok));
    if (j.contains("categories")) {
      for (const auto& c : j.at("categories")) nr.categories.push_back(c.get<std::string>());
    }
    id_of.emplace(ext, static_cast<int32_t>(nodes.size()));
    nodes.push_back(std::move(nr));
  }

  std::vector<std::pair<int32_t, int32_t>> edges;
  for (const auto& [src, tgt] : read_pair_lines(edge_path)) {
    auto is = id_of.find(src);
    auto it = id_of.find(tgt);
    ++r.stats.edges;
    if (is == id_of.end() || it == id_of.end()) {
      ++r.stats.dropped_edges;
      continue;
    }
    if (is->second == it->second) {
      ++r.stats.dropped_self_loops;
      continue;
    }
    edges.emplace_back(is->second, it->second);
  }
  std::sort(edges.begin(), edges.end());
  auto uniq = std::unique(edges.begin(), edges.end());
  r.stats.duplicate_edges = edges.end() - uniq;
  edges.erase(uniq, edges.end());

  r.graph = DocumentGraph::build(std::move(nodes), std::move(edges),
                                 id_of.at(root_external_id));
  r.stats.nodes = r.graph.node_count();
  r.stats.total_tokens = r.graph.total_tokens();
  r.stats.vocabulary_size = r.vocab.size();
  return r;
}

std::vector<std::pair<std::string, std::string>> read_redirect_file(
    const std::string& path) {
  return read_pair_lines(path);
}

DocumentGraph resolve_redirects(
    const DocumentGraph& g,
    const std::vector<std::pair<std::string, std::string>>& redirects,
    int64_t* rewritten_edges) {
  std::unordered_map<std::string, std::string> redir(redirects.begin(),
                                                     redirects.end());
  // Resolve each source to its final target, detecting cycles.
  std::unordered_map<std::string, std::string> final_of;
  for (const auto& [from, _] : redir) {
    std::vector<std::string> chain{from};
    std::unordered_set<std::string> on_path{from};
    std::string cur = from;
    while (redir.count(cur)) {
      cur = redir.at(cur);
      if (on_path.count(cur)) {
        std::string msg = "redirect cycle:";
        for (const auto& s : chain) msg += " " + s + " ->";
        msg += " " + cur;
        throw std::runtime_error(msg);
      }
      chain.push_back(cur);
      on_path.insert(cur);
    }
    final_of[from] = cur;
  }

  if (redir.count(g.node(g.root()).external_id))
    throw std::runtime_error("root is a redirect source");

  // Keep non-redirect nodes, in their existing (sorted) order.
  const int32_t n = g.node_count();
  std::vector<int32_t> new_id(n, -1);
  std::vector<NodeRecord> nodes;
  for (int32_t v = 0; v < n; ++v) {
    if (redir.count(g.node(v).external_id)) continue;
    new_id[v] = static_cast<int32_t>(nodes.size());
    nodes.push_back(g.node(v));
  }
  std::unordered_map<std::string, int32_t> id_of;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    id_of.emplace(nodes[i].external_id, static_cast<int32_t>(i));

  int64_t rewritten = 0;
  std::vector<std::pair<int32_t, int32_t>> edges;
  for (int32_t u = 0; u < n; ++u) {
    if (new_id[u] < 0) continue;  // drop edges leaving redirect nodes
    for (int32_t v : g.out_neighbors(u)) {
      int32_t tgt = -1;
      const std::string& ext = g.node(v).external_id;
      auto f = final_of.find(ext);
      if (f != final_of.end()) {
        ++rewritten;
        auto it = id_of.find(f->second);
        if (it == id_of.end()) continue;  // final target not in corpus
        tgt = it->second;
      } else {
        tgt = new_id[v];
      }
      if (tgt >= 0 && tgt != new_id[u]) edges.emplace_back(new_id[u], tgt);
    }
  }
  if (rewritten_edges) *rewritten_edges = rewritten;
  return DocumentGraph::build(std::move(nodes), std::move(edges),
                              new_id[g.root()]);
}

ComponentResult extract_root_component(const DocumentGraph& g) {
  std::vector<int32_t> keep = g.reachable_from_root();
  std::sort(keep.begin(), keep.end());
  ComponentResult r;
  r.dropped_nodes = g.node_count() - static_cast<int32_t>(keep.size());
  if (r.dropped_nodes == 0) {
    r.graph = g;
    return r;
  }
  std::vector<int32_t> new_id(g.node_count(), -1);
  std::vector<NodeRecord> nodes;
  for (int32_t v : keep) {
    new_id[v] = static_cast<int32_t>(nodes.size());
    nodes.push_back(g.node(v));
  }
  std::vector<std::pair<int32_t, int32_t>> edges;
  for (int32_t u : keep) {
    for (int32_t v : g.out_neighbors(u)) {
      if (new_id[v] >= 0) edges.emplace_back(new_id[u], new_id[v]);
    }
  }
  r.graph = DocumentGraph::build(std::move(nodes), std::move(edges),
                                 new_id[g.root()]);
  return r;
}

void save_graph_json(const DocumentGraph& g, const Vocabulary& vocab,
                     const std::string& path) {
  json j;
  j["format"] = "hdtm-graph";
  j["version"] = 1;
  j["root"] = g.root();
  j["vocabulary"] = vocab.words();
  json nodes = json::array();
  for (int32_t v = 0; v < g.node_count(); ++v) {
    const NodeRecord& nr = g.node(v);
    json nj;
    nj["id"] = nr.external_id;
    nj["title"] = nr.title;
    nj["tokens"] = nr.tokens;
    nj["categories"] = nr.categories;
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (int32_t u = 0; u < g.node_count(); ++u) {
    for (int32_t v : g.out_neighbors(u)) edges.push_back(json::array({u, v}));
  }
  j["edges"] = std::move(edges);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump() << "\n";
}

LoadedGraph load_graph_json(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  json j = json::parse(in);
  if (j.value("format", std::string{}) != "hdtm-graph")
    throw std::runtime_error(path + ": not an hdtm graph file");
  if (j.value("version", 0) != 1)
    throw std::runtime_error(path + ": unsupported graph file version");
  LoadedGraph r;
  for (const auto& w : j.at("vocabulary")) r.vocab.intern(w.get<std::string>());
  std::vector<NodeRecord> nodes;
  for (const auto& nj : j.at("nodes")) {
    NodeRecord nr;
    nr.external_id = nj.at("id").get<std::string>();
    nr.title = nj.at("title").get<std::string>();
    nr.tokens = nj.at("tokens").get<std::vector<int32_t>>();
    nr.categories = nj.at("categories").get<std::vector<std::string>>();
    for (int32_t t : nr.tokens) {
      if (t < 0 || t >= r.vocab.size())
        throw std::runtime_error(path + ": token id out of vocabulary range");
    }
    nodes.push_back(std::move(nr));
  }
  std::vector<std::pair<int32_t, int32_t>> edges;
  for (const auto& e : j.at("edges"))
    edges.emplace_back(e.at(0).get<int32_t>(), e.at(1).get<int32_t>());
  r.graph = DocumentGraph::build(std::move(nodes), std::move(edges),
                                 j.at("root").get<int32_t>());
  return r;
}

}  // namespace hdtm
