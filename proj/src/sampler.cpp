#include "hdtm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdtm {

namespace {

// log of a count ratio num/den with den >= num; a zero denominator is
// replaced by add-one smoothing (num+1)/(den+levels).
double log_count_ratio(const SamplerState& s, int64_t num, int64_t den,
                       int32_t levels) {
  if (den > 0) {
    if (num == 0) return kNegInf;
    return s.log_i(num) - s.log_i(den);
  }
  return s.log_i(num + 1) - s.log_i(den + levels);
}

// Rebuilds doc_level[d] from levels[d], clamping entries to max_level.
void clamp_and_rebuild_doc_level(SamplerState& s, int32_t doc,
                                 int32_t max_level) {
  auto& z = s.levels[doc];
  auto& h = s.counts.doc_level[doc];
  h.assign(max_level, 0);
  for (auto& zi : z) {
    if (zi > max_level) zi = max_level;
    ++h[zi - 1];
  }
}

}  // namespace

SamplerState init_state(const DocumentGraph& g, const Hyperparameters& hp,
                        std::uint64_t seed) {
  hp.validate();
  g.require_rooted_connected();
  SamplerState s;
  s.graph = &g;
  s.hp = hp;
  s.seed = seed;
  s.rng = Rng(seed);
  s.tree = Hierarchy::bfs_tree(g);

  const int32_t n = g.node_count();
  s.levels.resize(n);
  s.counts.node_word.assign(n, {});
  s.counts.node_total.assign(n, 0);
  s.counts.doc_level.resize(n);
  s.counts.total_tokens = g.total_tokens();

  // Tables of log(i) and log(i + eta) covering every count that can occur.
  int64_t cap = g.total_tokens() + n + 4;
  s.log_int.resize(cap);
  s.log_int[0] = kNegInf;
  for (int64_t i = 1; i < cap; ++i) s.log_int[i] = std::log(static_cast<double>(i));
  s.log_count_eta.resize(g.total_tokens() + 2);
  for (int64_t c = 0; c < static_cast<int64_t>(s.log_count_eta.size()); ++c)
    s.log_count_eta[c] = std::log(static_cast<double>(c) + hp.eta);

  for (int32_t d = 0; d < n; ++d) {
    const auto& toks = g.node(d).tokens;
    int32_t len = s.tree.depth(d) + 1;
    s.levels[d].resize(toks.size());
    for (auto& z : s.levels[d]) z = 1 + static_cast<int32_t>(s.rng.uniform_int(len));
    clamp_and_rebuild_doc_level(s, d, len);
    add_doc_tokens(s, d);
  }
  return s;
}

std::map<int32_t, double> rwr_path_probs(const Hierarchy& tree,
                                         const DocumentGraph& g, int32_t target,
                                         double gamma) {
  if (target == tree.root())
    throw std::invalid_argument("rwr_path_probs: target must not be the root");
  std::vector<char> wants(g.node_count(), 0);
  for (int32_t u : g.in_neighbors(target)) wants[u] = 1;

  std::map<int32_t, double> out;
  const double log1mg = std::log1p(-gamma);
  std::vector<std::pair<int32_t, double>> stack{{tree.root(), 0.0}};
  while (!stack.empty()) {
    auto [u, w] = stack.back();
    stack.pop_back();
    if (wants[u]) out.emplace(u, w);
    const auto& kids = tree.children(u);
    int32_t deg = static_cast<int32_t>(kids.size());
    if (tree.parent(target) == u) --deg;  // the detached subtree does not count
    if (deg <= 0) continue;
    double step = log1mg - std::log(static_cast<double>(deg));
    for (int32_t c : kids) {
      if (c != target) stack.emplace_back(c, w + step);
    }
  }
  return out;
}

std::vector<double> reach_log_weights(const Hierarchy& tree, double gamma) {
  std::vector<double> w(tree.size(), 0.0);
  const double log1mg = std::log1p(-gamma);
  std::vector<int32_t> stack{tree.root()};
  while (!stack.empty()) {
    int32_t u = stack.back();
    stack.pop_back();
    const auto& kids = tree.children(u);
    if (kids.empty()) continue;
    double step = log1mg - std::log(static_cast<double>(kids.size()));
    for (int32_t c : kids) {
      w[c] = w[u] + step;
      stack.push_back(c);
    }
  }
  return w;
}

void remove_doc_tokens(SamplerState& s, int32_t doc) {
  const auto& toks = s.graph->node(doc).tokens;
  if (toks.empty()) return;
  std::vector<int32_t> path = s.tree.path_from_root(doc);
  const auto& z = s.levels[doc];
  for (std::size_t n = 0; n < toks.size(); ++n)
    s.counts.add(path[z[n] - 1], toks[n], -1);
}

void add_doc_tokens(SamplerState& s, int32_t doc) {
  std::vector<int32_t> path = s.tree.path_from_root(doc);
  int32_t len = static_cast<int32_t>(path.size());
  clamp_and_rebuild_doc_level(s, doc, len);
  const auto& toks = s.graph->node(doc).tokens;
  const auto& z = s.levels[doc];
  for (std::size_t n = 0; n < toks.size(); ++n)
    s.counts.add(path[z[n] - 1], toks[n], +1);
}

double path_log_likelihood(const SamplerState& s, int32_t doc,
                           int32_t candidate_parent) {
  const auto& toks = s.graph->node(doc).tokens;
  if (toks.empty()) return 0.0;

  std::vector<int32_t> path = s.tree.path_from_root(candidate_parent);
  path.push_back(doc);
  const int32_t len = static_cast<int32_t>(path.size());

  // Doc's word counts per level under its current assignments, folded
  // into the terminal level where the candidate path is shorter.
  std::vector<std::unordered_map<int32_t, int32_t>> h(len);
  std::vector<int64_t> htot(len, 0);
  const auto& z = s.levels[doc];
  for (std::size_t n = 0; n < toks.size(); ++n) {
    int32_t k = std::min(z[n], len);
    ++h[k - 1][toks[n]];
    ++htot[k - 1];
  }

  const double weta = static_cast<double>(s.graph->vocab_size()) * s.hp.eta;
  double ll = 0.0;
  for (int32_t k = 1; k <= len; ++k) {
    if (htot[k - 1] == 0) continue;
    int32_t v = path[k - 1];
    double base_tot = static_cast<double>(s.counts.node_total[v]);
    ll += log_gamma(base_tot + weta) -
          log_gamma(base_tot + static_cast<double>(htot[k - 1]) + weta);
    for (const auto& [w, c] : h[k - 1]) {
      double base = static_cast<double>(s.counts.get(v, w));
      ll += log_gamma(base + c + s.hp.eta) - log_gamma(base + s.hp.eta);
    }
  }
  return ll;
}

PathPosterior path_posterior(SamplerState& s, int32_t doc) {
  remove_doc_tokens(s, doc);
  PathPosterior post;
  for (const auto& [u, lw] : rwr_path_probs(s.tree, *s.graph, doc, s.hp.gamma)) {
    post.candidates.push_back(u);
    post.log_weights.push_back(lw + path_log_likelihood(s, doc, u));
  }
  if (!post.candidates.empty())
    post.probs = normalize_log_weights(post.log_weights);
  add_doc_tokens(s, doc);
  return post;
}

bool sample_path(SamplerState& s, int32_t doc) {
  if (doc == s.tree.root())
    throw std::invalid_argument("sample_path: doc must not be the root");

  remove_doc_tokens(s, doc);
  std::vector<int32_t> candidates;
  std::vector<double> log_w;
  for (const auto& [u, lw] : rwr_path_probs(s.tree, *s.graph, doc, s.hp.gamma)) {
    candidates.push_back(u);
    log_w.push_back(lw + path_log_likelihood(s, doc, u));
  }
  if (candidates.empty()) {  // keep the current parent
    add_doc_tokens(s, doc);
    return false;
  }
  int choice = s.rng.categorical(normalize_log_weights(log_w));
  int32_t new_parent = candidates[choice];
  int32_t old_parent = s.tree.parent(doc);
  if (new_parent == old_parent) {
    add_doc_tokens(s, doc);
    return false;
  }

  // The subtree moves with doc. Descendants' level-to-node mappings are
  // recomputed against the new path, with levels clamped to each
  // document's new path length.
  std::vector<int32_t> sub = s.tree.subtree(doc);
  for (int32_t e : sub) {
    if (e != doc) remove_doc_tokens(s, e);
  }
  s.tree.reparent(doc, new_parent);
  for (int32_t e : sub) add_doc_tokens(s, e);
  return true;
}

namespace {

// Shared by level_posterior and sample_level. Precondition: the token's
// count has been decremented from the tables and from doc_level.
std::vector<double> level_log_weights(const SamplerState& s, int32_t doc,
                                      int32_t word,
                                      const std::vector<int32_t>& path) {
  const int32_t len = static_cast<int32_t>(path.size());
  const auto& h = s.counts.doc_level[doc];
  // suf[k] = #[z_{d,-n} >= k], 1-based with suf[len+1] = 0.
  std::vector<int64_t> suf(len + 2, 0);
  for (int32_t k = len; k >= 1; --k) suf[k] = suf[k + 1] + h[k - 1];

  const double log1mg = std::log1p(-s.hp.gamma);
  std::vector<double> log_w(len);
  double prefix = 0.0;
  for (int32_t k = 1; k <= len; ++k) {
    int32_t v = path[k - 1];
    int32_t deg = s.tree.out_degree(v);
    if (deg == 0) deg = 1;  // terminal node may be a leaf
    double step = log1mg - s.log_i(deg);
    double stop = log_count_ratio(s, h[k - 1], suf[k], len);
    log_w[k - 1] = prefix + step + stop + s.log_c_eta(s.counts.get(v, word));
    prefix += step + log_count_ratio(s, suf[k + 1], suf[k], len);
  }
  return log_w;
}

}  // namespace

std::vector<double> level_posterior(SamplerState& s, int32_t doc, int32_t n) {
  std::vector<int32_t> path = s.tree.path_from_root(doc);
  int32_t word = s.graph->node(doc).tokens.at(n);
  int32_t z = s.levels[doc].at(n);
  s.counts.add(path[z - 1], word, -1);
  --s.counts.doc_level[doc][z - 1];
  std::vector<double> probs =
      normalize_log_weights(level_log_weights(s, doc, word, path));
  s.counts.add(path[z - 1], word, +1);
  ++s.counts.doc_level[doc][z - 1];
  return probs;
}

void sample_level(SamplerState& s, int32_t doc, int32_t n) {
  std::vector<int32_t> path = s.tree.path_from_root(doc);
  int32_t word = s.graph->node(doc).tokens.at(n);
  int32_t z = s.levels[doc].at(n);
  s.counts.add(path[z - 1], word, -1);
  --s.counts.doc_level[doc][z - 1];
  std::vector<double> log_w = level_log_weights(s, doc, word, path);
  int32_t k = 1 + s.rng.log_categorical(log_w);
  s.levels[doc][n] = k;
  s.counts.add(path[k - 1], word, +1);
  ++s.counts.doc_level[doc][k - 1];
}

double log_likelihood(const SamplerState& s) {
  const double eta = s.hp.eta;
  const double weta = static_cast<double>(s.graph->vocab_size()) * eta;
  const int32_t n = s.graph->node_count();
  double ll = 0.0;

  // Collapsed Dirichlet-multinomial word term per node topic.
  const double lg_eta = eta > 0 ? log_gamma(eta) : 0.0;
  for (int32_t v = 0; v < n; ++v) {
    int64_t tot = s.counts.node_total[v];
    if (tot == 0) continue;
    ll += log_gamma(weta) - log_gamma(weta + static_cast<double>(tot));
    for (const auto& [w, c] : s.counts.node_word[v])
      ll += log_gamma(static_cast<double>(c) + eta) - lg_eta;
  }

  // Walk probability of each document's path over the current tree.
  std::vector<double> reach = reach_log_weights(s.tree, s.hp.gamma);
  for (int32_t d = 0; d < n; ++d) ll += reach[d];

  // Level process, evaluated sequentially per document: each token
  // contributes the normalized probability of its level given the levels
  // of the tokens before it. Every count ratio is add-one smoothed so the
  // term stays finite for any assignment.
  const double log1mg = std::log1p(-s.hp.gamma);
  std::vector<double> lw;
  for (int32_t d = 0; d < n; ++d) {
    const auto& z = s.levels[d];
    if (z.empty()) continue;
    std::vector<int32_t> path = s.tree.path_from_root(d);
    const int32_t len = static_cast<int32_t>(path.size());
    std::vector<double> step(len);
    for (int32_t k = 1; k <= len; ++k) {
      int32_t deg = s.tree.out_degree(path[k - 1]);
      if (deg == 0) deg = 1;
      step[k - 1] = log1mg - s.log_i(deg);
    }
    std::vector<int64_t> hh(len, 0), suf(len + 2, 0);
    lw.assign(len, 0.0);
    for (int32_t zi : z) {
      double prefix = 0.0;
      for (int32_t k = 1; k <= len; ++k) {
        lw[k - 1] = prefix + step[k - 1] + s.log_i(hh[k - 1] + 1) -
                    s.log_i(suf[k] + len);
        prefix += step[k - 1] + s.log_i(suf[k + 1] + 1) - s.log_i(suf[k] + len);
      }
      ll += lw[zi - 1] - log_sum_exp(lw);
      ++hh[zi - 1];
      for (int32_t j = 1; j <= zi; ++j) ++suf[j];
    }
  }
  return ll;
}

void serial_iteration(SamplerState& s) {
  const int32_t n = s.graph->node_count();
  for (int32_t d = 0; d < n; ++d) {
    if (d != s.tree.root()) sample_path(s, d);
  }
  for (int32_t d = 0; d < n; ++d) {
    const int32_t nd = static_cast<int32_t>(s.levels[d].size());
    for (int32_t i = 0; i < nd; ++i) sample_level(s, d, i);
  }
}

GibbsResult run_gibbs(const DocumentGraph& g, const Hyperparameters& hp,
                      const GibbsConfig& cfg, const SampleSink& sink) {
  cfg.validate();
  SamplerState s = init_state(g, hp, cfg.seed);
  GibbsResult result;
  for (int64_t t = 1; t <= cfg.iterations; ++t) {
    serial_iteration(s);
    double ll = log_likelihood(s);
    double ad = s.tree.average_depth();
    result.diagnostics.push_back({t, ll, ad});
    if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.lag == 0) {
      ChainSample cs{t, ll, ad, s.tree.parents()};
      if (sink) sink(cs, s);
      result.samples.push_back(std::move(cs));
    }
  }
  return result;
}

Hierarchy map_hierarchy(const std::vector<ChainSample>& samples,
                        const DocumentGraph& g) {
  if (samples.empty())
    throw std::invalid_argument("map_hierarchy: need at least one sample");
  const int32_t n = g.node_count();
  const int32_t root = g.root();

  std::vector<std::map<int32_t, int64_t>> freq(n);
  for (const auto& cs : samples) {
    for (int32_t v = 0; v < n; ++v) {
      if (v != root) ++freq[v][cs.parent.at(v)];
    }
  }
  std::vector<int32_t> parent(n, -1);
  for (int32_t v = 0; v < n; ++v) {
    if (v == root) continue;
    int64_t best = -1;
    for (const auto& [p, c] : freq[v]) {  // ascending id breaks ties
      if (c > best) {
        best = c;
        parent[v] = p;
      }
    }
  }

  // Independently chosen modes can disagree with the tree shape; repair.
  auto compute_good = [&]() {
    std::vector<char> good(n, 0);
    good[root] = 1;
    for (int32_t v = 0; v < n; ++v) {
      std::vector<int32_t> chain;
      int32_t u = v, steps = 0;
      while (u >= 0 && !good[u] && steps <= n) {
        chain.push_back(u);
        u = parent[u];
        ++steps;
      }
      if (u >= 0 && good[u]) {
        for (int32_t c : chain) good[c] = 1;
      }
    }
    return good;
  };

  std::vector<char> good = compute_good();
  for (;;) {
    bool all_good = true, progressed = false;
    for (int32_t v = 0; v < n; ++v) {
      if (v == root || good[v]) continue;
      all_good = false;
      // Highest-frequency sampled parent that already reaches the root.
      int32_t pick = -1;
      int64_t best = -1;
      for (const auto& [p, c] : freq[v]) {
        if (good[p] && c > best) {
          best = c;
          pick = p;
        }
      }
      if (pick >= 0) {
        parent[v] = pick;
        good = compute_good();
        progressed = true;
      }
    }
    if (all_good) break;
    if (!progressed) {
      // Fall back to BFS parents for whatever is left.
      Hierarchy bfs = Hierarchy::bfs_tree(g);
      for (int32_t v = 0; v < n; ++v) {
        if (v != root && !good[v]) parent[v] = bfs.parent(v);
      }
      good = compute_good();
      break;
    }
  }

  // Materialize, attaching parents before children.
  Hierarchy t(n, root);
  std::vector<int32_t> depth(n, -1);
  depth[root] = 0;
  std::function<int32_t(int32_t)> depth_of = [&](int32_t v) -> int32_t {
    if (depth[v] >= 0) return depth[v];
    return depth[v] = depth_of(parent[v]) + 1;
  };
  std::vector<int32_t> order(n);
  for (int32_t v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    return depth_of(a) != depth_of(b) ? depth_of(a) < depth_of(b) : a < b;
  });
  for (int32_t v : order) {
    if (v != root) t.attach(v, parent[v]);
  }
  t.validate(&g);
  return t;
}

CountTables recount(const SamplerState& s) {
  const int32_t n = s.graph->node_count();
  CountTables t;
  t.node_word.assign(n, {});
  t.node_total.assign(n, 0);
  t.doc_level.resize(n);
  t.total_tokens = s.graph->total_tokens();
  for (int32_t d = 0; d < n; ++d) {
    std::vector<int32_t> path = s.tree.path_from_root(d);
    t.doc_level[d].assign(path.size(), 0);
    const auto& toks = s.graph->node(d).tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      int32_t z = s.levels[d][i];
      ++t.doc_level[d][z - 1];
      t.add(path[z - 1], toks[i], +1);
    }
  }
  return t;
}

void verify_state(const SamplerState& s) {
  s.tree.validate(s.graph);
  const int32_t n = s.graph->node_count();
  for (int32_t d = 0; d < n; ++d) {
    int32_t len = s.tree.depth(d) + 1;
    if (static_cast<int32_t>(s.levels[d].size()) !=
        static_cast<int32_t>(s.graph->node(d).tokens.size()))
      throw std::runtime_error("verify_state: levels array length mismatch");
    for (int32_t z : s.levels[d]) {
      if (z < 1 || z > len)
        throw std::runtime_error("verify_state: level out of bounds at doc " +
                                 std::to_string(d));
    }
  }
  CountTables fresh = recount(s);
  int64_t tot = 0;
  for (int32_t v = 0; v < n; ++v) {
    tot += s.counts.node_total[v];
    if (s.counts.node_total[v] != fresh.node_total[v])
      throw std::runtime_error("verify_state: node total mismatch at " +
                               std::to_string(v));
    if (s.counts.node_word[v] != fresh.node_word[v])
      throw std::runtime_error("verify_state: node-word counts mismatch at " +
                               std::to_string(v));
    if (s.counts.doc_level[v] != fresh.doc_level[v])
      throw std::runtime_error("verify_state: doc-level counts mismatch at " +
                               std::to_string(v));
  }
  if (tot != s.graph->total_tokens())
    throw std::runtime_error("verify_state: token count not conserved");
}

}  // namespace hdtm
