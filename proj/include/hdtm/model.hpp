#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hdtm/graph.hpp"
#include "hdtm/hierarchy.hpp"
#include "hdtm/math_util.hpp"

namespace hdtm {

struct Hyperparameters {
  double gamma = 0.05;  // restart probability, in (0,1)
  double eta = 0.1;     // word-smoothing Dirichlet parameter
  // Topic-proportion Dirichlet parameter. Validated and recorded, but the
  // collapsed sampler never reads it: no sampling distribution depends on
  // it once the topic proportions are integrated out.
  double alpha = 1.0;

  void validate() const;
};

struct GibbsConfig {
  int64_t iterations = 5000;
  int64_t burn_in = 2000;
  int64_t lag = 20;
  std::uint64_t seed = 1;

  void validate() const;  // burn_in < iterations, lag >= 1
};

struct ChainSample {
  int64_t iteration = 0;
  double log_likelihood = 0.0;
  double average_depth = 0.0;
  std::vector<int32_t> parent;  // -1 at the root
};

// Collapsed count tables: tallies implied by (hierarchy, levels).
struct CountTables {
  std::vector<std::unordered_map<int32_t, int32_t>> node_word;
  std::vector<int64_t> node_total;
  // Per document, histogram over levels 1..dep+1 (level k at index k-1).
  std::vector<std::vector<int32_t>> doc_level;
  int64_t total_tokens = 0;

  int32_t get(int32_t node, int32_t word) const {
    const auto& m = node_word[node];
    auto it = m.find(word);
    return it == m.end() ? 0 : it->second;
  }
  void add(int32_t node, int32_t word, int32_t delta);
};

struct SamplerState {
  const DocumentGraph* graph = nullptr;
  Hyperparameters hp;
  Hierarchy tree;
  // levels[d][n] = z in 1..dep(d)+1; level k selects the k-th node on the
  // root->d path, so dep(d)+1 is d itself.
  std::vector<std::vector<int32_t>> levels;
  CountTables counts;
  std::uint64_t seed = 0;
  Rng rng{0};

  // log(i) and log(i + eta) for integer counts, sized at init; avoids a
  // transcendental call per level weight in the hot loop.
  std::vector<double> log_int;
  std::vector<double> log_count_eta;

  double log_i(int64_t i) const;
  double log_c_eta(int64_t c) const;
};

}  // namespace hdtm
