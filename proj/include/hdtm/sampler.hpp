#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "hdtm/model.hpp"

namespace hdtm {

// Initial state: BFS tree (lowest-id tie-break), token levels drawn
// uniformly from 1..dep(d)+1, counts tallied.
SamplerState init_state(const DocumentGraph& g, const Hyperparameters& hp,
                        std::uint64_t seed);

// Candidate parents for `target` with the log probability of the walk
// from the root to each candidate over the current hierarchy. The walk
// never descends into the target, and the target's subtree is excluded
// from out-degrees, so the weights are those of the tree with the target
// detached. The final hop onto the target is not multiplied in.
std::map<int32_t, double> rwr_path_probs(const Hierarchy& tree,
                                         const DocumentGraph& g, int32_t target,
                                         double gamma);

// Per-node log probability of the walk from the root reaching that node
// over the intact tree (no exclusions). Root gets log 1 = 0.
std::vector<double> reach_log_weights(const Hierarchy& tree, double gamma);

// Collapsed Dirichlet-multinomial log likelihood of doc's words laid out
// along the path root -> candidate_parent -> doc, holding the document's
// current level assignments (levels beyond the candidate path length are
// folded into the terminal level). Precondition: counts exclude doc's own
// tokens -- call remove_doc_tokens first.
double path_log_likelihood(const SamplerState& s, int32_t doc,
                           int32_t candidate_parent);

// Removes/restores a document's token counts for its current levels and
// path. Restore clamps levels to the current path length first.
void remove_doc_tokens(SamplerState& s, int32_t doc);
void add_doc_tokens(SamplerState& s, int32_t doc);

struct PathPosterior {
  std::vector<int32_t> candidates;   // ascending node id
  std::vector<double> log_weights;   // prior + word likelihood
  std::vector<double> probs;         // normalized
};

// Full parent posterior for doc; leaves the state unchanged.
PathPosterior path_posterior(SamplerState& s, int32_t doc);

// One Gibbs update of doc's parent. The whole subtree moves with doc;
// only doc's own tokens are excluded while scoring. Returns true if the
// parent changed.
bool sample_path(SamplerState& s, int32_t doc);

// Level posterior for one token; leaves the state unchanged.
std::vector<double> level_posterior(SamplerState& s, int32_t doc, int32_t n);

// One Gibbs update of a token's level.
void sample_level(SamplerState& s, int32_t doc, int32_t n);

// Joint score of the current state: per-node collapsed word terms, the
// walk probability of every document's path, and a sequential evaluation
// of the level process (all count ratios add-one smoothed so the result
// stays finite). Always <= 0.
double log_likelihood(const SamplerState& s);

// One full sweep: paths for all non-root docs in ascending id order, then
// levels for every token in document-major order.
void serial_iteration(SamplerState& s);

struct DiagnosticsRow {
  int64_t iteration;
  double log_likelihood;
  double average_depth;
};

struct GibbsResult {
  std::vector<ChainSample> samples;
  std::vector<DiagnosticsRow> diagnostics;
};

// Called for every collected sample, with the live state for exports.
using SampleSink = std::function<void(const ChainSample&, const SamplerState&)>;

GibbsResult run_gibbs(const DocumentGraph& g, const Hyperparameters& hp,
                      const GibbsConfig& cfg, const SampleSink& sink = {});

// Modal parent per node (ties -> lowest id), repaired to a valid tree:
// offending nodes are reassigned to their most frequent root-reachable
// sampled parent, falling back to the BFS parent.
Hierarchy map_hierarchy(const std::vector<ChainSample>& samples,
                        const DocumentGraph& g);

// From-scratch tally of (hierarchy, levels); used by invariant checks.
CountTables recount(const SamplerState& s);

// Throws unless tree/level/count invariants all hold exactly.
void verify_state(const SamplerState& s);

}  // namespace hdtm
