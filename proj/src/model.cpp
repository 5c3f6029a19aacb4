#include "hdtm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hdtm {

void Hyperparameters::validate() const {
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0,1)");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
}

void GibbsConfig::validate() const {
  if (iterations <= 0) throw std::invalid_argument("iterations must be > 0");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("burn-in must lie in [0, iterations)");
  if (lag < 1) throw std::invalid_argument("lag must be >= 1");
}

void CountTables::add(int32_t node, int32_t word, int32_t delta) {
  auto& m = node_word[node];
  int32_t& c = m[word];
  c += delta;
  node_total[node] += delta;
  if (c < 0 || node_total[node] < 0)
    throw std::runtime_error("count tables: negative count at node " +
                             std::to_string(node));
  if (c == 0) m.erase(word);
}

double SamplerState::log_i(int64_t i) const {
  if (i >= 1 && i < static_cast<int64_t>(log_int.size())) return log_int[i];
  return std::log(static_cast<double>(i));
}

double SamplerState::log_c_eta(int64_t c) const {
  if (c >= 0 && c < static_cast<int64_t>(log_count_eta.size()))
    return log_count_eta[c];
  return std::log(static_cast<double>(c) + hp.eta);
}

}  // namespace hdtm
