#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace hdtm {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-Gamma via the Lanczos series (g=7, 9 coefficients), accurate to
// better than 1e-12 relative error for x > 0.
double log_gamma(double x);

// log(sum_i exp(v[i])); -inf entries are ignored, all -inf -> -inf.
double log_sum_exp(const std::vector<double>& v);

// Converts log weights to a normalized probability vector.
std::vector<double> normalize_log_weights(const std::vector<double>& log_w);

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from (seed, a, b, c).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

// mt19937_64 with hand-rolled reductions so draws are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), rejection sampled (no modulo bias).
  std::uint32_t uniform_int(std::uint32_t n);

  // Draws an index from explicit probabilities (assumed to sum to ~1).
  int categorical(const std::vector<double>& probs);

  // Draws an index from unnormalized log weights.
  int log_categorical(const std::vector<double>& log_w);

 private:
  std::mt19937_64 gen_;
};

}  // namespace hdtm
