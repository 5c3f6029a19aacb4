#include "hdtm/math_util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdtm {

double log_gamma(double x) {
  // Lanczos approximation, g = 7.
  static const double cof[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (!(x > 0.0)) throw std::domain_error("log_gamma: x must be positive");
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
  }
  double z = x - 1.0;
  double a = cof[0];
  for (int i = 1; i < 9; ++i) a += cof[i] / (z + i);
  double t = z + 7.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) {
    if (x != kNegInf) s += std::exp(x - m);
  }
  return m + std::log(s);
}

std::vector<double> normalize_log_weights(const std::vector<double>& log_w) {
  std::vector<double> probs(log_w.size(), 0.0);
  double lse = log_sum_exp(log_w);
  if (lse == kNegInf)
    throw std::runtime_error("normalize_log_weights: all weights are zero");
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    probs[i] = log_w[i] == kNegInf ? 0.0 : std::exp(log_w[i] - lse);
  }
  return probs;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = splitmix64(h ^ (b + 0xd1b54a32d192ed03ULL));
  h = splitmix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

std::uint32_t Rng::uniform_int(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be > 0");
  std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  for (;;) {
    std::uint64_t r = gen_();
    if (r < bound) return static_cast<std::uint32_t>(r % n);
  }
}

int Rng::categorical(const std::vector<double>& probs) {
  double total = 0.0;
  for (double p : probs) total += p;
  double u = uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int Rng::log_categorical(const std::vector<double>& log_w) {
  return categorical(normalize_log_weights(log_w));
}

}  // namespace hdtm
