#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace skillgraph {

// Seeded generator whose output is identical across standard libraries.
// std::*_distribution is implementation-defined, so everything here is
// derived directly from the mt19937_64 bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [lo, hi], inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }
  double normal();

  // First k entries of a seeded Fisher-Yates pass over [0, n).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace skillgraph
