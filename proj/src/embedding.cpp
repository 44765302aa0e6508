#include "skillgraph/embedding.hpp"

#include <cmath>

#include "skillgraph/error.hpp"
#include "skillgraph/rng.hpp"
#include "skillgraph/surface.hpp"

namespace skillgraph {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "dimension", "embedding sizes differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

namespace {

Embedding gaussian_unit(std::uint64_t seed, std::size_t dim) {
  Rng rng(seed);
  Embedding v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace

StubEmbeddingProvider::StubEmbeddingProvider(std::size_t dimension, double max_perturbation)
    : dimension_(dimension), max_perturbation_(max_perturbation) {
  if (dimension < 2) throw Error(ErrorCode::InvalidArgument, "dimension", "stub provider needs dimension >= 2");
  if (!(max_perturbation >= 0.0 && max_perturbation < 1.0))
    throw Error(ErrorCode::InvalidArgument, "max_perturbation", "must lie in [0,1)");
}

Embedding StubEmbeddingProvider::embed(std::string_view text) const {
  const std::string key = surface::canonical_key(text);
  Embedding base = gaussian_unit(splitmix64(fnv1a64(key)), dimension_);
  if (max_perturbation_ == 0.0) return base;

  const std::uint64_t text_seed = splitmix64(fnv1a64(text) ^ 0x5bd1e995ULL);
  Embedding noise = gaussian_unit(text_seed, dimension_);
  double along = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) along += noise[i] * base[i];
  double norm = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    noise[i] -= along * base[i];
    norm += noise[i] * noise[i];
  }
  norm = std::sqrt(norm);
  // Magnitude in [0.5, 1] * max so distinct variants really differ.
  const double scale = max_perturbation_ * (0.5 + 0.5 * Rng(text_seed).uniform01());
  Embedding v(dimension_);
  double vnorm = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    v[i] = base[i] + (norm > 0.0 ? scale * noise[i] / norm : 0.0);
    vnorm += v[i] * v[i];
  }
  vnorm = std::sqrt(vnorm);
  for (auto& x : v) x /= vnorm;
  return v;
}

}  // namespace skillgraph
