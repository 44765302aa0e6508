#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace skillgraph {

using Embedding = std::vector<double>;

// Maps text to a unit-norm vector. Implementations must be deterministic and
// safe to call concurrently. Failures are reported as Error(ProviderFailure).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Offline provider for tests and desk-scale runs. Texts sharing a
// surface::canonical_key get a common base vector; each text adds a
// perturbation orthogonal to that base with norm <= max_perturbation, so two
// variants of one canonical have cosine >= (1 - p^2) / (1 + p^2) (> 0.95 at
// the default 0.15). Unrelated canonicals are independent Gaussian
// directions, so their cosine concentrates around 0 with sd 1/sqrt(dim).
class StubEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit StubEmbeddingProvider(std::size_t dimension = 256, double max_perturbation = 0.15);

  std::size_t dimension() const override { return dimension_; }
  Embedding embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
  double max_perturbation_;
};

}  // namespace skillgraph
