#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covspec/matrix.hpp"
#include "covspec/probcore.hpp"

namespace covspec {

/// N visual tokens with their input embeddings and per-layer hidden states.
/// `hidden[l]` is an N x d matrix for layer l = 0..L, layer 0 being the input.
struct VisualTokenSet {
  Matrix embeddings;
  std::vector<Matrix> hidden;
  /// Ground-truth importance used by the generator and as per-token weights in
  /// the synthetic models. All ones when not generated.
  std::vector<double> importance;
  /// Indices of tokens planted to align with query keywords.
  std::vector<std::uint32_t> planted;

  std::size_t count() const noexcept { return embeddings.rows(); }
  std::size_t dim() const noexcept { return embeddings.cols(); }
  std::size_t layers() const noexcept { return hidden.empty() ? 0 : hidden.size() - 1; }

  /// Throws kInvalidVisual when shapes disagree or N, d, L are zero.
  void validate() const;
};

/// Query terms with embeddings and a keyword mask.
struct Query {
  std::vector<std::string> terms;
  Matrix embeddings;
  std::vector<bool> keyword_mask;

  /// Lowercases and splits `text` on non-alphanumerics, embeds each term with a
  /// seeded Gaussian keyed by the term, and marks non-stopwords as keywords.
  static Query from_text(std::string_view text, std::size_t dim, std::uint64_t seed);

  std::vector<std::size_t> keyword_indices() const;
  std::uint64_t hash() const noexcept;
};

struct PlantSpec {
  std::size_t count = 16;
  double planted_importance = 8.0;
  double background_importance = 0.05;
  /// Per-layer hidden-state increment is increment_scale * importance.
  double increment_scale = 1.0;
  /// Cosine between a planted embedding and its keyword; 1 plants an exact copy.
  double plant_cosine = 0.95;
};

/// Synthetic stand-in for the vision encoder output.
VisualTokenSet gen_visual(std::uint64_t seed, std::size_t n, std::size_t dim, std::size_t layers,
                          const Query& keywords, const PlantSpec& plant = {});

/// Precomputed visual contribution of one retained token subset.
struct VisualContext {
  std::vector<std::uint32_t> ids;  // sorted ascending
  std::vector<double> bias;        // |W| entries in [-12, 12]
  std::uint64_t key = 0;
  std::size_t total_tokens = 0;

  bool is_full() const noexcept { return ids.size() == total_tokens; }
};

/// Deterministic draft/target logit generators. The target core is a seeded
/// hash of (query, prefix) blended with the importance-weighted visual bias of
/// the retained token set; the draft blends that core with independent noise
/// in proportion to 1 - agreement. Logits lie in [-12, 12] on the binary16
/// lattice so they survive the wire unchanged.
class SyntheticModelPair {
 public:
  SyntheticModelPair(Vocabulary vocab, double agreement, std::uint64_t seed,
                     double visual_weight = 0.5);

  const Vocabulary& vocab() const noexcept { return vocab_; }
  double agreement() const noexcept { return agreement_; }
  std::uint64_t seed() const noexcept { return seed_; }

  VisualContext visual_context(const VisualTokenSet& visual,
                               std::span<const std::uint32_t> retained) const;
  VisualContext full_context(const VisualTokenSet& visual) const;

  LogitVector draft_logits(const VisualContext& visual, const Query& query,
                           std::span<const TokenId> prefix) const;
  LogitVector target_logits(const VisualContext& visual, const Query& query,
                            std::span<const TokenId> prefix) const;

 private:
  std::uint64_t context_key(const Query& query, std::span<const TokenId> prefix) const;
  bool easy_position(const Query& query, std::size_t position) const;
  std::vector<double> core(const VisualContext& visual, std::uint64_t ctx, bool easy) const;

  Vocabulary vocab_;
  double agreement_;
  std::uint64_t seed_;
  double visual_weight_;
};

}  // namespace covspec
