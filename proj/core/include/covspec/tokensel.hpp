#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "covspec/matrix.hpp"
#include "covspec/models.hpp"

namespace covspec {

struct SelectionConfig {
  double lambda = 0.5;
  std::size_t preselect_m = 128;  // M
  std::size_t rank = 32;          // r
  std::size_t budget = 64;        // B_vis
  std::size_t late_layers = 3;    // K

  /// Checks B_vis <= M <= N, 1 <= r < min(M, d), 1 <= K <= L, lambda in [0, 1].
  void validate(std::size_t n, std::size_t dim, std::size_t layers) const;
};

enum class ScoreKind { kQuery, kActivity, kBlended, kEnergy };

struct ScoreVector {
  std::vector<double> values;
  ScoreKind kind = ScoreKind::kBlended;

  std::size_t size() const noexcept { return values.size(); }
};

/// Max cosine similarity between each visual embedding and the query keywords.
ScoreVector query_scores(const VisualTokenSet& visual, const Query& query);

/// Mean L2 norm of the hidden-state change over the last K layers.
ScoreVector activity_scores(const VisualTokenSet& visual, std::size_t late_layers);

/// Min-max normalizes both inputs (constant vectors become 0.5) and mixes
/// lambda * query + (1 - lambda) * activity.
ScoreVector blend_scores(const ScoreVector& query, const ScoreVector& activity, double lambda);

/// Indices of the M largest scores (ties to the lower index), ascending.
std::vector<std::uint32_t> preselect_top_m(const ScoreVector& scores, std::size_t m);

/// Per-row energy in the rank-r right singular subspace: ||(V_r Sigma_r)_{i,:}||^2.
/// `rows` holds one representation vector per preselected token.
ScoreVector subspace_energies(const Matrix& rows, std::size_t rank);

/// Positions (0..M-1, ascending) of the `budget` rows with the largest
/// subspace energy, ties to the lower position.
std::vector<std::uint32_t> svd_energy_select(const Matrix& rows, std::size_t rank,
                                             std::size_t budget);

/// Full pipeline: query and activity scoring, blend, top-M, subspace-energy
/// reduction on the final-layer hidden states. Returns B_vis ascending indices.
std::vector<std::uint32_t> select_visual_tokens(const VisualTokenSet& visual, const Query& query,
                                                const SelectionConfig& config);

}  // namespace covspec
