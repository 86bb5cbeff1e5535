#include "covspec/tokensel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "covspec/error.hpp"
#include "covspec/jacobi.hpp"

namespace covspec {

namespace {

std::vector<std::uint32_t> top_indices(const std::vector<double>& v, std::size_t count) {
  std::vector<std::uint32_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return v[a] > v[b]; });
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<double> min_max(const std::vector<double>& v) {
  if (v.empty()) return {};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double low = *lo;
  const double span = *hi - *lo;
  std::vector<double> out(v.size(), 0.5);
  if (span > 0.0) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - low) / span;
  }
  return out;
}

}  // namespace

void SelectionConfig::validate(std::size_t n, std::size_t dim, std::size_t layers) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(Errc::kInvalidSelection, "lambda must lie in [0, 1]");
  if (preselect_m > n) fail(Errc::kInvalidM, "M exceeds the number of visual tokens");
  if (budget == 0 || budget > preselect_m) {
    fail(Errc::kInvalidSelection, "B_vis must satisfy 1 <= B_vis <= M");
  }
  if (rank == 0 || rank >= std::min(preselect_m, dim)) {
    fail(Errc::kInvalidRank, "rank must satisfy 1 <= r < min(M, d)");
  }
  if (late_layers == 0 || late_layers > layers) fail(Errc::kInvalidK, "K must satisfy 1 <= K <= L");
}

ScoreVector query_scores(const VisualTokenSet& visual, const Query& query) {
  const auto keywords = query.keyword_indices();
  if (keywords.empty()) fail(Errc::kNoKeywords, "query has no keywords");
  if (query.embeddings.cols() != visual.dim()) {
    fail(Errc::kInvalidVisual, "query embedding dimension differs from visual dimension");
  }
  std::vector<double> key_norms;
  for (std::size_t j : keywords) {
    const double n = std::sqrt(dot(query.embeddings.row(j), query.embeddings.row(j)));
    if (n == 0.0) fail(Errc::kZeroNormEmbedding, "keyword '" + query.terms[j] + "' has zero norm");
    key_norms.push_back(n);
  }
  ScoreVector out{std::vector<double>(visual.count()), ScoreKind::kQuery};
  for (std::size_t i = 0; i < visual.count(); ++i) {
    auto e = visual.embeddings.row(i);
    const double en = std::sqrt(dot(e, e));
    if (en == 0.0) fail(Errc::kZeroNormEmbedding, "visual token " + std::to_string(i) + " has zero norm");
    double best = -INFINITY;
    for (std::size_t k = 0; k < keywords.size(); ++k) {
      best = std::max(best, dot(e, query.embeddings.row(keywords[k])) / (en * key_norms[k]));
    }
    out.values[i] = std::clamp(best, -1.0, 1.0);
  }
  return out;
}

ScoreVector activity_scores(const VisualTokenSet& visual, std::size_t late_layers) {
  const std::size_t layers = visual.layers();
  if (late_layers == 0 || late_layers > layers) fail(Errc::kInvalidK, "K must satisfy 1 <= K <= L");
  ScoreVector out{std::vector<double>(visual.count(), 0.0), ScoreKind::kActivity};
  for (std::size_t i = 0; i < visual.count(); ++i) {
    double total = 0.0;
    for (std::size_t l = layers - late_layers + 1; l <= layers; ++l) {
      auto cur = visual.hidden[l].row(i);
      auto prev = visual.hidden[l - 1].row(i);
      double sq = 0.0;
      for (std::size_t j = 0; j < cur.size(); ++j) {
        const double diff = cur[j] - prev[j];
        sq += diff * diff;
      }
      total += std::sqrt(sq);
    }
    out.values[i] = total / static_cast<double>(late_layers);
  }
  return out;
}

ScoreVector blend_scores(const ScoreVector& query, const ScoreVector& activity, double lambda) {
  if (query.size() != activity.size()) fail(Errc::kInvalidSelection, "score vectors differ in length");
  const auto q = min_max(query.values);
  const auto a = min_max(activity.values);
  ScoreVector out{std::vector<double>(q.size()), ScoreKind::kBlended};
  for (std::size_t i = 0; i < q.size(); ++i) out.values[i] = lambda * q[i] + (1.0 - lambda) * a[i];
  return out;
}

std::vector<std::uint32_t> preselect_top_m(const ScoreVector& scores, std::size_t m) {
  if (m > scores.size()) fail(Errc::kInvalidM, "M exceeds the number of scored tokens");
  return top_indices(scores.values, m);
}

ScoreVector subspace_energies(const Matrix& rows, std::size_t rank) {
  const TruncatedSvd svd = truncated_svd(rows, rank);
  ScoreVector out{std::vector<double>(rows.rows(), 0.0), ScoreKind::kEnergy};
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    double c = 0.0;
    for (std::size_t j = 0; j < rank; ++j) {
      const double x = svd.right(i, j) * svd.singular_values[j];
      c += x * x;
    }
    out.values[i] = c;
  }
  return out;
}

std::vector<std::uint32_t> svd_energy_select(const Matrix& rows, std::size_t rank,
                                             std::size_t budget) {
  const std::size_t m = rows.rows();
  if (rank == 0 || rank >= std::min(m, rows.cols())) {
    fail(Errc::kInvalidRank, "rank must satisfy 1 <= r < min(M, d)");
  }
  if (budget > m) fail(Errc::kInvalidSelection, "B_vis exceeds M");
  if (budget == m) {
    std::vector<std::uint32_t> all(m);
    std::iota(all.begin(), all.end(), 0u);
    return all;
  }
  return top_indices(subspace_energies(rows, rank).values, budget);
}

std::vector<std::uint32_t> select_visual_tokens(const VisualTokenSet& visual, const Query& query,
                                                const SelectionConfig& config) {
  visual.validate();
  config.validate(visual.count(), visual.dim(), visual.layers());
  const auto blended = blend_scores(query_scores(visual, query),
                                    activity_scores(visual, config.late_layers), config.lambda);
  const auto pre = preselect_top_m(blended, config.preselect_m);

  const Matrix& last = visual.hidden.back();
  Matrix rows(pre.size(), visual.dim());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    auto src = last.row(pre[i]);
    std::copy(src.begin(), src.end(), rows.row(i).begin());
  }
  const auto picked = svd_energy_select(rows, config.rank, config.budget);
  std::vector<std::uint32_t> out;
  out.reserve(picked.size());
  for (std::uint32_t p : picked) out.push_back(pre[p]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace covspec
