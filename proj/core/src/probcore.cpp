#include "covspec/probcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "covspec/error.hpp"

namespace covspec {

Vocabulary::Vocabulary(std::size_t size) : size_(size) {
  if (size < 2) {
    fail(Errc::kInvalidVocabulary, "vocabulary size must be >= 2, got " + std::to_string(size));
  }
}

LogitVector::LogitVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) fail(Errc::kInvalidLogits, "non-finite logit");
  }
}

ProbDist::ProbDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) fail(Errc::kInvalidDistribution, "empty distribution");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      fail(Errc::kInvalidDistribution, "negative or non-finite probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    fail(Errc::kInvalidDistribution, "probabilities sum to " + std::to_string(sum));
  }
}

ProbDist ProbDist::one_hot(std::size_t size, TokenId token) {
  std::vector<double> p(size, 0.0);
  if (token >= size) fail(Errc::kInvalidDistribution, "one-hot token out of range");
  p[token] = 1.0;
  return ProbDist(std::move(p));
}

ProbDist ProbDist::uniform(std::size_t size) {
  return ProbDist(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

ProbDist softmax(std::span<const double> logits) {
  if (logits.empty()) fail(Errc::kInvalidLogits, "empty logit vector");
  double m = -INFINITY;
  for (double z : logits) {
    if (!std::isfinite(z)) fail(Errc::kInvalidLogits, "non-finite logit");
    m = std::max(m, z);
  }
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return ProbDist(std::move(p));
}

double margin(const ProbDist& dist) {
  if (dist.size() < 2) fail(Errc::kTooFewTokens, "margin needs at least two tokens");
  double first = -1.0;
  double second = -1.0;
  for (double p : dist.probs()) {
    if (p > first) {
      second = first;
      first = p;
    } else if (p > second) {
      second = p;
    }
  }
  return first - second;
}

double acceptance_prob(double p_t, double p_d) {
  if (!(p_d > 0.0)) fail(Errc::kDegenerateDraftProb, "drafted token has zero draft probability");
  if (!(p_t >= 0.0)) fail(Errc::kInvalidDistribution, "negative target probability");
  return std::min(1.0, p_t / p_d);
}

ProbDist residual_dist(const ProbDist& p_t, const ProbDist& p_d) {
  if (p_t.size() != p_d.size()) fail(Errc::kInvalidDistribution, "vocabulary size mismatch");
  std::vector<double> r(p_t.size());
  double mass = 0.0;
  for (std::size_t w = 0; w < r.size(); ++w) {
    r[w] = std::max(p_t[w] - p_d[w], 0.0);
    mass += r[w];
  }
  if (!(mass > 0.0)) fail(Errc::kEmptyResidual, "target and draft distributions coincide");
  for (double& v : r) v /= mass;
  return ProbDist(std::move(r));
}

TokenId sample_at(const ProbDist& dist, double u) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t w = 0; w < dist.size(); ++w) {
    if (dist[w] > 0.0) last_positive = w;
    cum += dist[w];
    if (u < cum) return static_cast<TokenId>(w);
  }
  // Accumulated mass fell a rounding error short of u.
  return static_cast<TokenId>(last_positive);
}

TokenId sample(const ProbDist& dist, SeededRng& rng) { return sample_at(dist, rng.next_uniform()); }

TokenId argmax(const ProbDist& dist) {
  const auto p = dist.probs();
  return static_cast<TokenId>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<TokenId> top_tokens(std::span<const double> scores, std::size_t count,
                                std::optional<TokenId> exclude) {
  std::vector<TokenId> ids(scores.size());
  std::iota(ids.begin(), ids.end(), TokenId{0});
  if (exclude && *exclude < ids.size()) ids.erase(ids.begin() + *exclude);
  count = std::min(count, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(count), ids.end(),
                    [&](TokenId a, TokenId b) {
                      return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                    });
  ids.resize(count);
  return ids;
}

}  // namespace covspec
