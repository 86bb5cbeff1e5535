#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "covspec/rng.hpp"

namespace covspec {

using TokenId = std::uint32_t;

/// Output vocabulary W. Token IDs are integers in [0, size).
class Vocabulary {
 public:
  explicit Vocabulary(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  bool contains(TokenId t) const noexcept { return t < size_; }

 private:
  std::size_t size_;
};

/// Unnormalized scores over a vocabulary. All entries finite.
class LogitVector {
 public:
  LogitVector() = default;
  explicit LogitVector(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const LogitVector&, const LogitVector&) = default;

 private:
  std::vector<double> values_;
};

/// Normalized distribution over a vocabulary: entries >= 0, summing to 1
/// within 1e-9.
class ProbDist {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit ProbDist(std::vector<double> probs);
  static ProbDist one_hot(std::size_t size, TokenId token);
  static ProbDist uniform(std::size_t size);

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }

  friend bool operator==(const ProbDist&, const ProbDist&) = default;

 private:
  std::vector<double> probs_;
};

/// Max-subtracted softmax. Throws kInvalidLogits on non-finite input.
ProbDist softmax(std::span<const double> logits);
inline ProbDist softmax(const LogitVector& logits) { return softmax(logits.values()); }

/// Top-1 minus top-2 probability; 0 when the top value is tied.
double margin(const ProbDist& dist);

/// min(1, p_t / p_d). Throws kDegenerateDraftProb when p_d == 0.
double acceptance_prob(double p_t, double p_d);

/// Normalized positive part of (p_t - p_d). Throws kEmptyResidual when the
/// positive part has no mass.
ProbDist residual_dist(const ProbDist& p_t, const ProbDist& p_d);

/// Inverse-CDF lookup over ascending token IDs for a draw u in (0, 1).
TokenId sample_at(const ProbDist& dist, double u);

/// Draws one token, advancing `rng` by one.
TokenId sample(const ProbDist& dist, SeededRng& rng);

/// Highest-probability token, lowest ID on ties.
TokenId argmax(const ProbDist& dist);

/// The `count` highest-scoring token IDs in descending score order (ties to
/// the lower ID), skipping `exclude` when given.
std::vector<TokenId> top_tokens(std::span<const double> scores, std::size_t count,
                                std::optional<TokenId> exclude = std::nullopt);

}  // namespace covspec
