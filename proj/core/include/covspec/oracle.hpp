#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "covspec/probcore.hpp"
#include "covspec/rng.hpp"

namespace covspec {

/// Next-token distribution for every prefix shorter than the horizon.
struct PrefixTable {
  std::size_t vocab = 0;
  std::map<std::vector<TokenId>, ProbDist> dists;

  /// Throws kInvalidPrefix when the prefix has no entry.
  const ProbDist& at(const std::vector<TokenId>& prefix) const;
};

/// Random table over all prefixes of length < horizon. When `sparsity` > 0,
/// each entry is zeroed with that probability (at least one entry survives).
PrefixTable random_prefix_table(std::size_t vocab, std::size_t horizon, SeededRng& rng,
                                double sparsity = 0.0);

/// Law of the first `horizon` committed tokens under the gate-free,
/// branch-free protocol with fixed draft length k, computed by enumerating
/// every draft, acceptance and correction branch with its probability.
std::map<std::vector<TokenId>, double> protocol_law(const PrefixTable& p_d,
                                                    const PrefixTable& p_t, std::size_t k,
                                                    std::size_t horizon);

/// Autoregressive law of the target over `horizon` tokens.
std::map<std::vector<TokenId>, double> target_law(const PrefixTable& p_t, std::size_t horizon);

/// Largest total-variation distance, over prefix lengths 1..horizon, between
/// the protocol's committed-prefix law and the target's. Throws kTooLarge
/// when |W| > 6, k > 3 or horizon > 3.
double exactness_oracle(const PrefixTable& p_d, const PrefixTable& p_t, std::size_t k,
                        std::size_t horizon);

}  // namespace covspec
