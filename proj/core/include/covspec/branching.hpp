#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "covspec/probcore.hpp"

namespace covspec {

/// F_j = ceil(F_0 * rho^j) for j = 0..k, each at least 1. Throws kConfigError
/// unless F_0 >= 1 and 0 < rho < 1.
std::vector<std::size_t> fan_out(std::size_t f0, double rho, std::size_t k);

/// Candidate next tokens prepared for every possible verification outcome.
/// Outcome j < k means a rejection at segment index j; outcome k means full
/// acceptance.
struct BranchPlan {
  struct Branch {
    std::size_t outcome = 0;
    TokenId token = 0;
    /// Draft tokens precomputed after `token`.
    std::vector<TokenId> continuation;
  };

  std::size_t segment_len = 0;
  std::vector<Branch> branches;

  std::vector<TokenId> candidates(std::size_t outcome) const;
};

/// Fills candidate lists: at outcome j the top F_j tokens of `draft_logits[j]`,
/// excluding `drafted[j]` for j < k. `draft_logits` holds k + 1 rows, the
/// last one for the position after the segment, or k rows when no token can
/// follow a full acceptance.
BranchPlan plan_branches(std::span<const TokenId> drafted,
                         std::span<const LogitVector> draft_logits, std::size_t f0, double rho);

/// The branch matching (outcome, token), if any. Throws kProtocolFault when
/// the outcome does not fit the plan.
const BranchPlan::Branch* resolve_branches(const BranchPlan& plan, std::size_t outcome,
                                           TokenId token);

}  // namespace covspec
