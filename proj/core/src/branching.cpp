#include "covspec/branching.hpp"

#include <cmath>

#include "covspec/error.hpp"

namespace covspec {

std::vector<std::size_t> fan_out(std::size_t f0, double rho, std::size_t k) {
  if (f0 < 1) fail(Errc::kConfigError, "F0 must be at least 1");
  if (!(rho > 0.0 && rho < 1.0)) fail(Errc::kConfigError, "rho must lie in (0, 1)");
  std::vector<std::size_t> f(k + 1);
  double scale = 1.0;
  for (std::size_t j = 0; j <= k; ++j) {
    const double v = std::ceil(static_cast<double>(f0) * scale);
    f[j] = v < 1.0 ? 1 : static_cast<std::size_t>(v);
    scale *= rho;
  }
  return f;
}

std::vector<TokenId> BranchPlan::candidates(std::size_t outcome) const {
  std::vector<TokenId> out;
  for (const Branch& b : branches) {
    if (b.outcome == outcome) out.push_back(b.token);
  }
  return out;
}

BranchPlan plan_branches(std::span<const TokenId> drafted,
                         std::span<const LogitVector> draft_logits, std::size_t f0, double rho) {
  const std::size_t k = drafted.size();
  if (draft_logits.size() != k + 1 && draft_logits.size() != k) {
    fail(Errc::kPreconditionViolation, "branch planning needs draft logits for k or k + 1 positions");
  }
  const auto f = fan_out(f0, rho, k);
  BranchPlan plan;
  plan.segment_len = k;
  for (std::size_t j = 0; j < draft_logits.size(); ++j) {
    const std::optional<TokenId> exclude = j < k ? std::optional<TokenId>(drafted[j]) : std::nullopt;
    for (TokenId t : top_tokens(draft_logits[j].values(), f[j], exclude)) {
      plan.branches.push_back({j, t, {}});
    }
  }
  return plan;
}

const BranchPlan::Branch* resolve_branches(const BranchPlan& plan, std::size_t outcome,
                                           TokenId token) {
  if (outcome > plan.segment_len) {
    fail(Errc::kProtocolFault, "verification outcome does not match the branch plan");
  }
  for (const auto& b : plan.branches) {
    if (b.outcome == outcome && b.token == token) return &b;
  }
  return nullptr;
}

}  // namespace covspec
