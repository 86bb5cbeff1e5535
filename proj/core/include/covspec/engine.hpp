#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "covspec/branching.hpp"
#include "covspec/controller.hpp"
#include "covspec/f16.hpp"
#include "covspec/models.hpp"
#include "covspec/payload.hpp"
#include "covspec/transport.hpp"

namespace covspec {

/// Named random streams. Every draw is indexed by the absolute output position
/// it decides, so a token's randomness does not depend on round boundaries.
namespace streams {
inline constexpr const char* kDraft = "draft";
inline constexpr const char* kVerify = "verify";
inline constexpr const char* kBonus = "bonus";
inline constexpr const char* kCorrect = "correct";
}  // namespace streams

double stream_uniform(std::uint64_t seed, const char* stream, std::size_t position) noexcept;

/// Drafted tokens awaiting verification plus the locally committed tokens the
/// edge has not seen yet. A token the gate commits after the segment has
/// started stays in `tokens`, marked with kGatedCode; it is conditional on the
/// tested tokens before it.
struct DraftSegment {
  std::size_t start_pos = 0;  // output position of tokens[0]
  std::vector<TokenId> gated_prefix;
  std::vector<TokenId> tokens;
  /// p_d of each drafted token as carried on the wire (binary16 log-prob), or
  /// kGatedCode.
  std::vector<F16> draft_logit_codes;
  /// Full draft logits per drafted position, kept on the device.
  std::vector<LogitVector> draft_logits;

  std::size_t size() const noexcept { return tokens.size(); }
  bool is_gated(std::size_t i) const noexcept { return draft_logit_codes[i] == kGatedCode; }
  /// Tokens the edge tests.
  std::size_t tested() const noexcept;
  /// Checks the invariants: a tested first token, parallel arrays, positive
  /// probabilities.
  void validate() const;
};

struct BonusToken {
  TokenId token = 0;
};
struct TargetLogits {
  std::vector<F16> logits;
};
/// Edge-computed correction, used when the edge performs residual sampling.
struct CorrectedToken {
  TokenId token = 0;
};

struct VerificationOutcome {
  std::size_t accepted_len = 0;
  std::variant<BonusToken, TargetLogits, CorrectedToken> payload;

  bool full_accept() const noexcept { return std::holds_alternative<BonusToken>(payload); }
};

/// Wire form of p_d(token): the largest binary16 value not above log p_d, so
/// the decoded probability never exceeds the true one.
F16 draft_logit_code(const ProbDist& p_d, TokenId token);
double decode_draft_prob(F16 code) noexcept;

/// Number of leading positions accepted: position i is accepted when
/// draws[i] <= alphas[i], and acceptance stops at the first failure.
std::size_t accepted_length(std::span<const double> alphas, std::span<const double> draws);

/// Residual resampling at `position`. Greedy decoding takes the argmax of p_t
/// instead. Throws kEmptyResidual when p_t has no mass above p_d.
TokenId sample_correction(const ProbDist& p_t, const ProbDist& p_d, std::uint64_t seed,
                          std::size_t position, bool greedy);

/// Device-side correction from a rejection outcome. Throws
/// kPreconditionViolation on a full-accept outcome and kProtocolFault when the
/// rejected position is not a tested token.
TokenId device_correct(const VerificationOutcome& outcome, const DraftSegment& segment,
                       std::uint64_t seed, bool greedy);

/// Edge role: holds the committed prefix and the target model over the full
/// visual context.
class EdgeRole final : public EdgeService {
 public:
  EdgeRole(const SyntheticModelPair& models, VisualContext full, const Query& query,
           std::uint64_t seed, bool greedy);

  /// In-process verification. Throws kContextDesync when the segment does not
  /// continue the edge's prefix.
  VerificationOutcome verify(const DraftSegment& segment);

  /// Wire entry point for Uplink and UplinkFull requests.
  Message handle(const Message& request) override;

  const std::vector<TokenId>& context() const noexcept { return context_; }
  std::size_t rounds() const noexcept { return rounds_; }
  std::size_t target_passes() const noexcept { return target_passes_; }

 private:
  struct Verdict {
    std::size_t accepted = 0;
    std::optional<ProbDist> reject_p_t;
    std::vector<F16> reject_logits;
    TokenId bonus = 0;
  };
  Verdict run_verification(std::span<const TokenId> gated, std::span<const TokenId> draft,
                           std::span<const F16> draft_codes);
  void check_context(std::span<const TokenId> gated) const;

  const SyntheticModelPair& models_;
  VisualContext full_;
  const Query& query_;
  std::uint64_t seed_;
  bool greedy_;
  std::vector<TokenId> context_;
  std::size_t rounds_ = 0;
  std::size_t target_passes_ = 0;
};

struct DeviceParams {
  double gamma = 0.7;
  bool margin_gate = true;
  bool length_adapt = true;
  bool branching = true;
  bool dvc = true;
  bool greedy = false;
  ControllerParams controller;
  std::size_t f0 = 4;
  double rho = 0.5;
  std::size_t branch_budget = 16;
  std::size_t max_new_tokens = 1024;
  std::optional<TokenId> eos;
  double device_token_s = 0.02;
  PayloadConfig payload;
  ChannelConfig channel;
};

struct RoundLog {
  std::size_t k = 0;        // controller length for this round
  std::size_t k_used = 0;   // tested tokens sent
  std::size_t n_acc = 0;    // tested tokens accepted
  std::size_t n_context = 0;  // gated IDs carried, before and inside the segment
  bool full_accept = false;
  bool branch_hit = false;
  std::size_t branch_passes = 0;
  std::uint64_t up_bits = 0;
  std::uint64_t down_bits = 0;
  double t_comm = 0.0;
  double t_rej = 0.0;
  double send_s = 0.0;
  double arrival_s = 0.0;
  double idle_s = 0.0;
};

struct DeviceResult {
  std::vector<TokenId> committed;
  std::vector<RoundLog> rounds;
  PayloadLedger ledger;
  std::size_t forward_passes = 0;
  std::size_t branch_passes = 0;
  std::size_t gated = 0;
  std::size_t drafted = 0;
  std::size_t accepted = 0;
  std::size_t corrections = 0;
  std::size_t bonuses = 0;
  std::size_t branch_hits = 0;
  /// Drafting-phase cache hits on entries a branch pass computed.
  std::size_t branch_tokens_reused = 0;
  /// Output positions whose committed token the edge decided: accepted drafts,
  /// corrections and bonuses.
  std::vector<std::size_t> verified_positions;
  /// Output positions committed by the gate without the edge.
  std::vector<std::size_t> gated_positions;
  double modeled_s = 0.0;
  double idle_s = 0.0;
};

/// Device role: drafts over the reduced visual context, gates, adapts the
/// draft length, branches while waiting and corrects rejections.
class DeviceRole {
 public:
  DeviceRole(const SyntheticModelPair& models, VisualContext draft_context, const Query& query,
             std::uint64_t seed, DeviceParams params);

  DeviceResult run(DeviceLink& link);

 private:
  struct Step {
    LogitVector logits;
    ProbDist probs;
    double margin;
    TokenId token;
    bool from_branch = false;
  };

  /// Draft step for `prefix`, from cache or by a forward pass.
  Step& step(const std::vector<TokenId>& prefix, bool& computed);
  void prune(const std::vector<TokenId>& committed);
  bool finished(const std::vector<TokenId>& seq) const;

  const SyntheticModelPair& models_;
  VisualContext context_;
  const Query& query_;
  std::uint64_t seed_;
  DeviceParams params_;
  std::map<std::vector<TokenId>, Step> cache_;
};

}  // namespace covspec
