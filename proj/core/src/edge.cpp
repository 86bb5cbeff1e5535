#include <algorithm>
#include <cmath>

#include "covspec/engine.hpp"
#include "covspec/error.hpp"

namespace covspec {

double stream_uniform(std::uint64_t seed, const char* stream, std::size_t position) noexcept {
  return to_open_unit(SeededRng::draw(seed, fnv1a64(stream), position));
}

std::size_t DraftSegment::tested() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(draft_logit_codes.begin(), draft_logit_codes.end(),
                    [](F16 c) { return c != kGatedCode; }));
}

void DraftSegment::validate() const {
  if (tokens.empty()) fail(Errc::kPreconditionViolation, "draft segment is empty");
  if (draft_logit_codes.size() != tokens.size()) {
    fail(Errc::kPreconditionViolation, "one draft logit per drafted token is required");
  }
  if (is_gated(0)) fail(Errc::kPreconditionViolation, "first drafted token is not tested");
  if (!draft_logits.empty() && draft_logits.size() != tokens.size()) {
    fail(Errc::kPreconditionViolation, "draft logit rows do not match the drafted tokens");
  }
  for (F16 c : draft_logit_codes) {
    if (!(decode_draft_prob(c) > 0.0)) fail(Errc::kDegenerateDraftProb, "draft probability is zero");
  }
}

F16 draft_logit_code(const ProbDist& p_d, TokenId token) {
  if (token >= p_d.size()) fail(Errc::kInvalidValue, "token outside the draft distribution");
  const double p = p_d[token];
  if (!(p > 0.0)) fail(Errc::kDegenerateDraftProb, "drafted token has zero draft probability");
  return f16_encode_floor(std::log(p));
}

double decode_draft_prob(F16 code) noexcept { return std::exp(f16_decode(code)); }

std::size_t accepted_length(std::span<const double> alphas, std::span<const double> draws) {
  if (alphas.size() != draws.size()) fail(Errc::kPreconditionViolation, "one draw per position");
  std::size_t n = 0;
  while (n < alphas.size() && draws[n] <= alphas[n]) ++n;
  return n;
}

TokenId sample_correction(const ProbDist& p_t, const ProbDist& p_d, std::uint64_t seed,
                          std::size_t position, bool greedy) {
  if (greedy) return argmax(p_t);
  return sample_at(residual_dist(p_t, p_d), stream_uniform(seed, streams::kCorrect, position));
}

TokenId device_correct(const VerificationOutcome& outcome, const DraftSegment& segment,
                       std::uint64_t seed, bool greedy) {
  const auto* target = std::get_if<TargetLogits>(&outcome.payload);
  if (target == nullptr) {
    fail(Errc::kPreconditionViolation, "device correction needs a rejection outcome");
  }
  const std::size_t j = outcome.accepted_len;
  if (j >= segment.size() || j >= segment.draft_logits.size() || segment.is_gated(j)) {
    fail(Errc::kProtocolFault, "rejection index is not a tested token");
  }
  std::vector<double> z(target->logits.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = f16_decode(target->logits[i]);
  const ProbDist p_t = softmax(z);
  const ProbDist p_d = softmax(segment.draft_logits[j]);
  if (p_t.size() != p_d.size()) fail(Errc::kProtocolFault, "target logits have the wrong vocabulary");
  return sample_correction(p_t, p_d, seed, segment.start_pos + j, greedy);
}

EdgeRole::EdgeRole(const SyntheticModelPair& models, VisualContext full, const Query& query,
                   std::uint64_t seed, bool greedy)
    : models_(models), full_(std::move(full)), query_(query), seed_(seed), greedy_(greedy) {
  if (!full_.is_full()) fail(Errc::kInvalidVisual, "the edge verifies with the full visual set");
}

void EdgeRole::check_context(std::span<const TokenId> gated) const {
  // Every round after the first commits a follow-up token the edge has not
  // seen, so the next request must carry it.
  if (rounds_ > 0 && gated.empty()) {
    fail(Errc::kContextDesync, "request does not carry the tokens committed since the last round");
  }
}

EdgeRole::Verdict EdgeRole::run_verification(std::span<const TokenId> gated,
                                             std::span<const TokenId> draft,
                                             std::span<const F16> draft_codes) {
  if (draft.empty()) fail(Errc::kProtocolFault, "verification request without drafted tokens");
  if (draft.size() != draft_codes.size()) {
    fail(Errc::kProtocolFault, "drafted tokens and draft logits disagree in count");
  }
  if (draft_codes[0] == kGatedCode) fail(Errc::kProtocolFault, "first drafted token is not tested");
  for (TokenId t : gated) {
    if (!models_.vocab().contains(t)) fail(Errc::kProtocolFault, "context token outside vocabulary");
  }
  context_.insert(context_.end(), gated.begin(), gated.end());
  ++rounds_;

  // One target evaluation per drafted position plus the position after them,
  // as a single parallel verification pass would produce.
  std::vector<TokenId> prefix = context_;
  std::vector<LogitVector> logits;
  std::vector<double> alphas, draws;
  for (std::size_t i = 0; i <= draft.size(); ++i) {
    logits.push_back(models_.target_logits(full_, query_, prefix));
    ++target_passes_;
    if (i == draft.size()) break;
    const TokenId y = draft[i];
    if (!models_.vocab().contains(y)) fail(Errc::kProtocolFault, "drafted token outside vocabulary");
    const ProbDist p_t = softmax(logits.back());
    if (draft_codes[i] == kGatedCode) {
      alphas.push_back(1.0);
    } else if (greedy_) {
      alphas.push_back(argmax(p_t) == y ? 1.0 : 0.0);
    } else {
      alphas.push_back(acceptance_prob(p_t[y], decode_draft_prob(draft_codes[i])));
    }
    draws.push_back(stream_uniform(seed_, streams::kVerify, prefix.size()));
    prefix.push_back(y);
  }

  Verdict v;
  v.accepted = accepted_length(alphas, draws);
  context_.insert(context_.end(), draft.begin(),
                  draft.begin() + static_cast<std::ptrdiff_t>(v.accepted));
  const LogitVector& z = logits[v.accepted];
  if (v.accepted < draft.size()) {
    v.reject_logits.reserve(z.size());
    for (double x : z.values()) v.reject_logits.push_back(f16_encode(x));
    v.reject_p_t = softmax(z);
    return v;
  }
  const ProbDist p_t = softmax(z);
  v.bonus = greedy_ ? argmax(p_t)
                    : sample_at(p_t, stream_uniform(seed_, streams::kBonus, context_.size()));
  return v;
}

VerificationOutcome EdgeRole::verify(const DraftSegment& segment) {
  segment.validate();
  if (segment.start_pos != context_.size() + segment.gated_prefix.size()) {
    fail(Errc::kContextDesync, "segment does not continue the edge's committed prefix");
  }
  check_context(segment.gated_prefix);
  Verdict v = run_verification(segment.gated_prefix, segment.tokens, segment.draft_logit_codes);
  VerificationOutcome out;
  out.accepted_len = v.accepted;
  if (v.accepted == segment.size()) {
    out.payload = BonusToken{v.bonus};
  } else {
    out.payload = TargetLogits{std::move(v.reject_logits)};
  }
  return out;
}

Message EdgeRole::handle(const Message& request) {
  if (const auto* up = std::get_if<Uplink>(&request)) {
    check_context(up->gated);
    Verdict v = run_verification(up->gated, up->draft, up->draft_logits);
    const auto n = static_cast<std::uint16_t>(v.accepted);
    if (v.accepted == up->draft.size()) return DownlinkAccept{n, v.bonus};
    return DownlinkReject{n, std::move(v.reject_logits)};
  }
  if (const auto* full = std::get_if<UplinkFull>(&request)) {
    check_context(full->gated);
    const std::size_t w = models_.vocab().size();
    if (full->vocab_size != w) fail(Errc::kProtocolFault, "draft logits use another vocabulary");
    std::vector<std::optional<ProbDist>> rows;
    std::vector<F16> codes;
    rows.reserve(full->draft.size());
    for (std::size_t i = 0; i < full->draft.size(); ++i) {
      if (!models_.vocab().contains(full->draft[i])) {
        fail(Errc::kProtocolFault, "drafted token outside vocabulary");
      }
      if (full->draft_logits[i * w] == kGatedCode) {
        rows.emplace_back();
        codes.push_back(kGatedCode);
        continue;
      }
      std::vector<double> z(w);
      for (std::size_t t = 0; t < w; ++t) z[t] = f16_decode(full->draft_logits[i * w + t]);
      rows.push_back(softmax(z));
      codes.push_back(draft_logit_code(*rows.back(), full->draft[i]));
    }
    const std::size_t start = context_.size() + full->gated.size();
    Verdict v = run_verification(full->gated, full->draft, codes);
    const auto n = static_cast<std::uint16_t>(v.accepted);
    if (v.accepted == full->draft.size()) return DownlinkAccept{n, v.bonus};
    const TokenId c = sample_correction(*v.reject_p_t, *rows[v.accepted], seed_,
                                        start + v.accepted, greedy_);
    return DownlinkCorrected{n, c};
  }
  fail(Errc::kProtocolFault, "edge received a downlink message");
}

}  // namespace covspec
