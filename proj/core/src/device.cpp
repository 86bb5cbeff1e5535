#include <algorithm>

#include "covspec/engine.hpp"
#include "covspec/error.hpp"

namespace covspec {

DeviceRole::DeviceRole(const SyntheticModelPair& models, VisualContext draft_context,
                       const Query& query, std::uint64_t seed, DeviceParams params)
    : models_(models),
      context_(std::move(draft_context)),
      query_(query),
      seed_(seed),
      params_(std::move(params)) {
  params_.controller.validate();
  params_.payload.validate();
  params_.channel.validate();
  if (!(params_.gamma >= 0.0)) fail(Errc::kConfigError, "gamma must be nonnegative");
  if (params_.max_new_tokens == 0) fail(Errc::kConfigError, "max_new_tokens must be positive");
  if (params_.controller.k_max > 0xFFFF) fail(Errc::kConfigError, "k_max exceeds the wire limit");
  if (!(params_.device_token_s >= 0.0)) fail(Errc::kConfigError, "device_token_s must be nonnegative");
  if (params_.branching) fan_out(params_.f0, params_.rho, 0);
}

DeviceRole::Step& DeviceRole::step(const std::vector<TokenId>& prefix, bool& computed) {
  if (auto it = cache_.find(prefix); it != cache_.end()) {
    computed = false;
    return it->second;
  }
  computed = true;
  LogitVector z = models_.draft_logits(context_, query_, prefix);
  ProbDist p = softmax(z);
  const double m = margin(p);
  const TokenId t = params_.greedy
                        ? argmax(p)
                        : sample_at(p, stream_uniform(seed_, streams::kDraft, prefix.size()));
  return cache_.emplace(prefix, Step{std::move(z), std::move(p), m, t}).first->second;
}

void DeviceRole::prune(const std::vector<TokenId>& committed) {
  std::erase_if(cache_, [&](const auto& entry) {
    const auto& key = entry.first;
    return key.size() < committed.size() ||
           !std::equal(committed.begin(), committed.end(), key.begin());
  });
}

bool DeviceRole::finished(const std::vector<TokenId>& seq) const {
  if (seq.size() >= params_.max_new_tokens) return true;
  return params_.eos && !seq.empty() && seq.back() == *params_.eos;
}

DeviceResult DeviceRole::run(DeviceLink& link) {
  DeviceResult res;
  LengthController controller(params_.controller);
  std::vector<TokenId> committed;
  std::size_t edge_len = 0;
  double now = 0.0;
  const std::size_t vocab = models_.vocab().size();

  auto draft_at = [&](const std::vector<TokenId>& prefix) -> const Step& {
    bool computed = false;
    Step& s = step(prefix, computed);
    if (computed) {
      ++res.forward_passes;
      now += params_.device_token_s;
    } else if (s.from_branch) {
      ++res.branch_tokens_reused;
      s.from_branch = false;
    }
    return s;
  };
  // A branch pass that the reply would interrupt is abandoned at the arrival.
  auto branch_step = [&](const std::vector<TokenId>& prefix, RoundLog& log,
                         std::optional<Delivery>& reply) -> const Step* {
    if (!cache_.contains(prefix)) {
      reply = link.poll(now + params_.device_token_s);
      if (reply) {
        now = std::max(now, reply->arrival_s);
        return nullptr;
      }
    }
    bool computed = false;
    Step& s = step(prefix, computed);
    if (computed) {
      ++res.forward_passes;
      ++log.branch_passes;
      now += params_.device_token_s;
      s.from_branch = true;
    }
    return &s;
  };
  auto passes_gate = [&](const Step& s) {
    return params_.margin_gate && !gate(s.margin, params_.gamma).verify;
  };
  auto commit_gated = [&](TokenId t) {
    res.gated_positions.push_back(committed.size());
    committed.push_back(t);
    ++res.gated;
  };

  while (!finished(committed)) {
    const std::size_t k = params_.length_adapt ? controller.k() : params_.controller.k_init;

    // Draft until k tested tokens accumulate. Gated tokens commit locally
    // while the segment is empty; later ones ride in the segment as kGatedCode.
    DraftSegment seg;
    std::vector<TokenId> work = committed;
    std::size_t tested = 0;
    while (!finished(work)) {
      const Step& s = draft_at(work);
      const bool gated = passes_gate(s);
      if (gated && seg.tokens.empty()) {
        commit_gated(s.token);
        work.push_back(s.token);
        continue;
      }
      if (!gated && tested == k) break;
      seg.tokens.push_back(s.token);
      seg.draft_logits.push_back(s.logits);
      seg.draft_logit_codes.push_back(gated ? kGatedCode : draft_logit_code(s.probs, s.token));
      work.push_back(s.token);
      if (!gated) ++tested;
    }
    if (seg.tokens.empty()) break;

    seg.start_pos = committed.size();
    seg.gated_prefix.assign(committed.begin() + static_cast<std::ptrdiff_t>(edge_len),
                            committed.end());
    const std::size_t k_used = seg.size();

    Message request;
    if (params_.dvc) {
      request = Uplink{seg.gated_prefix, seg.tokens, seg.draft_logit_codes};
    } else {
      UplinkFull full{seg.gated_prefix, seg.tokens, static_cast<std::uint32_t>(vocab), {}};
      full.draft_logits.reserve(k_used * vocab);
      for (std::size_t i = 0; i < k_used; ++i) {
        if (seg.is_gated(i)) {
          full.draft_logits.insert(full.draft_logits.end(), vocab, kGatedCode);
          continue;
        }
        for (double x : seg.draft_logits[i].values()) full.draft_logits.push_back(f16_encode(x));
      }
      request = std::move(full);
    }
    RoundLog log;
    log.k = k;
    log.k_used = tested;
    log.n_context = seg.gated_prefix.size() + (k_used - tested);
    log.up_bits = payload_bits(request, params_.payload);
    log.send_s = now;
    const std::size_t up_frame = link.send(request, now);
    edge_len = committed.size();

    // Branch planning while the verification is in flight.
    std::optional<Delivery> reply = link.poll(now);
    BranchPlan plan;
    bool planned = false;
    std::vector<LogitVector> rows = seg.draft_logits;
    if (params_.branching && !reply && !finished(work)) {
      if (const Step* next = branch_step(work, log, reply)) rows.push_back(next->logits);
    }
    if (params_.branching && !reply) {
      bool budget_left = log.branch_passes < params_.branch_budget;
      plan = plan_branches(seg.tokens, rows, params_.f0, params_.rho);
      std::erase_if(plan.branches, [&](const BranchPlan::Branch& br) {
        return br.outcome < k_used && seg.is_gated(br.outcome);
      });
      planned = true;

      std::vector<std::vector<TokenId>> prefixes;
      std::vector<std::size_t> order(plan.branches.size());
      for (std::size_t b = 0; b < plan.branches.size(); ++b) {
        const auto& br = plan.branches[b];
        std::vector<TokenId> p = committed;
        p.insert(p.end(), seg.tokens.begin(), seg.tokens.begin() + static_cast<std::ptrdiff_t>(br.outcome));
        p.push_back(br.token);
        prefixes.push_back(std::move(p));
        order[b] = b;
      }
      // Full acceptance first, then rejections from the latest position back.
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return plan.branches[a].outcome > plan.branches[b].outcome;
      });
      std::size_t cursor = 0;
      while (budget_left && !order.empty()) {
        reply = link.poll(now);
        if (reply) break;
        std::size_t tried = 0;
        while (tried < order.size() && finished(prefixes[order[cursor % order.size()]])) {
          ++cursor;
          ++tried;
        }
        if (tried == order.size()) break;
        const std::size_t b = order[cursor % order.size()];
        ++cursor;
        const Step* s = branch_step(prefixes[b], log, reply);
        if (s == nullptr) break;
        plan.branches[b].continuation.push_back(s->token);
        prefixes[b].push_back(s->token);
        budget_left = log.branch_passes < params_.branch_budget;
      }
    }
    res.branch_passes += log.branch_passes;

    if (!reply) {
      reply = link.recv();
      if (reply->arrival_s > now) {
        log.idle_s = reply->arrival_s - now;
        now = reply->arrival_s;
      }
    }
    const Delivery& d = *reply;
    log.arrival_s = d.arrival_s;
    log.down_bits = payload_bits(d.msg, params_.payload);

    std::size_t n_acc = 0;
    bool full_accept = false;
    TokenId follow = 0;
    if (const auto* acc = std::get_if<DownlinkAccept>(&d.msg)) {
      if (acc->accepted_len != k_used) fail(Errc::kProtocolFault, "accept reply with a short prefix");
      n_acc = k_used;
      full_accept = true;
      follow = acc->bonus;
      if (!models_.vocab().contains(follow)) fail(Errc::kProtocolFault, "bonus token outside vocabulary");
    } else if (const auto* rej = std::get_if<DownlinkReject>(&d.msg)) {
      if (!params_.dvc) fail(Errc::kProtocolFault, "unexpected target logits");
      if (rej->accepted_len >= k_used || rej->target_logits.size() != vocab) {
        fail(Errc::kProtocolFault, "malformed rejection reply");
      }
      n_acc = rej->accepted_len;
      VerificationOutcome outcome{n_acc, TargetLogits{rej->target_logits}};
      follow = device_correct(outcome, seg, seed_, params_.greedy);
    } else if (const auto* cor = std::get_if<DownlinkCorrected>(&d.msg)) {
      if (params_.dvc) fail(Errc::kProtocolFault, "unexpected edge correction");
      if (cor->accepted_len >= k_used || seg.is_gated(cor->accepted_len) ||
          !models_.vocab().contains(cor->correction)) {
        fail(Errc::kProtocolFault, "malformed correction reply");
      }
      n_acc = cor->accepted_len;
      follow = cor->correction;
    } else {
      fail(Errc::kProtocolFault, "device received an uplink message");
    }

    std::size_t tested_acc = 0;
    for (std::size_t i = 0; i < k_used; ++i) {
      if (i >= n_acc) break;
      if (seg.is_gated(i)) {
        commit_gated(seg.tokens[i]);
      } else {
        res.verified_positions.push_back(committed.size());
        committed.push_back(seg.tokens[i]);
        ++tested_acc;
      }
    }
    edge_len += n_acc;
    res.drafted += tested;
    res.accepted += tested_acc;

    if (full_accept) {
      if (!finished(committed)) {
        // The gate applies at every position, including the one a bonus fills.
        const Step* s = params_.margin_gate ? &draft_at(committed) : nullptr;
        if (s != nullptr && passes_gate(*s)) {
          commit_gated(s->token);
        } else {
          res.verified_positions.push_back(committed.size());
          committed.push_back(follow);
          ++res.bonuses;
        }
      }
    } else {
      res.verified_positions.push_back(committed.size());
      committed.push_back(follow);
      ++res.corrections;
    }

    if (planned && committed.size() > seg.start_pos + n_acc) {
      const std::size_t outcome = full_accept ? k_used : n_acc;
      const auto* hit = resolve_branches(plan, outcome, committed[seg.start_pos + n_acc]);
      log.branch_hit = hit != nullptr && !hit->continuation.empty();
      if (log.branch_hit) ++res.branch_hits;
    }

    log.n_acc = tested_acc;
    log.full_accept = full_accept;
    const std::uint64_t reject_down = params_.dvc
                                          ? downlink_bits(DownlinkKind::kReject, vocab, params_.payload)
                                          : downlink_bits_corrected(params_.payload);
    log.t_rej = latency(log.up_bits + reject_down, params_.channel);
    log.t_comm = latency(log.up_bits, params_.channel) + latency(log.down_bits, params_.channel);
    if (params_.length_adapt) controller.update(tested_acc, tested, log.t_rej);

    RoundRecord rec;
    rec.up_bits = log.up_bits;
    rec.down_bits = log.down_bits;
    rec.context_bits = static_cast<std::uint64_t>(log.n_context) * params_.payload.b_id;
    rec.wire_bytes = up_frame + d.frame_bytes;
    rec.t_comm = log.t_comm;
    res.ledger.record(rec);
    res.idle_s += log.idle_s;
    res.rounds.push_back(log);

    prune(committed);
  }

  res.committed = std::move(committed);
  res.modeled_s = now;
  return res;
}

}  // namespace covspec
