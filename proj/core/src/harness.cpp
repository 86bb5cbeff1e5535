#include "covspec/harness.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "covspec/error.hpp"
#include "covspec/tokensel.hpp"

namespace covspec {

namespace {

const ExperimentConfig& validated(const ExperimentConfig& cfg) {
  cfg.validate();
  return cfg;
}

std::vector<std::uint32_t> choose_retained(const ExperimentConfig& cfg,
                                           const VisualTokenSet& visual, const Query& query) {
  std::vector<std::uint32_t> ids(visual.count());
  std::iota(ids.begin(), ids.end(), 0u);
  if (!cfg.vis_red) return ids;
  if (cfg.tok_sel) return select_visual_tokens(visual, query, cfg.selection());
  // Uniform random subset of the same size.
  SeededRng rng(cfg.seed, "random-subset");
  for (std::size_t i = 0; i < cfg.b_vis; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_u64() % (ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(cfg.b_vis);
  std::sort(ids.begin(), ids.end());
  return ids;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename Logits>
BaselineResult autoregressive(const ExperimentConfig& cfg, std::size_t tokens, const char* stream,
                              double per_token_s, Logits&& logits) {
  BaselineResult out;
  const auto start = std::chrono::steady_clock::now();
  while (out.text.size() < tokens) {
    const ProbDist p = softmax(logits(out.text));
    const TokenId t =
        cfg.greedy ? argmax(p) : sample_at(p, stream_uniform(cfg.seed, stream, out.text.size()));
    out.text.push_back(t);
    if (cfg.eos_token >= 0 && t == static_cast<TokenId>(cfg.eos_token)) break;
  }
  out.wall_s = seconds_since(start);
  out.modeled_s = static_cast<double>(out.text.size()) * per_token_s;
  const double elapsed = cfg.latency_mode == LatencyMode::kWall ? out.wall_s : out.modeled_s;
  out.tps = elapsed > 0.0 ? static_cast<double>(out.text.size()) / elapsed : 0.0;
  return out;
}

}  // namespace

Scenario::Scenario(const ExperimentConfig& cfg)
    : config(validated(cfg)),
      query(Query::from_text(cfg.query, cfg.embed_dim, cfg.seed)),
      visual(gen_visual(cfg.seed, cfg.num_visual, cfg.embed_dim, cfg.num_layers, query,
                        cfg.plant())),
      models(Vocabulary(cfg.vocab_size), cfg.agreement, cfg.seed, cfg.visual_weight),
      retained(choose_retained(cfg, visual, query)),
      full(models.full_context(visual)),
      draft(models.visual_context(visual, retained)) {}

Hello Scenario::hello() const {
  return Hello{kProtocolVersion, static_cast<std::uint32_t>(config.vocab_size), config.hash()};
}

LinkTiming Scenario::timing() const {
  return LinkTiming{config.channel(), config.payload(), config.edge_round_s};
}

double api_cost(std::size_t input_tokens, std::size_t output_tokens, double price_in,
                double price_out) {
  if (!(price_in >= 0.0 && price_out >= 0.0)) fail(Errc::kConfigError, "prices must be nonnegative");
  return (static_cast<double>(input_tokens) * price_in +
          static_cast<double>(output_tokens) * price_out) /
         1e6;
}

double cost_reduction(std::size_t prefill_tokens, std::size_t target_decode_tokens,
                      std::size_t baseline_tokens, double price_in, double price_out) {
  const double cost = api_cost(prefill_tokens, target_decode_tokens, price_in, price_out);
  const double base = api_cost(prefill_tokens, baseline_tokens, price_in, price_out);
  if (!(base > 0.0)) fail(Errc::kDegenerateBaseline, "baseline cost is zero");
  return 100.0 * (base - cost) / base;
}

BaselineResult run_edge_only(const Scenario& s, std::size_t tokens) {
  return autoregressive(s.config, tokens, "edge-only", s.config.edge_round_s,
                        [&](const std::vector<TokenId>& prefix) {
                          return s.models.target_logits(s.full, s.query, prefix);
                        });
}

BaselineResult run_device_only(const Scenario& s, std::size_t tokens) {
  return autoregressive(s.config, tokens, "device-only", s.config.device_token_s,
                        [&](const std::vector<TokenId>& prefix) {
                          return s.models.draft_logits(s.draft, s.query, prefix);
                        });
}

RunReport make_report(const Scenario& s, const DeviceResult& device, double wall_s,
                      const std::string& run_id) {
  const ExperimentConfig& cfg = s.config;
  const PayloadLedger& ledger = device.ledger;
  std::uint64_t up = 0, down = 0;
  for (const RoundRecord& r : ledger.rounds()) {
    up += r.up_bits;
    down += r.down_bits;
  }
  if (!ledger.consistent() || up != ledger.uplink_bits() || down != ledger.downlink_bits() ||
      ledger.rounds().size() != device.rounds.size()) {
    fail(Errc::kProtocolFault, "payload ledger totals disagree with per-round records");
  }

  RunReport r;
  r.run_id = run_id;
  r.committed_text = device.committed;
  const std::size_t n = device.committed.size();
  r.modeled_s = device.modeled_s;
  r.idle_s = device.idle_s;
  r.wall_s = wall_s;
  const double elapsed = cfg.latency_mode == LatencyMode::kWall ? wall_s : device.modeled_s;
  r.tokens_per_second = elapsed > 0.0 ? static_cast<double>(n) / elapsed : 0.0;

  const BaselineResult edge = run_edge_only(s, n);
  const BaselineResult local = run_device_only(s, n);
  r.edge_only_tps = edge.tps;
  r.device_only_tps = local.tps;
  r.speedup_vs_edge_only = edge.tps > 0.0 ? r.tokens_per_second / edge.tps : 0.0;

  r.uplink_bits = ledger.uplink_bits();
  r.downlink_bits = ledger.downlink_bits();
  r.context_bits = ledger.context_bits();
  r.overhead_bytes = ledger.overhead_bytes();
  r.comm_megabytes = static_cast<double>(ledger.total_bits()) / 8.0 / 1e6;

  r.rounds = device.rounds.size();
  r.drafted = device.drafted;
  r.accepted = device.accepted;
  r.corrections = device.corrections;
  r.gated = device.gated;
  r.acceptance_rate = device.drafted == 0 ? 1.0
                                          : static_cast<double>(device.accepted) /
                                                static_cast<double>(device.drafted);
  r.gated_fraction = n == 0 ? 0.0 : static_cast<double>(device.gated) / static_cast<double>(n);
  r.forward_passes = device.forward_passes;
  r.branch_passes = device.branch_passes;
  r.branch_hits = device.branch_hits;

  r.prefill_tokens = cfg.num_visual + s.query.terms.size();
  for (const RoundLog& log : device.rounds) r.target_decode_tokens += log.k_used + 1;
  r.cost_reduction_pct =
      cost_reduction(r.prefill_tokens, r.target_decode_tokens, edge.text.size(), cfg.price_in,
                     cfg.price_out);
  r.round_log = device.rounds;
  r.ledger_rounds = ledger.rounds();
  return r;
}

DeviceResult run_loopback(const Scenario& s) {
  EdgeRole edge(s.models, s.full, s.query, s.config.seed, s.config.greedy);
  LoopbackLink link(edge, s.timing());
  DeviceRole device(s.models, s.draft, s.query, s.config.seed, s.config.device_params());
  DeviceResult result = device.run(link);
  link.close();
  return result;
}

RunReport run_episode(const ExperimentConfig& cfg, const std::string& run_id) {
  const Scenario s(cfg);
  const auto start = std::chrono::steady_clock::now();
  const DeviceResult result = run_loopback(s);
  return make_report(s, result, seconds_since(start), run_id);
}

RunReport run_device_session(const ExperimentConfig& cfg, const std::string& host,
                             std::uint16_t port, const std::string& run_id) {
  const Scenario s(cfg);
  auto link = SocketDeviceLink::connect(host, port, s.hello(), s.timing(), cfg.timeout_s,
                                        cfg.timeout_s);
  const auto start = std::chrono::steady_clock::now();
  DeviceRole device(s.models, s.draft, s.query, cfg.seed, cfg.device_params());
  const DeviceResult result = device.run(*link);
  link->close();
  return make_report(s, result, seconds_since(start), run_id);
}

std::size_t serve_edge_session(const ExperimentConfig& cfg, EdgeServer& server) {
  const Scenario s(cfg);
  EdgeRole edge(s.models, s.full, s.query, cfg.seed, cfg.greedy);
  return server.serve_one(edge, s.hello(), cfg.timeout_s, cfg.timeout_s);
}

}  // namespace covspec
