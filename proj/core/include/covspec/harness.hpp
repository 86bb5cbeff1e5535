#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "covspec/config.hpp"
#include "covspec/engine.hpp"
#include "covspec/models.hpp"
#include "covspec/transport.hpp"

namespace covspec {

/// Modeled per-step costs. Wall mode changes only the reported throughput.
struct LatencyModel {
  double device_token_s = 0.02;
  double edge_round_s = 0.12;
  LatencyMode mode = LatencyMode::kModeled;
};

/// Everything both roles derive from a config: query, visual set, models and
/// the two visual contexts.
struct Scenario {
  explicit Scenario(const ExperimentConfig& cfg);

  ExperimentConfig config;
  Query query;
  VisualTokenSet visual;
  SyntheticModelPair models;
  std::vector<std::uint32_t> retained;
  VisualContext full;
  VisualContext draft;

  Hello hello() const;
  LinkTiming timing() const;
};

struct BaselineResult {
  std::vector<TokenId> text;
  double modeled_s = 0.0;
  double wall_s = 0.0;
  double tps = 0.0;
};

struct RunReport {
  std::string run_id;
  std::vector<TokenId> committed_text;
  double tokens_per_second = 0.0;
  double speedup_vs_edge_only = 0.0;
  double comm_megabytes = 0.0;
  double cost_reduction_pct = 0.0;
  /// Accepted over drafted tokens; 1 when nothing was drafted.
  double acceptance_rate = 0.0;
  std::size_t rounds = 0;
  double gated_fraction = 0.0;

  double edge_only_tps = 0.0;
  double device_only_tps = 0.0;
  double modeled_s = 0.0;
  double idle_s = 0.0;
  double wall_s = 0.0;  // wall-clock, excluded from determinism checks
  std::uint64_t uplink_bits = 0;
  std::uint64_t downlink_bits = 0;
  std::uint64_t context_bits = 0;
  std::uint64_t overhead_bytes = 0;
  std::size_t forward_passes = 0;
  std::size_t branch_passes = 0;
  std::size_t branch_hits = 0;
  std::size_t drafted = 0;
  std::size_t accepted = 0;
  std::size_t corrections = 0;
  std::size_t gated = 0;
  std::size_t prefill_tokens = 0;
  std::size_t target_decode_tokens = 0;
  std::vector<RoundLog> round_log;
  std::vector<RoundRecord> ledger_rounds;
};

/// Proxy API cost in dollars; prices are per million tokens.
double api_cost(std::size_t input_tokens, std::size_t output_tokens, double price_in,
                double price_out);

/// Proxy API cost reduction in percent against an edge-only run of
/// `baseline_tokens` output tokens. Throws kDegenerateBaseline at zero
/// baseline cost.
double cost_reduction(std::size_t prefill_tokens, std::size_t target_decode_tokens,
                      std::size_t baseline_tokens, double price_in, double price_out);

/// Autoregressive baselines over the same models.
BaselineResult run_edge_only(const Scenario& s, std::size_t tokens);
BaselineResult run_device_only(const Scenario& s, std::size_t tokens);

/// Builds a report from a finished device session. Checks ledger consistency
/// and throws kProtocolFault on a mismatch.
RunReport make_report(const Scenario& s, const DeviceResult& device, double wall_s,
                      const std::string& run_id);

/// Runs the device role over an in-process link against a fresh edge, plus
/// both baselines.
RunReport run_episode(const ExperimentConfig& cfg, const std::string& run_id = "run-0");

/// Device side of a socket session against a running edge.
RunReport run_device_session(const ExperimentConfig& cfg, const std::string& host,
                             std::uint16_t port, const std::string& run_id = "run-0");

/// Edge side of a socket session: accepts one device and serves it.
std::size_t serve_edge_session(const ExperimentConfig& cfg, EdgeServer& server);

/// Raw device result, for tests that inspect positions and rounds.
DeviceResult run_loopback(const Scenario& s);

}  // namespace covspec
