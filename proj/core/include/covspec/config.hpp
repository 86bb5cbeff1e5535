#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covspec/controller.hpp"
#include "covspec/engine.hpp"
#include "covspec/models.hpp"
#include "covspec/payload.hpp"
#include "covspec/tokensel.hpp"

namespace covspec {

enum class LatencyMode { kModeled, kWall };

/// Every experiment knob. Defaults reproduce the reported experimental setup
/// where one exists; the rest are heuristic.
struct ExperimentConfig {
  std::uint64_t seed = 1;

  // Scenario.
  std::size_t vocab_size = 64;
  std::size_t num_visual = 768;
  std::size_t embed_dim = 64;
  std::size_t num_layers = 6;
  std::size_t planted_count = 16;
  double planted_importance = 8.0;
  double background_importance = 0.05;
  double increment_scale = 1.0;
  double plant_cosine = 0.95;
  std::string query = "what is written on the red sign above the shop door";
  double agreement = 0.9;
  double visual_weight = 0.5;

  // Visual token selection. Zero M or r picks a size from B_vis.
  double lambda = 0.5;
  std::size_t preselect_m = 0;
  std::size_t svd_rank = 0;
  std::size_t b_vis = 64;
  std::size_t late_layers = 3;

  // Gating, draft length and branching.
  double gamma = 0.7;
  double eta = 0.1;
  double p_low = 0.4;
  double p_up = 0.8;
  double t_ref_s = 0.05;
  double scale_s = 2.0;
  std::size_t k_init = 4;
  std::size_t k_min = 1;
  std::size_t k_max = 16;
  std::size_t f0 = 4;
  double rho = 0.5;
  std::size_t branch_budget = 16;

  // Payload and channel.
  std::uint32_t b_id = 32;
  std::uint32_t b_logit = 16;
  std::uint32_t b_logit_tar = 16;
  std::uint32_t b_acc = 16;
  std::uint32_t b_bonus = 32;
  std::uint32_t b_rej = 16;
  double bandwidth_hz = 5e6;
  double snr_db = 10.0;

  // Latency model and decoding.
  double device_token_s = 0.02;
  double edge_round_s = 0.12;
  LatencyMode latency_mode = LatencyMode::kModeled;
  std::size_t max_new_tokens = 1024;
  long long eos_token = -1;
  bool greedy = false;
  double price_in = 0.8;
  double price_out = 0.8;

  // Component switches.
  bool vis_red = true;
  bool tok_sel = true;
  bool m_gate = true;
  bool len_adapt = true;
  bool branch = true;
  bool dvc = true;

  // Networking; excluded from the config hash.
  std::uint16_t port = 7878;
  double timeout_s = 10.0;

  /// Re-validates every module invariant. Throws kConfigError.
  void validate() const;

  SelectionConfig selection() const;
  PlantSpec plant() const;
  ControllerParams controller() const;
  PayloadConfig payload() const;
  ChannelConfig channel() const;
  DeviceParams device_params() const;

  /// FNV-1a of the canonical JSON form, ignoring port and timeout_s.
  std::uint64_t hash() const;
};

/// Canonical JSON text (sorted keys).
std::string to_json(const ExperimentConfig& cfg, int indent = 2);

/// Parses JSON text over the defaults. Unknown keys and ill-typed values throw
/// kConfigError. Does not validate.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Applies one `key=value` override. The value is read as JSON, falling back
/// to a bare string for string-valued keys.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);
void set_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

bool is_config_key(std::string_view key);
std::vector<std::string> config_keys();

struct ConfigEntry {
  std::string key;
  std::string value;
  std::string provenance;  // "reported (experimental setup)" or "heuristic"
};
std::vector<ConfigEntry> describe(const ExperimentConfig& cfg);

}  // namespace covspec
