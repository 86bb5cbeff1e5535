#include "covspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "covspec/error.hpp"
#include "covspec/rng.hpp"

namespace covspec {

namespace {

using nlohmann::json;

constexpr const char* kReported = "reported (experimental setup)";
constexpr const char* kHeuristic = "heuristic";

struct Field {
  const char* key;
  const char* provenance;
  bool hashed;
  bool is_string;
  std::function<json(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const json&)> set;
};

[[noreturn]] void bad_type(const char* key, const char* want) {
  fail(Errc::kConfigError, std::string("config key '") + key + "' expects " + want);
}

template <typename T>
Field make_field(const char* key, T ExperimentConfig::*member, const char* provenance,
                 bool hashed = true) {
  Field f{key, provenance, hashed, std::is_same_v<T, std::string>, nullptr, nullptr};
  f.get = [member](const ExperimentConfig& c) { return json(c.*member); };
  f.set = [member, key](ExperimentConfig& c, const json& v) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) bad_type(key, "a boolean");
      c.*member = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) bad_type(key, "a string");
      c.*member = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) bad_type(key, "a number");
      c.*member = v.get<double>();
    } else if constexpr (std::is_signed_v<T>) {
      if (!v.is_number_integer()) bad_type(key, "an integer");
      c.*member = v.get<T>();
    } else {
      if (!v.is_number_unsigned()) bad_type(key, "a nonnegative integer");
      const auto raw = v.get<std::uint64_t>();
      if (raw > std::numeric_limits<T>::max()) bad_type(key, "a smaller integer");
      c.*member = static_cast<T>(raw);
    }
  };
  return f;
}

Field latency_mode_field() {
  Field f{"latency_mode", kHeuristic, true, true, nullptr, nullptr};
  f.get = [](const ExperimentConfig& c) {
    return json(c.latency_mode == LatencyMode::kWall ? "wall" : "modeled");
  };
  f.set = [](ExperimentConfig& c, const json& v) {
    if (!v.is_string()) bad_type("latency_mode", "\"modeled\" or \"wall\"");
    const auto s = v.get<std::string>();
    if (s == "modeled") {
      c.latency_mode = LatencyMode::kModeled;
    } else if (s == "wall") {
      c.latency_mode = LatencyMode::kWall;
    } else {
      bad_type("latency_mode", "\"modeled\" or \"wall\"");
    }
  };
  return f;
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(make_field("seed", &C::seed, kHeuristic));
    t.push_back(make_field("vocab_size", &C::vocab_size, kHeuristic));
    t.push_back(make_field("num_visual", &C::num_visual, kReported));
    t.push_back(make_field("embed_dim", &C::embed_dim, kHeuristic));
    t.push_back(make_field("num_layers", &C::num_layers, kHeuristic));
    t.push_back(make_field("planted_count", &C::planted_count, kHeuristic));
    t.push_back(make_field("planted_importance", &C::planted_importance, kHeuristic));
    t.push_back(make_field("background_importance", &C::background_importance, kHeuristic));
    t.push_back(make_field("increment_scale", &C::increment_scale, kHeuristic));
    t.push_back(make_field("plant_cosine", &C::plant_cosine, kHeuristic));
    t.push_back(make_field("query", &C::query, kHeuristic));
    t.push_back(make_field("agreement", &C::agreement, kHeuristic));
    t.push_back(make_field("visual_weight", &C::visual_weight, kHeuristic));
    t.push_back(make_field("lambda", &C::lambda, kHeuristic));
    t.push_back(make_field("preselect_m", &C::preselect_m, kHeuristic));
    t.push_back(make_field("svd_rank", &C::svd_rank, kHeuristic));
    t.push_back(make_field("B_vis", &C::b_vis, kReported));
    t.push_back(make_field("late_layers", &C::late_layers, kHeuristic));
    t.push_back(make_field("gamma", &C::gamma, kHeuristic));
    t.push_back(make_field("eta", &C::eta, kHeuristic));
    t.push_back(make_field("p_low", &C::p_low, kHeuristic));
    t.push_back(make_field("p_up", &C::p_up, kHeuristic));
    t.push_back(make_field("t_ref_s", &C::t_ref_s, kHeuristic));
    t.push_back(make_field("scale_s", &C::scale_s, kHeuristic));
    t.push_back(make_field("k_init", &C::k_init, kHeuristic));
    t.push_back(make_field("k_min", &C::k_min, kHeuristic));
    t.push_back(make_field("k_max", &C::k_max, kHeuristic));
    t.push_back(make_field("F0", &C::f0, kHeuristic));
    t.push_back(make_field("rho", &C::rho, kHeuristic));
    t.push_back(make_field("branch_budget", &C::branch_budget, kHeuristic));
    t.push_back(make_field("b_id", &C::b_id, kHeuristic));
    t.push_back(make_field("b_logit", &C::b_logit, kReported));
    t.push_back(make_field("b_logit_tar", &C::b_logit_tar, kReported));
    t.push_back(make_field("b_acc", &C::b_acc, kHeuristic));
    t.push_back(make_field("b_bonus", &C::b_bonus, kHeuristic));
    t.push_back(make_field("b_rej", &C::b_rej, kHeuristic));
    t.push_back(make_field("bandwidth_hz", &C::bandwidth_hz, kReported));
    t.push_back(make_field("snr_db", &C::snr_db, kReported));
    t.push_back(make_field("device_token_s", &C::device_token_s, kHeuristic));
    t.push_back(make_field("edge_round_s", &C::edge_round_s, kHeuristic));
    t.push_back(latency_mode_field());
    t.push_back(make_field("max_new_tokens", &C::max_new_tokens, kReported));
    t.push_back(make_field("eos_token", &C::eos_token, kHeuristic));
    t.push_back(make_field("greedy", &C::greedy, kHeuristic));
    t.push_back(make_field("price_in", &C::price_in, kReported));
    t.push_back(make_field("price_out", &C::price_out, kReported));
    t.push_back(make_field("vis_red", &C::vis_red, kHeuristic));
    t.push_back(make_field("tok_sel", &C::tok_sel, kHeuristic));
    t.push_back(make_field("m_gate", &C::m_gate, kHeuristic));
    t.push_back(make_field("len_adapt", &C::len_adapt, kHeuristic));
    t.push_back(make_field("branch", &C::branch, kHeuristic));
    t.push_back(make_field("dvc", &C::dvc, kHeuristic));
    t.push_back(make_field("port", &C::port, kHeuristic, false));
    t.push_back(make_field("timeout_s", &C::timeout_s, kHeuristic, false));
    return t;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

json to_json_object(const ExperimentConfig& cfg, bool hashed_only) {
  json j = json::object();
  for (const Field& f : fields()) {
    if (hashed_only && !f.hashed) continue;
    j[f.key] = f.get(cfg);
  }
  return j;
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(Errc::kConfigError, what);
}

}  // namespace

SelectionConfig ExperimentConfig::selection() const {
  SelectionConfig s;
  s.lambda = lambda;
  s.budget = b_vis;
  s.late_layers = late_layers;
  s.preselect_m = preselect_m != 0 ? preselect_m : std::min(num_visual, 2 * b_vis);
  const std::size_t cap = std::min(s.preselect_m, embed_dim);
  s.rank = svd_rank != 0 ? svd_rank : std::min<std::size_t>(32, cap > 1 ? cap - 1 : 1);
  return s;
}

PlantSpec ExperimentConfig::plant() const {
  PlantSpec p;
  p.count = planted_count;
  p.planted_importance = planted_importance;
  p.background_importance = background_importance;
  p.increment_scale = increment_scale;
  p.plant_cosine = plant_cosine;
  return p;
}

ControllerParams ExperimentConfig::controller() const {
  ControllerParams c;
  c.eta = eta;
  c.p_low = p_low;
  c.p_up = p_up;
  c.t_ref_s = t_ref_s;
  c.scale = scale_s;
  c.k_init = k_init;
  c.k_min = k_min;
  c.k_max = k_max;
  return c;
}

PayloadConfig ExperimentConfig::payload() const {
  return PayloadConfig{b_id, b_logit, b_logit_tar, b_acc, b_bonus, b_rej};
}

ChannelConfig ExperimentConfig::channel() const { return ChannelConfig{bandwidth_hz, snr_db}; }

DeviceParams ExperimentConfig::device_params() const {
  DeviceParams d;
  d.gamma = gamma;
  d.margin_gate = m_gate;
  d.length_adapt = len_adapt;
  d.branching = branch;
  d.dvc = dvc;
  d.greedy = greedy;
  d.controller = controller();
  d.f0 = f0;
  d.rho = rho;
  d.branch_budget = branch_budget;
  d.max_new_tokens = max_new_tokens;
  if (eos_token >= 0) d.eos = static_cast<TokenId>(eos_token);
  d.device_token_s = device_token_s;
  d.payload = payload();
  d.channel = channel();
  return d;
}

void ExperimentConfig::validate() const {
  try {
    Vocabulary{vocab_size};
    require(vocab_size <= 0xFFFFFFFFull, "vocab_size does not fit a token ID");
    require(num_visual >= 1 && embed_dim >= 2 && num_layers >= 1,
            "num_visual, embed_dim and num_layers must be positive (embed_dim >= 2)");
    require(planted_count <= num_visual, "planted_count exceeds num_visual");
    require(planted_importance >= 0.0 && background_importance >= 0.0,
            "importances must be nonnegative");
    require(increment_scale >= 0.0, "increment_scale must be nonnegative");
    require(plant_cosine > 0.0 && plant_cosine <= 1.0, "plant_cosine must lie in (0, 1]");
    require(agreement >= 0.0 && agreement <= 1.0, "agreement must lie in [0, 1]");
    require(visual_weight >= 0.0 && visual_weight <= 1.0, "visual_weight must lie in [0, 1]");
    if (vis_red) {
      require(b_vis >= 1 && b_vis <= num_visual, "B_vis must lie in [1, num_visual]");
      if (tok_sel) selection().validate(num_visual, embed_dim, num_layers);
    }
    require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be a nonnegative number");
    controller().validate();
    require(k_max <= 0xFFFF, "k_max exceeds the accepted-length field");
    if (branch) {
      fan_out(f0, rho, 0);
      require(branch_budget >= 1, "branch_budget must be at least 1");
    }
    payload().validate();
    channel().validate();
    require(device_token_s >= 0.0 && edge_round_s >= 0.0, "latencies must be nonnegative");
    require(edge_round_s > 0.0, "edge_round_s must be positive");
    require(max_new_tokens >= 1, "max_new_tokens must be positive");
    require(eos_token >= -1 && eos_token < static_cast<long long>(vocab_size),
            "eos_token must be -1 or a vocabulary ID");
    require(price_in >= 0.0 && price_out >= 0.0, "prices must be nonnegative");
    require(timeout_s > 0.0, "timeout_s must be positive");
  } catch (const Error& e) {
    if (e.code() == Errc::kConfigError) throw;
    fail(Errc::kConfigError, std::string(errc_name(e.code())) + ": " + e.what());
  }
}

std::uint64_t ExperimentConfig::hash() const {
  return fnv1a64(to_json_object(*this, true).dump());
}

std::string to_json(const ExperimentConfig& cfg, int indent) {
  return to_json_object(cfg, false).dump(indent);
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(Errc::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(Errc::kConfigError, "config must be a JSON object");
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    const Field* f = find_field(key);
    if (f == nullptr) fail(Errc::kConfigError, "unknown config key '" + key + "'");
    f->set(cfg, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kConfigError, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void set_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (f == nullptr) fail(Errc::kConfigError, "unknown config key '" + std::string(key) + "'");
  json v;
  try {
    v = json::parse(value.begin(), value.end());
  } catch (const json::parse_error&) {
    if (!f->is_string) {
      fail(Errc::kConfigError, "cannot parse value '" + std::string(value) + "' for '" +
                                   std::string(key) + "'");
    }
    v = std::string(value);
  }
  if (f->is_string && !v.is_string()) v = std::string(value);
  f->set(cfg, v);
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    fail(Errc::kConfigError, "override must look like key=value: " + std::string(assignment));
  }
  set_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

bool is_config_key(std::string_view key) { return find_field(key) != nullptr; }

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.emplace_back(f.key);
  return keys;
}

std::vector<ConfigEntry> describe(const ExperimentConfig& cfg) {
  std::vector<ConfigEntry> out;
  for (const Field& f : fields()) out.push_back({f.key, f.get(cfg).dump(), f.provenance});
  return out;
}

}  // namespace covspec
