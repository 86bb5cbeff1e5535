#include "covspec/report.hpp"

#include <charconv>

#include <json.hpp>

namespace covspec {

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_header(bool flags) {
  std::string h =
      "run_id,seed,gamma,lambda,B_vis,k_min,k_max,F0,rho,snr_db,bandwidth_hz,agreement,tps,"
      "speedup,comm_mb,cost_red_pct,acceptance_rate,rounds,gated_fraction";
  if (flags) h += ",vis_red,tok_sel,m_gate,len_adapt,branch,dvc";
  return h;
}

std::string csv_row(const RunReport& r, const ExperimentConfig& c, bool flags) {
  std::string row = r.run_id;
  auto add = [&](const std::string& v) {
    row += ',';
    row += v;
  };
  auto flag = [&](bool b) { add(b ? "1" : "0"); };
  add(std::to_string(c.seed));
  add(format_double(c.gamma));
  add(format_double(c.lambda));
  add(std::to_string(c.b_vis));
  add(std::to_string(c.k_min));
  add(std::to_string(c.k_max));
  add(std::to_string(c.f0));
  add(format_double(c.rho));
  add(format_double(c.snr_db));
  add(format_double(c.bandwidth_hz));
  add(format_double(c.agreement));
  add(format_double(r.tokens_per_second));
  add(format_double(r.speedup_vs_edge_only));
  add(format_double(r.comm_megabytes));
  add(format_double(r.cost_reduction_pct));
  add(format_double(r.acceptance_rate));
  add(std::to_string(r.rounds));
  add(format_double(r.gated_fraction));
  if (flags) {
    flag(c.vis_red);
    flag(c.tok_sel);
    flag(c.m_gate);
    flag(c.len_adapt);
    flag(c.branch);
    flag(c.dvc);
  }
  return row;
}

std::string report_json(const RunReport& r, const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  j["run_id"] = r.run_id;
  j["config"] = json::parse(to_json(c, -1));
  j["config_hash"] = c.hash();
  j["committed_text"] = r.committed_text;
  j["metrics"] = {
      {"tps", r.tokens_per_second},
      {"speedup", r.speedup_vs_edge_only},
      {"comm_mb", r.comm_megabytes},
      {"cost_red_pct", r.cost_reduction_pct},
      {"acceptance_rate", r.acceptance_rate},
      {"rounds", r.rounds},
      {"gated_fraction", r.gated_fraction},
      {"edge_only_tps", r.edge_only_tps},
      {"device_only_tps", r.device_only_tps},
      {"modeled_s", r.modeled_s},
      {"idle_s", r.idle_s},
      {"wall_s", r.wall_s},
      {"uplink_bits", r.uplink_bits},
      {"downlink_bits", r.downlink_bits},
      {"context_bits", r.context_bits},
      {"overhead_bytes", r.overhead_bytes},
      {"forward_passes", r.forward_passes},
      {"branch_passes", r.branch_passes},
      {"branch_hits", r.branch_hits},
      {"drafted", r.drafted},
      {"accepted", r.accepted},
      {"corrections", r.corrections},
      {"gated", r.gated},
      {"prefill_tokens", r.prefill_tokens},
      {"target_decode_tokens", r.target_decode_tokens},
  };
  json rounds = json::array();
  for (std::size_t i = 0; i < r.round_log.size(); ++i) {
    const RoundLog& l = r.round_log[i];
    rounds.push_back({
        {"k", l.k},
        {"k_used", l.k_used},
        {"n_acc", l.n_acc},
        {"n_context", l.n_context},
        {"S_up", l.up_bits},
        {"S_down", l.down_bits},
        {"T_comm", l.t_comm},
        {"T_rej", l.t_rej},
        {"branch_hit", l.branch_hit},
        {"branch_passes", l.branch_passes},
        {"wire_bytes", i < r.ledger_rounds.size() ? r.ledger_rounds[i].wire_bytes : 0},
        {"idle_s", l.idle_s},
    });
  }
  j["rounds"] = std::move(rounds);
  return j.dump(2);
}

}  // namespace covspec
