#include "covspec_cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "covspec/config.hpp"
#include "covspec/harness.hpp"
#include "covspec/oracle.hpp"
#include "covspec/report.hpp"

namespace covspec::cli {

namespace {

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

void add_config_args(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.path, "JSON config file");
  cmd->add_option("-o,--override", args.overrides, "key=value override (repeatable)");
  cmd->add_option("--seed", args.seed, "Seed, applied after COVSPEC_SEED");
}

// File, then COVSPEC_SEED, then overrides, then --seed.
ExperimentConfig resolve(const ConfigArgs& args) {
  ExperimentConfig cfg = args.path.empty() ? ExperimentConfig{} : load_config(args.path);
  if (const char* env = std::getenv("COVSPEC_SEED"); env != nullptr && *env != '\0') {
    set_value(cfg, "seed", env);
  }
  for (const auto& o : args.overrides) apply_override(cfg, o);
  if (args.seed) cfg.seed = *args.seed;
  cfg.validate();
  return cfg;
}

std::string run_id_for(const ExperimentConfig& cfg) { return "run-" + std::to_string(cfg.seed); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path);
  if (!f) fail(Errc::kConfigError, "cannot write " + path.string());
  f << text;
}

struct Outputs {
  std::string csv;
  std::string json_dir;
};

void add_output_args(CLI::App* cmd, Outputs& o) {
  cmd->add_option("--csv", o.csv, "CSV output file (default: stdout)");
  cmd->add_option("--json-dir", o.json_dir, "Directory for per-run JSON detail");
}

void emit(const Outputs& o, const std::string& csv_text,
          const std::vector<std::pair<std::string, std::string>>& json_files, std::ostream& out) {
  if (o.csv.empty()) {
    out << csv_text;
  } else {
    write_file(o.csv, csv_text);
  }
  if (!o.json_dir.empty()) {
    std::filesystem::create_directories(o.json_dir);
    for (const auto& [name, text] : json_files) {
      write_file(std::filesystem::path(o.json_dir) / (name + ".json"), text);
    }
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

int cmd_run(const ConfigArgs& ca, std::size_t episodes, const Outputs& o, std::ostream& out) {
  const ExperimentConfig base = resolve(ca);
  std::string csv = csv_header() + "\n";
  std::vector<std::pair<std::string, std::string>> json_files;
  for (std::size_t e = 0; e < episodes; ++e) {
    ExperimentConfig cfg = base;
    cfg.seed = base.seed + e;
    const RunReport r = run_episode(cfg, run_id_for(cfg));
    csv += csv_row(r, cfg) + "\n";
    json_files.emplace_back(r.run_id, report_json(r, cfg));
  }
  emit(o, csv, json_files, out);
  return kExitOk;
}

int cmd_sweep(const ConfigArgs& ca, const std::vector<std::string>& grid, const Outputs& o,
              std::ostream& out) {
  const ExperimentConfig base = resolve(ca);
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& g : grid) {
    const auto eq = g.find('=');
    if (eq == std::string::npos || eq == 0) fail(Errc::kConfigError, "grid must look like key=v1,v2");
    const std::string key = g.substr(0, eq);
    if (!is_config_key(key)) fail(Errc::kConfigError, "unknown sweep knob '" + key + "'");
    auto values = split(g.substr(eq + 1), ',');
    if (values.empty()) fail(Errc::kConfigError, "grid axis '" + key + "' has no values");
    axes.emplace_back(key, std::move(values));
  }

  std::string csv = csv_header(true) + "\n";
  std::vector<std::pair<std::string, std::string>> json_files;
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.second.size();
  for (std::size_t run = 0; run < total; ++run) {
    ExperimentConfig cfg = base;
    // Mixed-radix decode; the last axis varies fastest.
    std::size_t rest = run;
    for (std::size_t a = axes.size(); a-- > 0;) {
      set_value(cfg, axes[a].first, axes[a].second[rest % axes[a].second.size()]);
      rest /= axes[a].second.size();
    }
    cfg.validate();
    char id[32];
    std::snprintf(id, sizeof id, "sweep-%04zu", run);
    const RunReport r = run_episode(cfg, id);
    csv += csv_row(r, cfg, true) + "\n";
    json_files.emplace_back(r.run_id, report_json(r, cfg));
  }
  emit(o, csv, json_files, out);
  return kExitOk;
}

int cmd_serve_edge(const ConfigArgs& ca, std::optional<std::uint16_t> port,
                   const std::string& bind, std::size_t sessions, std::ostream& out) {
  ExperimentConfig cfg = resolve(ca);
  if (port) cfg.port = *port;
  EdgeServer server(bind, cfg.port);
  out << "listening on " << bind << ":" << server.port() << std::endl;
  for (std::size_t i = 0; i < sessions; ++i) {
    const std::size_t served = serve_edge_session(cfg, server);
    out << "session " << i << " served " << served << " requests" << std::endl;
  }
  return kExitOk;
}

int cmd_run_device(const ConfigArgs& ca, const std::string& host, std::optional<std::uint16_t> port,
                   const Outputs& o, std::ostream& out) {
  ExperimentConfig cfg = resolve(ca);
  if (port) cfg.port = *port;
  const RunReport r = run_device_session(cfg, host, cfg.port, run_id_for(cfg));
  emit(o, csv_header() + "\n" + csv_row(r, cfg) + "\n", {{r.run_id, report_json(r, cfg)}}, out);
  return kExitOk;
}

int cmd_print_config(const ConfigArgs& ca, bool as_json, std::ostream& out) {
  const ExperimentConfig cfg = resolve(ca);
  if (as_json) {
    out << to_json(cfg) << "\n";
    return kExitOk;
  }
  for (const auto& e : describe(cfg)) {
    out << std::left << std::setw(22) << e.key << std::setw(44) << e.value << " " << e.provenance << "\n";
  }
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  out << std::left << std::setw(22) << "config_hash" << hash << "\n";
  return kExitOk;
}

int cmd_oracle(std::size_t tables, std::uint64_t seed, std::ostream& out) {
  SeededRng rng(seed, "oracle-suite");
  double worst = 0.0;
  for (std::size_t i = 0; i < tables; ++i) {
    const std::size_t vocab = 2 + rng.next_u64() % 5;
    const std::size_t k = 1 + rng.next_u64() % 3;
    const std::size_t horizon = 1 + rng.next_u64() % 3;
    const double sparsity = (i % 4 == 3) ? 0.4 : 0.0;
    const PrefixTable p_d = random_prefix_table(vocab, horizon, rng, sparsity);
    const PrefixTable p_t = random_prefix_table(vocab, horizon, rng, sparsity);
    worst = std::max(worst, exactness_oracle(p_d, p_t, k, horizon));
  }
  const bool ok = worst < 1e-12;
  out << "tables " << tables << " max_tv " << format_double(worst) << (ok ? " PASS" : " FAIL")
      << "\n";
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::kConfigError:
      return kExitConfig;
    case Errc::kTransportTimeout:
    case Errc::kSessionClosed:
    case Errc::kConfigMismatch:
    case Errc::kTransportError:
      return kExitTransport;
    default:
      return kExitProtocol;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Device-edge collaborative speculative decoding simulator"};
  app.require_subcommand(1);

  ConfigArgs ca;
  Outputs outputs;
  std::size_t episodes = 1;
  std::vector<std::string> grid;
  std::optional<std::uint16_t> port;
  std::string bind = "127.0.0.1";
  std::string host = "127.0.0.1";
  std::size_t sessions = 1;
  bool as_json = false;
  std::size_t tables = 200;
  std::uint64_t oracle_seed = 1;

  auto* run_cmd = app.add_subcommand("run", "Run loopback episodes and report metrics");
  add_config_args(run_cmd, ca);
  add_output_args(run_cmd, outputs);
  run_cmd->add_option("--episodes", episodes, "Episodes with consecutive seeds")->check(CLI::PositiveNumber);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the cross product of a parameter grid");
  add_config_args(sweep_cmd, ca);
  add_output_args(sweep_cmd, outputs);
  sweep_cmd->add_option("-g,--grid", grid, "key=v1,v2,... (repeatable)");

  auto* edge_cmd = app.add_subcommand("serve-edge", "Serve the edge role over TCP");
  add_config_args(edge_cmd, ca);
  edge_cmd->add_option("--port", port, "Listen port (0 picks one)");
  edge_cmd->add_option("--bind", bind, "Bind address");
  edge_cmd->add_option("--sessions", sessions, "Device sessions to serve before exiting");

  auto* dev_cmd = app.add_subcommand("run-device", "Run the device role against a remote edge");
  add_config_args(dev_cmd, ca);
  add_output_args(dev_cmd, outputs);
  dev_cmd->add_option("--host", host, "Edge host");
  dev_cmd->add_option("--port", port, "Edge port");

  auto* print_cmd = app.add_subcommand("print-config", "Show the resolved configuration");
  add_config_args(print_cmd, ca);
  print_cmd->add_flag("--json", as_json, "Print canonical JSON instead of the annotated table");

  auto* oracle_cmd = app.add_subcommand("oracle", "Run the exactness enumeration suite");
  oracle_cmd->add_option("--tables", tables, "Random table pairs to enumerate");
  oracle_cmd->add_option("--seed", oracle_seed, "Suite seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(ca, episodes, outputs, out);
    if (*sweep_cmd) return cmd_sweep(ca, grid, outputs, out);
    if (*edge_cmd) return cmd_serve_edge(ca, port, bind, sessions, out);
    if (*dev_cmd) return cmd_run_device(ca, host, port, outputs, out);
    if (*print_cmd) return cmd_print_config(ca, as_json, out);
    if (*oracle_cmd) return cmd_oracle(tables, oracle_seed, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace covspec::cli
