// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "covspec/branching.hpp"
#include "covspec/codec.hpp"
#include "covspec/controller.hpp"
#include "covspec/error.hpp"
#include "covspec/harness.hpp"
#include "covspec/oracle.hpp"
#include "covspec/payload.hpp"
#include "covspec/report.hpp"
#include "covspec/rng.hpp"
#include "covspec/tokensel.hpp"
#include "covspec_cli/cli.hpp"
#include "report_compare.hpp"

extern char** environ;

namespace covspec {
namespace {

namespace fs = std::filesystem;
using testing::stable_json;

constexpr double kOracleTol = 1e-12;
constexpr double kEnergyTol = 1e-9;
constexpr double kLatencyTol = 1e-4;
constexpr double kOracleBudgetS = 60.0;
constexpr double kDvcBudgetS = 30.0;
constexpr double kAblationBudgetS = 300.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// CSV text to one map per row keyed by header name.
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  std::vector<std::map<std::string, std::string>> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::map<std::string, std::string> m;
    for (std::size_t c = 0; c < rows[0].size() && c < rows[r].size(); ++c) m[rows[0][c]] = rows[r][c];
    out.push_back(std::move(m));
  }
  return out;
}

std::string sweep_csv(const std::vector<std::string>& args, Outcome& o) {
  std::ostringstream out, err;
  std::vector<std::string> full = {"sweep"};
  full.insert(full.end(), args.begin(), args.end());
  const int code = cli::run(full, out, err);
  o.require(code == 0, "sweep exited " + std::to_string(code) + ": " + err.str());
  return out.str();
}

// Child process with stdout on a pipe.
struct Child {
  pid_t pid = -1;
  FILE* out = nullptr;

  static Child spawn(const std::vector<std::string>& args) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    posix_spawn_file_actions_addclose(&actions, fds[1]);
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    Child c;
    const int rc = posix_spawn(&c.pid, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(fds[1]);
    if (rc != 0) {
      close(fds[0]);
      throw std::runtime_error("posix_spawn failed");
    }
    c.out = fdopen(fds[0], "r");
    return c;
  }

  std::string line() {
    char buf[512];
    if (std::fgets(buf, sizeof buf, out) == nullptr) return {};
    std::string s(buf);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
  }

  std::string rest() {
    std::string s;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, out)) > 0) s.append(buf, n);
    return s;
  }

  int wait() {
    if (out != nullptr) std::fclose(out);
    out = nullptr;
    int status = 0;
    waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("covspec-acceptance-" + std::to_string(getpid())) / name;
  fs::create_directories(p);
  return p;
}

// 1. Exactness of the verify/correct protocol by enumeration.
Outcome exactness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SeededRng rng(2024, "acceptance-oracle");
  double worst = 0.0;
  const int tables = 240;
  for (int i = 0; i < tables; ++i) {
    const std::size_t w = 2 + i % 5;
    const std::size_t k = 1 + (i / 5) % 3;
    const std::size_t h = 1 + (i / 15) % 3;
    const double sparsity = i % 4 == 3 ? 0.4 : 0.0;
    const PrefixTable d = random_prefix_table(w, h, rng, sparsity);
    const PrefixTable t = random_prefix_table(w, h, rng, sparsity);
    worst = std::max(worst, exactness_oracle(d, t, k, h));
  }
  const double el = seconds_since(t0);
  o.require(worst < kOracleTol, "max TV " + fmt("%.3e", worst));
  o.require(el < kOracleBudgetS, "runtime " + fmt("%.1f s", el));
  if (o.pass) {
    o.detail = std::to_string(tables) + " tables, max TV " + fmt("%.2e", worst) + ", " +
               fmt("%.2f s", el);
  }
  return o;
}

// 2. Device-side correction reproduces edge-side correction.
Outcome decoupled_correction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t corrections = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.dvc = true;
    const DeviceResult on = run_loopback(Scenario(cfg));
    cfg.dvc = false;
    const DeviceResult off = run_loopback(Scenario(cfg));
    o.require(on.committed == off.committed, "seed " + std::to_string(seed) + " differs");
    corrections += on.corrections;
  }
  const double el = seconds_since(t0);
  o.require(corrections > 0, "no rejection exercised");
  o.require(el < kDvcBudgetS, "runtime " + fmt("%.1f s", el));
  if (o.pass) {
    o.detail = "100 seeds identical, " + std::to_string(corrections) + " corrections, " +
               fmt("%.2f s", el);
  }
  return o;
}

// 3. Subspace energy against an independent SVD.
Outcome svd_energy() {
  Outcome o;
  SeededRng rng(3, "acceptance-svd");
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 2 + rng.next_u64() % 63;
    const std::size_t d = 2 + rng.next_u64() % 63;
    const std::size_t r = 1 + rng.next_u64() % (std::min(m, d) - 1);
    Matrix z(m, d);
    Eigen::MatrixXd ez(m, d);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t c = 0; c < d; ++c) ez(i, c) = z(i, c) = rng.next_normal();
    }
    const ScoreVector e = subspace_energies(z, r);
    const double total = std::accumulate(e.values.begin(), e.values.end(), 0.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ez);
    double expect = 0.0;
    for (std::size_t j = 0; j < r; ++j) expect += std::pow(svd.singularValues()(j), 2);
    worst = std::max(worst, std::abs(total - expect) / expect);
  }
  o.require(worst < kEnergyTol, "relative error " + fmt("%.3e", worst));

  // Orthogonal rows with distinct norms in shuffled order.
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t m = 12, d = 16, budget = 5;
    std::vector<std::size_t> axis(d);
    std::iota(axis.begin(), axis.end(), 0);
    std::vector<double> norms(m);
    for (std::size_t i = 0; i < m; ++i) norms[i] = 1.0 + static_cast<double>(i);
    for (std::size_t i = m - 1; i > 0; --i) std::swap(norms[i], norms[rng.next_u64() % (i + 1)]);
    for (std::size_t i = d - 1; i > 0; --i) std::swap(axis[i], axis[rng.next_u64() % (i + 1)]);
    Matrix z(m, d);
    for (std::size_t i = 0; i < m; ++i) z(i, axis[i]) = norms[i];
    std::vector<std::uint32_t> expect(m);
    std::iota(expect.begin(), expect.end(), 0u);
    std::sort(expect.begin(), expect.end(), [&](auto a, auto b) { return norms[a] > norms[b]; });
    expect.resize(budget);
    std::sort(expect.begin(), expect.end());
    o.require(svd_energy_select(z, budget, budget) == expect, "orthogonal case picked other rows");
  }
  if (o.pass) o.detail = "10 matrices, max rel err " + fmt("%.2e", worst) + ", orthogonal rows exact";
  return o;
}

// 4. Payload arithmetic and codec body lengths.
Outcome payload_arithmetic() {
  Outcome o;
  const PayloadConfig cfg;
  o.require(uplink_bits(4, 0, cfg) == 192, "uplink(4)");
  o.require(downlink_bits(DownlinkKind::kAccept, 8, cfg) == 48, "downlink accept");
  o.require(downlink_bits(DownlinkKind::kReject, 8, cfg) == 144, "downlink reject(8)");
  std::size_t checked = 0;
  auto body = [](const Message& m) { return encode_message(m).size() - kFrameHeaderBytes; };
  auto bytes = [](std::uint64_t bits) { return (bits + 7) / 8; };
  for (std::size_t n = 0; n <= 16; ++n) {
    for (std::size_t w = 2; w <= 1024; w *= 2) {
      std::vector<TokenId> ids(n);
      std::iota(ids.begin(), ids.end(), 0u);
      const Uplink up{{}, ids, std::vector<F16>(n, 0xBC00)};
      const UplinkFull full{{}, ids, static_cast<std::uint32_t>(w), std::vector<F16>(n * w, 0x3C00)};
      const DownlinkReject rej{static_cast<std::uint16_t>(n), std::vector<F16>(w, 0x3C00)};
      const DownlinkAccept acc{static_cast<std::uint16_t>(n), 1};
      const std::string at = " at n=" + std::to_string(n) + " W=" + std::to_string(w);
      o.require(payload_bits(up, cfg) == uplink_bits(n, 0, cfg), "uplink bits" + at);
      o.require(body(up) == bytes(uplink_bits(n, 0, cfg)) + 4, "uplink body" + at);
      o.require(body(full) == bytes(uplink_bits_full(n, 0, w, cfg)) + 8, "full uplink body" + at);
      o.require(body(rej) == bytes(downlink_bits(DownlinkKind::kReject, w, cfg)) + 4,
                "reject body" + at);
      o.require(body(acc) == bytes(downlink_bits(DownlinkKind::kAccept, w, cfg)), "accept body" + at);
      o.require(std::get<Uplink>(decode_message(encode_message(up))) == up, "uplink round trip" + at);
      o.require(std::get<DownlinkReject>(decode_message(encode_message(rej))) == rej,
                "reject round trip" + at);
      ++checked;
    }
  }
  if (o.pass) o.detail = "192/48/144 bits, " + std::to_string(checked) + " (n, W) grid points";
  return o;
}

// 5. Channel latency.
Outcome latency_model() {
  Outcome o;
  const ChannelConfig ch{5e6, 10.0};
  const double t = latency(17297158, ch);
  o.require(std::abs(t - 1.0) < kLatencyTol, "latency " + fmt("%.8f", t));
  SeededRng rng(5, "acceptance-channel");
  for (int i = 0; i < 1000; ++i) {
    const ChannelConfig c{1e5 + rng.next_uniform() * 2e7, -5.0 + rng.next_uniform() * 40.0};
    const std::uint64_t bits = 1 + rng.next_u64() % 10000000;
    const double base = latency(bits, c);
    const ChannelConfig wider{c.bandwidth_hz * (1.0 + rng.next_uniform()), c.snr_db};
    const ChannelConfig cleaner{c.bandwidth_hz, c.snr_db + rng.next_uniform() * 10.0};
    o.require(latency(bits, wider) <= base, "not monotone in bandwidth");
    o.require(latency(bits, cleaner) <= base, "not monotone in SNR");
    o.require(latency(bits + 1, c) >= base, "not monotone in bits");
  }
  if (o.pass) o.detail = "17297158 bits -> " + fmt("%.6f s", t) + ", 1000 channels monotone";
  return o;
}

// Three-branch length rule restated from its definition.
int phi_reference(double p, double t, const ControllerParams& c) {
  if (p <= c.p_low) return -1;
  if (p >= c.p_up && t <= c.t_ref_s) return 1;
  return 0;
}

// 6. Length controller.
Outcome controller_vectors() {
  Outcome o;
  ControllerParams params;
  LengthController ema(params);
  ema.observe(false);
  o.require(std::abs(ema.p_hat() - 0.9) < 1e-15, "EMA 1.0 -> " + fmt("%.17g", ema.p_hat()));

  LengthController top(params);
  for (int i = 0; i < 6; ++i) top.update(top.k(), top.k(), 0.0);
  o.require(top.k() == params.k_max, "upper clip gave " + std::to_string(top.k()));
  LengthController bottom(params);
  for (int i = 0; i < 6; ++i) bottom.update(0, bottom.k(), 0.0);
  o.require(bottom.k() == params.k_min, "lower clip gave " + std::to_string(bottom.k()));

  const double pl = params.p_low, pu = params.p_up, tr = params.t_ref_s;
  const double ps[] = {0.0, std::nextafter(pl, 0.0), pl, std::nextafter(pl, 1.0), 0.6,
                       std::nextafter(pu, 0.0), pu, std::nextafter(pu, 1.0), 1.0};
  const double ts[] = {std::nextafter(tr, 0.0), tr, std::nextafter(tr, 1.0)};
  int cases = 0, branches = 0;
  for (double p : ps) {
    for (double t : ts) {
      const int want = phi_reference(p, t, params);
      o.require(phi(p, t, params) == want, "phi(" + fmt("%.17g", p) + ", " + fmt("%.17g", t) + ")");
      branches |= 1 << (want + 1);
      ++cases;
    }
  }
  o.require(cases == 27 && branches == 7, "truth table does not reach all three branches");

  const std::pair<double, long long> rounding[] = {{0.5, 0}, {1.5, 2}, {2.5, 2}, {3.5, 4},
                                                   {-0.5, 0}, {-1.5, -2}, {2.4, 2}, {2.6, 3}};
  for (const auto& [x, want] : rounding) {
    o.require(round_half_even(x) == want, "round_half_even(" + fmt("%g", x) + ")");
  }
  ControllerParams down = params;
  down.k_init = 8;
  LengthController drop(down);
  o.require(drop.update(0, 10, 0.0) == 4, "p_hat below p_low did not halve k = 8");
  if (o.pass) o.detail = "EMA, both clips, 27-case phi table, half-even rounding";
  return o;
}

// 7. Fan-out schedule.
Outcome fan_out_schedule() {
  Outcome o;
  o.require(fan_out(4, 0.5, 4) == std::vector<std::size_t>{4, 2, 1, 1, 1}, "F0=4 rho=0.5");
  o.require(fan_out(3, 0.7, 4) == std::vector<std::size_t>{3, 3, 2, 2, 1}, "F0=3 rho=0.7");
  SeededRng rng(7, "acceptance-fanout");
  for (int i = 0; i < 1000; ++i) {
    const std::size_t f0 = 1 + rng.next_u64() % 16;
    const double rho = rng.next_uniform();
    for (std::size_t f : fan_out(f0, rho, 16)) o.require(f >= 1, "F_j below 1");
  }
  if (o.pass) o.detail = "(4,2,1,1,1), (3,3,2,2,1), F_j >= 1 over 1000 schedules";
  return o;
}

// 8. Ablation directions through the sweep command.
Outcome ablation_directions() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> base = {"-o", "agreement=0.85", "--seed", "1"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };

  auto dvc = parse_csv(sweep_csv(with({"-g", "dvc=true,false"}), o));
  o.require(dvc.size() == 2, "dvc sweep rows");
  std::string a_detail;
  if (dvc.size() == 2) {
    const bool rejected = std::stod(dvc[0]["acceptance_rate"]) < 1.0;
    const double on = std::stod(dvc[0]["comm_mb"]), off = std::stod(dvc[1]["comm_mb"]);
    o.require(dvc[0]["dvc"] == "1" && dvc[1]["dvc"] == "0", "dvc flag columns");
    o.require(rejected, "no rejection at agreement 0.85");
    o.require(off > on, "DVC off comm " + fmt("%g", off) + " <= on " + fmt("%g", on));
    a_detail = "comm " + dvc[0]["comm_mb"] + " -> " + dvc[1]["comm_mb"] + " MB";
  }

  auto gate = parse_csv(sweep_csv(with({"-g", "gamma=0.7,1.01"}), o));
  o.require(gate.size() == 2, "gamma sweep rows");
  std::string b_detail;
  if (gate.size() == 2) {
    const long gated = std::stol(gate[0]["rounds"]), plain = std::stol(gate[1]["rounds"]);
    o.require(gated < plain, "rounds " + std::to_string(gated) + " vs " + std::to_string(plain));
    b_detail = "rounds " + gate[0]["rounds"] + " vs " + gate[1]["rounds"];
  }

  const fs::path dir = scratch("branch");
  sweep_csv(with({"-o", "greedy=true", "-g", "branch=true,false", "--json-dir", dir.string()}), o);
  std::string c_detail;
  try {
    auto load = [&](const char* id) {
      std::ifstream f(dir / (std::string(id) + ".json"));
      return nlohmann::json::parse(f);
    };
    const auto on = load("sweep-0000"), off = load("sweep-0001");
    o.require(on["config"]["branch"] == true && off["config"]["branch"] == false, "branch order");
    o.require(on["committed_text"] == off["committed_text"], "branching changed the text");
    const double idle_on = on["metrics"]["idle_s"], idle_off = off["metrics"]["idle_s"];
    o.require(idle_on < idle_off, "idle " + fmt("%g", idle_on) + " vs " + fmt("%g", idle_off));
    c_detail = "idle " + fmt("%.3f", idle_on) + " vs " + fmt("%.3f s", idle_off);
  } catch (const std::exception& e) {
    o.require(false, std::string("branch reports: ") + e.what());
  }
  const double el = seconds_since(t0);
  o.require(el < kAblationBudgetS, "runtime " + fmt("%.1f s", el));
  if (o.pass) o.detail = "(a) " + a_detail + "; (b) " + b_detail + "; (c) " + c_detail;
  return o;
}

ExperimentConfig mode_config(std::uint64_t i) {
  ExperimentConfig cfg;
  cfg.seed = 100 + i;
  cfg.agreement = 0.6 + 0.02 * static_cast<double>(i);
  cfg.gamma = i % 5 == 4 ? 1.01 : 0.5 + 0.05 * static_cast<double>(i % 5);
  cfg.branch = i % 2 == 0;
  cfg.dvc = i % 3 != 2;
  cfg.greedy = i % 7 == 6;
  cfg.len_adapt = i % 4 != 3;
  cfg.max_new_tokens = 256;
  return cfg;
}

// 9. Loopback and two-process socket sessions agree.
Outcome mode_equivalence() {
  Outcome o;
  const fs::path dir = scratch("modes");
  for (std::uint64_t i = 0; i < 20 && o.pass; ++i) {
    const ExperimentConfig cfg = mode_config(i);
    const fs::path file = dir / ("cfg-" + std::to_string(i) + ".json");
    std::ofstream(file) << to_json(cfg);
    Child edge = Child::spawn({COVSPEC_CLI_PATH, "serve-edge", "-c", file.string(), "--seed",
                               std::to_string(cfg.seed), "--port", "0", "--bind", "127.0.0.1"});
    const std::string banner = edge.line();
    const auto colon = banner.rfind(':');
    if (banner.rfind("listening on ", 0) != 0 || colon == std::string::npos) {
      edge.wait();
      o.require(false, "edge banner '" + banner + "'");
      break;
    }
    const auto port = static_cast<std::uint16_t>(std::stoi(banner.substr(colon + 1)));
    const std::string id = "mode-" + std::to_string(i);
    const RunReport remote = run_device_session(cfg, "127.0.0.1", port, id);
    edge.rest();
    const int code = edge.wait();
    const RunReport local = run_episode(cfg, id);
    const std::string at = " at config " + std::to_string(i);
    o.require(code == 0, "edge exited " + std::to_string(code) + at);
    o.require(remote.committed_text == local.committed_text, "text" + at);
    o.require(remote.ledger_rounds == local.ledger_rounds, "ledger" + at);
    o.require(csv_row(remote, cfg, true) == csv_row(local, cfg, true), "CSV row" + at);
    o.require(stable_json(remote, cfg) == stable_json(local, cfg), "JSON report" + at);
  }
  if (o.pass) o.detail = "20 configs: text, ledger, CSV and JSON identical";
  return o;
}

// 10. Repeat runs are bit-identical in-process and across processes.
Outcome determinism() {
  Outcome o;
  const fs::path dir = scratch("determinism");
  std::size_t runs = 0;
  for (std::uint64_t seed : {1, 7, 42}) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    const RunReport a = run_episode(cfg, "run-" + std::to_string(seed));
    const RunReport b = run_episode(cfg, "run-" + std::to_string(seed));
    o.require(stable_json(a, cfg) == stable_json(b, cfg), "in-process repeat, seed " + std::to_string(seed));
    std::vector<std::string> csvs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path sub = dir / (std::to_string(seed) + "-" + std::to_string(rep));
      Child c = Child::spawn({COVSPEC_CLI_PATH, "run", "--seed", std::to_string(seed), "--json-dir",
                              sub.string()});
      csvs.push_back(c.rest());
      o.require(c.wait() == 0, "child run failed, seed " + std::to_string(seed));
      std::ifstream f(sub / ("run-" + std::to_string(seed) + ".json"));
      nlohmann::json j = nlohmann::json::parse(f);
      testing::strip_wall(j);
      o.require(j.dump() == stable_json(a, cfg), "child report differs, seed " + std::to_string(seed));
      ++runs;
    }
    o.require(csvs[0] == csvs[1] && !csvs[0].empty(), "child CSV differs, seed " + std::to_string(seed));
    o.require(csvs[0] == csv_header() + "\n" + csv_row(a, cfg) + "\n",
              "child CSV differs from in-process, seed " + std::to_string(seed));
  }
  if (o.pass) o.detail = "3 seeds x (2 in-process + " + std::to_string(runs / 3) + " child) runs identical";
  return o;
}

}  // namespace
}  // namespace covspec

int main() {
  using namespace covspec;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exactness oracle", exactness},
      {"decoupled correction bit-equivalence", decoupled_correction},
      {"subspace energy conservation", svd_energy},
      {"payload arithmetic", payload_arithmetic},
      {"latency model", latency_model},
      {"length controller", controller_vectors},
      {"fan-out schedule", fan_out_schedule},
      {"ablation directions", ablation_directions},
      {"loopback vs socket mode", mode_equivalence},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
