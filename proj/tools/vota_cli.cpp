// vota: command-line front end for the testbed-sharing orchestrator.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "vota/allocator.hpp"
#include "vota/cost_model.hpp"
#include "vota/e2ap.hpp"
#include "vota/json_io.hpp"
#include "vota/lxd_backend.hpp"
#include "vota/passthrough.hpp"
#include "vota/report.hpp"
#include "vota/scenario.hpp"

namespace fs = std::filesystem;
using namespace vota;

namespace {

struct Globals {
  std::string config;
  std::string out = "vota-out";
  std::uint64_t seed = 1;
};

HostInventory inventory(const Globals& g) { return g.config.empty() ? reference_inventory() : io::load_inventory(g.config); }

fs::path state_dir(const Globals& g) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw Error(Errc::IoError, "cannot create '" + g.out + "': " + ec.message());
  return g.out;
}

fs::path ledger_path(const Globals& g) { return state_dir(g) / "ledger.jsonl"; }
fs::path backend_log_path(const Globals& g) { return state_dir(g) / "backend.jsonl"; }

Allocator load_allocator(const Globals& g) {
  Allocator a(inventory(g));
  std::ifstream in(ledger_path(g));
  if (in) a.replay(io::read_ledger(in));
  return a;
}

void append_line(const fs::path& p, const std::string& line) {
  std::ofstream out(p, std::ios::app | std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot append to '" + p.string() + "'");
  out << line << '\n';
}

// Forwards to an optional real backend and records every accepted command
// in the mock, whose log is the persisted state.
class RecordingBackend : public ContainerBackend {
 public:
  explicit RecordingBackend(std::unique_ptr<ContainerBackend> real) : real_(std::move(real)) {}
  void execute(const BackendCommand& cmd) override {
    if (real_) real_->execute(cmd);
    mock.execute(cmd);
  }
  MockBackend mock;

 private:
  std::unique_ptr<ContainerBackend> real_;
};

// Rebuilds device ownership from the backend log: every entry still in
// effect is matched back to the device exposing that endpoint.
void restore_registry(DeviceRegistry& reg, const std::vector<BackendCommand>& log, MockBackend& mock) {
  mock.restore(log);
  std::map<std::string, AttachmentPlan> plans;
  for (const auto& c : log) {
    if (c.verb != BackendVerb::Attach || !mock.effective().count(c.idempotency_key)) continue;
    for (const auto& [id, dev] : reg.devices()) {
      for (const auto& ep : dev.endpoints) {
        if (ep.name != c.endpoint || idempotency_key(id, c.workspace, ep.name) != c.idempotency_key) continue;
        auto& plan = plans[id];
        plan.device_id = id;
        plan.workspace = c.workspace;
        if (std::none_of(plan.entries.begin(), plan.entries.end(), [&](const PlanEntry& e) { return e.endpoint == ep; }))
          plan.entries.push_back({ep, c.type});
      }
    }
  }
  for (const auto& [id, plan] : plans) reg.adopt(plan);
}

std::vector<BackendCommand> read_backend_log(const Globals& g) {
  std::ifstream in(backend_log_path(g));
  if (!in) return {};
  return read_command_log(in);
}

void persist_new_commands(const Globals& g, const MockBackend& mock, std::size_t already) {
  std::ofstream out(backend_log_path(g), std::ios::app | std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot append to '" + backend_log_path(g).string() + "'");
  std::vector<BackendCommand> fresh(mock.log().begin() + static_cast<std::ptrdiff_t>(already), mock.log().end());
  write_command_log(out, fresh);
}

std::unique_ptr<ContainerBackend> real_backend(const std::string& lxd) {
  if (lxd.empty()) return nullptr;
  return std::make_unique<LxdRestBackend>(lxd);
}

int report_error(const Error& e) {
  std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
  if (const auto* v = dynamic_cast<const ValidationError*>(&e))
    for (const auto& msg : v->violations()) std::cerr << "  - " << msg << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compute, spectrum and radio-device slicing for a shared RAN testbed host"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Host inventory JSON (default: built-in reference host)");
  app.add_option("--out", g.out, "State and report directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for the optional arrival jitter")->capture_default_str();

  int exit_code = 0;

  // inventory show
  auto* inv_cmd = app.add_subcommand("inventory", "Host inventory");
  inv_cmd->require_subcommand(1);
  inv_cmd->add_subcommand("show", "Print the validated inventory")->callback([&] {
    std::cout << io::inventory_to_json(inventory(g)).dump(2) << '\n';
  });

  // alloc
  std::string a_name, a_cores, a_workload = "none";
  double a_bw_mhz = 40.0;
  std::vector<std::string> a_kinds;
  auto* alloc_cmd = app.add_subcommand("alloc", "Allocate a slice and record it in the ledger");
  alloc_cmd->add_option("name", a_name, "Experiment name")->required();
  alloc_cmd->add_option("--cores", a_cores, "Core count or 'auto'")->required();
  alloc_cmd->add_option("--bandwidth-mhz", a_bw_mhz, "Spectrum slice width")->capture_default_str();
  alloc_cmd->add_option("--device", a_kinds, "Device kind to grant (sdr-usb, sdr-nic, modem); repeatable");
  alloc_cmd->add_option("--workload", a_workload, "dft, e2-victim or none")->capture_default_str();
  alloc_cmd->callback([&] {
    Allocator alloc = load_allocator(g);
    ExperimentRequest req;
    req.name = a_name;
    req.workload = parse_workload(a_workload);
    req.bandwidth_needed = MHz(a_bw_mhz);
    for (const auto& k : a_kinds) req.device_kinds.push_back(parse_device_kind(k));
    if (a_cores == "auto") {
      req.cores_needed = min_cores_search(workload_model(req.workload), kSlotDeadline30kHz, alloc.inventory());
    } else {
      try {
        req.cores_needed = std::stoi(a_cores);
      } catch (const std::exception&) {
        throw Error(Errc::InvalidDemand, "--cores must be an integer or 'auto'");
      }
    }
    const Allocation& a = alloc.allocate(req);
    append_line(ledger_path(g), io::ledger_line(alloc.ledger().back()));
    auto j = io::allocation_to_json(a);
    j["cores_range"] = a.cores.to_string();
    std::cout << j.dump(2) << '\n';
  });

  // release
  std::string r_name;
  auto* rel_cmd = app.add_subcommand("release", "Release a live allocation");
  rel_cmd->add_option("name", r_name, "Experiment name")->required();
  rel_cmd->callback([&] {
    Allocator alloc = load_allocator(g);
    alloc.release(r_name);
    append_line(ledger_path(g), io::ledger_line(alloc.ledger().back()));
    std::cout << "released " << r_name << '\n';
  });

  // attach / detach
  std::string d_id, d_ws, d_lxd;
  auto* att_cmd = app.add_subcommand("attach", "Pass a radio device through to a workspace");
  att_cmd->add_option("device", d_id, "Device id")->required();
  att_cmd->add_option("workspace", d_ws, "Workspace (container) name")->required();
  att_cmd->add_option("--lxd", d_lxd, "Container manager endpoint (http://host:port or unix:/path)");
  att_cmd->callback([&] {
    DeviceRegistry reg(inventory(g).devices);
    RecordingBackend be(real_backend(d_lxd));
    const auto log = read_backend_log(g);
    restore_registry(reg, log, be.mock);
    const std::size_t before = be.mock.log().size();
    try {
      const auto applied = reg.apply_plan(reg.plan_attach(d_id, d_ws), be);
      persist_new_commands(g, be.mock, before);
      for (const auto& c : applied.commands) std::cout << command_to_json(c).dump() << '\n';
    } catch (const Error&) {
      persist_new_commands(g, be.mock, before);  // keep rollback commands
      throw;
    }
  });

  auto* det_cmd = app.add_subcommand("detach", "Detach a radio device from its workspace");
  det_cmd->add_option("device", d_id, "Device id")->required();
  det_cmd->add_option("--lxd", d_lxd, "Container manager endpoint (http://host:port or unix:/path)");
  det_cmd->callback([&] {
    DeviceRegistry reg(inventory(g).devices);
    RecordingBackend be(real_backend(d_lxd));
    restore_registry(reg, read_backend_log(g), be.mock);
    const std::size_t before = be.mock.log().size();
    try {
      reg.detach_device(d_id, be);
    } catch (const Error&) {
      persist_new_commands(g, be.mock, before);
      throw;
    }
    persist_new_commands(g, be.mock, before);
    for (std::size_t i = before; i < be.mock.log().size(); ++i) std::cout << command_to_json(be.mock.log()[i]).dump() << '\n';
  });

  // run
  std::string scenario_path;
  auto* run_cmd = app.add_subcommand("run", "Co-simulate a scenario and write traces.csv, allocations.json, summary.txt");
  run_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->callback([&] {
    const auto report = run_parallel_scenario(load_scenario(scenario_path));
    emit_report(report, state_dir(g));
    std::cout << render_summary(report);
    exit_code = report.verdict == Verdict::Isolated ? 0 : 2;
  });

  // report
  auto* rep_cmd = app.add_subcommand("report", "Live allocations, attachments and sharing capacity");
  rep_cmd->callback([&] {
    const Allocator alloc = load_allocator(g);
    DeviceRegistry reg(alloc.inventory().devices);
    MockBackend mock;
    restore_registry(reg, read_backend_log(g), mock);
    int max_demand = 0;
    for (const auto& a : alloc.live()) {
      std::cout << a.request_name << ": cores " << a.cores.to_string() << ", " << a.spectrum.bandwidth / 1e6 << " MHz @ "
                << a.spectrum.center_freq / 1e6 << " MHz (point A " << a.spectrum.point_a_arfcn << ", SSB "
                << a.spectrum.ssb_arfcn << "), att " << a.spectrum.att_tx << '/' << a.spectrum.att_rx;
      if (!a.devices.empty()) {
        std::cout << ", devices";
        for (const auto& d : a.devices) std::cout << ' ' << d;
      }
      std::cout << '\n';
      max_demand = std::max(max_demand, static_cast<int>(a.cores.size()));
    }
    for (const auto& [id, dev] : reg.devices())
      if (dev.attached_to) std::cout << "attached: " << id << " -> " << *dev.attached_to << '\n';
    if (max_demand > 0) {
      const auto c = sharing_capacity(alloc.inventory().total_cores, max_demand);
      std::cout << "sharing capacity: " << c.total_cores << '/' << c.max_demand << " = " << c.render() << '\n';
    }
  });

  // min-cores
  std::string mc_workload = "dft";
  double mc_deadline = kSlotDeadline30kHz;
  auto* mc_cmd = app.add_subcommand("min-cores", "Smallest core count meeting the slot deadline");
  mc_cmd->add_option("workload", mc_workload, "dft or e2-victim")->capture_default_str();
  mc_cmd->add_option("--deadline-s", mc_deadline, "Slot deadline")->capture_default_str();
  mc_cmd->callback([&] {
    std::cout << min_cores_search(workload_model(parse_workload(mc_workload)), mc_deadline, inventory(g)) << '\n';
  });

  // bench-dft
  auto* bench_cmd = app.add_subcommand("bench-dft", "CPU vs offload time model over the size catalog (CSV)");
  bench_cmd->callback([&] {
    std::ostringstream os;
    dft::write_benchmark_csv(os, dft::kDefaultCostModel);
    io::write_file((state_dir(g) / "dft_bench.csv").string(), os.str());
    std::cout << os.str();
    if (auto c = dft::crossover_size(dft::kDefaultCostModel)) std::cout << "crossover: " << *c << '\n';
  });

  // flood
  e2::NodeParams f_node;
  e2::AttackProfile f_attack{4, 250.0, 0.0, 1e9};
  double f_horizon = 10.0;
  bool f_jitter = false;
  auto* flood_cmd = app.add_subcommand("flood", "Subscription flood against one E2 node (trajectory CSV)");
  flood_cmd->add_option("--n-xapps", f_attack.n_xapps)->capture_default_str();
  flood_cmd->add_option("--rate", f_attack.rate_per_xapp, "Requests/s per xApp")->capture_default_str();
  flood_cmd->add_option("--start", f_attack.start)->capture_default_str();
  flood_cmd->add_option("--duration", f_attack.duration)->capture_default_str();
  flood_cmd->add_option("--capacity", f_node.capacity)->capture_default_str();
  flood_cmd->add_option("--service-rate", f_node.service_rate)->capture_default_str();
  flood_cmd->add_option("--window", f_node.processing_window)->capture_default_str();
  flood_cmd->add_option("--horizon", f_horizon)->capture_default_str();
  flood_cmd->add_flag("--jitter", f_jitter, "Seeded arrival jitter (uses --seed)");
  flood_cmd->callback([&] {
    e2::FloodOptions opt;
    if (f_jitter) opt.jitter_seed = g.seed;
    const auto r = e2::run_flood(f_node, f_attack, f_horizon, opt);
    std::ostringstream os;
    e2::write_trajectory_csv(os, r.trajectory);
    io::write_file((state_dir(g) / "trajectory.csv").string(), os.str());
    std::cout << "arrivals " << r.arrivals << ", processed " << r.processed << ", dropped " << r.dropped
              << ", peak queue " << r.peak_queue << '\n';
    if (r.crash_time) std::cout << "crash at " << *r.crash_time << " s\n";
    else std::cout << "no crash within " << f_horizon << " s\n";
    if (auto fluid = e2::fluid_crash_time(f_node, f_attack)) std::cout << "fluid estimate " << *fluid << " s\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const Error& e) {
    return report_error(e);
  }
  return exit_code;
}
