#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vota/allocator.hpp"
#include "vota/e2ap.hpp"
#include "vota/json_io.hpp"
#include "vota/passthrough.hpp"
#include "vota/resource_model.hpp"

namespace vota {

enum class Mode { Vota, SharedUnsliced };

constexpr std::string_view to_string(Mode m) noexcept { return m == Mode::Vota ? "vota" : "shared-unsliced"; }

enum class Impl { Cpu, Gpu };

constexpr std::string_view to_string(Impl i) noexcept { return i == Impl::Cpu ? "cpu" : "gpu"; }

struct ThroughputModelConfig {
  double baseline_mimo_cont_tx{227.0};  // Mbps, CPU DFT + MIMO + continuous-tx
  double siso_factor{0.5};
  bool gpu_cont_tx_viable{false};
  double late_packet_factor{0.4};       // GPU under continuous-tx hitting late packets
  double no_continuous_tx_factor{0.6};  // TX->RX leakage without continuous-tx
  double lll_penalty_per_overlap_fraction{0.5};
  double spectrum_overlap_penalty{0.3};
};

inline std::vector<std::string> validate(const ThroughputModelConfig& c) {
  std::vector<std::string> v;
  if (!(c.baseline_mimo_cont_tx > 0.0)) v.push_back("throughput_model.baseline_mimo_cont_tx_mbps: must be > 0");
  auto frac = [&](double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) v.push_back(std::string("throughput_model.") + name + ": must be in [0, 1]");
  };
  frac(c.siso_factor, "siso_factor");
  frac(c.late_packet_factor, "late_packet_factor");
  frac(c.no_continuous_tx_factor, "no_continuous_tx_factor");
  frac(c.lll_penalty_per_overlap_fraction, "lll_penalty_per_overlap_fraction");
  frac(c.spectrum_overlap_penalty, "spectrum_overlap_penalty");
  return v;
}

/// Over-the-air throughput of an undisturbed gNB configuration.
inline double baseline_throughput(const ThroughputModelConfig& cfg, Impl impl, bool mimo, bool continuous_tx) {
  double mbps = cfg.baseline_mimo_cont_tx;
  if (!mimo) mbps *= cfg.siso_factor;
  if (!continuous_tx) mbps *= cfg.no_continuous_tx_factor;
  else if (impl == Impl::Gpu && !cfg.gpu_cont_tx_viable) mbps *= cfg.late_packet_factor;
  return mbps;
}

struct ScenarioExperiment {
  ExperimentRequest request;
  Impl impl{Impl::Cpu};
  bool mimo{true};
  bool continuous_tx{true};
  e2::NodeParams e2_node;  // used by e2-victim workloads
};

struct AttackEvent {
  std::string experiment;
  e2::AttackProfile attack;
};

struct ReleaseEvent {
  std::string experiment;
};

struct ScenarioEvent {
  double time{0.0};
  std::variant<AttackEvent, ReleaseEvent> what;

  const std::string& experiment() const {
    return std::visit([](const auto& e) -> const std::string& { return e.experiment; }, what);
  }
};

struct Scenario {
  std::string name;
  HostInventory inventory;
  std::vector<ScenarioExperiment> experiments;
  std::vector<ScenarioEvent> events;  // sorted by time, stable
  double horizon{60.0};
  double tick{0.1};
  Mode mode{Mode::Vota};
  ThroughputModelConfig throughput;

  const ScenarioExperiment* find(std::string_view n) const {
    for (const auto& e : experiments)
      if (e.request.name == n) return &e;
    return nullptr;
  }
};

/// Structural rules beyond the per-field parse checks.
inline std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> v = validate_inventory(s.inventory);
  if (!(s.horizon > 0.0)) v.push_back("horizon_s: must be > 0");
  if (!(s.tick > 0.0)) v.push_back("tick_s: must be > 0");
  auto tv = validate(s.throughput);
  v.insert(v.end(), tv.begin(), tv.end());
  std::set<std::string> names;
  for (const auto& e : s.experiments) {
    if (!names.insert(e.request.name).second) v.push_back("experiments: duplicate name '" + e.request.name + "'");
    if (e.request.cores_needed < 1) v.push_back("experiments." + e.request.name + ".cores_needed: must be >= 1");
    if (e.request.bandwidth_needed <= 0) v.push_back("experiments." + e.request.name + ".bandwidth_hz: must be > 0");
  }
  std::set<std::string> released;
  for (const auto& ev : s.events) {
    const std::string& target = ev.experiment();
    if (!(ev.time >= 0.0 && ev.time < s.horizon))
      v.push_back("events: time " + std::to_string(ev.time) + " for '" + target + "' outside [0, horizon)");
    const ScenarioExperiment* exp = s.find(target);
    if (!exp) {
      v.push_back("events: unknown experiment '" + target + "'");
      continue;
    }
    if (std::holds_alternative<AttackEvent>(ev.what)) {
      if (exp->request.workload != WorkloadKind::E2Victim)
        v.push_back("events: attack target '" + target + "' is not an e2-victim workload");
      const auto& a = std::get<AttackEvent>(ev.what).attack;
      if (a.n_xapps < 0 || a.rate_per_xapp < 0.0 || a.duration < 0.0)
        v.push_back("events: attack on '" + target + "' has negative fields");
    } else if (!released.insert(target).second) {
      v.push_back("events: '" + target + "' released twice");
    }
  }
  return v;
}

namespace detail {

inline e2::NodeParams node_params_from_json(const io::json& j, const std::string& w) {
  io::check_fields(j, {"capacity", "service_rate", "processing_window_s", "indication_period_s"}, w);
  e2::NodeParams p;
  if (j.contains("capacity")) p.capacity = io::get_as<std::size_t>(j["capacity"], w + ".capacity");
  if (j.contains("service_rate")) p.service_rate = io::get_as<double>(j["service_rate"], w + ".service_rate");
  if (j.contains("processing_window_s"))
    p.processing_window = io::get_as<double>(j["processing_window_s"], w + ".processing_window_s");
  if (j.contains("indication_period_s"))
    p.indication_period = io::get_as<double>(j["indication_period_s"], w + ".indication_period_s");
  return p;
}

inline ThroughputModelConfig throughput_from_json(const io::json& j, const std::string& w) {
  io::check_fields(j,
                   {"baseline_mimo_cont_tx_mbps", "siso_factor", "gpu_cont_tx_viable", "late_packet_factor",
                    "no_continuous_tx_factor", "lll_penalty_per_overlap_fraction", "spectrum_overlap_penalty"},
                   w);
  ThroughputModelConfig c;
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = io::get_as<double>(j[key], w + "." + key);
  };
  num("baseline_mimo_cont_tx_mbps", c.baseline_mimo_cont_tx);
  num("siso_factor", c.siso_factor);
  num("late_packet_factor", c.late_packet_factor);
  num("no_continuous_tx_factor", c.no_continuous_tx_factor);
  num("lll_penalty_per_overlap_fraction", c.lll_penalty_per_overlap_fraction);
  num("spectrum_overlap_penalty", c.spectrum_overlap_penalty);
  if (j.contains("gpu_cont_tx_viable")) c.gpu_cont_tx_viable = io::get_as<bool>(j["gpu_cont_tx_viable"], w);
  return c;
}

}  // namespace detail

/// Builds a Scenario from parsed JSON. Relative inventory paths resolve
/// against base_dir. Schema: docs/schema.md.
inline Scenario scenario_from_json(const io::json& j, const std::filesystem::path& base_dir = {}) {
  const std::string w = "scenario";
  io::check_fields(j, {"name", "inventory", "mode", "horizon_s", "tick_s", "slot_deadline_s", "throughput_model",
                       "experiments", "events"},
                   w);
  Scenario s;
  s.name = j.value("name", std::string("unnamed"));

  const io::json& inv = io::require(j, "inventory", w);
  if (inv.is_string()) {
    std::filesystem::path p = inv.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    s.inventory = io::inventory_from_json(io::parse_text(io::read_file(p.string()), p.string()), "inventory");
  } else {
    s.inventory = io::inventory_from_json(inv, w + ".inventory");
  }

  const std::string mode = j.value("mode", std::string("vota"));
  if (mode == "vota") s.mode = Mode::Vota;
  else if (mode == "shared-unsliced") s.mode = Mode::SharedUnsliced;
  else throw Error(Errc::ParseError, w + ".mode: unknown mode '" + mode + "'");

  if (j.contains("horizon_s")) s.horizon = io::get_as<double>(j["horizon_s"], w + ".horizon_s");
  if (j.contains("tick_s")) s.tick = io::get_as<double>(j["tick_s"], w + ".tick_s");
  const double deadline =
      j.contains("slot_deadline_s") ? io::get_as<double>(j["slot_deadline_s"], w + ".slot_deadline_s") : kSlotDeadline30kHz;
  if (j.contains("throughput_model")) s.throughput = detail::throughput_from_json(j["throughput_model"], w + ".throughput_model");

  const io::json& exps = io::require(j, "experiments", w);
  if (!exps.is_array()) throw Error(Errc::ParseError, w + ".experiments: expected an array");
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const std::string ew = w + ".experiments[" + std::to_string(i) + "]";
    const io::json& e = exps[i];
    io::check_fields(e, {"name", "cores_needed", "bandwidth_hz", "device_kinds", "workload", "impl", "mimo",
                         "continuous_tx", "e2_node"},
                     ew);
    ScenarioExperiment x;
    x.request.name = io::get_as<std::string>(io::require(e, "name", ew), ew + ".name");
    x.request.workload = parse_workload(e.value("workload", std::string("none")));
    const io::json& cores = io::require(e, "cores_needed", ew);
    if (cores.is_string()) {
      if (cores.get<std::string>() != "auto") throw Error(Errc::ParseError, ew + ".cores_needed: expected integer or \"auto\"");
      x.request.cores_needed = min_cores_search(workload_model(x.request.workload), deadline, s.inventory);
    } else {
      x.request.cores_needed = io::get_as<int>(cores, ew + ".cores_needed");
    }
    x.request.bandwidth_needed = io::get_hz(io::require(e, "bandwidth_hz", ew), ew + ".bandwidth_hz");
    if (e.contains("device_kinds"))
      for (const auto& k : e["device_kinds"]) x.request.device_kinds.push_back(parse_device_kind(io::get_as<std::string>(k, ew)));
    const std::string impl = e.value("impl", std::string("cpu"));
    if (impl == "cpu") x.impl = Impl::Cpu;
    else if (impl == "gpu") x.impl = Impl::Gpu;
    else throw Error(Errc::ParseError, ew + ".impl: unknown implementation '" + impl + "'");
    x.mimo = e.value("mimo", true);
    x.continuous_tx = e.value("continuous_tx", true);
    if (e.contains("e2_node")) x.e2_node = detail::node_params_from_json(e["e2_node"], ew + ".e2_node");
    s.experiments.push_back(std::move(x));
  }

  if (j.contains("events")) {
    const io::json& evs = j["events"];
    if (!evs.is_array()) throw Error(Errc::ParseError, w + ".events: expected an array");
    for (std::size_t i = 0; i < evs.size(); ++i) {
      const std::string vw = w + ".events[" + std::to_string(i) + "]";
      const io::json& e = evs[i];
      io::check_fields(e, {"type", "t_s", "experiment", "attack"}, vw);
      ScenarioEvent ev;
      ev.time = io::get_as<double>(io::require(e, "t_s", vw), vw + ".t_s");
      const std::string target = io::get_as<std::string>(io::require(e, "experiment", vw), vw + ".experiment");
      const std::string type = io::get_as<std::string>(io::require(e, "type", vw), vw + ".type");
      if (type == "attack_start") {
        const io::json& a = io::require(e, "attack", vw);
        io::check_fields(a, {"n_xapps", "rate_per_xapp", "duration_s"}, vw + ".attack");
        AttackEvent at{target, {}};
        at.attack.n_xapps = io::get_as<int>(io::require(a, "n_xapps", vw + ".attack"), vw + ".attack.n_xapps");
        at.attack.rate_per_xapp = io::get_as<double>(io::require(a, "rate_per_xapp", vw + ".attack"), vw + ".attack.rate_per_xapp");
        at.attack.start = ev.time;
        at.attack.duration = a.contains("duration_s") ? io::get_as<double>(a["duration_s"], vw + ".attack.duration_s")
                                                      : std::max(0.0, s.horizon - ev.time);
        ev.what = std::move(at);
      } else if (type == "release") {
        if (e.contains("attack")) throw Error(Errc::ParseError, vw + ": release events take no 'attack'");
        ev.what = ReleaseEvent{target};
      } else {
        throw Error(Errc::ParseError, vw + ".type: unknown event type '" + type + "'");
      }
      s.events.push_back(std::move(ev));
    }
  }
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.time < b.time; });

  if (auto v = validate_scenario(s); !v.empty()) throw ValidationError(std::move(v));
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  const std::filesystem::path p(path);
  return scenario_from_json(io::parse_text(io::read_file(path), path), p.parent_path());
}

// ---------------------------------------------------------------------------
// Co-simulation

struct TraceRow {
  double time{0.0};
  std::string experiment;
  double mbps{0.0};
  std::string status;  // running | crashed
};

struct ExperimentSummary {
  std::string name;
  WorkloadKind workload{WorkloadKind::None};
  double baseline{0.0};
  bool attacked{false};
  std::optional<double> crash_time;
  std::optional<double> released_at;
  double mean{0.0}, min{0.0}, max{0.0};
  std::size_t samples{0};
};

enum class Verdict { Isolated, Interfered };

struct IsolationReport {
  std::string scenario;
  Mode mode{Mode::Vota};
  double horizon{0.0};
  double tick{0.0};
  int total_cores{0};
  Hz guard_band{0};
  std::vector<TraceRow> traces;
  std::vector<ExperimentSummary> experiments;
  std::vector<Allocation> allocations;
  std::vector<AttachmentPlan> attachments;
  std::optional<CapacityEstimate> capacity;
  Verdict verdict{Verdict::Isolated};
  std::vector<std::string> violated;  // e.g. core-overlap, spectrum-overlap
};

namespace detail {

struct LiveExperiment {
  const ScenarioExperiment* spec{nullptr};
  Allocation alloc;
  double baseline{0.0};
  bool attacked{false};
  bool live{true};
  std::optional<e2::Node> node;
  std::vector<e2::FloodSchedule> floods;
};

}  // namespace detail

/// Runs every experiment side by side on one host and checks whether the
/// experiments nobody attacks keep their undisturbed throughput.
///
/// Each tick, an experiment delivers
///   baseline * (1 - lll_penalty * |own cores shared with live others| / |own cores|)
///            * (1 - spectrum_penalty if its slice conflicts with a live other's)
/// and an e2-victim additionally drops to 0 once its E2 node has crashed.
inline IsolationReport run_parallel_scenario(const Scenario& s) {
  if (auto v = validate_scenario(s); !v.empty()) throw ValidationError(std::move(v));
  const HostInventory& inv = s.inventory;
  std::vector<detail::LiveExperiment> exps;
  exps.reserve(s.experiments.size());

  // Slices
  try {
    if (s.mode == Mode::Vota) {
      Allocator alloc(inv);
      for (const auto& e : s.experiments) exps.push_back(detail::LiveExperiment{&e, alloc.allocate(e.request), 0.0, false, true, std::nullopt, {}});
    } else {
      int widest = 1;
      Hz bandwidth = 1;
      for (const auto& e : s.experiments) {
        widest = std::max(widest, e.request.cores_needed);
        bandwidth = std::max(bandwidth, e.request.bandwidth_needed);
      }
      ExperimentRequest shared{"shared", widest, bandwidth, {}, WorkloadKind::None};
      const CoreSet cores = allocate_compute(shared, inv, {});
      const SpectrumSlice slice = allocate_spectrum(shared, inv, {});
      std::vector<Allocation> so_far;
      std::uint64_t seq = 0;
      for (const auto& e : s.experiments) {
        Allocation a{e.request.name, cores, slice, allocate_devices(e.request, inv, so_far), seq++};
        so_far.push_back(a);
        exps.push_back(detail::LiveExperiment{&e, std::move(a), 0.0, false, true, std::nullopt, {}});
      }
    }
  } catch (const Error& err) {
    throw Error(Errc::AllocationFailed, err.what());
  }

  IsolationReport r;
  r.scenario = s.name;
  r.mode = s.mode;
  r.horizon = s.horizon;
  r.tick = s.tick;
  r.total_cores = inv.total_cores;
  r.guard_band = inv.guard_band;

  // Passthrough of the granted radio devices into each experiment's workspace.
  DeviceRegistry registry(inv.devices);
  MockBackend backend;
  for (auto& x : exps) {
    for (const auto& id : x.alloc.devices) {
      const AttachmentPlan plan = registry.plan_attach(id, x.alloc.request_name);
      registry.apply_plan(plan, backend);
      r.attachments.push_back(plan);
    }
    r.allocations.push_back(x.alloc);
  }

  for (auto& x : exps) {
    x.baseline = baseline_throughput(s.throughput, x.spec->impl, x.spec->mimo, x.spec->continuous_tx);
    if (x.spec->request.workload == WorkloadKind::E2Victim) {
      e2::NodeParams p = x.spec->e2_node;
      p.record_emissions = false;
      x.node.emplace(p);
      x.node->offer(e2::Message::request("kpm-monitor", 1, 0.0), 0.0);
    }
  }
  auto find_exp = [&](const std::string& n) -> detail::LiveExperiment& {
    for (auto& x : exps)
      if (x.alloc.request_name == n) return x;
    throw Error(Errc::ValidationError, "unknown experiment '" + n + "'");
  };
  for (const auto& ev : s.events)
    if (const auto* a = std::get_if<AttackEvent>(&ev.what)) {
      auto& x = find_exp(a->experiment);
      x.attacked = true;
      x.floods.emplace_back(a->attack, s.horizon);
    }

  bool core_overlap_seen = false, spectrum_overlap_seen = false;
  std::size_t next_event = 0;
  const auto samples = static_cast<std::uint64_t>(std::floor(s.horizon / s.tick + 1e-9));
  for (std::uint64_t k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) * s.tick;

    // Releases take effect at their timestamp.
    for (; next_event < s.events.size() && s.events[next_event].time <= t; ++next_event) {
      const auto* rel = std::get_if<ReleaseEvent>(&s.events[next_event].what);
      if (!rel) continue;
      auto& x = find_exp(rel->experiment);
      for (const auto& id : x.alloc.devices) registry.detach_device(id, backend);
      x.live = false;
    }

    for (auto& x : exps) {
      if (!x.node) continue;
      // Merge the flood schedules in time order up to t.
      while (true) {
        e2::FloodSchedule* first = nullptr;
        for (auto& f : x.floods)
          if (f.has_next() && f.next_time() <= t && (!first || f.next_time() < first->next_time())) first = &f;
        if (!first) break;
        const double at = first->next_time();
        x.node->offer(first->pop(), at);
      }
      x.node->advance_to(t);
    }

    for (auto& x : exps) {
      if (!x.live) continue;
      CoreSet others;
      bool spectrum_conflict = false;
      for (const auto& y : exps) {
        if (&y == &x || !y.live) continue;
        others = others.united(y.alloc.cores);
        spectrum_conflict = spectrum_conflict || bands_conflict(x.alloc.spectrum, y.alloc.spectrum, inv.guard_band);
      }
      const double overlap =
          static_cast<double>(x.alloc.cores.intersection_size(others)) / static_cast<double>(x.alloc.cores.size());
      double mbps = x.baseline * (1.0 - s.throughput.lll_penalty_per_overlap_fraction * overlap);
      if (spectrum_conflict) mbps *= 1.0 - s.throughput.spectrum_overlap_penalty;
      e2::Status st = x.node ? x.node->status() : e2::Status::Running;
      mbps = e2::ue_throughput(st, mbps);
      if (!x.attacked && mbps != x.baseline) {
        core_overlap_seen = core_overlap_seen || (overlap > 0.0 && s.throughput.lll_penalty_per_overlap_fraction > 0.0);
        spectrum_overlap_seen = spectrum_overlap_seen || (spectrum_conflict && s.throughput.spectrum_overlap_penalty > 0.0);
      }
      r.traces.push_back({t, x.alloc.request_name, mbps, std::string(e2::to_string(st))});
    }
  }

  int max_demand = 0;
  for (auto& x : exps) {
    ExperimentSummary sum;
    sum.name = x.alloc.request_name;
    sum.workload = x.spec->request.workload;
    sum.baseline = x.baseline;
    sum.attacked = x.attacked;
    if (x.node) sum.crash_time = x.node->crash_time();
    for (const auto& ev : s.events)
      if (std::holds_alternative<ReleaseEvent>(ev.what) && ev.experiment() == sum.name) sum.released_at = ev.time;
    bool first = true;
    double total = 0.0;
    for (const auto& row : r.traces) {
      if (row.experiment != sum.name) continue;
      sum.min = first ? row.mbps : std::min(sum.min, row.mbps);
      sum.max = first ? row.mbps : std::max(sum.max, row.mbps);
      total += row.mbps;
      ++sum.samples;
      first = false;
    }
    sum.mean = sum.samples ? total / static_cast<double>(sum.samples) : 0.0;
    r.experiments.push_back(sum);
    max_demand = std::max(max_demand, x.spec->request.cores_needed);
  }
  if (max_demand >= 1 && max_demand <= inv.total_cores) r.capacity = sharing_capacity(inv.total_cores, max_demand);

  if (core_overlap_seen) r.violated.push_back("core-overlap");
  if (spectrum_overlap_seen) r.violated.push_back("spectrum-overlap");
  r.verdict = r.violated.empty() ? Verdict::Isolated : Verdict::Interfered;
  return r;
}

}  // namespace vota
