#include "vota/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vota/report.hpp"

using namespace vota;
using vota::test::source_path;

namespace {

io::json two_tenant_json() {
  return io::json::parse(io::read_file(source_path("scenarios/two-tenant.json")));
}

Scenario from(io::json j) { return scenario_from_json(j, source_path("scenarios")); }

std::vector<TraceRow> rows_of(const IsolationReport& r, const std::string& name) {
  std::vector<TraceRow> out;
  for (const auto& row : r.traces)
    if (row.experiment == name) out.push_back(row);
  return out;
}

bool has_violation(const IsolationReport& r, const std::string& v) {
  return std::find(r.violated.begin(), r.violated.end(), v) != r.violated.end();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("vota-scenario-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(LoadScenario, ShippedTwoTenant) {
  const Scenario s = load_scenario(source_path("scenarios/two-tenant.json"));
  ASSERT_EQ(s.experiments.size(), 2u);
  EXPECT_EQ(s.experiments[0].request.cores_needed, 12);
  EXPECT_EQ(s.experiments[0].request.workload, WorkloadKind::Dft);
  EXPECT_EQ(s.experiments[1].request.cores_needed, 8);
  EXPECT_EQ(s.experiments[1].request.workload, WorkloadKind::E2Victim);
  ASSERT_EQ(s.events.size(), 1u);
  EXPECT_EQ(s.events[0].time, 30.0);
  const auto& atk = std::get<AttackEvent>(s.events[0].what);
  EXPECT_EQ(atk.attack.total_rate(), 1000.0);
  EXPECT_EQ(s.inventory.total_cores, 32);
  EXPECT_EQ(s.mode, Mode::Vota);
  EXPECT_EQ(load_scenario(source_path("scenarios/two-tenant-shared.json")).mode, Mode::SharedUnsliced);
}

TEST(LoadScenario, AutoCoresUsesMinimumSearch) {
  auto j = two_tenant_json();
  j["experiments"][0]["cores_needed"] = "auto";
  j["experiments"][1]["cores_needed"] = "auto";
  const Scenario s = from(j);
  EXPECT_EQ(s.experiments[0].request.cores_needed, 12);
  EXPECT_EQ(s.experiments[1].request.cores_needed, 8);
}

TEST(LoadScenario, DuplicateNames) {
  auto j = two_tenant_json();
  j["experiments"][1]["name"] = "dft-offload";
  j["events"][0]["experiment"] = "dft-offload";
  try {
    from(j);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    bool named = false;
    for (const auto& v : e.violations()) named = named || v.find("duplicate name 'dft-offload'") != std::string::npos;
    EXPECT_TRUE(named);
  }
}

TEST(LoadScenario, EventAfterHorizon) {
  auto j = two_tenant_json();
  j["events"][0]["t_s"] = 75;
  EXPECT_ERRC(from(j), Errc::ValidationError);
  j["events"][0]["t_s"] = 60;
  EXPECT_ERRC(from(j), Errc::ValidationError);
}

TEST(LoadScenario, StructuralErrors) {
  auto j = two_tenant_json();
  j["experiments"][0]["colour"] = "red";
  try {
    from(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  j = two_tenant_json();
  j["events"][0]["experiment"] = "dft-offload";  // not an e2-victim
  EXPECT_ERRC(from(j), Errc::ValidationError);
  j = two_tenant_json();
  j["events"][0]["experiment"] = "ghost";
  EXPECT_ERRC(from(j), Errc::ValidationError);
  j = two_tenant_json();
  j["mode"] = "chaos";
  EXPECT_ERRC(from(j), Errc::ParseError);
  EXPECT_ERRC(scenario_from_json(io::parse_text("{\"name\": 1,\n  oops}", "inline"), {}), Errc::ParseError);
  EXPECT_ERRC(load_scenario(source_path("scenarios/missing.json")), Errc::IoError);
}

TEST(BaselineThroughput, Examples) {
  const ThroughputModelConfig cfg;
  EXPECT_DOUBLE_EQ(baseline_throughput(cfg, Impl::Cpu, true, true), 227.0);
  EXPECT_DOUBLE_EQ(baseline_throughput(cfg, Impl::Cpu, false, true), 113.5);
  EXPECT_LT(baseline_throughput(cfg, Impl::Gpu, true, true), baseline_throughput(cfg, Impl::Cpu, true, true));
  ThroughputModelConfig viable = cfg;
  viable.gpu_cont_tx_viable = true;
  EXPECT_DOUBLE_EQ(baseline_throughput(viable, Impl::Gpu, true, true), 227.0);
  EXPECT_LT(baseline_throughput(cfg, Impl::Cpu, true, false), 227.0);
}

TEST(RunParallelScenario, VotaIsolatesTheUnattackedTenant) {
  const auto r = run_parallel_scenario(load_scenario(source_path("scenarios/two-tenant.json")));
  EXPECT_EQ(r.verdict, Verdict::Isolated);
  EXPECT_TRUE(r.violated.empty());
  const auto dft = rows_of(r, "dft-offload");
  ASSERT_EQ(dft.size(), 601u);
  for (const auto& row : dft) {
    EXPECT_EQ(row.mbps, 227.0);
    EXPECT_EQ(row.status, "running");
  }
  ASSERT_EQ(r.experiments.size(), 2u);
  ASSERT_TRUE(r.experiments[1].crash_time);
  const double fluid = 30.0 + 500.0 / 900.0 + 3.0;
  EXPECT_NEAR(*r.experiments[1].crash_time, fluid, 2.0 / 1000.0);
  for (const auto& row : rows_of(r, "e2-dos")) {
    if (row.time < fluid - 0.05) {
      EXPECT_EQ(row.mbps, 227.0) << row.time;
    } else if (row.time > fluid + 0.05) {
      EXPECT_EQ(row.mbps, 0.0) << row.time;
      EXPECT_EQ(row.status, "crashed");
    }
  }
  EXPECT_EQ(r.allocations[0].cores, CoreSet::range(0, 12));
  EXPECT_EQ(r.allocations[1].cores, CoreSet::range(12, 8));
  EXPECT_EQ(r.allocations[0].spectrum.center_freq, GHz(3.32));
  EXPECT_EQ(r.allocations[1].spectrum.center_freq, GHz(2.59));
  ASSERT_TRUE(r.capacity);
  EXPECT_EQ(r.capacity->render(), "2.67");
}

TEST(RunParallelScenario, IsolationHoldsForAnyAttack) {
  for (int n : {1, 3, 10}) {
    for (double rate : {50.0, 400.0, 5000.0}) {
      auto j = two_tenant_json();
      j["events"][0]["attack"]["n_xapps"] = n;
      j["events"][0]["attack"]["rate_per_xapp"] = rate;
      const auto r = run_parallel_scenario(from(j));
      EXPECT_EQ(r.verdict, Verdict::Isolated) << n << "x" << rate;
      for (const auto& row : rows_of(r, "dft-offload")) EXPECT_EQ(row.mbps, 227.0);
    }
  }
}

TEST(RunParallelScenario, SharedHostInterferes) {
  const auto r = run_parallel_scenario(load_scenario(source_path("scenarios/two-tenant-shared.json")));
  EXPECT_EQ(r.verdict, Verdict::Interfered);
  EXPECT_TRUE(has_violation(r, "core-overlap"));
  EXPECT_EQ(r.allocations[0].cores, r.allocations[1].cores);
  EXPECT_EQ(r.allocations[0].cores, CoreSet::range(0, 12));
  // full overlap and same band: 227 * (1 - 0.5) * (1 - 0.3)
  for (const auto& row : rows_of(r, "dft-offload")) EXPECT_NEAR(row.mbps, 227.0 * 0.5 * 0.7, 1e-9);

  auto j = two_tenant_json();
  j["mode"] = "shared-unsliced";
  j["throughput_model"]["spectrum_overlap_penalty"] = 0.0;
  const auto cores_only = run_parallel_scenario(from(j));
  EXPECT_EQ(cores_only.violated, std::vector<std::string>{"core-overlap"});
  for (const auto& row : rows_of(cores_only, "dft-offload")) EXPECT_NEAR(row.mbps, 113.5, 1e-9);
}

TEST(RunParallelScenario, SingleQuietExperiment) {
  auto j = two_tenant_json();
  j["experiments"].erase(1);
  j["events"] = io::json::array();
  const auto r = run_parallel_scenario(from(j));
  EXPECT_EQ(r.verdict, Verdict::Isolated);
  for (const auto& row : r.traces) EXPECT_EQ(row.mbps, 227.0);
  EXPECT_EQ(r.capacity->render(), "2.67");
}

TEST(RunParallelScenario, ReleaseEndsContentionAndTrace) {
  auto j = two_tenant_json();
  j["mode"] = "shared-unsliced";
  j["events"] = io::json::array({{{"type", "release"}, {"t_s", 20}, {"experiment", "e2-dos"}}});
  const auto r = run_parallel_scenario(from(j));
  for (const auto& row : rows_of(r, "dft-offload")) {
    if (row.time < 20.0 - 1e-9) {
      EXPECT_LT(row.mbps, 227.0);
    } else {
      EXPECT_EQ(row.mbps, 227.0) << row.time;
    }
  }
  for (const auto& row : rows_of(r, "e2-dos")) EXPECT_LT(row.time, 20.0 - 1e-9);
  EXPECT_EQ(r.experiments[1].released_at, 20.0);
}

TEST(RunParallelScenario, AllocationFailure) {
  auto j = two_tenant_json();
  j["experiments"][1]["cores_needed"] = 24;
  EXPECT_ERRC(run_parallel_scenario(from(j)), Errc::AllocationFailed);
}

TEST(EmitReport, FilesAndCapacityLine) {
  const auto r = run_parallel_scenario(load_scenario(source_path("scenarios/two-tenant.json")));
  const auto dir = scratch("emit");
  emit_report(r, dir);
  const std::string summary = io::read_file((dir / "summary.txt").string());
  EXPECT_NE(summary.find("sharing capacity: 32/12 = 2.67"), std::string::npos);
  EXPECT_NE(summary.find("verdict: Isolated"), std::string::npos);
  const std::string csv = io::read_file((dir / "traces.csv").string());
  EXPECT_EQ(csv.rfind("time_s,experiment,mbps,status\n0.000,dft-offload,227.000,running\n", 0), 0u);
  const auto alloc = io::json::parse(io::read_file((dir / "allocations.json").string()));
  EXPECT_EQ(alloc["capacity"]["value"], "2.67");
  EXPECT_EQ(alloc["allocations"][0]["cores_range"], "0-11");
  EXPECT_EQ(alloc["allocations"][0]["attachments"].size(), 2u);
  std::filesystem::remove_all(dir);
}

TEST(EmitReport, EmptyTraceGivesHeaders) {
  IsolationReport r;
  r.scenario = "empty";
  EXPECT_EQ(render_traces_csv(r), "time_s,experiment,mbps,status\n");
  const auto dir = scratch("empty");
  emit_report(r, dir);
  EXPECT_EQ(io::read_file((dir / "traces.csv").string()), "time_s,experiment,mbps,status\n");
  std::filesystem::remove_all(dir);
}

TEST(EmitReport, RerunIsByteIdentical) {
  for (const char* name : {"scenarios/two-tenant.json", "scenarios/two-tenant-shared.json"}) {
    const auto a = scratch("a"), b = scratch("b");
    emit_report(run_parallel_scenario(load_scenario(source_path(name))), a);
    emit_report(run_parallel_scenario(load_scenario(source_path(name))), b);
    for (const char* f : {"traces.csv", "allocations.json", "summary.txt"})
      EXPECT_EQ(io::read_file((a / f).string()), io::read_file((b / f).string())) << name << " " << f;
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
  }
}

TEST(EmitReport, UnwritableDirectory) {
  IsolationReport r;
  EXPECT_ERRC(emit_report(r, "/proc/vota-cannot-write-here"), Errc::IoError);
}
