#pragma once

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "vota/json_io.hpp"
#include "vota/scenario.hpp"

namespace vota {

namespace detail {
inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
}  // namespace detail

/// time_s,experiment,mbps,status
inline std::string render_traces_csv(const IsolationReport& r) {
  std::ostringstream os;
  os << "time_s,experiment,mbps,status\n";
  for (const auto& row : r.traces)
    os << detail::fmt("%.3f", row.time) << ',' << row.experiment << ',' << detail::fmt("%.3f", row.mbps) << ','
       << row.status << '\n';
  return os.str();
}

inline std::string render_allocations_json(const IsolationReport& r) {
  io::ordered_json j;
  j["scenario"] = r.scenario;
  j["mode"] = to_string(r.mode);
  j["total_cores"] = r.total_cores;
  j["guard_band_hz"] = r.guard_band;
  j["allocations"] = io::ordered_json::array();
  for (const auto& a : r.allocations) {
    io::ordered_json aj = io::allocation_to_json(a);
    aj["cores_range"] = a.cores.to_string();
    aj["attachments"] = io::ordered_json::array();
    for (const auto& p : r.attachments) {
      if (p.workspace != a.request_name) continue;
      io::ordered_json pj;
      pj["device"] = p.device_id;
      pj["entries"] = io::ordered_json::array();
      for (const auto& e : p.entries)
        pj["entries"].push_back(io::ordered_json{{"endpoint", e.endpoint.name}, {"type", to_string(e.type)}});
      aj["attachments"].push_back(std::move(pj));
    }
    j["allocations"].push_back(std::move(aj));
  }
  if (r.capacity) {
    j["capacity"] = io::ordered_json{{"total_cores", r.capacity->total_cores},
                                     {"max_demand", r.capacity->max_demand},
                                     {"ratio", std::to_string(r.capacity->numerator) + "/" +
                                                   std::to_string(r.capacity->denominator)},
                                     {"value", r.capacity->render()}};
  }
  return j.dump(2) + "\n";
}

inline std::string verdict_line(const IsolationReport& r) {
  if (r.verdict == Verdict::Isolated) return "Isolated";
  std::string out = "Interfered (";
  for (std::size_t i = 0; i < r.violated.size(); ++i) out += (i ? ", " : "") + r.violated[i];
  return out + ")";
}

inline std::string render_summary(const IsolationReport& r) {
  std::ostringstream os;
  os << "scenario: " << r.scenario << '\n';
  os << "mode: " << to_string(r.mode) << '\n';
  os << "horizon_s: " << detail::fmt("%.3f", r.horizon) << "  tick_s: " << detail::fmt("%.3f", r.tick) << '\n';
  for (const auto& e : r.experiments) {
    os << "experiment " << e.name << " (" << to_string(e.workload) << (e.attacked ? ", attacked" : "") << "):";
    for (const auto& a : r.allocations) {
      if (a.request_name != e.name) continue;
      os << " cores " << a.cores.to_string() << ", " << detail::fmt("%.3f", a.spectrum.bandwidth / 1e6) << " MHz @ "
         << detail::fmt("%.3f", a.spectrum.center_freq / 1e6) << " MHz, att " << a.spectrum.att_tx << '/'
         << a.spectrum.att_rx << ',';
    }
    os << " baseline " << detail::fmt("%.3f", e.baseline) << " Mbps, mean " << detail::fmt("%.3f", e.mean) << ", min "
       << detail::fmt("%.3f", e.min) << ", max " << detail::fmt("%.3f", e.max);
    if (e.crash_time) os << ", crash at " << detail::fmt("%.3f", *e.crash_time) << " s";
    if (e.released_at) os << ", released at " << detail::fmt("%.3f", *e.released_at) << " s";
    os << '\n';
  }
  if (r.capacity)
    os << "sharing capacity: " << r.capacity->total_cores << '/' << r.capacity->max_demand << " = "
       << r.capacity->render() << '\n';
  os << "verdict: " << verdict_line(r) << '\n';
  return os.str();
}

/// Writes traces.csv, allocations.json and summary.txt into out_dir.
/// Output depends only on the report, so identical inputs give identical bytes.
inline std::vector<std::filesystem::path> emit_report(const IsolationReport& r, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());
  const std::vector<std::filesystem::path> files{out_dir / "traces.csv", out_dir / "allocations.json",
                                                 out_dir / "summary.txt"};
  io::write_file(files[0].string(), render_traces_csv(r));
  io::write_file(files[1].string(), render_allocations_json(r));
  io::write_file(files[2].string(), render_summary(r));
  return files;
}

}  // namespace vota
