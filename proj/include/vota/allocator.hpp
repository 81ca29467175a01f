#pragma once

#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "vota/arfcn.hpp"
#include "vota/error.hpp"
#include "vota/resource_model.hpp"

namespace vota {

struct Allocation {
  std::string request_name;
  CoreSet cores;
  SpectrumSlice spectrum;
  std::vector<std::string> devices;
  std::uint64_t created_at{0};  // logical timestamp (ledger sequence number)

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// total_cores / max_demand kept as a reduced fraction.
struct CapacityEstimate {
  int total_cores{0};
  int max_demand{1};
  int numerator{0};
  int denominator{1};

  double value() const noexcept { return static_cast<double>(numerator) / denominator; }

  std::string render() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value());
    return buf;
  }
};

inline CapacityEstimate sharing_capacity(int total_cores, int max_demand) {
  if (max_demand < 1 || max_demand > total_cores)
    throw Error(Errc::InvalidDemand, "max_demand " + std::to_string(max_demand) + " not in [1, " +
                                         std::to_string(total_cores) + "]");
  const int g = std::gcd(total_cores, max_demand);
  return {total_cores, max_demand, total_cores / g, max_demand / g};
}

/// Lowest-indexed contiguous run of exactly cores_needed cores that are
/// neither reserved nor held by a live allocation.
inline CoreSet allocate_compute(const ExperimentRequest& req, const HostInventory& inv,
                                const std::vector<Allocation>& live) {
  if (req.cores_needed < 1) throw Error(Errc::InvalidDemand, "cores_needed must be >= 1");
  std::vector<bool> busy(static_cast<std::size_t>(std::max(inv.total_cores, 0)), false);
  auto mark = [&](const CoreSet& s) {
    for (int c : s.indices())
      if (c >= 0 && c < inv.total_cores) busy[static_cast<std::size_t>(c)] = true;
  };
  mark(inv.reserved_cores);
  for (const auto& a : live) mark(a.cores);

  int run = 0;
  for (int c = 0; c < inv.total_cores; ++c) {
    run = busy[static_cast<std::size_t>(c)] ? 0 : run + 1;
    if (run == req.cores_needed) return CoreSet::range(c - run + 1, run);
  }
  throw Error(Errc::InsufficientCores, "no contiguous run of " + std::to_string(req.cores_needed) +
                                           " free cores for '" + req.name + "'");
}

/// Slice of the given bandwidth centered in `band`, with raster anchors set.
inline SpectrumSlice centered_slice(const BandCatalogEntry& band, Hz bandwidth, int att_tx, int att_rx) {
  SpectrumSlice s;
  s.center_freq = band.low + (band.high - band.low) / 2;
  s.bandwidth = bandwidth;
  s.att_tx = att_tx;
  s.att_rx = att_rx;
  s.point_a_arfcn = nr_arfcn_from_freq(s.low_x2() / 2).arfcn;
  s.ssb_arfcn = nr_arfcn_from_freq(s.center_freq).arfcn;
  return s;
}

/// First vacant catalog band (catalog order) whose centered slice fits and
/// clears every live slice by the inventory guard band.
inline SpectrumSlice allocate_spectrum(const ExperimentRequest& req, const HostInventory& inv,
                                       const std::vector<Allocation>& live) {
  if (req.bandwidth_needed <= 0) throw Error(Errc::InvalidDemand, "bandwidth_needed must be > 0");
  for (const auto& band : inv.band_catalog) {
    if (band.commercially_used || !band.max_tx_power_ok) continue;
    if (req.bandwidth_needed > band.width()) continue;
    SpectrumSlice s = centered_slice(band, req.bandwidth_needed, inv.default_att_tx, inv.default_att_rx);
    if (2 * band.low > s.low_x2() || s.high_x2() > 2 * band.high) continue;
    bool clear = true;
    for (const auto& a : live) {
      if (bands_conflict(s, a.spectrum, inv.guard_band)) {
        clear = false;
        break;
      }
    }
    if (clear) return s;
  }
  throw Error(Errc::NoVacantBand, "no vacant band fits " + std::to_string(req.bandwidth_needed) + " Hz for '" +
                                      req.name + "'");
}

/// One free device per requested kind, lowest inventory position first.
inline std::vector<std::string> allocate_devices(const ExperimentRequest& req, const HostInventory& inv,
                                                 const std::vector<Allocation>& live) {
  std::vector<std::string> taken;
  for (const auto& a : live) taken.insert(taken.end(), a.devices.begin(), a.devices.end());
  auto is_taken = [&](const std::string& id) { return std::find(taken.begin(), taken.end(), id) != taken.end(); };

  std::vector<std::string> out;
  for (DeviceKind kind : req.device_kinds) {
    const RadioDevice* pick = nullptr;
    for (const auto& d : inv.devices) {
      if (d.kind == kind && !is_taken(d.id)) {
        pick = &d;
        break;
      }
    }
    if (!pick)
      throw Error(Errc::InsufficientDevices,
                  "no free " + std::string(to_string(kind)) + " device for '" + req.name + "'");
    out.push_back(pick->id);
    taken.push_back(pick->id);
  }
  return out;
}

/// Per-slot processing time (seconds) as a function of core count.
using SlotTimeModel = std::function<double(int cores)>;

/// Smallest core count meeting the per-slot deadline, by linear scan from 1.
inline int min_cores_search(const SlotTimeModel& t, double deadline, const HostInventory& inv) {
  for (int c = 1; c <= inv.total_cores; ++c)
    if (t(c) <= deadline) return c;
  throw Error(Errc::Infeasible, "workload misses the " + std::to_string(deadline) + " s deadline even on " +
                                    std::to_string(inv.total_cores) + " cores");
}

/// NR slot length at 30 kHz subcarrier spacing.
inline constexpr double kSlotDeadline30kHz = 0.5e-3;

// Per-slot work (single-core seconds) of the reference workloads. The DFT gNB
// needs 12 cores and the E2 victim 8 at the 30 kHz slot deadline.
inline SlotTimeModel workload_model(WorkloadKind w) {
  double work = 0.0;
  switch (w) {
    case WorkloadKind::Dft: work = 6.0e-3; break;
    case WorkloadKind::E2Victim: work = 4.0e-3; break;
    case WorkloadKind::None: work = 0.1e-3; break;
  }
  return [work](int c) { return work / c; };
}

enum class LedgerVerb { Allocate, Release };

struct LedgerEvent {
  LedgerVerb verb{LedgerVerb::Allocate};
  std::uint64_t seq{0};
  Allocation allocation;  // for Release only request_name is meaningful
};

/// Owns the live allocation table. Mutations are single-writer; readers work
/// on the copy returned by live().
class Allocator {
 public:
  explicit Allocator(HostInventory inv) : inv_(std::move(inv)) {}

  const HostInventory& inventory() const noexcept { return inv_; }
  const std::vector<Allocation>& live() const noexcept { return live_; }
  const std::vector<LedgerEvent>& ledger() const noexcept { return ledger_; }

  const Allocation* find(std::string_view name) const {
    for (const auto& a : live_)
      if (a.request_name == name) return &a;
    return nullptr;
  }

  /// Cores, spectrum and devices are granted together or not at all.
  const Allocation& allocate(const ExperimentRequest& req) {
    if (find(req.name)) throw Error(Errc::DuplicateAllocation, "'" + req.name + "' already allocated");
    Allocation a;
    a.request_name = req.name;
    a.cores = allocate_compute(req, inv_, live_);
    a.spectrum = allocate_spectrum(req, inv_, live_);
    a.devices = allocate_devices(req, inv_, live_);
    a.created_at = next_seq_++;
    live_.push_back(a);
    ledger_.push_back({LedgerVerb::Allocate, a.created_at, a});
    return live_.back();
  }

  Allocation release(std::string_view name) {
    auto it = std::find_if(live_.begin(), live_.end(), [&](const Allocation& a) { return a.request_name == name; });
    if (it == live_.end()) throw Error(Errc::UnknownAllocation, "no live allocation '" + std::string(name) + "'");
    Allocation gone = *it;
    live_.erase(it);
    Allocation marker;
    marker.request_name = gone.request_name;
    ledger_.push_back({LedgerVerb::Release, next_seq_++, std::move(marker)});
    return gone;
  }

  /// Rebuild state from a recorded ledger without re-running placement.
  void replay(const std::vector<LedgerEvent>& events) {
    for (const auto& e : events) {
      if (e.verb == LedgerVerb::Allocate) {
        if (find(e.allocation.request_name))
          throw Error(Errc::DuplicateAllocation, "ledger allocates '" + e.allocation.request_name + "' twice");
        live_.push_back(e.allocation);
      } else {
        auto it = std::find_if(live_.begin(), live_.end(),
                               [&](const Allocation& a) { return a.request_name == e.allocation.request_name; });
        if (it == live_.end())
          throw Error(Errc::UnknownAllocation, "ledger releases unknown '" + e.allocation.request_name + "'");
        live_.erase(it);
      }
      ledger_.push_back(e);
      next_seq_ = std::max(next_seq_, e.seq + 1);
    }
  }

 private:
  HostInventory inv_;
  std::vector<Allocation> live_;
  std::vector<LedgerEvent> ledger_;
  std::uint64_t next_seq_{0};
};

}  // namespace vota
