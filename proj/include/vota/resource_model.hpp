#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include "vota/device.hpp"

namespace vota {

/// Frequencies and bandwidths are integral Hz so interval tests are exact.
using Hz = std::int64_t;

constexpr Hz kHz(double v) { return static_cast<Hz>(v * 1e3 + (v >= 0 ? 0.5 : -0.5)); }
constexpr Hz MHz(double v) { return static_cast<Hz>(v * 1e6 + (v >= 0 ? 0.5 : -0.5)); }
constexpr Hz GHz(double v) { return static_cast<Hz>(v * 1e9 + (v >= 0 ? 0.5 : -0.5)); }

/// Sorted, duplicate-free set of physical core indices.
class CoreSet {
 public:
  CoreSet() = default;
  CoreSet(std::initializer_list<int> indices) : indices_(indices) { normalize(); }
  explicit CoreSet(std::vector<int> indices) : indices_(std::move(indices)) { normalize(); }

  /// Cores [first, first + count).
  static CoreSet range(int first, int count) {
    std::vector<int> v(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = first + i;
    return CoreSet(std::move(v));
  }

  const std::vector<int>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(int core) const { return std::binary_search(indices_.begin(), indices_.end(), core); }
  int front() const { return indices_.front(); }
  int back() const { return indices_.back(); }

  std::size_t intersection_size(const CoreSet& other) const {
    std::size_t n = 0;
    auto a = indices_.begin();
    auto b = other.indices_.begin();
    while (a != indices_.end() && b != other.indices_.end()) {
      if (*a < *b) ++a;
      else if (*b < *a) ++b;
      else { ++n; ++a; ++b; }
    }
    return n;
  }

  CoreSet united(const CoreSet& other) const {
    std::vector<int> out;
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                   std::back_inserter(out));
    return CoreSet(std::move(out));
  }

  /// taskset-style rendering: "0-11", "0,2,4-7".
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < indices_.size();) {
      std::size_t j = i;
      while (j + 1 < indices_.size() && indices_[j + 1] == indices_[j] + 1) ++j;
      if (!out.empty()) out += ',';
      out += std::to_string(indices_[i]);
      if (j > i) out += '-' + std::to_string(indices_[j]);
      i = j + 1;
    }
    return out;
  }

  friend bool operator==(const CoreSet&, const CoreSet&) = default;

 private:
  void normalize() {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  }

  std::vector<int> indices_;
};

struct SpectrumSlice {
  Hz center_freq{0};
  Hz bandwidth{0};
  int att_tx{0};  // softmodem attenuation steps, not dB
  int att_rx{0};
  std::int64_t point_a_arfcn{0};
  std::int64_t ssb_arfcn{0};

  // Edges are center +- bandwidth/2; kept doubled to stay integral.
  Hz low_x2() const noexcept { return 2 * center_freq - bandwidth; }
  Hz high_x2() const noexcept { return 2 * center_freq + bandwidth; }
  double low() const noexcept { return static_cast<double>(low_x2()) / 2.0; }
  double high() const noexcept { return static_cast<double>(high_x2()) / 2.0; }

  friend bool operator==(const SpectrumSlice&, const SpectrumSlice&) = default;
};

struct BandCatalogEntry {
  std::string name;
  Hz low{0};
  Hz high{0};
  bool commercially_used{false};
  bool max_tx_power_ok{true};

  Hz width() const noexcept { return high - low; }
  friend bool operator==(const BandCatalogEntry&, const BandCatalogEntry&) = default;
};

struct HostInventory {
  int total_cores{0};
  CoreSet reserved_cores;
  std::vector<BandCatalogEntry> band_catalog;
  std::vector<RadioDevice> devices;
  Hz guard_band{0};
  int default_att_tx{8};
  int default_att_rx{8};

  const RadioDevice* find_device(std::string_view id) const {
    for (const auto& d : devices)
      if (d.id == id) return &d;
    return nullptr;
  }
};

enum class WorkloadKind { Dft, E2Victim, None };

constexpr std::string_view to_string(WorkloadKind w) noexcept {
  switch (w) {
    case WorkloadKind::Dft: return "dft";
    case WorkloadKind::E2Victim: return "e2-victim";
    case WorkloadKind::None: return "none";
  }
  return "?";
}

inline WorkloadKind parse_workload(std::string_view s) {
  if (s == "dft") return WorkloadKind::Dft;
  if (s == "e2-victim") return WorkloadKind::E2Victim;
  if (s == "none") return WorkloadKind::None;
  throw Error(Errc::ParseError, "unknown workload '" + std::string(s) + "'");
}

struct ExperimentRequest {
  std::string name;
  int cores_needed{1};
  Hz bandwidth_needed{0};
  std::vector<DeviceKind> device_kinds;
  WorkloadKind workload{WorkloadKind::None};
};

inline bool cores_disjoint(const CoreSet& a, const CoreSet& b) { return a.intersection_size(b) == 0; }

/// Closed-interval overlap after widening each slice by guard/2 per side, so
/// edge-touching slices conflict at zero guard.
inline bool bands_conflict(const SpectrumSlice& a, const SpectrumSlice& b, Hz guard) {
  const Hz pad = guard;  // guard/2 per side, in doubled units
  return a.low_x2() - pad <= b.high_x2() + pad && b.low_x2() - pad <= a.high_x2() + pad;
}

/// Empty result means every inventory invariant holds.
inline std::vector<std::string> validate_inventory(const HostInventory& inv) {
  std::vector<std::string> out;
  if (inv.total_cores < 1) out.push_back("total_cores: must be >= 1, got " + std::to_string(inv.total_cores));
  for (int c : inv.reserved_cores.indices()) {
    if (c < 0 || c >= inv.total_cores)
      out.push_back("reserved_cores: index " + std::to_string(c) + " outside [0, " +
                    std::to_string(inv.total_cores) + ")");
  }
  if (inv.guard_band < 0) out.push_back("guard_band: must be >= 0");
  if (inv.default_att_tx < 0 || inv.default_att_rx < 0) out.push_back("attenuation: att_tx/att_rx must be >= 0");

  const auto& cat = inv.band_catalog;
  for (const auto& b : cat) {
    if (b.low >= b.high) out.push_back("band_catalog: '" + b.name + "' requires low < high");
    else if (b.low <= 0) out.push_back("band_catalog: '" + b.name + "' requires low > 0");
  }
  for (std::size_t i = 0; i < cat.size(); ++i)
    for (std::size_t j = i + 1; j < cat.size(); ++j)
      if (cat[i].low < cat[j].high && cat[j].low < cat[i].high)
        out.push_back("band_catalog: '" + cat[i].name + "' overlaps '" + cat[j].name + "'");

  std::set<std::string> ids;
  for (const auto& d : inv.devices) {
    if (!ids.insert(d.id).second) out.push_back("devices: duplicate id '" + d.id + "'");
    for (const auto& ep : d.endpoints)
      if (!endpoint_name_consistent(ep))
        out.push_back("devices: '" + d.id + "' endpoint '" + ep.name + "' does not encode index " +
                      std::to_string(ep.index));
  }
  return out;
}

inline bool slice_valid(const SpectrumSlice& s) {
  return s.bandwidth > 0 && s.low_x2() > 0 && s.att_tx >= 0 && s.att_rx >= 0;
}

/// Catalog entry fully containing the slice, if any.
inline const BandCatalogEntry* containing_band(const HostInventory& inv, const SpectrumSlice& s) {
  for (const auto& b : inv.band_catalog)
    if (2 * b.low <= s.low_x2() && s.high_x2() <= 2 * b.high) return &b;
  return nullptr;
}

/// The shared host the allocator examples and reference scenario assume:
/// 32 cores, vacant 40 MHz at the left edge of n78 and around 2.59 GHz in
/// band 41, attenuation 8/8, and two X310s, a B210 and two Quectel modems.
inline HostInventory reference_inventory() {
  HostInventory inv;
  inv.total_cores = 32;
  inv.band_catalog = {
      {"n78-left-edge", MHz(3300), MHz(3340), false, true},
      {"b41-right-edge", MHz(2570), MHz(2610), false, true},
  };
  inv.guard_band = MHz(10);
  inv.devices = {
      {"usrp-x310-0", DeviceKind::SdrNic, {{"sfp0", EndpointKind::NetInterface, 0}}, std::nullopt},
      {"usrp-x310-1", DeviceKind::SdrNic, {{"sfp1", EndpointKind::NetInterface, 1}}, std::nullopt},
      {"usrp-b210-0", DeviceKind::SdrUsb, {{"/dev/bus/usb/001/4", EndpointKind::Usb, 4}}, std::nullopt},
      make_modem("quectel-rm530n-0", 0),
      make_modem("quectel-rm520n-1", 1),
  };
  return inv;
}

}  // namespace vota
