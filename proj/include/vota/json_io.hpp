#pragma once

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vota/allocator.hpp"
#include "vota/error.hpp"
#include "vota/resource_model.hpp"

namespace vota::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline void check_fields(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(Errc::ParseError, where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw Error(Errc::ParseError, where + ": unknown field '" + key + "'");
  }
}

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw Error(Errc::ParseError, where + ": missing field '" + key + "'");
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, where + ": " + e.what());
  }
}

inline Hz get_hz(const json& j, const std::string& where) {
  if (!j.is_number()) throw Error(Errc::ParseError, where + ": expected a frequency in Hz");
  if (j.is_number_integer()) return j.get<Hz>();
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(Errc::ParseError, where + ": non-finite frequency");
  return static_cast<Hz>(std::llround(v));
}

/// Parse JSON text; syntax errors report the 1-based line.
inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw Error(Errc::ParseError, source + " line " + std::to_string(line) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(Errc::IoError, "write failed for '" + path + "'");
}

inline RadioDevice device_from_json(const json& j, const std::string& where) {
  check_fields(j, {"id", "kind", "endpoints"}, where);
  RadioDevice d;
  d.id = get_as<std::string>(require(j, "id", where), where + ".id");
  d.kind = parse_device_kind(get_as<std::string>(require(j, "kind", where), where + ".kind"));
  const json& eps = require(j, "endpoints", where);
  if (!eps.is_array()) throw Error(Errc::ParseError, where + ".endpoints: expected an array");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const std::string w = where + ".endpoints[" + std::to_string(i) + "]";
    check_fields(eps[i], {"name", "kind", "index"}, w);
    DeviceEndpoint ep;
    ep.name = get_as<std::string>(require(eps[i], "name", w), w + ".name");
    ep.kind = parse_endpoint_kind(get_as<std::string>(require(eps[i], "kind", w), w + ".kind"));
    ep.index = get_as<int>(require(eps[i], "index", w), w + ".index");
    d.endpoints.push_back(std::move(ep));
  }
  return d;
}

inline ordered_json device_to_json(const RadioDevice& d) {
  ordered_json j;
  j["id"] = d.id;
  j["kind"] = to_string(d.kind);
  j["endpoints"] = ordered_json::array();
  for (const auto& ep : d.endpoints)
    j["endpoints"].push_back(ordered_json{{"name", ep.name}, {"kind", to_string(ep.kind)}, {"index", ep.index}});
  return j;
}

/// Inventory file schema: docs/schema.md.
inline HostInventory inventory_from_json(const json& j, const std::string& where = "inventory") {
  check_fields(j, {"total_cores", "reserved_cores", "guard_band_hz", "att_tx", "att_rx", "band_catalog", "devices"},
               where);
  HostInventory inv;
  inv.total_cores = get_as<int>(require(j, "total_cores", where), where + ".total_cores");
  if (j.contains("reserved_cores"))
    inv.reserved_cores = CoreSet(get_as<std::vector<int>>(j["reserved_cores"], where + ".reserved_cores"));
  inv.guard_band = j.contains("guard_band_hz") ? get_hz(j["guard_band_hz"], where + ".guard_band_hz") : 0;
  if (j.contains("att_tx")) inv.default_att_tx = get_as<int>(j["att_tx"], where + ".att_tx");
  if (j.contains("att_rx")) inv.default_att_rx = get_as<int>(j["att_rx"], where + ".att_rx");
  if (j.contains("band_catalog")) {
    const json& cat = j["band_catalog"];
    if (!cat.is_array()) throw Error(Errc::ParseError, where + ".band_catalog: expected an array");
    for (std::size_t i = 0; i < cat.size(); ++i) {
      const std::string w = where + ".band_catalog[" + std::to_string(i) + "]";
      check_fields(cat[i], {"name", "low_hz", "high_hz", "commercially_used", "max_tx_power_ok"}, w);
      BandCatalogEntry b;
      b.name = get_as<std::string>(require(cat[i], "name", w), w + ".name");
      b.low = get_hz(require(cat[i], "low_hz", w), w + ".low_hz");
      b.high = get_hz(require(cat[i], "high_hz", w), w + ".high_hz");
      b.commercially_used = cat[i].value("commercially_used", false);
      b.max_tx_power_ok = cat[i].value("max_tx_power_ok", true);
      inv.band_catalog.push_back(std::move(b));
    }
  }
  if (j.contains("devices")) {
    const json& devs = j["devices"];
    if (!devs.is_array()) throw Error(Errc::ParseError, where + ".devices: expected an array");
    for (std::size_t i = 0; i < devs.size(); ++i)
      inv.devices.push_back(device_from_json(devs[i], where + ".devices[" + std::to_string(i) + "]"));
  }
  return inv;
}

inline ordered_json inventory_to_json(const HostInventory& inv) {
  ordered_json j;
  j["total_cores"] = inv.total_cores;
  j["reserved_cores"] = inv.reserved_cores.indices();
  j["guard_band_hz"] = inv.guard_band;
  j["att_tx"] = inv.default_att_tx;
  j["att_rx"] = inv.default_att_rx;
  j["band_catalog"] = ordered_json::array();
  for (const auto& b : inv.band_catalog)
    j["band_catalog"].push_back(ordered_json{{"name", b.name},
                                             {"low_hz", b.low},
                                             {"high_hz", b.high},
                                             {"commercially_used", b.commercially_used},
                                             {"max_tx_power_ok", b.max_tx_power_ok}});
  j["devices"] = ordered_json::array();
  for (const auto& d : inv.devices) j["devices"].push_back(device_to_json(d));
  return j;
}

/// Loads and validates an inventory file.
inline HostInventory load_inventory(const std::string& path) {
  HostInventory inv = inventory_from_json(parse_text(read_file(path), path));
  if (auto v = validate_inventory(inv); !v.empty()) throw ValidationError(std::move(v));
  return inv;
}

inline ordered_json slice_to_json(const SpectrumSlice& s) {
  return ordered_json{{"center_hz", s.center_freq},   {"bandwidth_hz", s.bandwidth},
                      {"att_tx", s.att_tx},           {"att_rx", s.att_rx},
                      {"point_a_arfcn", s.point_a_arfcn}, {"ssb_arfcn", s.ssb_arfcn}};
}

inline SpectrumSlice slice_from_json(const json& j) {
  SpectrumSlice s;
  s.center_freq = j.at("center_hz").get<Hz>();
  s.bandwidth = j.at("bandwidth_hz").get<Hz>();
  s.att_tx = j.at("att_tx").get<int>();
  s.att_rx = j.at("att_rx").get<int>();
  s.point_a_arfcn = j.at("point_a_arfcn").get<std::int64_t>();
  s.ssb_arfcn = j.at("ssb_arfcn").get<std::int64_t>();
  return s;
}

inline ordered_json allocation_to_json(const Allocation& a) {
  ordered_json j;
  j["name"] = a.request_name;
  j["cores"] = a.cores.indices();
  j["spectrum"] = slice_to_json(a.spectrum);
  j["devices"] = a.devices;
  j["created_at"] = a.created_at;
  return j;
}

inline Allocation allocation_from_json(const json& j) {
  Allocation a;
  a.request_name = j.at("name").get<std::string>();
  a.cores = CoreSet(j.at("cores").get<std::vector<int>>());
  a.spectrum = slice_from_json(j.at("spectrum"));
  a.devices = j.at("devices").get<std::vector<std::string>>();
  a.created_at = j.at("created_at").get<std::uint64_t>();
  return a;
}

/// Allocation ledger: one JSON object per line,
///   {"event":"allocate","seq":N,"allocation":{...}}
///   {"event":"release","seq":N,"name":"..."}
inline std::string ledger_line(const LedgerEvent& e) {
  ordered_json j;
  if (e.verb == LedgerVerb::Allocate) {
    j["event"] = "allocate";
    j["seq"] = e.seq;
    j["allocation"] = allocation_to_json(e.allocation);
  } else {
    j["event"] = "release";
    j["seq"] = e.seq;
    j["name"] = e.allocation.request_name;
  }
  return j.dump();
}

inline std::vector<LedgerEvent> read_ledger(std::istream& is) {
  std::vector<LedgerEvent> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      LedgerEvent e;
      const std::string ev = j.at("event").get<std::string>();
      e.seq = j.at("seq").get<std::uint64_t>();
      if (ev == "allocate") {
        e.verb = LedgerVerb::Allocate;
        e.allocation = allocation_from_json(j.at("allocation"));
      } else if (ev == "release") {
        e.verb = LedgerVerb::Release;
        e.allocation.request_name = j.at("name").get<std::string>();
      } else {
        throw Error(Errc::ParseError, "ledger line " + std::to_string(lineno) + ": unknown event '" + ev + "'");
      }
      out.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw Error(Errc::ParseError, "ledger line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace vota::io
