#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vota/error.hpp"

namespace vota {

enum class DeviceKind { SdrUsb, SdrNic, Modem };
enum class EndpointKind { Usb, Serial, Control, NetInterface };

constexpr std::string_view to_string(DeviceKind k) noexcept {
  switch (k) {
    case DeviceKind::SdrUsb: return "sdr-usb";
    case DeviceKind::SdrNic: return "sdr-nic";
    case DeviceKind::Modem: return "modem";
  }
  return "?";
}

constexpr std::string_view to_string(EndpointKind k) noexcept {
  switch (k) {
    case EndpointKind::Usb: return "usb";
    case EndpointKind::Serial: return "serial";
    case EndpointKind::Control: return "control";
    case EndpointKind::NetInterface: return "net-interface";
  }
  return "?";
}

inline DeviceKind parse_device_kind(std::string_view s) {
  if (s == "sdr-usb") return DeviceKind::SdrUsb;
  if (s == "sdr-nic") return DeviceKind::SdrNic;
  if (s == "modem") return DeviceKind::Modem;
  throw Error(Errc::ParseError, "unknown device kind '" + std::string(s) + "'");
}

inline EndpointKind parse_endpoint_kind(std::string_view s) {
  if (s == "usb") return EndpointKind::Usb;
  if (s == "serial") return EndpointKind::Serial;
  if (s == "control") return EndpointKind::Control;
  if (s == "net-interface") return EndpointKind::NetInterface;
  throw Error(Errc::ParseError, "unknown endpoint kind '" + std::string(s) + "'");
}

struct DeviceEndpoint {
  std::string name;
  EndpointKind kind{EndpointKind::Usb};
  int index{0};

  friend bool operator==(const DeviceEndpoint&, const DeviceEndpoint&) = default;
};

// Trailing decimal digits of an endpoint name, e.g. "/dev/ttyUSB2" -> 2.
inline std::optional<int> trailing_index(std::string_view name) {
  std::size_t pos = name.size();
  while (pos > 0 && std::isdigit(static_cast<unsigned char>(name[pos - 1]))) --pos;
  if (pos == name.size()) return std::nullopt;
  int value = 0;
  for (std::size_t i = pos; i < name.size(); ++i) value = value * 10 + (name[i] - '0');
  return value;
}

// The endpoint name must encode its device index X as its numeric suffix.
inline bool endpoint_name_consistent(const DeviceEndpoint& ep) {
  const auto idx = trailing_index(ep.name);
  return idx && *idx == ep.index;
}

// Re-render a name for a new index, keeping its non-numeric prefix.
inline std::string reindexed_name(std::string_view name, int index) {
  std::size_t pos = name.size();
  while (pos > 0 && std::isdigit(static_cast<unsigned char>(name[pos - 1]))) --pos;
  return std::string(name.substr(0, pos)) + std::to_string(index);
}

inline DeviceEndpoint serial_endpoint(int x) { return {"/dev/ttyUSB" + std::to_string(x), EndpointKind::Serial, x}; }
inline DeviceEndpoint control_endpoint(int x) { return {"/dev/cdc-wdm" + std::to_string(x), EndpointKind::Control, x}; }
inline DeviceEndpoint wwan_endpoint(int x) { return {"wwan" + std::to_string(x), EndpointKind::NetInterface, x}; }

struct RadioDevice {
  std::string id;
  DeviceKind kind{DeviceKind::SdrUsb};
  std::vector<DeviceEndpoint> endpoints;
  std::optional<std::string> attached_to;

  bool has_endpoint(EndpointKind k) const {
    for (const auto& ep : endpoints)
      if (ep.kind == k) return true;
    return false;
  }
};

// Quectel-style modem exposing /dev/ttyUSBX, /dev/cdc-wdmX and wwanX.
inline RadioDevice make_modem(std::string id, int x) {
  return {std::move(id), DeviceKind::Modem, {serial_endpoint(x), control_endpoint(x), wwan_endpoint(x)}, std::nullopt};
}

}  // namespace vota
