#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vota/device.hpp"
#include "vota/error.hpp"

namespace vota {

/// Container-manager device entry type an endpoint is passed through as.
enum class EntryType { Usb, Nic, UnixChar };

constexpr std::string_view to_string(EntryType t) noexcept {
  switch (t) {
    case EntryType::Usb: return "usb";
    case EntryType::Nic: return "nic";
    case EntryType::UnixChar: return "unix-char";
  }
  return "?";
}

inline EntryType parse_entry_type(std::string_view s) {
  if (s == "usb") return EntryType::Usb;
  if (s == "nic") return EntryType::Nic;
  if (s == "unix-char") return EntryType::UnixChar;
  throw Error(Errc::ParseError, "unknown entry type '" + std::string(s) + "'");
}

constexpr EntryType entry_type_for(EndpointKind k) noexcept {
  switch (k) {
    case EndpointKind::Usb: return EntryType::Usb;
    case EndpointKind::NetInterface: return EntryType::Nic;
    case EndpointKind::Serial:
    case EndpointKind::Control: return EntryType::UnixChar;
  }
  return EntryType::UnixChar;
}

struct PlanEntry {
  DeviceEndpoint endpoint;
  EntryType type{EntryType::UnixChar};

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

struct AttachmentPlan {
  std::string device_id;
  std::string workspace;
  std::vector<PlanEntry> entries;

  friend bool operator==(const AttachmentPlan&, const AttachmentPlan&) = default;
};

enum class BackendVerb { Attach, Detach };

constexpr std::string_view to_string(BackendVerb v) noexcept { return v == BackendVerb::Attach ? "attach" : "detach"; }

struct BackendCommand {
  BackendVerb verb{BackendVerb::Attach};
  std::string workspace;
  std::string endpoint;
  EntryType type{EntryType::UnixChar};
  std::string idempotency_key;
  std::string device_id;  // in-memory only; not part of the log schema

  friend bool operator==(const BackendCommand&, const BackendCommand&) = default;
};

/// 64-bit FNV-1a over (device, workspace, endpoint), hex encoded. Attach and
/// detach of the same entry share a key.
inline std::string idempotency_key(std::string_view device_id, std::string_view workspace, std::string_view endpoint) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // field separator
    h *= 0x100000001b3ULL;
  };
  feed(device_id);
  feed(workspace);
  feed(endpoint);
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

inline BackendCommand make_command(BackendVerb verb, const AttachmentPlan& plan, const PlanEntry& e) {
  return {verb, plan.workspace, e.endpoint.name, e.type,
          idempotency_key(plan.device_id, plan.workspace, e.endpoint.name), plan.device_id};
}

class BackendRejected : public Error {
 public:
  BackendRejected(PlanEntry entry, std::size_t index, const std::string& why)
      : Error(Errc::BackendRejected, "entry " + std::to_string(index) + " (" + entry.endpoint.name + "): " + why),
        entry_(std::move(entry)),
        index_(index) {}

  const PlanEntry& entry() const noexcept { return entry_; }
  std::size_t index() const noexcept { return index_; }

 private:
  PlanEntry entry_;
  std::size_t index_;
};

/// Command sink for a container manager. execute() must treat a repeated
/// idempotency key as a no-op, and throws Error(BackendUnavailable) or
/// Error(BackendRejected) on failure.
class ContainerBackend {
 public:
  virtual ~ContainerBackend() = default;
  virtual void execute(const BackendCommand& cmd) = 0;
};

/// In-memory backend: records every accepted command and the net effect.
class MockBackend : public ContainerBackend {
 public:
  using RejectRule = std::function<bool(const BackendCommand&)>;

  void execute(const BackendCommand& cmd) override {
    if (offline_) throw Error(Errc::BackendUnavailable, "mock backend offline");
    if (reject_ && reject_(cmd)) {
      rejected_.push_back(cmd);
      throw Error(Errc::BackendRejected, "mock backend rejected " + cmd.endpoint);
    }
    log_.push_back(cmd);
    if (cmd.verb == BackendVerb::Attach) {
      if (effective_.emplace(cmd.idempotency_key, cmd).second) ++effective_changes_;
    } else if (effective_.erase(cmd.idempotency_key) > 0) {
      ++effective_changes_;
    }
  }

  void set_offline(bool offline) noexcept { offline_ = offline; }
  bool offline() const noexcept { return offline_; }

  void set_reject_rule(RejectRule rule) { reject_ = std::move(rule); }
  void clear_reject_rule() { reject_ = nullptr; }

  /// Reject the n-th attach command (1-based) received from now on.
  void reject_nth_attach(int n) {
    auto count = std::make_shared<int>(0);
    reject_ = [count, n](const BackendCommand& c) { return c.verb == BackendVerb::Attach && ++*count == n; };
  }

  const std::vector<BackendCommand>& log() const noexcept { return log_; }
  const std::vector<BackendCommand>& rejected() const noexcept { return rejected_; }
  const std::map<std::string, BackendCommand>& effective() const noexcept { return effective_; }
  std::size_t effective_changes() const noexcept { return effective_changes_; }

  /// Seed state from a previously written log (commands re-applied in order).
  void restore(const std::vector<BackendCommand>& commands) {
    for (const auto& c : commands) execute(c);
  }

 private:
  bool offline_{false};
  RejectRule reject_;
  std::vector<BackendCommand> log_;
  std::vector<BackendCommand> rejected_;
  std::map<std::string, BackendCommand> effective_;
  std::size_t effective_changes_{0};
};

inline nlohmann::ordered_json command_to_json(const BackendCommand& c) {
  nlohmann::ordered_json j;
  j["verb"] = to_string(c.verb);
  j["workspace"] = c.workspace;
  j["endpoint"] = c.endpoint;
  j["type"] = to_string(c.type);
  j["idempotency_key"] = c.idempotency_key;
  return j;
}

inline BackendCommand command_from_json(const nlohmann::json& j) {
  BackendCommand c;
  const std::string verb = j.at("verb").get<std::string>();
  if (verb != "attach" && verb != "detach") throw Error(Errc::ParseError, "unknown verb '" + verb + "'");
  c.verb = verb == "attach" ? BackendVerb::Attach : BackendVerb::Detach;
  c.workspace = j.at("workspace").get<std::string>();
  c.endpoint = j.at("endpoint").get<std::string>();
  c.type = parse_entry_type(j.at("type").get<std::string>());
  c.idempotency_key = j.at("idempotency_key").get<std::string>();
  return c;
}

/// One JSON object per line: verb, workspace, endpoint, type, idempotency_key.
inline void write_command_log(std::ostream& os, const std::vector<BackendCommand>& log) {
  for (const auto& c : log) os << command_to_json(c).dump() << '\n';
}

inline std::vector<BackendCommand> read_command_log(std::istream& is) {
  std::vector<BackendCommand> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(command_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, "command log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

namespace detail {
inline void require_complete(const RadioDevice& d) {
  switch (d.kind) {
    case DeviceKind::SdrUsb:
      if (!d.has_endpoint(EndpointKind::Usb))
        throw Error(Errc::IncompleteEndpoints, "'" + d.id + "' (sdr-usb) has no usb endpoint");
      break;
    case DeviceKind::SdrNic:
      if (!d.has_endpoint(EndpointKind::NetInterface))
        throw Error(Errc::IncompleteEndpoints, "'" + d.id + "' (sdr-nic) has no net-interface endpoint");
      break;
    case DeviceKind::Modem:
      // A modem is only usable with both its serial port and its wwan interface.
      if (!d.has_endpoint(EndpointKind::Serial) || !d.has_endpoint(EndpointKind::NetInterface))
        throw Error(Errc::IncompleteEndpoints, "'" + d.id + "' (modem) needs both a serial and a net endpoint");
      break;
  }
}
}  // namespace detail

/// Maps every endpoint of the device onto its container entry type.
inline AttachmentPlan plan_attach(const RadioDevice& device, const std::string& workspace) {
  if (device.attached_to)
    throw Error(Errc::AlreadyAttached, "'" + device.id + "' is attached to '" + *device.attached_to + "'");
  detail::require_complete(device);
  AttachmentPlan plan{device.id, workspace, {}};
  for (const auto& ep : device.endpoints) plan.entries.push_back({ep, entry_type_for(ep.kind)});
  return plan;
}

struct AppliedAttachment {
  AttachmentPlan plan;
  std::vector<BackendCommand> commands;
};

/// Device table plus the plan each attached device was applied with.
/// Single writer; detach replays the recorded plan, so a replug between
/// attach and detach still removes the originally passed-through entries.
class DeviceRegistry {
 public:
  DeviceRegistry() = default;
  explicit DeviceRegistry(std::vector<RadioDevice> devices) {
    for (auto& d : devices) add(std::move(d));
  }

  void add(RadioDevice d) {
    const std::string id = d.id;
    devices_.insert_or_assign(id, std::move(d));
  }

  const RadioDevice& device(const std::string& id) const {
    auto it = devices_.find(id);
    if (it == devices_.end()) throw Error(Errc::UnknownDevice, "no device '" + id + "'");
    return it->second;
  }

  const std::map<std::string, RadioDevice>& devices() const noexcept { return devices_; }

  const AttachmentPlan* applied_plan(const std::string& id) const {
    auto it = applied_.find(id);
    return it == applied_.end() ? nullptr : &it->second;
  }

  AttachmentPlan plan_attach(const std::string& id, const std::string& workspace) const {
    return vota::plan_attach(device(id), workspace);
  }

  AppliedAttachment apply_plan(const AttachmentPlan& plan, ContainerBackend& backend) {
    RadioDevice& dev = mutable_device(plan.device_id);
    if (dev.attached_to && *dev.attached_to != plan.workspace)
      throw Error(Errc::AlreadyAttached, "'" + dev.id + "' is attached to '" + *dev.attached_to + "'");

    AppliedAttachment applied{plan, {}};
    if (plan.entries.empty()) return applied;

    for (const auto& e : plan.entries) {
      const bool known = std::find(dev.endpoints.begin(), dev.endpoints.end(), e.endpoint) != dev.endpoints.end();
      if (!known)
        throw Error(Errc::StalePlan, "plan entry '" + e.endpoint.name + "' is not a current endpoint of '" + dev.id + "'");
    }
    if (dev.kind == DeviceKind::Modem) {
      auto has = [&](EndpointKind k) {
        return std::any_of(plan.entries.begin(), plan.entries.end(), [k](const PlanEntry& e) { return e.endpoint.kind == k; });
      };
      if (!has(EndpointKind::Serial) || !has(EndpointKind::NetInterface))
        throw Error(Errc::IncompleteEndpoints, "modem plan for '" + dev.id + "' lacks serial or net entry");
    }

    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
      BackendCommand cmd = make_command(BackendVerb::Attach, plan, plan.entries[i]);
      try {
        backend.execute(cmd);
      } catch (const Error& err) {
        // Roll back in reverse order; keep going if a compensating detach fails.
        for (std::size_t j = i; j-- > 0;) {
          try {
            backend.execute(make_command(BackendVerb::Detach, plan, plan.entries[j]));
          } catch (const Error&) {
          }
        }
        if (err.code() == Errc::BackendRejected) throw BackendRejected(plan.entries[i], i, err.what());
        throw;
      }
      applied.commands.push_back(std::move(cmd));
    }
    dev.attached_to = plan.workspace;
    applied_.insert_or_assign(dev.id, plan);
    return applied;
  }

  /// Detaches every applied entry in reverse order. attached_to only clears
  /// once all detaches succeed.
  RadioDevice detach_device(const std::string& id, ContainerBackend& backend) {
    RadioDevice& dev = mutable_device(id);
    if (!dev.attached_to) throw Error(Errc::NotAttached, "'" + id + "' is not attached");
    const AttachmentPlan& plan = applied_.at(id);
    for (std::size_t j = plan.entries.size(); j-- > 0;)
      backend.execute(make_command(BackendVerb::Detach, plan, plan.entries[j]));
    dev.attached_to.reset();
    applied_.erase(id);
    return dev;
  }

  /// Physical unplug/replug: the OS hands out a new index X, so every
  /// endpoint is renamed and plans built before the replug become stale.
  const RadioDevice& replug(const std::string& id, int new_index) {
    RadioDevice& dev = mutable_device(id);
    for (auto& ep : dev.endpoints) {
      ep.name = reindexed_name(ep.name, new_index);
      ep.index = new_index;
    }
    return dev;
  }

  /// Mark a device attached without emitting commands (state restored from a
  /// backend log).
  void adopt(const AttachmentPlan& plan) {
    RadioDevice& dev = mutable_device(plan.device_id);
    dev.attached_to = plan.workspace;
    applied_.insert_or_assign(dev.id, plan);
  }

 private:
  RadioDevice& mutable_device(const std::string& id) {
    auto it = devices_.find(id);
    if (it == devices_.end()) throw Error(Errc::UnknownDevice, "no device '" + id + "'");
    return it->second;
  }

  std::map<std::string, RadioDevice> devices_;
  std::map<std::string, AttachmentPlan> applied_;
};

}  // namespace vota
