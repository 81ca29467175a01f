#pragma once

#include <sys/socket.h>

#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "vota/passthrough.hpp"

namespace vota {

/// LXD-compatible REST client.
///
/// attach: PATCH /1.0/instances/<workspace> {"devices": {<name>: <config>}}
/// detach: GET /1.0/instances/<workspace>, drop <name> from "devices", PUT the
///         result back. Detaching an absent entry sends nothing.
///
/// Async responses ({"type": "async", "operation": ...}) are awaited through
/// GET <operation>/wait. Transport errors map to BackendUnavailable, error
/// responses to BackendRejected.
///
/// `endpoint` is either "http://host:port" or "unix:<socket path>".
class LxdRestBackend : public ContainerBackend {
 public:
  explicit LxdRestBackend(const std::string& endpoint) {
    if (endpoint.rfind("unix:", 0) == 0) {
      client_ = std::make_unique<httplib::Client>(endpoint.substr(5));
      client_->set_address_family(AF_UNIX);
    } else {
      client_ = std::make_unique<httplib::Client>(endpoint);
    }
    client_->set_connection_timeout(2, 0);
    client_->set_read_timeout(10, 0);
  }

  /// Instance device name for an endpoint: "/dev/ttyUSB2" -> "vota-ttyUSB2".
  static std::string device_name(const std::string& endpoint) {
    std::string s = endpoint.rfind("/dev/", 0) == 0 ? endpoint.substr(5) : endpoint;
    for (char& c : s)
      if (c == '/') c = '-';
    return "vota-" + s;
  }

  static nlohmann::json device_config(const BackendCommand& cmd) {
    nlohmann::json d;
    switch (cmd.type) {
      case EntryType::UnixChar:
        d = {{"type", "unix-char"}, {"source", cmd.endpoint}, {"path", cmd.endpoint}};
        break;
      case EntryType::Nic:
        d = {{"type", "nic"}, {"nictype", "physical"}, {"parent", cmd.endpoint}, {"name", cmd.endpoint}};
        break;
      case EntryType::Usb: {
        d = {{"type", "usb"}};
        // /dev/bus/usb/<bus>/<dev>
        const std::string prefix = "/dev/bus/usb/";
        if (cmd.endpoint.rfind(prefix, 0) == 0) {
          const std::string rest = cmd.endpoint.substr(prefix.size());
          const auto slash = rest.find('/');
          if (slash != std::string::npos) {
            d["busnum"] = rest.substr(0, slash);
            d["devnum"] = rest.substr(slash + 1);
          }
        }
        break;
      }
    }
    return d;
  }

  void execute(const BackendCommand& cmd) override {
    const std::string path = "/1.0/instances/" + cmd.workspace;
    const std::string name = device_name(cmd.endpoint);
    if (cmd.verb == BackendVerb::Attach) {
      nlohmann::json body = {{"devices", {{name, device_config(cmd)}}}};
      check(client_->Patch(path, body.dump(), "application/json"), cmd);
      return;
    }
    nlohmann::json meta = check(client_->Get(path), cmd).value("metadata", nlohmann::json::object());
    if (!meta.contains("devices") || !meta["devices"].contains(name)) return;
    meta["devices"].erase(name);
    check(client_->Put(path, meta.dump(), "application/json"), cmd);
  }

 private:
  nlohmann::json check(const httplib::Result& res, const BackendCommand& cmd) {
    if (!res) throw Error(Errc::BackendUnavailable, "container manager unreachable: " + httplib::to_string(res.error()));
    nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
    if (res->status >= 400 || body.is_discarded() || body.value("type", "") == "error") {
      const std::string why = body.is_discarded() ? res->body : body.value("error", std::string("error response"));
      throw Error(Errc::BackendRejected, cmd.endpoint + " on " + cmd.workspace + ": HTTP " +
                                             std::to_string(res->status) + " " + why);
    }
    if (body.value("type", "") == "async" && body.contains("operation")) {
      auto waited = client_->Get(body["operation"].get<std::string>() + "/wait");
      if (!waited) throw Error(Errc::BackendUnavailable, "operation wait failed: " + httplib::to_string(waited.error()));
      nlohmann::json op = nlohmann::json::parse(waited->body, nullptr, false);
      const auto& meta = op.is_discarded() ? op : op["metadata"];
      if (waited->status >= 400 || op.is_discarded() || meta.value("status", "") != "Success")
        throw Error(Errc::BackendRejected, cmd.endpoint + " on " + cmd.workspace + ": operation " +
                                               (op.is_discarded() ? waited->body : meta.value("err", std::string("failed"))));
    }
    return body;
  }

  std::unique_ptr<httplib::Client> client_;
};

}  // namespace vota
