#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "vota/error.hpp"

namespace vota::e2 {

enum class MessageKind { SubscriptionRequest, SubscriptionResponse, SubscriptionNotification, Indication };

constexpr std::string_view to_string(MessageKind k) noexcept {
  switch (k) {
    case MessageKind::SubscriptionRequest: return "RICsubscriptionRequest";
    case MessageKind::SubscriptionResponse: return "RICsubscriptionResponse";
    case MessageKind::SubscriptionNotification: return "RICsubscriptionNotification";
    case MessageKind::Indication: return "RICindication";
  }
  return "?";
}

/// Near-RT RIC control-loop budget attached to indications as metadata.
struct LatencyBudget {
  double min_s{0.010};
  double max_s{1.0};
};

struct Message {
  MessageKind kind{MessageKind::SubscriptionRequest};
  std::int64_t sub_id{0};
  std::string xapp_id;
  double timestamp{0.0};
  std::size_t payload_bytes{0};  // Indication only
  std::optional<LatencyBudget> latency_budget;

  static Message request(std::string xapp, std::int64_t sub_id, double t = 0.0) {
    return {MessageKind::SubscriptionRequest, sub_id, std::move(xapp), t, 0, std::nullopt};
  }
};

enum class Phase { Requested, Responded, Notified, Streaming };

struct SubscriptionState {
  std::int64_t sub_id{0};
  std::string xapp_id;
  Phase phase{Phase::Requested};
  double streaming_since{0.0};

  friend bool operator==(const SubscriptionState&, const SubscriptionState&) = default;
};

enum class Status { Running, Crashed };

constexpr std::string_view to_string(Status s) noexcept { return s == Status::Running ? "running" : "crashed"; }

/// Node parameters. Defaults are configuration, not measured constants.
struct NodeParams {
  std::size_t capacity{500};      // inbound queue slots, message in service included
  double service_rate{100.0};     // messages per second
  double processing_window{3.0};  // seconds the queue may stay saturated
  double indication_period{1.0};  // seconds; <= 0 disables indications
  std::size_t indication_bytes{256};
  bool record_emissions{true};    // keep every emitted message in the outbox
};

inline void validate(const NodeParams& p) {
  if (p.capacity < 2) throw Error(Errc::InvalidProfile, "capacity must be >= 2");
  if (!(p.service_rate > 0.0) || !std::isfinite(p.service_rate))
    throw Error(Errc::InvalidProfile, "service_rate must be > 0");
  if (!(p.processing_window >= 0.0)) throw Error(Errc::InvalidProfile, "processing_window must be >= 0");
}

/// E2 node with a bounded FIFO served deterministically at service_rate.
///
/// Time only moves forward through advance_to()/step_sim()/offer(). Service
/// completions, indication deadlines and the crash instant are processed in
/// exact time order; a completion that coincides with an arrival is handled
/// first, and a crash precedes a coinciding completion. Instants within
/// kTieEps count as coinciding.
///
/// Saturation starts at the first arrival that finds the queue full. While
/// the arrival rate exceeds the service rate the queue oscillates between C
/// and C-1, so an episode only ends once the queue has two free slots. A
/// node saturated for processing_window seconds crashes; Crashed is absorbing.
class Node {
 public:
  using SubKey = std::pair<std::string, std::int64_t>;

  explicit Node(NodeParams p = {}) : p_(p) { validate(p_); }

  const NodeParams& params() const noexcept { return p_; }
  double now() const noexcept { return now_; }
  Status status() const noexcept { return status_; }
  std::size_t queue_len() const noexcept { return queue_.size(); }
  std::optional<double> overflow_since() const noexcept { return overflow_since_; }
  std::optional<double> crash_time() const noexcept { return crash_time_; }
  std::uint64_t arrivals() const noexcept { return arrivals_; }
  std::uint64_t processed() const noexcept { return processed_; }
  std::uint64_t dropped() const noexcept { return dropped_; }
  std::size_t peak_queue() const noexcept { return peak_; }
  const std::map<SubKey, SubscriptionState>& subscriptions() const noexcept { return subs_; }
  const std::vector<Message>& outbox() const noexcept { return outbox_; }
  std::vector<Message> take_outbox() { return std::exchange(outbox_, {}); }

  /// Indications emitted so far, including those not recorded individually.
  std::uint64_t indications() const {
    if (p_.record_emissions || p_.indication_period <= 0.0) return indications_;
    const double until = crash_time_ ? std::min(*crash_time_, now_) : now_;
    std::uint64_t n = 0;
    for (const auto& [key, s] : subs_)
      if (until > s.streaming_since)
        n += static_cast<std::uint64_t>(std::floor((until - s.streaming_since) / p_.indication_period + 1e-12));
    return n;
  }

  /// Protocol reaction to one dequeued message.
  std::vector<Message> handle_message(const Message& msg, double now) {
    std::vector<Message> out;
    if (status_ == Status::Crashed) return out;
    if (msg.kind != MessageKind::SubscriptionRequest) return out;

    const SubKey key{msg.xapp_id, msg.sub_id};
    auto reply = [&](MessageKind k) { out.push_back({k, msg.sub_id, msg.xapp_id, now, 0, std::nullopt}); };
    auto it = subs_.find(key);
    if (it != subs_.end()) {
      reply(MessageKind::SubscriptionResponse);
    } else {
      SubscriptionState s{msg.sub_id, msg.xapp_id, Phase::Requested, now};
      reply(MessageKind::SubscriptionResponse);
      s.phase = Phase::Responded;
      reply(MessageKind::SubscriptionNotification);
      s.phase = Phase::Notified;
      s.phase = Phase::Streaming;
      subs_.emplace(key, s);
      if (p_.record_emissions && p_.indication_period > 0.0)
        due_.push({now + p_.indication_period, due_seq_++, key});
    }
    if (p_.record_emissions) outbox_.insert(outbox_.end(), out.begin(), out.end());
    return out;
  }

  /// Arrival attempt at time t >= now(). Returns false if the message was
  /// dropped (queue full or node crashed).
  bool offer(Message msg, double t) {
    advance_to(t);
    ++arrivals_;
    if (status_ == Status::Crashed) {
      ++dropped_;
      return false;
    }
    if (queue_.size() >= p_.capacity) {
      ++dropped_;
      if (!overflow_since_) overflow_since_ = t;
      return false;
    }
    msg.timestamp = t;
    queue_.push_back(std::move(msg));
    peak_ = std::max(peak_, queue_.size());
    if (queue_.size() == 1) {
      busy_start_ = t;
      served_in_busy_ = 0;
    }
    return true;
  }

  void step_sim(double dt) {
    if (!(dt > 0.0)) throw Error(Errc::InvalidProfile, "step dt must be > 0");
    advance_to(now_ + dt);
  }

  void advance_to(double t) {
    if (t < now_) t = now_;
    const double limit = t + kTieEps;
    while (status_ == Status::Running) {
      // Candidates in tie-break order: crash, completion, indication.
      double when[3];
      bool has[3] = {false, false, false};
      if (overflow_since_) { when[0] = *overflow_since_ + p_.processing_window; has[0] = when[0] <= limit; }
      if (!queue_.empty()) { when[1] = next_completion(); has[1] = when[1] <= limit; }
      if (!due_.empty()) { when[2] = std::get<0>(due_.top()); has[2] = when[2] <= limit; }
      int which = -1;
      for (int i = 0; i < 3; ++i)
        if (has[i] && (which < 0 || when[i] < when[which] - kTieEps)) which = i;
      if (which < 0) break;
      const double at = when[which];
      now_ = std::max(now_, std::min(at, t));
      if (which == 0) {
        status_ = Status::Crashed;
        crash_time_ = at;
        overflow_since_.reset();
      } else if (which == 1) {
        complete_one(at);
      } else {
        emit_indication();
      }
    }
    now_ = std::max(now_, t);
  }

  /// Events closer than this are treated as simultaneous.
  static constexpr double kTieEps = 1e-9;

 private:
  double next_completion() const {
    return busy_start_ + static_cast<double>(served_in_busy_ + 1) / p_.service_rate;
  }

  void complete_one(double t) {
    Message msg = std::move(queue_.front());
    queue_.pop_front();
    ++processed_;
    ++served_in_busy_;
    handle_message(msg, t);
    if (overflow_since_ && queue_.size() + 2 <= p_.capacity) overflow_since_.reset();
  }

  void emit_indication() {
    auto [due, seq, key] = due_.top();
    due_.pop();
    auto it = subs_.find(key);
    if (it == subs_.end()) return;
    ++indications_;
    outbox_.push_back({MessageKind::Indication, key.second, key.first, due, p_.indication_bytes, LatencyBudget{}});
    due_.push({due + p_.indication_period, seq, key});
  }

  using Due = std::tuple<double, std::uint64_t, SubKey>;
  struct Later {
    bool operator()(const Due& a, const Due& b) const {
      return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) > std::get<0>(b) : std::get<1>(a) > std::get<1>(b);
    }
  };

  NodeParams p_;
  double now_{0.0};
  Status status_{Status::Running};
  std::deque<Message> queue_;
  double busy_start_{0.0};
  std::uint64_t served_in_busy_{0};
  std::optional<double> overflow_since_;
  std::optional<double> crash_time_;
  std::map<SubKey, SubscriptionState> subs_;
  std::priority_queue<Due, std::vector<Due>, Later> due_;
  std::uint64_t due_seq_{0};
  std::vector<Message> outbox_;
  std::uint64_t arrivals_{0}, processed_{0}, dropped_{0}, indications_{0};
  std::size_t peak_{0};
};

struct AttackProfile {
  int n_xapps{0};
  double rate_per_xapp{0.0};  // requests per second per xApp
  double start{0.0};
  double duration{0.0};

  double total_rate() const noexcept { return n_xapps * rate_per_xapp; }
};

struct TrajectorySample {
  double time{0.0};
  std::size_t queue_len{0};
  Status status{Status::Running};
  std::uint64_t cumulative_dropped{0};
};

struct DosResult {
  std::optional<double> crash_time;
  std::size_t peak_queue{0};
  std::uint64_t dropped{0};
  std::uint64_t arrivals{0};
  std::uint64_t processed{0};
  std::size_t final_queue{0};
  std::vector<TrajectorySample> trajectory;
};

struct FloodOptions {
  double tick{1e-3};
  double sample_interval{1e-2};
  std::optional<std::uint64_t> jitter_seed;  // seeded arrival jitter, off by default
  double jitter_fraction{0.25};              // of the inter-arrival gap, < 0.5
};

inline void validate(const AttackProfile& a, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(Errc::InvalidProfile, "horizon must be > 0");
  if (a.n_xapps < 0 || a.rate_per_xapp < 0.0 || a.start < 0.0 || a.duration < 0.0)
    throw Error(Errc::InvalidProfile, "attack fields must be >= 0");
  if (!(horizon > a.start)) throw Error(Errc::InvalidProfile, "horizon must exceed attack start");
}

/// Deterministic arrival schedule of a subscription flood: the k-th request
/// (k = 0, 1, ...) lands at start + k / (n_xapps * rate_per_xapp), issued
/// round-robin by the xApps with a fresh sub_id each time.
class FloodSchedule {
 public:
  FloodSchedule(const AttackProfile& a, double horizon, const FloodOptions& opt = {})
      : a_(a), end_(std::min(a.start + a.duration, horizon)), rate_(a.total_rate()), opt_(opt) {
    if (opt_.jitter_seed) rng_.seed(*opt_.jitter_seed);
    advance();
  }

  bool has_next() const noexcept { return next_.has_value(); }
  double next_time() const { return *next_; }

  Message pop() {
    const int xapp = a_.n_xapps > 0 ? static_cast<int>(k_ % static_cast<std::uint64_t>(a_.n_xapps)) : 0;
    Message m = Message::request("attacker-" + std::to_string(xapp), static_cast<std::int64_t>(k_), *next_);
    ++k_;
    advance();
    return m;
  }

 private:
  void advance() {
    next_.reset();
    if (!(rate_ > 0.0)) return;
    double t = a_.start + static_cast<double>(k_) / rate_;
    if (opt_.jitter_seed) {
      std::uniform_real_distribution<double> u(-opt_.jitter_fraction, opt_.jitter_fraction);
      t = std::max(a_.start, t + u(rng_) / rate_);
    }
    if (t < end_) next_ = t;
  }

  AttackProfile a_;
  double end_;
  double rate_;
  FloodOptions opt_;
  std::mt19937_64 rng_;
  std::uint64_t k_{0};
  std::optional<double> next_;
};

/// Runs a flood against a fresh node up to `horizon`, sampling the queue
/// every sample_interval.
inline DosResult run_flood(NodeParams node, const AttackProfile& attack, double horizon,
                           const FloodOptions& opt = {}) {
  validate(node);
  validate(attack, horizon);
  if (!(opt.tick > 0.0) || !(opt.sample_interval > 0.0))
    throw Error(Errc::InvalidProfile, "tick and sample_interval must be > 0");
  node.record_emissions = false;
  Node n(node);
  FloodSchedule arrivals(attack, horizon, opt);
  DosResult r;

  auto sample = [&](double t) {
    r.trajectory.push_back({t, n.queue_len(), n.status(), n.dropped()});
  };
  sample(0.0);
  const auto ticks = static_cast<std::uint64_t>(std::ceil(horizon / opt.tick - 1e-9));
  const auto ticks_per_sample = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(opt.sample_interval / opt.tick)));
  for (std::uint64_t i = 1; i <= ticks; ++i) {
    const double t_end = std::min(horizon, static_cast<double>(i) * opt.tick);
    while (arrivals.has_next() && arrivals.next_time() <= t_end) {
      const double t = arrivals.next_time();
      n.offer(arrivals.pop(), t);
    }
    n.advance_to(t_end);
    if (i % ticks_per_sample == 0 || i == ticks) sample(t_end);
  }

  r.crash_time = n.crash_time();
  r.peak_queue = n.peak_queue();
  r.dropped = n.dropped();
  r.arrivals = n.arrivals();
  r.processed = n.processed();
  r.final_queue = n.queue_len();
  return r;
}

/// Closed-form fluid estimate of the crash instant for a flood starting on an
/// empty queue: start + C / (lambda - mu) + window, or nullopt if lambda <= mu.
inline std::optional<double> fluid_crash_time(const NodeParams& node, const AttackProfile& attack) {
  const double lambda = attack.total_rate();
  if (!(lambda > node.service_rate)) return std::nullopt;
  const double fill = static_cast<double>(node.capacity) / (lambda - node.service_rate);
  if (fill > attack.duration) return std::nullopt;
  return attack.start + fill + node.processing_window;
}

inline double ue_throughput(Status s, double baseline_mbps) { return s == Status::Running ? baseline_mbps : 0.0; }

/// CSV columns: time_s, queue_len, status, cumulative_dropped.
inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& traj) {
  os << "time_s,queue_len,status,cumulative_dropped\n";
  char buf[128];
  for (const auto& s : traj) {
    std::snprintf(buf, sizeof buf, "%.6f,%zu,%s,%llu\n", s.time, s.queue_len, std::string(to_string(s.status)).c_str(),
                  static_cast<unsigned long long>(s.cumulative_dropped));
    os << buf;
  }
}

}  // namespace vota::e2
