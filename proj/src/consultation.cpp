#include "knet/consultation.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <mutex>
#include <random>

namespace knet {

using nlohmann::json;

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Created: return "created";
    case EventKind::Asserted: return "asserted";
    case EventKind::Retracted: return "retracted";
    case EventKind::Rejected: return "rejected";
  }
  return "?";
}

namespace {

std::string random_token() {
  static std::mutex mutex;
  static std::mt19937_64 engine{std::random_device{}()};
  std::lock_guard lock(mutex);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string token;
  for (int word = 0; word < 2; ++word) {
    std::uint64_t bits = engine();
    for (int i = 0; i < 16; ++i, bits >>= 4) token.push_back(kHex[bits & 0xF]);
  }
  return token;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()) % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms.count()));
  return out;
}

EventKind event_kind(const std::string& name) {
  for (auto kind : {EventKind::Created, EventKind::Asserted, EventKind::Retracted,
                    EventKind::Rejected})
    if (to_string(kind) == name) return kind;
  throw Error(ErrorCode::SchemaError, "unknown event kind '" + name + "'");
}

}  // namespace

std::size_t state_index(const Network& network, const NodeId& node,
                        std::string_view label) {
  const Node& n = network.at(node);
  if (n.kind == NodeKind::Value)
    throw Error(ErrorCode::NotInstantiable, "value node '" + node + "' cannot be instantiated");
  const auto& states = n.states;
  auto it = std::find(states.begin(), states.end(), label);
  if (it == states.end())
    throw Error(ErrorCode::InvalidState,
                "node '" + node + "' has no state '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - states.begin());
}

Session::Session(std::shared_ptr<const Network> network, std::string kb_name)
    : network_(std::move(network)),
      kb_name_(kb_name.empty() ? network_->name : std::move(kb_name)),
      id_(random_token()) {
  beliefs_ = chance_posteriors(*network_, findings_).beliefs;
  record(EventKind::Created, std::nullopt, std::nullopt);
}

Session new_session(std::shared_ptr<const Network> network, std::string kb_name) {
  return Session(std::move(network), std::move(kb_name));
}

void Session::record(EventKind kind, std::optional<NodeId> node,
                     std::optional<std::size_t> state) {
  history_.push_back({history_.size(), kind, std::move(node), state, utc_now()});
}

const BeliefAssignment& Session::assert_finding(const NodeId& node, std::size_t state) {
  Findings next = findings_;
  next[node] = state;
  check_findings(*network_, next);
  try {
    beliefs_ = chance_posteriors(*network_, next).beliefs;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ImpossibleEvidence) record(EventKind::Rejected, node, state);
    throw;
  }
  findings_ = std::move(next);
  recommendation_.reset();
  record(EventKind::Asserted, node, state);
  return beliefs_;
}

const BeliefAssignment& Session::assert_finding(const NodeId& node,
                                                std::string_view label) {
  return assert_finding(node, state_index(*network_, node, label));
}

const BeliefAssignment& Session::retract_finding(const NodeId& node) {
  if (!findings_.count(node))
    throw Error(ErrorCode::NotAsserted, "node '" + node + "' has no finding");
  Findings next = findings_;
  next.erase(node);
  beliefs_ = chance_posteriors(*network_, next).beliefs;
  findings_ = std::move(next);
  recommendation_.reset();
  record(EventKind::Retracted, node, std::nullopt);
  return beliefs_;
}

WhatIfResult Session::what_if(const Findings& overlay) const {
  Findings merged = findings_;
  for (const auto& [id, state] : overlay) merged[id] = state;
  WhatIfResult result;
  result.beliefs = chance_posteriors(*network_, merged).beliefs;
  if (network_->kind == NetworkKind::Decision)
    result.recommendation = recommend(*network_, merged);
  return result;
}

const Recommendation& Session::recommendation() {
  if (network_->kind != NetworkKind::Decision)
    throw Error(ErrorCode::NotDecisionNetwork,
                "network '" + network_->name + "' has no decisions");
  if (!recommendation_) recommendation_ = recommend(*network_, findings_);
  return *recommendation_;
}

json Session::export_document() const {
  json events = json::array();
  for (const auto& e : history_) {
    json event = {{"seq", e.seq}, {"kind", std::string(to_string(e.kind))}};
    if (e.node) event["node"] = *e.node;
    if (e.node && e.state) event["state"] = network_->at(*e.node).states.at(*e.state);
    event["timestamp"] = e.timestamp;
    events.push_back(std::move(event));
  }
  return {{"kb_name", kb_name_}, {"events", std::move(events)}};
}

Session Session::replay(std::shared_ptr<const Network> network, const json& document) {
  if (!document.is_object() || !document.contains("events") ||
      !document["events"].is_array() || !document.contains("kb_name") ||
      !document["kb_name"].is_string())
    throw Error(ErrorCode::SchemaError, "session document needs kb_name and events");

  Session session(std::move(network), document["kb_name"].get<std::string>());
  const auto& events = document["events"];
  for (std::size_t i = 0; i < events.size(); ++i) {
    const json& e = events[i];
    const std::string where = "events[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string())
      throw Error(ErrorCode::SchemaError, where + ": missing kind");
    const EventKind kind = event_kind(e["kind"].get<std::string>());
    if ((kind == EventKind::Created) != (i == 0))
      throw Error(ErrorCode::SchemaError, where + ": created must be the first event");
    if (kind == EventKind::Created) continue;
    if (!e.contains("node") || !e["node"].is_string())
      throw Error(ErrorCode::SchemaError, where + ": missing node");
    const NodeId node = e["node"].get<std::string>();

    if (kind == EventKind::Retracted) {
      try {
        session.retract_finding(node);
      } catch (const Error& err) {
        throw Error(ErrorCode::SchemaError, where + ": " + err.what());
      }
      continue;
    }
    if (!e.contains("state") || !e["state"].is_string())
      throw Error(ErrorCode::SchemaError, where + ": missing state");
    const auto label = e["state"].get<std::string>();
    bool rejected = false;
    try {
      session.assert_finding(node, label);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ImpossibleEvidence)
        throw Error(ErrorCode::SchemaError, where + ": " + err.what());
      rejected = true;
    }
    if (rejected != (kind == EventKind::Rejected))
      throw Error(ErrorCode::SchemaError, where + ": replay diverged from recorded outcome");
  }
  return session;
}

}  // namespace knet
