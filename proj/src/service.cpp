#include "knet/service.hpp"

#include <atomic>
#include <filesystem>
#include <iostream>

#include "httplib.h"

#include "knet/kbformat.hpp"
#include "knet/wire.hpp"

namespace knet {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

KbCatalog load_catalog(const std::string& directory) {
  KbCatalog catalog;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > kKbExtension.size() &&
        name.ends_with(kKbExtension))
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const std::string file = path.filename().string();
    const std::string stem = file.substr(0, file.size() - kKbExtension.size());
    try {
      catalog.networks.emplace(stem, std::make_shared<const Network>(
                                         load_file(path.string(), {.strict = true})));
    } catch (const Error& e) {
      catalog.rejected.push_back(file + ": " + std::string(to_string(e.code())) + ": " +
                                 e.what());
    }
  }
  return catalog;
}

struct Service::Entry {
  Entry(Session s, Clock::time_point now)
      : session(std::move(s)), last_used(now.time_since_epoch().count()) {}

  std::mutex mutex;
  Session session;
  std::atomic<Clock::rep> last_used;
};

Service::Service(KbCatalog catalog, std::chrono::seconds session_ttl)
    : catalog_(std::move(catalog)), ttl_(session_ttl) {}

Service::~Service() = default;

std::size_t Service::session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

void Service::evict_idle(Clock::time_point now) {
  std::lock_guard lock(sessions_mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    const Clock::time_point last{Clock::duration{it->second->last_used.load()}};
    if (now - last > ttl_) it = sessions_.erase(it);
    else ++it;
  }
}

std::shared_ptr<Service::Entry> Service::find_session(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->last_used = Clock::now().time_since_epoch().count();
  return it->second;
}

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownNode:
    case ErrorCode::NotAsserted: return 404;
    case ErrorCode::ImpossibleEvidence:
    case ErrorCode::NotDecisionNetwork:
    case ErrorCode::WrongNetworkKind: return 409;
    default: return 422;
  }
}

HttpResponse reply(int status, const ordered_json& body) { return {status, body.dump()}; }

HttpResponse not_found(const std::string& what) {
  return reply(404, {{"error", "NotFound"}, {"message", what}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t slash = path.find('/', start);
    if (slash == std::string::npos) slash = path.size();
    if (slash > start) parts.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body.empty() ? "{}" : body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("request body: ") + e.what());
  }
}

ordered_json session_summary(const Session& s) {
  ordered_json out = ordered_json::object();
  out["kb"] = s.kb_name();
  out["findings"] = wire::findings(s.network(), s.findings());
  out["beliefs"] = wire::beliefs(s.network(), s.beliefs());
  out["history_len"] = s.history().size();
  return out;
}

}  // namespace

HttpResponse Service::handle(const HttpRequest& request) {
  evict_idle(Clock::now());
  try {
    return route(request);
  } catch (const Error& e) {
    return reply(status_for(e.code()), wire::error(e));
  }
}

HttpResponse Service::route(const HttpRequest& request) {
  const auto parts = split_path(request.path);
  const std::string& method = request.method;
  auto method_not_allowed = [] {
    return reply(405, {{"error", "MethodNotAllowed"}, {"message", "method not allowed"}});
  };

  if (parts.empty()) return not_found("no such route");

  if (parts[0] == "kbs") {
    if (method != "GET") return method_not_allowed();
    if (parts.size() == 1) {
      ordered_json list = ordered_json::array();
      for (const auto& [name, net] : catalog_.networks)
        list.push_back({{"name", name},
                        {"kind", std::string(to_string(net->kind))},
                        {"node_count", net->nodes.size()}});
      return reply(200, list);
    }
    if (parts.size() == 2) {
      auto it = catalog_.networks.find(parts[1]);
      if (it == catalog_.networks.end()) return not_found("unknown kb '" + parts[1] + "'");
      auto q = request.query.find("tables");
      const bool tables = q != request.query.end() && (q->second == "true" || q->second == "1");
      return reply(200, wire::network_view(*it->second, tables));
    }
    return not_found("no such route");
  }

  if (parts[0] != "sessions") return not_found("no such route");

  if (parts.size() == 1) {
    if (method != "POST") return method_not_allowed();
    const json body = parse_body(request.body);
    if (!body.is_object() || !body.contains("kb") || !body["kb"].is_string())
      throw Error(ErrorCode::SchemaError, "expected {\"kb\": name}");
    const std::string kb = body["kb"].get<std::string>();
    auto it = catalog_.networks.find(kb);
    if (it == catalog_.networks.end()) return not_found("unknown kb '" + kb + "'");
    auto entry = std::make_shared<Entry>(Session(it->second, kb), Clock::now());
    const std::string id = entry->session.id();
    {
      std::lock_guard lock(sessions_mutex_);
      sessions_.emplace(id, std::move(entry));
    }
    return reply(200, {{"session_id", id}});
  }

  auto entry = find_session(parts[1]);
  if (!entry) return not_found("unknown session '" + parts[1] + "'");
  std::lock_guard session_lock(entry->mutex);
  Session& session = entry->session;
  const Network& net = session.network();

  if (parts.size() == 2) {
    if (method != "GET") return method_not_allowed();
    return reply(200, session_summary(session));
  }

  const std::string& resource = parts[2];
  if (resource == "findings" && parts.size() == 4) {
    const NodeId& node = parts[3];
    const Node& target = net.at(node);
    if (method == "PUT") {
      if (target.kind == NodeKind::Value)
        throw Error(ErrorCode::NotInstantiable, "value node '" + node + "' cannot be instantiated");
      const json body = parse_body(request.body);
      if (!body.is_object() || !body.contains("state") || !body["state"].is_string())
        throw Error(ErrorCode::SchemaError, "expected {\"state\": label}");
      try {
        session.assert_finding(node, body["state"].get<std::string>());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ImpossibleEvidence) throw;
        ordered_json out = wire::error(e);
        out["beliefs"] = wire::beliefs(net, session.beliefs());
        return reply(409, out);
      }
      return reply(200, wire::beliefs(net, session.beliefs()));
    }
    if (method == "DELETE") {
      session.retract_finding(node);
      return reply(200, wire::beliefs(net, session.beliefs()));
    }
    return method_not_allowed();
  }
  if (parts.size() != 3) return not_found("no such route");

  if (resource == "whatif") {
    if (method != "POST") return method_not_allowed();
    const json body = parse_body(request.body);
    const json overlay = body.is_object() && body.contains("findings") ? body["findings"]
                                                                        : json::object();
    const auto result = session.what_if(wire::parse_findings(net, overlay));
    ordered_json out = ordered_json::object();
    out["beliefs"] = wire::beliefs(net, result.beliefs);
    if (result.recommendation)
      out["recommendation"] = wire::recommendation(net, *result.recommendation);
    return reply(200, out);
  }
  if (method != "GET") return method_not_allowed();
  if (resource == "beliefs") return reply(200, wire::beliefs(net, session.beliefs()));
  if (resource == "recommendation")
    return reply(200, wire::recommendation(net, session.recommendation()));
  if (resource == "history") return reply(200, wire::history(session));
  if (resource == "export")
    return reply(200, ordered_json::parse(session.export_document().dump()));
  return not_found("no such route");
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service, const std::string& static_dir)
    : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  if (!static_dir.empty()) server.set_mount_point("/ui", static_dir);

  auto adapter = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.query[key] = value;
    const HttpResponse response = service.handle(request);
    res.status = response.status;
    res.set_content(response.body, "application/json");
  };
  const std::string any = R"(/(kbs|sessions)(/.*)?)";
  server.Get(any, adapter);
  server.Post(any, adapter);
  server.Put(any, adapter);
  server.Delete(any, adapter);
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

int run_server(const ServiceOptions& options) {
  KbCatalog catalog;
  try {
    catalog = load_catalog(options.kb_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot read kb directory " << options.kb_dir << ": " << e.what() << "\n";
    return 1;
  }
  for (const auto& reason : catalog.rejected) std::cerr << "warning: skipped " << reason << "\n";
  std::cerr << "loaded " << catalog.networks.size() << " knowledge base(s) from "
            << options.kb_dir << "\n";

  Service service(std::move(catalog), options.session_ttl);
  HttpServer server(service, options.static_dir);
  if (server.bind(options.host, options.port) < 0) {
    std::cerr << "error: cannot listen on " << options.host << ":" << options.port << "\n";
    return 3;
  }
  std::cerr << "listening on http://" << options.host << ":" << options.port << "\n";
  return server.listen() ? 0 : 3;
}

}  // namespace knet
