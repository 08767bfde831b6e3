#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "knet/consultation.hpp"

namespace knet {

/// Networks loaded from a directory of *.knet.json files, keyed by file stem.
struct KbCatalog {
  std::map<std::string, std::shared_ptr<const Network>> networks;
  /// "file: reason" for every file that failed strict parse or validation.
  std::vector<std::string> rejected;
};

KbCatalog load_catalog(const std::string& directory);

struct ServiceOptions {
  std::string kb_dir;
  std::string host = "127.0.0.1";
  int port = 8628;
  std::chrono::seconds session_ttl{3600};
  /// Optional directory of static UI assets served under /ui/.
  std::string static_dir;
};

struct HttpRequest {
  std::string method;
  /// Percent-decoded path, e.g. "/sessions/abc/findings/TREAT?".
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Transport-independent request handler for the consultation API.
/// Requests on different sessions run concurrently; requests on the same
/// session are serialised.
class Service {
 public:
  using Clock = std::chrono::steady_clock;

  Service(KbCatalog catalog, std::chrono::seconds session_ttl = std::chrono::seconds{3600});
  ~Service();

  HttpResponse handle(const HttpRequest& request);

  const KbCatalog& catalog() const { return catalog_; }
  std::size_t session_count() const;
  /// Drops sessions idle for longer than the TTL as of `now`.
  void evict_idle(Clock::time_point now);

 private:
  struct Entry;

  std::shared_ptr<Entry> find_session(const std::string& id);
  HttpResponse route(const HttpRequest& request);

  KbCatalog catalog_;
  std::chrono::seconds ttl_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

/// HTTP transport for a Service: CORS headers, OPTIONS preflight, optional
/// static mount under /ui/.
class HttpServer {
 public:
  HttpServer(Service& service, const std::string& static_dir = {});
  ~HttpServer();
  /// Binds `host`; port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. Returns false if the socket failed.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Loads the catalog and serves the API until the process is stopped.
/// Returns a process exit code.
int run_server(const ServiceOptions& options);

}  // namespace knet
