#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <thread>

#include "httplib.h"

#include "knet/service.hpp"

using namespace knet;
using nlohmann::json;

namespace {

struct Api {
  Service service{load_catalog(KNET_KB_DIR)};

  HttpResponse call(const std::string& method, const std::string& path,
                    const json& body = nullptr) {
    return service.handle({method, path, {}, body.is_null() ? "" : body.dump()});
  }

  json ok(const std::string& method, const std::string& path, const json& body = nullptr) {
    const auto r = call(method, path, body);
    REQUIRE_MESSAGE(r.status == 200, method << " " << path << " -> " << r.status << " " << r.body);
    return json::parse(r.body);
  }

  std::string open(const std::string& kb) {
    return ok("POST", "/sessions", {{"kb", kb}})["session_id"].get<std::string>();
  }
};

}  // namespace

TEST_CASE("catalog lists the fixtures") {
  Api api;
  const auto kbs = api.ok("GET", "/kbs");
  REQUIRE(kbs.size() == 3);
  CHECK(kbs[0] == json{{"name", "chain"}, {"kind", "belief"}, {"node_count", 2}});
  CHECK(kbs[2]["name"] == "figure1");
  CHECK(kbs[2]["kind"] == "decision");
  CHECK(api.service.catalog().rejected.empty());
}

TEST_CASE("catalog skips invalid files") {
  const auto dir = std::filesystem::temp_directory_path() / "knet_catalog_test";
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(std::string(KNET_KB_DIR) + "/chain.knet.json", dir / "good.knet.json",
                             std::filesystem::copy_options::overwrite_existing);
  std::ofstream(dir / "bad.knet.json") << "{\"format\": \"knet-kb\"}";
  std::ofstream(dir / "ignored.json") << "{}";
  const auto catalog = load_catalog(dir.string());
  CHECK(catalog.networks.size() == 1);
  CHECK(catalog.networks.count("good"));
  REQUIRE(catalog.rejected.size() == 1);
  CHECK(catalog.rejected[0].rfind("bad.knet.json", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("network view") {
  Api api;
  const auto view = api.ok("GET", "/kbs/figure1");
  CHECK(view["kind"] == "decision");
  REQUIRE(view["nodes"].size() == 5);
  for (const auto& node : view["nodes"]) {
    CHECK_FALSE(node.contains("cpt"));
    CHECK_FALSE(node.contains("utilities"));
    CHECK(node["meta"].contains("question"));
    CHECK(node["meta"]["display"].contains("color"));
  }
  const auto r = api.service.handle({"GET", "/kbs/figure1", {{"tables", "true"}}, ""});
  REQUIRE(r.status == 200);
  const auto tables = json::parse(r.body);
  CHECK(tables["nodes"][0].contains("cpt"));
  CHECK(api.call("GET", "/kbs/nope").status == 404);
}

TEST_CASE("session lifecycle on the chain") {
  Api api;
  const auto id = api.open("chain");
  CHECK(id.size() == 32);
  auto state = api.ok("GET", "/sessions/" + id);
  CHECK(state["kb"] == "chain");
  CHECK(state["history_len"] == 1);
  CHECK(state["findings"].empty());

  const auto beliefs = api.ok("PUT", "/sessions/" + id + "/findings/B", {{"state", "t"}});
  CHECK(std::abs(beliefs["A"]["t"].get<double>() - 0.6923077) < 1e-7);
  CHECK(api.ok("GET", "/sessions/" + id + "/beliefs") == beliefs);
  state = api.ok("GET", "/sessions/" + id);
  CHECK(state["findings"] == json{{"B", "t"}});

  const auto retracted = api.ok("DELETE", "/sessions/" + id + "/findings/B");
  CHECK(retracted["A"]["t"].get<double>() == doctest::Approx(0.2));
  CHECK(api.call("DELETE", "/sessions/" + id + "/findings/B").status == 404);
  CHECK(api.ok("GET", "/sessions/" + id + "/history").size() == 3);
  CHECK(api.ok("GET", "/sessions/" + id + "/export")["events"].size() == 3);
}

TEST_CASE("status codes") {
  Api api;
  CHECK(api.call("POST", "/sessions", {{"kb", "nope"}}).status == 404);
  CHECK(api.call("POST", "/sessions", {{"name", "chain"}}).status == 422);
  CHECK(api.call("GET", "/sessions/unknown").status == 404);
  CHECK(api.call("GET", "/nothing").status == 404);
  CHECK(api.call("DELETE", "/kbs").status == 405);

  const auto fig = api.open("figure1");
  const auto base = "/sessions/" + fig;
  auto r = api.call("PUT", base + "/findings/VALUE", {{"state", "high"}});
  CHECK(r.status == 422);
  CHECK(json::parse(r.body)["error"] == "NotInstantiable");
  CHECK(api.call("PUT", base + "/findings/NOPE", {{"state", "x"}}).status == 404);
  CHECK(api.call("PUT", base + "/findings/DISEASE", {{"state", "maybe"}}).status == 422);
  CHECK(api.call("PUT", base + "/findings/DISEASE", {{"value", "absent"}}).status == 422);
  r = api.call("PUT", base + "/findings/DISEASE", json("not an object"));
  CHECK(r.status == 422);
  HttpRequest raw{"PUT", base + "/findings/DISEASE", {}, "{broken"};
  CHECK(api.service.handle(raw).status == 422);

  const auto before = api.ok("PUT", base + "/findings/DISEASE", {{"state", "absent"}});
  r = api.call("PUT", base + "/findings/PATHO-STATE", {{"state", "abnormal"}});
  CHECK(r.status == 409);
  CHECK(json::parse(r.body)["beliefs"] == before);
  CHECK(api.ok("GET", base + "/beliefs") == before);

  const auto chain = api.open("chain");
  CHECK(api.call("GET", "/sessions/" + chain + "/recommendation").status == 409);
}

TEST_CASE("decision sessions: recommendation and what-if") {
  Api api;
  const auto base = "/sessions/" + api.open("figure1");
  const auto rec = api.ok("GET", base + "/recommendation");
  CHECK(rec["best"]["configuration"] == json{{"TREAT?", "no-treat"}});
  CHECK(rec["ranking"].size() == 2);

  const auto before = api.call("GET", base + "/beliefs").body;
  const auto w = api.ok("POST", base + "/whatif", {{"findings", {{"LAB-TEST", "positive"}}}});
  CHECK(w["recommendation"]["best"]["configuration"] == json{{"TREAT?", "treat"}});
  CHECK(api.call("GET", base + "/beliefs").body == before);
  CHECK(api.ok("GET", base)["history_len"] == 1);
  CHECK(api.call("POST", base + "/whatif",
                 {{"findings", {{"DISEASE", "absent"}, {"PATHO-STATE", "abnormal"}}}})
            .status == 409);
  CHECK(api.call("POST", base + "/whatif", {{"findings", {{"DISEASE", "??"}}}}).status == 422);

  // Percent-decoded ids containing '?' are ordinary path segments here.
  api.ok("PUT", base + "/findings/TREAT?", {{"state", "treat"}});
  CHECK(api.ok("GET", base)["findings"]["TREAT?"] == "treat");
}

TEST_CASE("replaying /history mutations reproduces /beliefs byte-for-byte") {
  Api api;
  for (const char* kb : {"chain", "diamond", "figure1"}) {
    const auto base = "/sessions/" + api.open(kb);
    const auto view = api.ok("GET", std::string("/kbs/") + kb);
    // A fixed script: assert the last state of every node, retract the first.
    std::vector<std::string> asserted;
    for (const auto& node : view["nodes"]) {
      if (node["kind"] == "value") continue;
      const auto& labels = node.contains("states") ? node["states"] : node["alternatives"];
      const auto id = node["id"].get<std::string>();
      const auto r = api.call("PUT", base + "/findings/" + id, {{"state", labels.back()}});
      if (r.status == 200) asserted.push_back(id);
    }
    if (!asserted.empty()) api.ok("DELETE", base + "/findings/" + asserted.front());
    const auto expected = api.call("GET", base + "/beliefs").body;

    const auto history = api.ok("GET", base + "/history");
    const auto replay = "/sessions/" + api.open(kb);
    for (const auto& e : history) {
      if (e["kind"] == "asserted" || e["kind"] == "rejected")
        api.call("PUT", replay + "/findings/" + e["node"].get<std::string>(),
                 {{"state", e["state"]}});
      else if (e["kind"] == "retracted")
        api.ok("DELETE", replay + "/findings/" + e["node"].get<std::string>());
    }
    CHECK_MESSAGE(api.call("GET", replay + "/beliefs").body == expected, kb);
    CHECK(api.ok("GET", replay + "/history").size() == history.size());
  }
}

TEST_CASE("idle sessions are evicted") {
  Service service(load_catalog(KNET_KB_DIR), std::chrono::seconds{60});
  const auto r = service.handle({"POST", "/sessions", {}, R"({"kb": "chain"})"});
  const auto id = json::parse(r.body)["session_id"].get<std::string>();
  CHECK(service.session_count() == 1);
  service.evict_idle(Service::Clock::now() + std::chrono::seconds{30});
  CHECK(service.session_count() == 1);
  service.evict_idle(Service::Clock::now() + std::chrono::seconds{120});
  CHECK(service.session_count() == 0);
  CHECK(service.handle({"GET", "/sessions/" + id, {}, ""}).status == 404);
}

TEST_CASE("concurrent requests on one session are serialised") {
  Api api;
  const auto base = "/sessions/" + api.open("diamond");
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        const std::string node = (t + i) % 2 ? "B" : "C";
        api.service.handle({"PUT", base + "/findings/" + node, {},
                            json{{"state", i % 2 ? "t" : "f"}}.dump()});
        api.service.handle({"GET", base + "/beliefs", {}, ""});
      }
    });
  for (auto& th : threads) th.join();
  CHECK(api.ok("GET", base)["history_len"] == 201);
}

TEST_CASE("live HTTP loopback") {
  Service service(load_catalog(KNET_KB_DIR));
  HttpServer server(service);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread runner([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  auto res = client.Get("/kbs");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(res->get_header_value("Content-Type") == "application/json");

  res = client.Post("/sessions", R"({"kb": "figure1"})", "application/json");
  REQUIRE(res);
  const auto id = json::parse(res->body)["session_id"].get<std::string>();
  res = client.Put("/sessions/" + id + "/findings/TREAT%3F", R"({"state": "treat"})",
                   "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = client.Get("/sessions/" + id);
  REQUIRE(res);
  CHECK(json::parse(res->body)["findings"]["TREAT?"] == "treat");

  res = client.Get("/kbs/figure1?tables=true");
  REQUIRE(res);
  CHECK(json::parse(res->body)["nodes"][0].contains("cpt"));

  res = client.Options("/sessions");
  REQUIRE(res);
  CHECK(res->status == 204);

  server.stop();
  runner.join();
}
