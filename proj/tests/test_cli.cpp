#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = knet::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string kb(const std::string& name) {
  return std::string(KNET_KB_DIR) + "/" + name + ".knet.json";
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("infer prints 7-significant-digit posteriors") {
  const auto r = run({"infer", kb("chain"), "--evidence", "B=t", "--query", "A"});
  CHECK(r.code == 0);
  CHECK(r.out == "{\"A\":{\"t\":0.6923077,\"f\":0.3076923}}\n");
  CHECK(r.err.empty());
}

TEST_CASE("oracle and exact engines print identical bytes on every fixture") {
  for (const std::vector<std::string>& evidence :
       {std::vector<std::string>{}, {"-e", "B=t"}, {"-e", "LAB-TEST=positive"},
        {"-e", "D=f", "-e", "B=t"}}) {
    for (const char* name : {"chain", "diamond", "figure1"}) {
      auto oracle = std::vector<std::string>{"infer", kb(name), "--engine", "oracle"};
      auto exact = std::vector<std::string>{"infer", kb(name), "--engine", "exact"};
      oracle.insert(oracle.end(), evidence.begin(), evidence.end());
      exact.insert(exact.end(), evidence.begin(), evidence.end());
      const auto a = run(oracle);
      const auto b = run(exact);
      CHECK(a.code == b.code);
      CHECK(a.out == b.out);
    }
  }
}

TEST_CASE("evidence errors are usage errors") {
  auto r = run({"infer", kb("chain"), "-e", "B"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error: ", 0) == 0);
  r = run({"infer", kb("chain"), "-e", "Z=t"});
  CHECK(r.code == 2);
  CHECK(r.err.find("UnknownNode") != std::string::npos);
  r = run({"infer", kb("chain"), "-e", "B=x"});
  CHECK(r.code == 2);
  CHECK(run({"infer", kb("chain"), "--engine", "fast"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("impossible evidence is a runtime error") {
  const auto r = run({"infer", kb("figure1"), "-e", "DISEASE=absent", "-e",
                      "PATHO-STATE=abnormal"});
  CHECK(r.code == 3);
  CHECK(r.err.rfind("error: ImpossibleEvidence:", 0) == 0);
}

TEST_CASE("validate") {
  auto r = run({"validate", kb("figure1")});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["valid"] == true);

  const auto cyclic = temp_file("knet_cyclic.knet.json", R"({
    "format": "knet-kb", "version": 1, "name": "cyc", "kind": "belief",
    "nodes": [
      {"id": "A", "kind": "chance", "states": ["t","f"], "parents": ["B"], "cpt": [[0.5,0.5],[0.5,0.5]]},
      {"id": "B", "kind": "chance", "states": ["t","f"], "parents": ["A"], "cpt": [[0.5,0.5],[0.5,0.5]]}]})");
  r = run({"validate", cyclic});
  CHECK(r.code == 1);
  CHECK(r.out.find("Acyclicity") != std::string::npos);
  CHECK(r.err.rfind("error: ", 0) == 0);
  CHECK(run({"infer", cyclic}).code == 1);

  const auto bad = temp_file("knet_bad.knet.json", "{\"format\": \"knet-kb\", \"version\": 2}");
  r = run({"validate", bad});
  CHECK(r.code == 1);
  CHECK(r.err.find("VersionError") != std::string::npos);
  CHECK(run({"validate", "/nonexistent.knet.json"}).code == 1);
}

TEST_CASE("lenient flag keeps unknown keys") {
  std::ifstream in(kb("chain"));
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  text.insert(text.find("\"nodes\""), "\"author\": \"x\",\n  ");
  const auto path = temp_file("knet_lenient.knet.json", text);
  CHECK(run({"infer", path}).code == 1);
  CHECK(run({"infer", path, "--lenient"}).code == 0);
}

TEST_CASE("decide") {
  auto r = run({"decide", kb("figure1")});
  CHECK(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["best"]["configuration"]["TREAT?"] == "no-treat");
  CHECK(doc["best"]["expected_utility"].get<double>() == doctest::Approx(93.2));
  r = run({"decide", kb("figure1"), "-e", "LAB-TEST=positive"});
  CHECK(json::parse(r.out)["best"]["configuration"]["TREAT?"] == "treat");
  r = run({"decide", kb("chain")});
  CHECK(r.code == 3);
  CHECK(r.err.find("NotDecisionNetwork") != std::string::npos);
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"decide", kb("figure1"), "-e", "LAB-TEST=negative"};
  CHECK(run(args).out == run(args).out);
}

TEST_CASE("consult REPL") {
  const auto exported = (std::filesystem::temp_directory_path() / "knet_export.json").string();
  const std::string script =
      "help\n"
      "assert B=t\n"
      "beliefs A\n"
      "whatif B=f\n"
      "assert Z=t\n"
      "retract B\n"
      "history\n"
      "recommend\n"
      "export " + exported + "\n"
      "nonsense\n"
      "quit\n";
  const auto r = run({"consult", kb("chain")}, script);
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::vector<std::string> out;
  for (std::string line; std::getline(lines, line);) out.push_back(line);
  REQUIRE(out.size() == 5);
  CHECK(out[0] == "{\"A\":{\"t\":0.6923077,\"f\":0.3076923},\"B\":{\"t\":1.0,\"f\":0.0}}");
  CHECK(out[1] == "{\"A\":{\"t\":0.6923077,\"f\":0.3076923}}");
  CHECK(json::parse(out[2]).contains("beliefs"));
  CHECK(out[3] == "{\"A\":{\"t\":0.2,\"f\":0.8},\"B\":{\"t\":0.26,\"f\":0.74}}");
  CHECK(json::parse(out[4]).size() == 3);
  CHECK(r.err.find("error: UnknownNode") != std::string::npos);
  CHECK(r.err.find("error: NotDecisionNetwork") != std::string::npos);
  CHECK(r.err.find("unrecognised command") != std::string::npos);

  std::ifstream in(exported);
  const auto doc = json::parse(in);
  CHECK(doc["kb_name"] == "chain");
  CHECK(doc["events"].size() == 3);
}
