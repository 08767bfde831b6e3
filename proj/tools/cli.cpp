#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "knet/consultation.hpp"
#include "knet/kbformat.hpp"
#include "knet/service.hpp"
#include "knet/wire.hpp"

namespace knet::cli {

namespace {

constexpr int kPosteriorDigits = 7;

// Failures while reading the knowledge base map to exit 1, bad command-line
// evidence to exit 2, everything else to exit 3.
struct KbError {
  Error error;
};
struct UsageError {
  Error error;
};

void report(std::ostream& err, const Error& e) {
  err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
}

Network load_kb(const std::string& path, bool lenient) {
  try {
    return load_file(path, {.strict = !lenient});
  } catch (const ValidationFailure& e) {
    throw KbError{Error(e.code(), std::string(e.what()) + "\n" + e.report().to_string())};
  } catch (const Error& e) {
    throw KbError{e};
  }
}

Findings parse_evidence(const Network& net, const std::vector<std::string>& items) {
  Findings findings;
  try {
    for (const auto& item : items) {
      auto [node, state] = wire::parse_assignment(net, item);
      findings[node] = state;
    }
  } catch (const Error& e) {
    throw UsageError{e};
  }
  return findings;
}

int cmd_validate(const std::string& file, bool lenient, std::ostream& out, std::ostream& err) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    report(err, Error(ErrorCode::SchemaError, file + ": cannot open file"));
    return kValidationFailure;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  Network net;
  try {
    net = parse_document(buf.str(), {.strict = !lenient});
  } catch (const Error& e) {
    ValidationReport none;
    auto doc = wire::validation_report(none);
    doc["valid"] = false;
    doc["error"] = wire::error(e);
    out << doc.dump(2) << "\n";
    report(err, e);
    return kValidationFailure;
  }
  const auto validation = validate(net);
  out << wire::validation_report(validation).dump(2) << "\n";
  if (!validation.ok()) {
    err << "error: ValidationError: " << validation.issues.size() << " issue(s)\n"
        << validation.to_string();
    return kValidationFailure;
  }
  return kOk;
}

int cmd_infer(const std::string& file, const std::vector<std::string>& evidence,
              const std::vector<std::string>& query, const std::string& engine_name,
              bool lenient, std::ostream& out) {
  const Network net = load_kb(file, lenient);
  const Findings findings = parse_evidence(net, evidence);
  const Engine engine = engine_name == "oracle" ? Engine::Oracle : Engine::Exact;
  auto result = chance_posteriors(net, findings, engine);
  if (!query.empty()) {
    BeliefAssignment selected;
    for (const auto& id : query) {
      auto it = result.beliefs.find(id);
      if (it == result.beliefs.end())
        throw UsageError{Error(ErrorCode::UnknownNode,
                               "no posterior for '" + id + "' (not a chance node)")};
      selected.insert(*it);
    }
    result.beliefs = std::move(selected);
  }
  out << wire::beliefs(net, result.beliefs, kPosteriorDigits).dump() << "\n";
  return kOk;
}

int cmd_decide(const std::string& file, const std::vector<std::string>& evidence,
               bool lenient, std::ostream& out) {
  const Network net = load_kb(file, lenient);
  const Findings findings = parse_evidence(net, evidence);
  if (net.kind != NetworkKind::Decision)
    throw Error(ErrorCode::NotDecisionNetwork, "network '" + net.name + "' has no decisions");
  out << wire::recommendation(net, recommend(net, findings)).dump() << "\n";
  return kOk;
}

const char* kConsultHelp =
    "commands: assert NODE=STATE | retract NODE | beliefs [NODE] | whatif NODE=STATE ... |\n"
    "          recommend | history | export FILE | help | quit\n";

int cmd_consult(const std::string& file, bool lenient, std::istream& in, std::ostream& out,
                std::ostream& err) {
  auto net = std::make_shared<const Network>(load_kb(file, lenient));
  Session session = new_session(net, net->name);
  err << "consulting '" << net->name << "' (" << net->nodes.size() << " nodes); type help\n";

  std::string line;
  while (err << "knet> " << std::flush, std::getline(in, line)) {
    std::istringstream words(line);
    std::string command;
    if (!(words >> command)) continue;
    std::vector<std::string> rest;
    for (std::string w; words >> w;) rest.push_back(w);

    try {
      if (command == "quit" || command == "exit") break;
      if (command == "help") {
        err << kConsultHelp;
      } else if (command == "assert" && rest.size() == 1) {
        auto [node, state] = wire::parse_assignment(*net, rest[0]);
        session.assert_finding(node, state);
        out << wire::beliefs(*net, session.beliefs(), kPosteriorDigits).dump() << "\n";
      } else if (command == "retract" && rest.size() == 1) {
        session.retract_finding(rest[0]);
        out << wire::beliefs(*net, session.beliefs(), kPosteriorDigits).dump() << "\n";
      } else if (command == "beliefs" && rest.size() <= 1) {
        BeliefAssignment shown = session.beliefs();
        if (rest.size() == 1) {
          auto it = shown.find(rest[0]);
          if (it == shown.end())
            throw Error(ErrorCode::UnknownNode, "no belief for '" + rest[0] + "'");
          shown = {*it};
        }
        out << wire::beliefs(*net, shown, kPosteriorDigits).dump() << "\n";
      } else if (command == "whatif" && !rest.empty()) {
        Findings overlay;
        for (const auto& item : rest) {
          auto [node, state] = wire::parse_assignment(*net, item);
          overlay[node] = state;
        }
        const auto result = session.what_if(overlay);
        wire::ordered_json doc = wire::ordered_json::object();
        doc["beliefs"] = wire::beliefs(*net, result.beliefs, kPosteriorDigits);
        if (result.recommendation)
          doc["recommendation"] = wire::recommendation(*net, *result.recommendation);
        out << doc.dump() << "\n";
      } else if (command == "recommend" && rest.empty()) {
        out << wire::recommendation(*net, session.recommendation()).dump() << "\n";
      } else if (command == "history" && rest.empty()) {
        out << wire::history(session).dump() << "\n";
      } else if (command == "export" && rest.size() == 1) {
        std::ofstream file_out(rest[0], std::ios::binary);
        if (!file_out) throw Error(ErrorCode::SchemaError, rest[0] + ": cannot write file");
        file_out << session.export_document().dump(2) << "\n";
        err << "exported " << session.history().size() << " event(s) to " << rest[0] << "\n";
      } else {
        err << "error: usage: unrecognised command '" << line << "'\n" << kConsultHelp;
      }
    } catch (const Error& e) {
      report(err, e);
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"knet: build and consult Bayesian belief and decision networks", "knet"};
  app.require_subcommand(1);

  std::string file;
  std::vector<std::string> evidence, query;
  std::string engine = "auto";
  bool lenient = false;
  ServiceOptions serve_options;
  long long ttl_seconds = serve_options.session_ttl.count();

  auto* validate_cmd = app.add_subcommand("validate", "Check a knowledge base");
  validate_cmd->add_option("FILE", file, "Knowledge base (.knet.json)")->required();

  auto* infer_cmd = app.add_subcommand("infer", "Print posterior beliefs as JSON");
  infer_cmd->add_option("FILE", file, "Knowledge base (.knet.json)")->required();
  infer_cmd->add_option("--evidence,-e", evidence, "Finding NODE=STATE")->expected(1, -1);
  infer_cmd->add_option("--query,-q", query, "Restrict output to NODE")->expected(1, -1);
  infer_cmd->add_option("--engine", engine, "auto|oracle|exact")
      ->check(CLI::IsMember({"auto", "oracle", "exact"}));

  auto* decide_cmd = app.add_subcommand("decide", "Rank decision configurations");
  decide_cmd->add_option("FILE", file, "Knowledge base (.knet.json)")->required();
  decide_cmd->add_option("--evidence,-e", evidence, "Finding NODE=STATE")->expected(1, -1);

  auto* consult_cmd = app.add_subcommand("consult", "Interactive consultation");
  consult_cmd->add_option("FILE", file, "Knowledge base (.knet.json)")->required();

  auto* serve_cmd = app.add_subcommand("serve", "Run the consultation service");
  serve_cmd->add_option("--kb-dir", serve_options.kb_dir, "Directory of .knet.json files")
      ->required();
  serve_cmd->add_option("--port", serve_options.port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--host", serve_options.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--session-ttl", ttl_seconds, "Idle session timeout, seconds")
      ->capture_default_str();
  serve_cmd->add_option("--static-dir", serve_options.static_dir,
                        "Serve UI assets under /ui/");

  for (auto* sub : {validate_cmd, infer_cmd, decide_cmd, consult_cmd})
    sub->add_flag("--lenient", lenient, "Keep unknown fields instead of rejecting them");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*validate_cmd) return cmd_validate(file, lenient, out, err);
    if (*infer_cmd) return cmd_infer(file, evidence, query, engine, lenient, out);
    if (*decide_cmd) return cmd_decide(file, evidence, lenient, out);
    if (*consult_cmd) return cmd_consult(file, lenient, in, out, err);
    if (*serve_cmd) {
      serve_options.session_ttl = std::chrono::seconds{ttl_seconds};
      return run_server(serve_options);
    }
  } catch (const KbError& e) {
    report(err, e.error);
    return kValidationFailure;
  } catch (const UsageError& e) {
    report(err, e.error);
    return kUsageError;
  } catch (const Error& e) {
    report(err, e);
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace knet::cli
