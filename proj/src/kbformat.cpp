#include "knet/kbformat.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace knet {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

std::string type_name(const json& j) { return j.type_name(); }

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected string, got " + type_name(j));
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected number, got " + type_name(j));
  return j.get<double>();
}

std::vector<std::string> get_labels(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected array, got " + type_name(j));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> get_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected array, got " + type_name(j));
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path, bool strict, json* extra) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.count(it.key())) continue;
    if (strict) schema_error(path, "unknown field '" + it.key() + "'");
    // Lenient: keep node and network extras; drop unknown meta/display keys.
    if (extra) (*extra)[it.key()] = it.value();
  }
}

NodeMeta parse_meta(const json& j, const NodeId& id, const std::string& path,
                    bool strict) {
  NodeMeta meta;
  meta.name = id;
  if (!j.is_object()) schema_error(path, "expected object, got " + type_name(j));
  check_keys(j, {"name", "question", "description", "display"}, path, strict, nullptr);
  if (j.contains("name")) meta.name = get_string(j["name"], path + ".name");
  if (j.contains("question")) meta.question = get_string(j["question"], path + ".question");
  if (j.contains("description"))
    meta.description = get_string(j["description"], path + ".description");
  if (j.contains("display")) {
    const json& d = j["display"];
    const std::string dpath = path + ".display";
    if (!d.is_object()) schema_error(dpath, "expected object, got " + type_name(d));
    check_keys(d, {"x", "y", "color", "shade"}, dpath, strict, nullptr);
    if (d.contains("x")) meta.display.x = get_number(d["x"], dpath + ".x");
    if (d.contains("y")) meta.display.y = get_number(d["y"], dpath + ".y");
    if (d.contains("shade")) meta.display.shade = get_number(d["shade"], dpath + ".shade");
    if (d.contains("color")) {
      const json& c = d["color"];
      if (!c.is_array() || c.size() != 3)
        schema_error(dpath + ".color", "expected [r, g, b]");
      for (std::size_t k = 0; k < 3; ++k) {
        if (!c[k].is_number_integer())
          schema_error(dpath + ".color[" + std::to_string(k) + "]", "expected integer");
        const long long v = c[k].get<long long>();
        if (v < -(1LL << 30) || v > (1LL << 30))
          schema_error(dpath + ".color[" + std::to_string(k) + "]", "integer out of range");
        meta.display.color[k] = static_cast<int>(v);
      }
    }
  }
  return meta;
}

Node parse_node(const json& j, const std::string& path, bool strict) {
  if (!j.is_object()) schema_error(path, "expected object, got " + type_name(j));
  Node node;
  node.id = get_string(require(j, "id", path), path + ".id");
  const std::string kind = get_string(require(j, "kind", path), path + ".kind");

  std::set<std::string> allowed{"id", "kind", "parents", "meta"};
  if (kind == "chance") {
    node.kind = NodeKind::Chance;
    allowed.insert({"states", "cpt"});
    node.states = get_labels(require(j, "states", path), path + ".states");
    const json& cpt = require(j, "cpt", path);
    if (!cpt.is_array()) schema_error(path + ".cpt", "expected array of rows");
    for (std::size_t r = 0; r < cpt.size(); ++r)
      node.cpt.push_back(get_numbers(cpt[r], path + ".cpt[" + std::to_string(r) + "]"));
  } else if (kind == "decision") {
    node.kind = NodeKind::Decision;
    allowed.insert("alternatives");
    node.states = get_labels(require(j, "alternatives", path), path + ".alternatives");
  } else if (kind == "value") {
    node.kind = NodeKind::Value;
    allowed.insert("utilities");
    require(j, "parents", path);
    node.utilities = get_numbers(require(j, "utilities", path), path + ".utilities");
  } else {
    schema_error(path + ".kind", "expected \"chance\", \"decision\" or \"value\"");
  }

  // Fields that belong to another node kind are never "unknown" extras.
  for (const char* other : {"states", "alternatives", "cpt", "utilities"})
    if (!allowed.count(other) && j.contains(other))
      schema_error(path, std::string("field '") + other + "' not allowed on a " +
                             kind + " node");
  check_keys(j, allowed, path, strict, &node.extra);

  if (j.contains("parents")) node.parents = get_labels(j["parents"], path + ".parents");
  node.meta = j.contains("meta") ? parse_meta(j["meta"], node.id, path + ".meta", strict)
                                 : NodeMeta{node.id, "", "", {}};
  return node;
}

// Table row counts depend on other nodes, so they are checked once every
// node is known. Unresolvable parents are left to validate().
void check_table_shapes(const Network& net) {
  std::map<NodeId, const Node*> by_id;
  for (const auto& n : net.nodes) by_id.emplace(n.id, &n);
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const Node& node = net.nodes[i];
    if (node.kind == NodeKind::Decision) continue;
    std::size_t rows = 1;
    bool resolved = true;
    for (const auto& p : node.parents) {
      auto it = by_id.find(p);
      if (it == by_id.end() || it->second->states.empty()) {
        resolved = false;
        break;
      }
      rows *= it->second->cardinality();
      if (rows > (std::size_t{1} << 26)) {
        resolved = false;
        break;
      }
    }
    if (!resolved) continue;
    const std::string path = "nodes[" + std::to_string(i) + "]";
    if (node.kind == NodeKind::Chance) {
      if (node.cpt.size() != rows)
        schema_error(path + ".cpt", "expected " + std::to_string(rows) +
                                        " rows, got " + std::to_string(node.cpt.size()));
      for (std::size_t r = 0; r < rows; ++r)
        if (node.cpt[r].size() != node.states.size())
          schema_error(path + ".cpt[" + std::to_string(r) + "]",
                       "expected " + std::to_string(node.states.size()) +
                           " columns, got " + std::to_string(node.cpt[r].size()));
    } else if (node.utilities.size() != rows) {
      schema_error(path + ".utilities", "expected " + std::to_string(rows) +
                                            " entries, got " +
                                            std::to_string(node.utilities.size()));
    }
  }
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

// --- canonical writer ------------------------------------------------------

std::string scalar(const json& j) { return j.dump(); }
std::string num(double v) { return json(v).dump(); }

std::string label_list(const std::vector<std::string>& labels) {
  std::string out = "[";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out += (i ? ", " : "") + scalar(labels[i]);
  return out + "]";
}

std::string number_list(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + num(values[i]);
  return out + "]";
}

void write_extra(std::ostringstream& out, const json& extra, const std::string& indent) {
  // nlohmann::json objects iterate in sorted key order.
  for (auto it = extra.begin(); it != extra.end(); ++it)
    out << ",\n" << indent << scalar(it.key()) << ": " << it.value().dump();
}

void write_node(std::ostringstream& out, const Node& node) {
  const std::string in = "      ";
  out << "    {\n";
  out << in << "\"id\": " << scalar(node.id) << ",\n";
  out << in << "\"kind\": " << scalar(std::string(to_string(node.kind))) << ",\n";
  if (node.kind == NodeKind::Chance)
    out << in << "\"states\": " << label_list(node.states) << ",\n";
  if (node.kind == NodeKind::Decision)
    out << in << "\"alternatives\": " << label_list(node.states) << ",\n";
  out << in << "\"parents\": " << label_list(node.parents) << ",\n";
  if (node.kind == NodeKind::Chance) {
    out << in << "\"cpt\": [";
    for (std::size_t r = 0; r < node.cpt.size(); ++r)
      out << (r ? "," : "") << "\n" << in << "  " << number_list(node.cpt[r]);
    out << (node.cpt.empty() ? "" : "\n" + in) << "],\n";
  }
  if (node.kind == NodeKind::Value)
    out << in << "\"utilities\": " << number_list(node.utilities) << ",\n";
  const auto& m = node.meta;
  const auto& d = m.display;
  out << in << "\"meta\": {\n";
  out << in << "  \"name\": " << scalar(m.name) << ",\n";
  out << in << "  \"question\": " << scalar(m.question) << ",\n";
  out << in << "  \"description\": " << scalar(m.description) << ",\n";
  out << in << "  \"display\": {\"x\": " << num(d.x) << ", \"y\": " << num(d.y)
      << ", \"color\": [" << d.color[0] << ", " << d.color[1] << ", " << d.color[2]
      << "], \"shade\": " << num(d.shade) << "}\n";
  out << in << "}";
  write_extra(out, node.extra, in);
  out << "\n    }";
}

}  // namespace

Network parse_document(std::string_view text, ParseOptions options) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError,
                "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) schema_error("$", "document must be a JSON object");

  const std::string format = get_string(require(doc, "format", "$"), "format");
  if (format != kFormatTag) schema_error("format", "expected \"knet-kb\"");
  const json& version = require(doc, "version", "$");
  if (!version.is_number_integer())
    schema_error("version", "expected integer, got " + type_name(version));
  if (version.get<long long>() != kFormatVersion)
    throw Error(ErrorCode::VersionError,
                "unsupported format version " + version.dump() + " (expected 1)");

  Network net;
  check_keys(doc, {"format", "version", "name", "kind", "nodes"}, "$", options.strict,
             &net.extra);
  net.name = get_string(require(doc, "name", "$"), "name");
  const std::string kind = get_string(require(doc, "kind", "$"), "kind");
  if (kind == "belief") net.kind = NetworkKind::Belief;
  else if (kind == "decision") net.kind = NetworkKind::Decision;
  else schema_error("kind", "expected \"belief\" or \"decision\"");

  const json& nodes = require(doc, "nodes", "$");
  if (!nodes.is_array()) schema_error("nodes", "expected array, got " + type_name(nodes));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    net.nodes.push_back(
        parse_node(nodes[i], "nodes[" + std::to_string(i) + "]", options.strict));
  check_table_shapes(net);
  return net;
}

Network parse(std::string_view text, ParseOptions options) {
  Network net = parse_document(text, options);
  auto report = validate(net);
  if (!report.ok()) throw ValidationFailure(std::move(report));
  return net;
}

std::string serialize(const Network& network) {
  std::vector<const Node*> nodes;
  for (const auto& n : network.nodes) nodes.push_back(&n);
  std::stable_sort(nodes.begin(), nodes.end(),
                   [](const Node* a, const Node* b) { return a->id < b->id; });

  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": \"knet-kb\",\n";
  out << "  \"version\": " << kFormatVersion << ",\n";
  out << "  \"name\": " << scalar(network.name) << ",\n";
  out << "  \"kind\": " << scalar(std::string(to_string(network.kind))) << ",\n";
  out << "  \"nodes\": [";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out << (i ? ",\n" : "\n");
    write_node(out, *nodes[i]);
  }
  out << (nodes.empty() ? "]" : "\n  ]");
  write_extra(out, network.extra, "  ");
  out << "\n}\n";
  return out.str();
}

std::string canonicalize(std::string_view text, ParseOptions options) {
  return serialize(parse(text, options));
}

Network load_file(const std::string& path, ParseOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaError, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), options);
}

}  // namespace knet
