#include "doctest.h"

#include <map>
#include <random>

#include "knet/kbformat.hpp"
#include "knet/model.hpp"
#include "support/builders.hpp"
#include "support/random_networks.hpp"

using namespace knet;
using namespace knet::testing;

namespace {

const std::vector<std::string> kTF{"t", "f"};

Network figure1_structure() {
  return network({chance("DISEASE", {"present", "absent"}, {}, {{0.1, 0.9}}),
                  chance("PATHO-STATE", {"abnormal", "normal"}, {"DISEASE"},
                         {{0.85, 0.15}, {0.0, 1.0}}),
                  chance("LAB-TEST", {"positive", "negative"}, {"PATHO-STATE"},
                         {{0.9, 0.1}, {0.05, 0.95}}),
                  decision("TREAT?", {"treat", "no-treat"}, {"LAB-TEST"}),
                  value("VALUE", {"PATHO-STATE", "TREAT?"}, {80, 20, 90, 100})},
                 NetworkKind::Decision, "figure1");
}

const ValidationIssue* issue(const ValidationReport& report, Rule rule) {
  for (const auto& i : report.issues)
    if (i.rule == rule) return &i;
  return nullptr;
}

}  // namespace

TEST_CASE("figure1 structure is valid") {
  const auto report = validate(figure1_structure());
  CHECK_MESSAGE(report.ok(), report.to_string());
}

TEST_CASE("two-node cycle is reported with both nodes") {
  const auto net = network({chance("A", kTF, {"B"}, {{0.5, 0.5}, {0.5, 0.5}}),
                            chance("B", kTF, {"A"}, {{0.5, 0.5}, {0.5, 0.5}})});
  const auto report = validate(net);
  const auto* found = issue(report, Rule::Acyclicity);
  REQUIRE(found);
  CHECK(found->nodes == std::vector<NodeId>{"A", "B"});
}

TEST_CASE("row summing to 0.9 violates normalization at row 0") {
  const auto report = validate(network({chance("A", kTF, {}, {{0.5, 0.4}})}));
  const auto* found = issue(report, Rule::RowNormalization);
  REQUIRE(found);
  CHECK(found->nodes == std::vector<NodeId>{"A"});
  REQUIRE(found->row);
  CHECK(*found->row == 0);
}

TEST_CASE("row normalization tolerance is 1e-6") {
  CHECK(validate(network({chance("A", kTF, {}, {{0.5 + 5e-7, 0.5}})})).ok());
  CHECK_FALSE(validate(network({chance("A", kTF, {}, {{0.5 + 2e-6, 0.5}})})).ok());
}

TEST_CASE("structural rules") {
  SUBCASE("empty and duplicate ids") {
    auto net = network({chance("", kTF, {}, {{0.5, 0.5}})});
    CHECK(validate(net).has(Rule::EmptyId));
    net = network({chance("A", kTF, {}, {{0.5, 0.5}}), chance("A", kTF, {}, {{0.5, 0.5}})});
    CHECK(validate(net).has(Rule::DuplicateId));
  }
  SUBCASE("unknown and duplicate parents") {
    CHECK(validate(network({chance("A", kTF, {"Z"}, {{0.5, 0.5}, {0.5, 0.5}})}))
              .has(Rule::UnknownParent));
    const auto net = network({chance("A", kTF, {}, {{0.5, 0.5}}),
                              chance("B", kTF, {"A", "A"}, {{1, 0}, {1, 0}, {1, 0}, {1, 0}})});
    CHECK(validate(net).has(Rule::DuplicateParent));
  }
  SUBCASE("too few and duplicate states") {
    CHECK(validate(network({chance("A", {"only"}, {}, {{1.0}})})).has(Rule::TooFewStates));
    CHECK(validate(network({chance("A", {"x", "x"}, {}, {{0.5, 0.5}})}))
              .has(Rule::DuplicateState));
    auto net = figure1_structure();
    for (auto& n : net.nodes)
      if (n.id == "TREAT?") n.states = {"treat"};
    CHECK(validate(net).has(Rule::TooFewStates));
  }
  SUBCASE("cpt shape and range") {
    CHECK(validate(network({chance("A", kTF, {}, {{0.5, 0.5}, {0.5, 0.5}})}))
              .has(Rule::CptShape));
    CHECK(validate(network({chance("A", kTF, {}, {{0.5, 0.25, 0.25}})})).has(Rule::CptShape));
    CHECK(validate(network({chance("A", kTF, {}, {{1.5, -0.5}})})).has(Rule::ProbabilityRange));
  }
  SUBCASE("display range") {
    auto net = network({chance("A", kTF, {}, {{0.5, 0.5}})});
    net.nodes[0].meta.display.color = {0, 256, 0};
    CHECK(validate(net).has(Rule::DisplayRange));
    net.nodes[0].meta.display.color = {0, 0, 0};
    net.nodes[0].meta.display.x = INFINITY;
    CHECK(validate(net).has(Rule::DisplayRange));
  }
}

TEST_CASE("network kind rules") {
  SUBCASE("belief network with a decision node") {
    auto net = figure1_structure();
    net.kind = NetworkKind::Belief;
    CHECK(validate(net).has(Rule::NetworkKindMismatch));
  }
  SUBCASE("decision network without decisions") {
    auto net = network({chance("A", kTF, {}, {{0.5, 0.5}}), value("V", {"A"}, {1, 2})},
                       NetworkKind::Decision);
    CHECK(validate(net).has(Rule::MissingDecisionNode));
  }
  SUBCASE("two value nodes") {
    auto net = figure1_structure();
    net.nodes.push_back(value("V2", {"TREAT?"}, {1, 2}));
    CHECK(validate(net).has(Rule::ValueNodeCount));
  }
  SUBCASE("no value node") {
    auto net = figure1_structure();
    std::erase_if(net.nodes, [](const Node& n) { return n.kind == NodeKind::Value; });
    CHECK(validate(net).has(Rule::ValueNodeCount));
  }
  SUBCASE("value node with a child") {
    auto net = figure1_structure();
    net.nodes.push_back(chance("Z", kTF, {"VALUE"}, {{0.5, 0.5}}));
    CHECK(validate(net).has(Rule::ValueNodeHasChildren));
  }
  SUBCASE("utility count and finiteness") {
    auto net = figure1_structure();
    for (auto& n : net.nodes)
      if (n.kind == NodeKind::Value) n.utilities = {1, 2, 3};
    CHECK(validate(net).has(Rule::UtilityCount));
    for (auto& n : net.nodes)
      if (n.kind == NodeKind::Value) n.utilities = {1, 2, NAN, 4};
    CHECK(validate(net).has(Rule::NonFiniteUtility));
  }
  SUBCASE("decision node with a table") {
    auto net = figure1_structure();
    for (auto& n : net.nodes)
      if (n.id == "TREAT?") n.cpt = {{0.5, 0.5}, {0.5, 0.5}};
    CHECK(validate(net).has(Rule::UnexpectedTable));
  }
}

TEST_CASE("validate is side-effect free and idempotent") {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    auto net = random_multiply_connected(rng);
    net.nodes[0].cpt[0][0] += 0.25;
    const auto copy = net;
    const auto first = validate(net).to_string();
    CHECK(validate(net).to_string() == first);
    CHECK(net == copy);
  }
}

TEST_CASE("config_index examples") {
  const std::vector<std::size_t> cards{3, 2};
  CHECK(config_index(cards, std::vector<std::size_t>{1, 0}) == 2);
  CHECK(config_index(cards, std::vector<std::size_t>{2, 1}) == 5);
  CHECK(config_index(std::vector<std::size_t>{}, std::vector<std::size_t>{}) == 0);
  try {
    config_index(cards, std::vector<std::size_t>{3, 0});
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
  CHECK_THROWS_AS(config_index(cards, std::vector<std::size_t>{1}), Error);
}

TEST_CASE("config_index and config_assignment are inverse") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::size_t> cards;
    std::size_t total = 1;
    while (cards.size() < 6) {
      const std::size_t c = uniform(rng, 1, 12);
      if (total * c > 1000000) break;
      cards.push_back(c);
      total *= c;
    }
    REQUIRE(config_count(cards) == total);
    const std::size_t step = std::max<std::size_t>(1, total / 5000);
    for (std::size_t i = 0; i < total; i += step) {
      const auto a = config_assignment(cards, i);
      REQUIRE(config_index(cards, a) == i);
    }
  }
}

TEST_CASE("topological_order examples") {
  auto chain = network({chance("C", kTF, {"B"}, {{1, 0}, {0, 1}}),
                        chance("B", kTF, {"A"}, {{1, 0}, {0, 1}}),
                        chance("A", kTF, {}, {{0.5, 0.5}})});
  CHECK(topological_order(chain) == std::vector<NodeId>{"A", "B", "C"});
  auto roots = network({chance("B", kTF, {}, {{0.5, 0.5}}), chance("A", kTF, {}, {{0.5, 0.5}})});
  CHECK(topological_order(roots) == std::vector<NodeId>{"A", "B"});
  CHECK(topological_order(numeric_diamond()) == std::vector<NodeId>{"A", "B", "C", "D"});

  auto cyclic = network({chance("A", kTF, {"B"}, {{0.5, 0.5}, {0.5, 0.5}}),
                         chance("B", kTF, {"A"}, {{0.5, 0.5}, {0.5, 0.5}})});
  try {
    topological_order(cyclic);
    FAIL("expected CyclicGraph");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CyclicGraph);
  }
}

TEST_CASE("topological_order puts parents first on random networks") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto net = i % 2 ? random_multiply_connected(rng) : random_decision_network(rng);
    const auto order = topological_order(net);
    REQUIRE(order.size() == net.nodes.size());
    std::map<NodeId, std::size_t> pos;
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
    for (const auto& node : net.nodes)
      for (const auto& p : node.parents) CHECK(pos.at(p) < pos.at(node.id));
  }
}

TEST_CASE("is_polytree examples") {
  auto chain = network({chance("A", kTF, {}, {{0.5, 0.5}}),
                        chance("B", kTF, {"A"}, {{1, 0}, {0, 1}}),
                        chance("C", kTF, {"B"}, {{1, 0}, {0, 1}})});
  CHECK(is_polytree(chain));
  CHECK_FALSE(is_polytree(numeric_diamond()));
  auto two_chains = network({chance("A", kTF, {}, {{0.5, 0.5}}),
                             chance("B", kTF, {"A"}, {{1, 0}, {0, 1}}),
                             chance("X", kTF, {}, {{0.5, 0.5}}),
                             chance("Y", kTF, {"X"}, {{1, 0}, {0, 1}})});
  CHECK(is_polytree(two_chains));
}

TEST_CASE("random valid networks have normalized rows") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto net = random_multiply_connected(rng);
    REQUIRE(validate(net).ok());
    for (const auto& node : net.nodes)
      for (const auto& row : node.cpt) {
        double sum = 0;
        for (double p : row) sum += p;
        CHECK(std::abs(sum - 1.0) <= kRowTolerance);
      }
  }
}

TEST_CASE("serialized networks validate iff the original did") {
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    auto net = random_decision_network(rng);
    if (i % 3 == 0) net.nodes[0].meta.display.color[1] = 300;
    const bool ok = validate(net).ok();
    CHECK(validate(parse_document(serialize(net))).ok() == ok);
  }
}
