#include <gtest/gtest.h>

#include "nlsg/graph.hpp"
#include "test_support.hpp"

using namespace nlsg;

namespace {

VertexSet ids(const WeightedGraph& g, std::initializer_list<const char*> names) {
  std::vector<std::string> v(names.begin(), names.end());
  return make_vertex_set(g, v);
}

}  // namespace

TEST(ParseGraph, MinimalK2) {
  auto [g, a] = parse_graph("vertex x1 1 0\nvertex x2 1 0\nedge x1 x2 1.0\n");
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(a.values, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(g.weight(0, 1), 1.0);
}

TEST(ParseGraph, CommentsAndScientificNotation) {
  auto [g, a] = parse_graph(
      "# header\n"
      "vertex a 2.5e-1 0   # trailing comment\n"
      "\n"
      "vertex b 1E0 3.0e+0\n"
      "edge b a 5e-1\n");
  EXPECT_DOUBLE_EQ(g.mu(0), 0.25);
  EXPECT_DOUBLE_EQ(a[1], 3.0);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 0.5);
}

TEST(ParseGraph, G9FileMatchesBuiltin) {
  const auto text = test_support::read_file(test_support::data_path("g9.graph"));
  auto parsed = parse_graph(text);
  auto builtin = builtin_g9();
  EXPECT_EQ(parsed.graph.size(), 9u);
  EXPECT_EQ(parsed.graph.edge_count(), 19u);
  EXPECT_TRUE(parsed.graph == builtin.graph);
  EXPECT_TRUE(parsed.potential == builtin.potential);
}

TEST(ParseGraph, Errors) {
  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_graph(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("vertex x1 1 0\nedge x1 x1 1.0\n"), 2u);  // self-loop
  EXPECT_EQ(line_of("vertex x1 1 0\nedge x1 x2 1.0\n"), 2u);  // unknown vertex
  EXPECT_EQ(line_of("vertex x1 0 0\n"), 1u);                  // mu <= 0
  EXPECT_EQ(line_of("vertex x1 1 -1\n"), 1u);                 // a < 0
  EXPECT_EQ(line_of("vertex x1 1 0\nvertex x2 1 0\nedge x1 x2 -2\n"), 3u);
  EXPECT_EQ(line_of("vertex x1 1 0\nvertex x1 1 0\n"), 2u);   // duplicate vertex
  EXPECT_EQ(line_of("vertex x1 1 0\nvertex x2 1 0\nedge x1 x2 1\nedge x2 x1 1\n"), 4u);
  EXPECT_EQ(line_of("vertex x1 1\n"), 1u);                    // arity
  EXPECT_EQ(line_of("vertex x1 1 abc\n"), 1u);                // bad number
  EXPECT_EQ(line_of("node x1 1 0\n"), 1u);                    // unknown record
}

TEST(ParseGraph, DisconnectedIsRejected) {
  EXPECT_THROW(parse_graph("vertex x1 1 0\nvertex x2 1 0\n"), GraphError);
}

TEST(ParseGraph, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = test_support::random_instance(seed, 2, 10);
    const auto text = serialize_graph(inst.graph, inst.potential);
    auto back = parse_graph(text);
    EXPECT_TRUE(back.graph == inst.graph) << "seed " << seed;
    EXPECT_TRUE(back.potential == inst.potential) << "seed " << seed;
  }
}

TEST(Validate, K2WithUnequalMeasures) {
  WeightedGraph g({"x1", "x2"}, {1.0, 2.0}, {{0, 1, 1.0}});
  auto r = validate(g);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.mu_min, 1.0);
}

TEST(Validate, ReportsDisconnection) {
  auto g = WeightedGraph::unchecked_connectivity({"x1", "x2"}, {1.0, 1.0}, {});
  auto r = validate(g);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.connected);
}

TEST(Validate, G9) {
  auto r = validate(builtin_g9().graph);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.connected && r.weights_symmetric && r.measures_positive);
  EXPECT_EQ(r.mu_min, 1.0);
}

TEST(Boundary, G9Well) {
  auto g = builtin_g9().graph;
  auto d = boundary(g, ids(g, {"x1", "x2", "x3", "x4", "x5", "x6"}));
  EXPECT_EQ(d.boundary, ids(g, {"x7", "x8"}));
  EXPECT_EQ(d.closure().size(), 8u);
}

TEST(Boundary, G9SingleVertexX9) {
  auto g = builtin_g9().graph;
  // x9 is adjacent to x7 and x8 only.
  auto d = boundary(g, ids(g, {"x9"}));
  EXPECT_EQ(d.boundary, ids(g, {"x7", "x8"}));
}

TEST(Boundary, WholeGraphHasEmptyBoundary) {
  auto g = builtin_g9().graph;
  EXPECT_TRUE(boundary(g, g.all_vertices()).boundary.empty());
}

TEST(Boundary, Errors) {
  auto g = builtin_g9().graph;
  EXPECT_THROW(boundary(g, VertexSet{}), GraphError);
  EXPECT_THROW(boundary(g, VertexSet{42}), std::out_of_range);
  EXPECT_THROW(boundary(g, std::vector<std::string>{"nope"}), GraphError);
}

TEST(Boundary, RecomputationIsStable) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = test_support::random_instance(seed, 3, 12);
    auto omega = test_support::random_connected_subset(inst.graph, seed);
    auto d1 = boundary(inst.graph, omega);
    auto d2 = boundary(inst.graph, d1.interior);
    EXPECT_EQ(d1, d2);
    // Invariants of the boundary set.
    for (VertexIndex y : d1.boundary) {
      EXPECT_FALSE(d1.contains(y));
      bool touches = false;
      for (const auto& nb : inst.graph.neighbors(y)) touches |= d1.contains(nb.vertex);
      EXPECT_TRUE(touches);
    }
    for (VertexIndex x : d1.interior)
      for (const auto& nb : inst.graph.neighbors(x))
        if (!d1.contains(nb.vertex))
          EXPECT_TRUE(std::binary_search(d1.boundary.begin(), d1.boundary.end(), nb.vertex));
  }
}

TEST(PotentialWell, G9) {
  auto [g, a] = builtin_g9();
  auto d = potential_well(g, a);
  EXPECT_EQ(d.interior, ids(g, {"x1", "x2", "x3", "x4", "x5", "x6"}));
  EXPECT_EQ(d.boundary, ids(g, {"x7", "x8"}));
}

TEST(PotentialWell, EmptyWell) {
  auto g = builtin_g9().graph;
  EXPECT_THROW(potential_well(g, Potential{std::vector<double>(9, 1.0)}), GraphError);
}

TEST(PotentialWell, DisconnectedWell) {
  WeightedGraph p3({"x1", "x2", "x3"}, {1, 1, 1}, {{0, 1, 1.0}, {1, 2, 1.0}});
  EXPECT_THROW(potential_well(p3, Potential{{0.0, 1.0, 0.0}}), GraphError);
}

TEST(BuiltinG9, Shape) {
  auto [g, a] = builtin_g9();
  EXPECT_EQ(g.size(), 9u);
  EXPECT_EQ(g.edge_count(), 19u);
  EXPECT_EQ(a[g.index_of("x7")], 1.0);
  EXPECT_EQ(a[g.index_of("x3")], 0.0);
  for (const auto& e : g.edges()) {
    EXPECT_EQ(e.weight, 1.0);
    EXPECT_EQ(g.weight(e.first, e.second), g.weight(e.second, e.first));
  }
  EXPECT_EQ(g.neighbors(g.index_of("x1")).size(), 6u);
}

TEST(WeightedGraph, ConstructorRejectsBrokenInvariants) {
  EXPECT_THROW(WeightedGraph({"a", "b"}, {1, 1}, {{0, 0, 1.0}}), GraphError);
  EXPECT_THROW(WeightedGraph({"a", "b"}, {1, 1}, {{0, 1, 0.0}}), GraphError);
  EXPECT_THROW(WeightedGraph({"a", "b"}, {1, 1}, {{0, 1, 1.0}, {1, 0, 1.0}}), GraphError);
  EXPECT_THROW(WeightedGraph({"a", "a"}, {1, 1}, {{0, 1, 1.0}}), GraphError);
  EXPECT_THROW(WeightedGraph({"a", "b"}, {1, -1}, {{0, 1, 1.0}}), GraphError);
}
