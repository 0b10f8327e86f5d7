#include <doctest.h>

#include <random>

#include "coarsekit/error.hpp"
#include "coarsekit/graph.hpp"
#include "oracles.hpp"

using namespace coarsekit;

namespace {

void check_group_axioms(const GroupOracle& g, std::int64_t radius) {
  const auto elems = g.ball(radius);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto& a = elems[rng() % elems.size()];
    const auto& b = elems[rng() % elems.size()];
    const auto& c = elems[rng() % elems.size()];
    CHECK(g.normal_form(a) == a);
    CHECK(g.multiply(g.multiply(a, b), c) == g.multiply(a, g.multiply(b, c)));
    CHECK(g.multiply(a, g.invert(a)) == g.identity());
    CHECK(g.invert(g.invert(a)) == a);
    CHECK(g.multiply(g.identity(), a) == a);
    CHECK(g.word_length(g.multiply(a, b)) <= g.word_length(a) + g.word_length(b));
  }
}

}  // namespace

TEST_CASE("group built-ins satisfy the group axioms on samples") {
  check_group_axioms(*make_zn(1), 6);
  check_group_axioms(*make_zn(2), 5);
  check_group_axioms(*make_free(2), 4);
  check_group_axioms(*make_z2_free_product(3), 5);
  check_group_axioms(*make_infinite_dihedral(), 6);
  check_group_axioms(*make_permutation_group(4, {{1, 2, 3, 0}, {1, 0, 2, 3}}), 10);
}

TEST_CASE("word length agrees with breadth-first layers of the ball") {
  for (const auto& g : {make_zn(2), make_free(2), make_z2_free_product(3), make_infinite_dihedral(),
                        make_permutation_group(3, {{1, 2, 0}, {1, 0, 2}})}) {
    const auto elems = g->ball(4);
    std::int64_t last = 0;
    for (const auto& e : elems) {
      const auto len = g->word_length(e);
      CHECK(len >= last);
      CHECK(len <= 4);
      last = len;
    }
  }
  CHECK(make_permutation_group(3, {{1, 2, 0}, {1, 0, 2}})->ball(10).size() == 6);
  CHECK(make_zn(0)->ball(3).size() == 1);
}

TEST_CASE("ball sizes of the built-in graphs") {
  for (std::int64_t r = 0; r <= 5; ++r) {
    CHECK(ball(*make_graph("line"), {0}, r).size() == static_cast<std::size_t>(2 * r + 1));
    CHECK(ball(*make_graph("grid"), {0, 0}, r).size() == static_cast<std::size_t>(2 * r * r + 2 * r + 1));
    CHECK(ball(*make_graph("tree:3"), {}, r).size() == static_cast<std::size_t>(3 * (1 << r) - 2));
    std::int64_t p3 = 1;
    for (std::int64_t i = 0; i < r; ++i) p3 *= 3;
    CHECK(ball(*make_graph("free:2"), {}, r).size() == static_cast<std::size_t>(2 * p3 - 1));
  }
  CHECK(ball(*make_graph("cycle:8"), {0}, 10).size() == 8);
  CHECK_THROWS_AS(ball(*make_graph("grid"), {0, 0}, 50, 100), BudgetError);
}

TEST_CASE("closed-form distances agree with breadth-first depth") {
  for (const char* spec : {"line", "grid", "tree:3", "free:2", "cayley:dinf", "cycle:7", "halfline"}) {
    auto g = make_graph(spec);
    const Region reg = ball(*g, g->root(), 4);
    for (std::size_t i = 0; i < reg.size(); ++i) {
      CHECK(g->distance(g->root(), reg.vertices[i]) == reg.depth[i]);
    }
    // Symmetry and the triangle inequality on samples.
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
      const auto& a = reg.vertices[rng() % reg.size()];
      const auto& b = reg.vertices[rng() % reg.size()];
      const auto& c = reg.vertices[rng() % reg.size()];
      CHECK(g->distance(a, b) == g->distance(b, a));
      CHECK(g->distance(a, c) <= g->distance(a, b) + g->distance(b, c));
    }
  }
}

TEST_CASE("region adjacency is the induced subgraph") {
  auto g = make_graph("grid");
  const Region reg = ball(*g, {0, 0}, 3);
  std::size_t edges = 0;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    for (std::size_t j : reg.adjacency[i]) {
      CHECK(g->distance(reg.vertices[i], reg.vertices[j]) == 1);
      ++edges;
    }
  }
  // Row widths 1,3,5,7,5,3,1 give 18 horizontal edges; columns the same.
  CHECK(edges / 2 == 36);
  // Lexicographic ranks are a permutation.
  std::vector<bool> seen(reg.size(), false);
  for (auto r : reg.rank) seen.at(r) = true;
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST_CASE("adjacency file format") {
  auto g = FiniteGraph::parse_adjacency("# a square with a tail\na: b d\nb: c\nc: d\nd: e\n");
  CHECK(g->size() == 5u);
  CHECK(g->distance(g->parse("a"), g->parse("c")) == 2);
  CHECK(g->distance(g->parse("a"), g->parse("e")) == 2);
  CHECK(g->label(g->parse("e")) == "e");
  CHECK(g->is_connected());
  CHECK_THROWS_AS(FiniteGraph::parse_adjacency("a b c\n"), Error);
  CHECK_THROWS_AS(g->parse("zz"), Error);

  auto split = FiniteGraph::parse_adjacency("a: b\nc: d\n");
  CHECK_FALSE(split->is_connected());
  CHECK_THROWS_AS(split->distance(split->parse("a"), split->parse("c")), PreconditionError);
}

TEST_CASE("finite graph distances match the oracle BFS") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto adj = oracle::random_connected_graph(10, 6, rng);
    FiniteGraph g(adj, "random");
    for (std::size_t s = 0; s < adj.size(); ++s) {
      const auto d = oracle::bfs_depth(adj, s);
      for (std::size_t x = 0; x < adj.size(); ++x) {
        CHECK(g.distance({static_cast<std::int64_t>(s)}, {static_cast<std::int64_t>(x)}) == d[x]);
      }
    }
  }
}

TEST_CASE("vertex labels round-trip") {
  auto free2 = make_graph("free:2");
  const Vertex w = {1, -2, 1};
  CHECK(free2->label(w) == "ab'a");
  CHECK(free2->parse("ab'a") == w);
  CHECK(free2->parse("e") == Vertex{});
  auto tree = make_graph("tree:3");
  CHECK(tree->parse("abc") == Vertex{0, 1, 2});
  CHECK(tree->parse("abba") == Vertex{});
  auto grid = make_graph("grid");
  CHECK(grid->parse("3,-4") == Vertex{3, -4});
  CHECK_THROWS_AS(grid->parse("3"), Error);
  CHECK_THROWS_AS(make_graph("torus"), Error);
}

TEST_CASE("ray validity") {
  auto line = make_graph("line");
  CHECK(is_valid_ray(*line, {{{0}, {1}, {2}}, true}));
  CHECK_FALSE(is_valid_ray(*line, {{{0}, {1}, {0}}, true}));
  CHECK(is_valid_ray(*line, {{{0}, {1}, {0}}, false}));
  CHECK_FALSE(is_valid_ray(*line, {{{0}, {2}}, false}));
}
