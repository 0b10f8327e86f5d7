#include <doctest.h>

#include <algorithm>

#include "coarsekit/hyperbolic.hpp"

using namespace coarsekit;
using namespace coarsekit::hyperbolic;

namespace {

// δ from the Gromov-product form of the definition, by brute force.
double delta_by_products(const LocallyFiniteGraph& g, const std::vector<Vertex>& pts) {
  double worst = 0.0;
  for (const auto& w : pts)
    for (const auto& x : pts)
      for (const auto& y : pts)
        for (const auto& z : pts) {
          const double lhs = gromov_product(g, x, y, w);
          const double rhs = std::min(gromov_product(g, x, z, w), gromov_product(g, y, z, w));
          worst = std::max(worst, rhs - lhs);
        }
  return worst;
}

}  // namespace

TEST_CASE("Gromov products") {
  auto tree = make_graph("tree:3");
  // Common prefix length in the tree.
  CHECK(gromov_product(*tree, tree->parse("abc"), tree->parse("aba"), {}) == 2.0);
  CHECK(gromov_product(*tree, tree->parse("abc"), tree->parse("cb"), {}) == 0.0);
  auto line = make_graph("line");
  CHECK(gromov_product(*line, {5}, {3}, {0}) == 3.0);
  CHECK(gromov_product(*line, {5}, {-3}, {0}) == 0.0);
}

TEST_CASE("four-point delta") {
  auto c6 = make_graph("cycle:6");
  const auto d6 = delta_estimate(*c6, {0}, 3);
  CHECK(d6.exhaustive);
  CHECK(d6.delta > 0.0);
  CHECK(d6.delta == doctest::Approx(delta_by_products(*c6, ball(*c6, {0}, 3).vertices)));

  auto tree = make_graph("tree:3");
  const auto dt = delta_estimate(*tree, {}, 3);
  CHECK(dt.exhaustive);
  CHECK(dt.delta == 0.0);

  auto grid = make_graph("grid");
  const auto small = delta_estimate(*grid, {0, 0}, 1);
  const auto mid = delta_estimate(*grid, {0, 0}, 2);
  const auto big = delta_estimate(*grid, {0, 0}, 4);
  CHECK(small.delta == doctest::Approx(delta_by_products(*grid, ball(*grid, {0, 0}, 1).vertices)));
  CHECK(mid.delta == doctest::Approx(delta_by_products(*grid, ball(*grid, {0, 0}, 2).vertices)));
  CHECK(small.delta < mid.delta);
  CHECK(mid.delta < big.delta);

  // Sampling never exceeds the exhaustive value.
  const auto sampled = delta_estimate(*grid, {0, 0}, 4, 0, 20000, 3);
  CHECK_FALSE(sampled.exhaustive);
  CHECK(sampled.delta <= big.delta);
}

TEST_CASE("geodesic segments from a point") {
  CHECK(rays_from(*make_graph("line"), {0}, 4).size() == 2);
  const auto tree_rays = rays_from(*make_graph("tree:3"), {}, 3);
  CHECK(tree_rays.size() == 12);
  CHECK(rays_from(*make_graph("cycle:8"), {0}, 5).empty());
  CHECK(rays_from(*make_graph("cycle:8"), {0}, 4).size() == 2);
  auto grid = make_graph("grid");
  const auto grid_rays = rays_from(*grid, {0, 0}, 2);
  CHECK(grid_rays.size() == 12);
  for (const auto& r : grid_rays) CHECK(is_valid_ray(*grid, r));
  CHECK(std::is_sorted(tree_rays.begin(), tree_rays.end(),
                       [](const RaySegment& a, const RaySegment& b) { return a.vertices < b.vertices; }));
  CHECK_THROWS_AS(rays_from(*make_graph("tree:3"), {}, 8, 100), BudgetError);
}

TEST_CASE("ray classes") {
  auto line = make_graph("line");
  CHECK(hausdorff(*line, {{0}, {1}, {2}}, {{7}, {8}}) == 7);
  CHECK(ray_classes(*line, rays_from(*line, {0}, 6), 1).size() == 2);

  auto tree = make_graph("tree:3");
  for (std::int64_t r : {2, 3, 4}) {
    const auto rays = rays_from(*tree, {}, static_cast<std::size_t>(r + 1));
    const auto classes = ray_classes(*tree, rays, 1);
    CHECK(classes.size() == static_cast<std::size_t>(3 * (1 << (r - 1))));
    for (const auto& c : classes) {
      CHECK(c.size() == 2);
      CHECK(rays[c[0]].vertices[static_cast<std::size_t>(r)] == rays[c[1]].vertices[static_cast<std::size_t>(r)]);
    }
  }
  const RaySegment seg{{{0}, {1}, {2}, {3}, {4}, {5}}, true};
  CHECK(ray_tail(*line, seg, {0}, 4).vertices == std::vector<Vertex>{{4}, {5}});
  CHECK(ray_tail(*line, seg, {0}, 9).vertices.empty());
}

TEST_CASE("every chart cluster is reached by a single ray tail") {
  const auto f = floyd::FloydFunction::geometric(0.5);
  SUBCASE("line from two base points") {
    auto line = make_graph("line");
    const floyd::FloydChart chart(line, f, {0}, 4);
    REQUIRE(chart.clusters().size() == 2);
    for (const Vertex& p : {Vertex{0}, Vertex{7}}) {
      const auto rep = accessibility_witnesses(chart, p, 14);
      CHECK_MESSAGE(rep.ok, rep.failure);
      CHECK(rep.rays == 2);
    }
    // Too short to leave the chart on the left.
    CHECK_FALSE(accessibility_witnesses(chart, {7}, 8).ok);
  }
  SUBCASE("tree from adjacent base points") {
    auto tree = make_graph("tree:3");
    const floyd::FloydChart chart(tree, f, {}, 4);
    REQUIRE(chart.clusters().size() == 12);
    for (const Vertex& p : {Vertex{}, Vertex{0}}) {
      const auto rep = accessibility_witnesses(chart, p, 7);
      CHECK_MESSAGE(rep.ok, rep.failure);
    }
  }
}

TEST_CASE("ray classes project onto chart clusters") {
  const auto f = floyd::FloydFunction::geometric(0.5);
  auto tree = make_graph("tree:3");
  const floyd::FloydChart chart(tree, f, {}, 4);
  const auto classes = class_tails(chart, {}, 5, 1);
  CHECK(classes.size() == 24);
  const auto proj = floyd::hyperbolic_to_floyd_projection(classes, chart);
  CHECK_MESSAGE(proj.well_defined, proj.failure);
  CHECK(proj.surjective);

  const auto change = basepoint_change_check(chart, {}, {0}, 7, 1);
  CHECK(change.agree);
  CHECK(change.from_q.surjective);

  auto line = make_graph("line");
  const floyd::FloydChart lc(line, f, {0}, 4);
  const auto lchange = basepoint_change_check(lc, {0}, {7}, 14, 1);
  CHECK(lchange.agree);
  CHECK(lchange.from_p.surjective);
  CHECK(lchange.from_q.surjective);
}

TEST_CASE("transporting rays along maps") {
  auto line = make_graph("line");
  const RaySegment seg{{{0}, {1}, {2}, {3}, {4}, {5}}, true};
  const auto doubled = qi_ray_transport(*line, [](const Vertex& v) { return Vertex{2 * v[0]}; }, seg);
  CHECK(doubled.tube_radius == 1);
  CHECK(doubled.hausdorff == 1);
  CHECK(doubled.geodesic.length() == 10);
  CHECK(is_valid_ray(*line, doubled.geodesic));

  auto grid = make_graph("grid");
  const auto stair = qi_ray_transport(
      *grid, [](const Vertex& v) { return Vertex{(v[0] + 1) / 2, v[0] / 2}; }, seg);
  CHECK(stair.tube_radius == 0);
  CHECK(stair.hausdorff == 0);

  // A diagonal image needs a thicker tube on the grid only when it skips.
  const auto diag = qi_ray_transport(*grid, [](const Vertex& v) { return Vertex{v[0], v[0]}; }, seg);
  CHECK(diag.tube_radius == 1);
  CHECK(is_valid_ray(*grid, diag.geodesic));
  CHECK(diag.geodesic.vertices.front() == Vertex{0, 0});
  CHECK(diag.geodesic.vertices.back() == Vertex{5, 5});
}
