#include <doctest.h>

#include <cmath>
#include <random>

#include "coarsekit/floyd.hpp"
#include "oracles.hpp"

using namespace coarsekit;
using namespace coarsekit::floyd;

namespace {

const FloydFunction kHalf = FloydFunction::geometric(0.5);

// Σ_{n=a}^{b-1} 2^-n.
double dyadic_sum(std::int64_t a, std::int64_t b) {
  double s = 0.0;
  for (std::int64_t n = a; n < b; ++n) s += std::ldexp(1.0, static_cast<int>(-n));
  return s;
}

std::size_t common_prefix(const Vertex& a, const Vertex& b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
  return k;
}

}  // namespace

TEST_CASE("Floyd function conditions and tails") {
  for (const auto& f : {FloydFunction::geometric(0.5), FloydFunction::geometric(0.9),
                        FloydFunction::power(1.1), FloydFunction::power(2.0),
                        FloydFunction::parse("table:1,0.9,0.5,0.45@0.6")}) {
    CHECK(f.is_floyd());
    for (std::int64_t n = 0; n < 200; ++n) {
      const double ratio = f(n) / f(n + 1);
      CHECK(ratio >= 1.0);
      CHECK(ratio <= f.ratio_bound() * (1 + 1e-12));
    }
    // The tail bound dominates a long partial sum and is not wildly loose.
    for (std::int64_t r : {0, 1, 5, 20}) {
      double partial = 0.0;
      for (std::int64_t n = r; n < r + 200000; ++n) partial += f(n);
      CHECK(f.tail(r) >= partial * (1 - 1e-12));
      CHECK(f.tail(r) <= partial + f(r) + 10.0 * std::pow(1.0 + r + 200000, -0.1));
    }
  }
  CHECK(kHalf.tail(8) == doctest::Approx(std::ldexp(1.0, -7)).epsilon(1e-15));
  CHECK(FloydFunction::parse("geom:0.5").spec() == "geom:0.5");
  CHECK(FloydFunction::parse("power:1.1").spec() == "power:1.1");
  CHECK_FALSE(FloydFunction::parse("const:1").is_floyd());
  CHECK(std::isinf(FloydFunction::constant(1).tail(3)));
  CHECK_THROWS_AS(FloydFunction::geometric(1.0), PreconditionError);
  CHECK_THROWS_AS(FloydFunction::power(1.0), PreconditionError);
  CHECK_THROWS_AS(FloydFunction::table({1.0, 2.0}, 0.5), PreconditionError);
  CHECK_THROWS_AS(FloydFunction::parse("exp:2"), Error);
}

TEST_CASE("floyd_distance on the line") {
  auto line = make_graph("line");
  CHECK(floyd_distance(*line, kHalf, {0}, {3}, {3}, 5).value == 0.0);
  CHECK(floyd_distance(*line, kHalf, {0}, {1}, {2}, 5).value == 0.5);
  CHECK(floyd_distance(*line, kHalf, {0}, {-1}, {1}, 5).value == 2.0);
  const auto d = floyd_distance(*line, kHalf, {0}, {1}, {2}, 8);
  CHECK(d.value == 0.5);
  CHECK(d.tail == std::ldexp(1.0, -7));
  CHECK_THROWS_AS(floyd_distance(*line, kHalf, {0}, {9}, {2}, 8), PreconditionError);
  CHECK_THROWS_AS(floyd_distance(*line, kHalf, {0}, {1}, {2}, 0), PreconditionError);
}

TEST_CASE("truncated Floyd distance equals the simple-path oracle on small graphs") {
  std::mt19937_64 rng(2024);
  const FloydFunction power2 = FloydFunction::power(2.0);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 4 + rng() % 9;
    const auto adj = oracle::random_connected_graph(n, rng() % 6, rng);
    FiniteGraph g(adj, "random");
    const std::size_t v = rng() % n;
    for (const auto& f : {kHalf, power2}) {
      FloydBall fb(g, f, {static_cast<std::int64_t>(v)}, static_cast<std::int64_t>(n));
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          const double want = oracle::simple_path_floyd(adj, [&](std::int64_t k) { return f(k); }, v, x, y);
          const double got = fb.distance({static_cast<std::int64_t>(x)}, {static_cast<std::int64_t>(y)});
          CHECK(std::abs(got - want) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("Floyd ball metric properties and monotonicity in R") {
  auto grid = make_graph("grid");
  FloydBall small(*grid, kHalf, {0, 0}, 3);
  const auto tab = small.table();
  const std::size_t n = tab.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(tab[i][i] == 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(tab[i][j] == doctest::Approx(tab[j][i]).epsilon(1e-15));
      for (std::size_t k = 0; k < n; ++k) CHECK(tab[i][k] <= tab[i][j] + tab[j][k] + 1e-15);
    }
  }
  const Vertex x{2, 1};
  const Vertex y{-1, 2};
  double last = std::numeric_limits<double>::infinity();
  for (std::int64_t r = 3; r <= 9; ++r) {
    const double d = floyd_distance(*grid, kHalf, {0, 0}, x, y, r).value;
    CHECK(d <= last);
    last = d;
  }
  // Path witnesses realize the distance.
  const Region& reg = small.region();
  const auto p = small.path(*reg.find(x), *reg.find(y));
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) w += small.edge_weight(p[i], p[i + 1]);
  CHECK(w == doctest::Approx(small.distance(x, y)).epsilon(1e-15));
}

TEST_CASE("refine_radius schedules") {
  auto cycle = make_graph("cycle:9");
  auto exact = refine_radius(*cycle, kHalf, {0}, {2}, {6}, 1e-6);
  CHECK(exact.verdict == Verdict::kYes);
  CHECK(exact.exact);
  CHECK(exact.slack == 0.0);

  auto line = make_graph("line");
  auto geo = refine_radius(*line, kHalf, {0}, {1}, {2}, 1e-6);
  CHECK(geo.verdict == Verdict::kYes);
  CHECK(geo.value == 0.5);
  CHECK(geo.radius <= 64);
  CHECK(geo.slack < 2e-6);

  const FloydFunction slow = FloydFunction::power(1.1);
  auto stuck = refine_radius(*line, slow, {0}, {1}, {2}, 1e-3, 1u << 14);
  CHECK(stuck.verdict == Verdict::kInconclusive);
  CHECK(stuck.rounds >= 10);

  auto loose = refine_radius(*line, slow, {0}, {1}, {2}, 5.0, 1u << 14);
  CHECK(loose.verdict == Verdict::kYes);
  CHECK(loose.rounds >= 8);
  CHECK(slow.tail(loose.radius / 2) < 5.0);
  CHECK(loose.value == doctest::Approx(slow(1)).epsilon(1e-15));
  CHECK_THROWS_AS(refine_radius(*line, kHalf, {0}, {1}, {2}, 0.0), PreconditionError);
}

TEST_CASE("Karlsson defect") {
  auto tree = make_graph("tree:3");
  const auto rep = karlsson_defect(*tree, kHalf, {}, 5, GeodesicSample{64, 2, 8, 5});
  CHECK(rep.samples == 64);
  CHECK(rep.bound == 0.25);
  CHECK(rep.defect <= 0.25);
  CHECK(rep.defect > 0.0);

  // On a tree the bound is the weight of the unique path.
  const auto sample = sample_geodesics_outside(*tree, {}, 5, GeodesicSample{20, 2, 6, 9});
  for (const auto& seg : sample) {
    CHECK(is_valid_ray(*tree, seg));
    double w = 0.0;
    const auto& a = seg.vertices.front();
    const auto& b = seg.vertices.back();
    const auto j = static_cast<std::int64_t>(common_prefix(a, b));
    w = dyadic_sum(j, static_cast<std::int64_t>(a.size())) + dyadic_sum(j, static_cast<std::int64_t>(b.size()));
    CHECK(karlsson_defect(*tree, kHalf, {}, 5, std::vector<RaySegment>{seg}).defect ==
          doctest::Approx(w).epsilon(1e-14));
  }

  auto line = make_graph("line");
  CHECK(karlsson_defect(*line, kHalf, {0}, 4, std::vector<RaySegment>{{{{7}}, true}}).defect == 0.0);
  CHECK_THROWS_AS(karlsson_defect(*make_graph("cycle:6"), kHalf, {0}, 7), PreconditionError);
  CHECK_THROWS_AS(karlsson_defect(*line, kHalf, {0}, 4, std::vector<RaySegment>{}), PreconditionError);
  CHECK_THROWS_AS(karlsson_defect(*line, kHalf, {0}, 4, std::vector<RaySegment>{{{{2}, {3}}, true}}),
                  PreconditionError);

  for (const char* spec : {"line", "grid", "tree:3"}) {
    auto g = make_graph(spec);
    double last = std::numeric_limits<double>::infinity();
    for (std::int64_t r : {4, 6, 8}) {
      const auto k = karlsson_defect(*g, kHalf, g->root(), r, GeodesicSample{48, 2, 8, 1});
      CHECK(k.defect <= std::ldexp(1.0, static_cast<int>(3 - r)));
      CHECK(k.defect < last);
      last = k.defect;
    }
  }
}

TEST_CASE("perspectivity defect") {
  auto line = make_graph("line");
  auto delta = [](const Vertex& p) { return std::vector<Vertex>{p}; };
  CHECK(perspectivity_defect(*line, kHalf, {0}, delta, 4).defect == 0.0);
  double last = 1.0;
  for (std::int64_t r : {2, 4, 6, 8}) {
    const auto d = perspectivity_defect(*line, kHalf, {0}, width_neighbors(*line, 1), r);
    CHECK(d.defect <= kHalf(r - 1));
    CHECK(d.defect == kHalf(r));
    CHECK(d.defect < last);
    last = d.defect;
  }
  for (std::int64_t r : {4, 8}) {
    const auto c = perspectivity_defect(*line, FloydFunction::constant(1), {0},
                                        width_neighbors(*line, 1), r);
    CHECK(c.defect == 1.0);
  }
  auto cycle = make_graph("cycle:6");
  CHECK_THROWS_AS(perspectivity_defect(*cycle, kHalf, {0}, width_neighbors(*cycle, 1), 9),
                  InconclusiveError);
  // Large balls fall back to seeded walks.
  auto tree = make_graph("tree:3");
  const auto pts = band_points(*tree, {}, 14, BandSample{2, 50, 4, 3});
  CHECK(pts.size() == 50);
  for (const auto& p : pts) CHECK(p.size() >= 14);
}

TEST_CASE("boundary clusters") {
  auto line = make_graph("line");
  FloydChart lc(line, kHalf, {0}, 6);
  REQUIRE(lc.clusters().size() == 2);
  CHECK(lc.rays().size() == 2);
  CHECK(lc.clusters()[0].separation > lc.threshold());
  CHECK(lc.threshold() == 4 * kHalf.tail(6));

  auto grid = make_graph("grid");
  FloydChart gc(grid, kHalf, {0, 0}, 6);
  CHECK(gc.clusters().size() == 1);
  CHECK(gc.rays().size() == 24);
  CHECK(std::isinf(gc.clusters()[0].separation));

  auto halfline = make_graph("halfline");
  FloydChart hc(halfline, kHalf, {0}, 5);
  CHECK(hc.clusters().size() == 1);

  // Tree: clusters are the sibling pairs below depth R-1, and the pairwise
  // distances follow the common-ancestor formula.
  auto tree = make_graph("tree:3");
  const std::int64_t r = 4;
  FloydChart tc(tree, kHalf, {}, r);
  CHECK(tc.rays().size() == 24);
  CHECK(tc.clusters().size() == 12);
  const auto& reg = tc.ball().region();
  for (std::size_t i = 0; i < tc.rays().size(); ++i) {
    CHECK(is_valid_ray(*tree, tc.rays()[i]));
    const auto row = tc.ball().distances_from({tc.ray_anchor(i)});
    for (std::size_t j = 0; j < tc.rays().size(); ++j) {
      const Vertex& a = reg.vertices[tc.ray_anchor(i)];
      const Vertex& b = reg.vertices[tc.ray_anchor(j)];
      const auto k = static_cast<std::int64_t>(common_prefix(a, b));
      CHECK(row[tc.ray_anchor(j)] == 2 * dyadic_sum(k, r));
      CHECK((tc.cluster_of_ray(i) == tc.cluster_of_ray(j)) == (k >= r - 1));
    }
  }
  CHECK_THROWS_AS(FloydChart(line, kHalf, {0}, 4, 2, 0.0), PreconditionError);
  CHECK_THROWS_AS(FloydChart(make_graph("cycle:5"), kHalf, {0}, 4), PreconditionError);
}

TEST_CASE("clusters at R and 2R are refinement compatible") {
  for (const char* spec : {"line", "tree:3", "grid", "free:2"}) {
    auto g = make_graph(spec);
    const std::int64_t r = std::string(spec) == "free:2" ? 3 : 4;
    FloydChart coarse_chart(g, kHalf, g->root(), r);
    FloydChart fine(g, kHalf, g->root(), 2 * r);
    // Each fine cluster lands in exactly one coarse cluster.
    for (const auto& c : fine.clusters()) {
      std::vector<Vertex> pts;
      for (std::size_t ray : c.rays) pts.push_back(fine.rays()[ray].vertices[static_cast<std::size_t>(r)]);
      CHECK(coarse_chart.assignment(pts).size() == 1);
    }
  }
}

TEST_CASE("cluster assignment and compactness") {
  auto line = make_graph("line");
  FloydChart lc(line, kHalf, {0}, 6);
  const auto pos = lc.assignment([](const Vertex& x) { return x[0] > 0; });
  const auto neg = lc.assignment([](const Vertex& x) { return x[0] < 0; });
  REQUIRE(pos.size() == 1);
  REQUIRE(neg.size() == 1);
  CHECK(pos != neg);
  CHECK(lc.assignment([](const Vertex& x) { return std::abs(x[0]) < 4; }).empty());
  CHECK(lc.assignment(std::vector<Vertex>{{40}}) == pos);
  CHECK(lc.assignment(std::vector<Vertex>{{-1000}, {1000}}).size() == 2);

  const auto all = compactness_criterion(lc, standard_sets(lc));
  CHECK(all.holds);
  CHECK(all.rows[0].clusters.size() == 2);
  const auto some = compactness_criterion(
      lc, {{"positive ray", [](const Vertex& x) { return x[0] >= 0; }},
           {"finite", [](const Vertex& x) { return std::abs(x[0]) <= 2; }}});
  CHECK(some.holds);
  CHECK(some.rows[0].clusters == pos);
  CHECK_FALSE(some.rows[1].unbounded);

  // Monotone in A.
  auto tree = make_graph("tree:3");
  FloydChart tc(tree, kHalf, {}, 4);
  auto under = [](std::int64_t letter) {
    return [letter](const Vertex& x) { return !x.empty() && x[0] == letter; };
  };
  const auto a0 = tc.assignment(under(0));
  const auto a01 = tc.assignment([](const Vertex& x) { return !x.empty() && x[0] <= 1; });
  CHECK(a0.size() == 4);
  CHECK(a01.size() == 8);
  CHECK(std::includes(a01.begin(), a01.end(), a0.begin(), a0.end()));
  CHECK(compactness_criterion(tc, standard_sets(tc)).holds);

  const auto table = lc.chart_table();
  CHECK(table.clusters == 2);
  CHECK(table.points == lc.ball().region().size());
}

TEST_CASE("close sets have the same boundary") {
  auto line = make_graph("line");
  FloydChart lc(line, kHalf, {0}, 6);
  auto evens = [](const Vertex& x) { return x[0] >= 0 && x[0] % 2 == 0; };
  auto nonneg = [](const Vertex& x) { return x[0] >= 0; };
  const auto same = closesameboundary_check(lc, nonneg, nonneg, width_neighbors(*line, 0));
  CHECK(same.premise);
  CHECK(same.holds);
  CHECK(same.a_clusters == same.b_clusters);
  const auto ev = closesameboundary_check(lc, evens, nonneg, width_neighbors(*line, 1));
  CHECK(ev.premise);
  CHECK(ev.holds);
  CHECK(ev.a_clusters == ev.b_clusters);

  auto grid = make_graph("grid");
  FloydChart gc(grid, kHalf, {0, 0}, 6);
  auto diag = [](const Vertex& x) { return x[0] == x[1] && x[0] >= 0; };
  auto near = [](const Vertex& x) { return std::abs(x[0] - x[1]) <= 1 && x[0] + x[1] >= -1; };
  const auto gd = closesameboundary_check(gc, diag, near, width_neighbors(*grid, 1));
  CHECK(gd.premise);
  CHECK(gd.holds);

  // A set far from B violates the premise.
  auto neg = [](const Vertex& x) { return x[0] < 0; };
  CHECK_FALSE(closesameboundary_check(lc, neg, nonneg, width_neighbors(*line, 1)).premise);
  CHECK_FALSE(closesameboundary_check(lc, neg, nonneg, width_neighbors(*line, 1)).holds);
}

TEST_CASE("index maps") {
  CHECK(IndexMap::parse("2n")(5) == 10);
  CHECK(IndexMap::parse("n/2")(5) == 2);
  CHECK(IndexMap::parse("3n/2+1")(3) == 5);
  CHECK(IndexMap::parse("n-2")(1) == 0);
  CHECK(IndexMap::parse("n").spec() == "n");
  CHECK(IndexMap::parse("3n/2+1").spec() == "3n/2+1");
  CHECK_THROWS_AS(IndexMap::parse("n^2"), Error);
}

TEST_CASE("quasi-isometry ratio conditions") {
  const auto quarter = FloydFunction::geometric(0.25);
  const auto id = IndexMap{};
  const auto same = qi_condition_check(id, kHalf, kHalf, 1.0, 200);
  CHECK(same.extension);
  CHECK(same.homeomorphism);

  const auto twice = IndexMap{2, 1, 0};
  const auto half = IndexMap{1, 2, 0};
  const auto lit = qi_condition_check(twice, kHalf, quarter, 1.0, 200);
  CHECK(lit.forward.sup == 1.0);
  CHECK(lit.forward.analytic_ok == true);
  CHECK(lit.extension);
  // With the same α both ways the reverse ratio is 8^n.
  CHECK(lit.reverse.unbounded);
  CHECK_FALSE(lit.homeomorphism);
  CHECK(lit.reverse.sup == doctest::Approx(std::pow(8.0, 200)).epsilon(1e-9));

  const auto two_sided = qi_condition_check(twice, kHalf, quarter, 1.0, 200, half);
  CHECK(two_sided.reverse.analytic_ok == true);
  CHECK(two_sided.reverse.analytic_bound == 1.0);
  CHECK(two_sided.reverse.sup == 1.0);
  CHECK(two_sided.homeomorphism);

  const auto mixed = qi_condition_check(id, kHalf, FloydFunction::power(2.0), 100.0, 100);
  CHECK(mixed.forward.unbounded);
  CHECK_FALSE(mixed.extension);

  const auto pw = qi_condition_check(twice, FloydFunction::power(2.0), FloydFunction::power(3.0), 4.0, 500);
  CHECK(pw.forward.analytic_ok == true);
  CHECK(*pw.forward.analytic_bound == 4.0);
  CHECK(pw.forward.sup <= 4.0);

  // Swapping f1 and f2 exchanges the two ratio families when α is shared.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const auto f1 = FloydFunction::geometric(0.2 + 0.7 * static_cast<double>(rng() % 1000) / 1000.0);
    const auto f2 = FloydFunction::geometric(0.2 + 0.7 * static_cast<double>(rng() % 1000) / 1000.0);
    const IndexMap a{static_cast<std::int64_t>(1 + rng() % 3), static_cast<std::int64_t>(1 + rng() % 3),
                     static_cast<std::int64_t>(rng() % 2)};
    const double d = 1.0 + static_cast<double>(rng() % 4);
    const auto x = qi_condition_check(a, f1, f2, d, 60);
    const auto y = qi_condition_check(a, f2, f1, d, 60);
    CHECK(x.forward.ok() == y.reverse.ok());
    CHECK(x.reverse.ok() == y.forward.ok());
    CHECK(x.forward.sup == y.reverse.sup);
    // The closed form never contradicts the scan.
    if (x.forward.analytic_ok == true) CHECK(x.forward.numeric_ok);
    if (x.forward.analytic_bound) CHECK(x.forward.sup <= *x.forward.analytic_bound * (1 + 1e-9));
  }
}

TEST_CASE("induced boundary maps") {
  auto line = make_graph("line");
  const auto quarter = FloydFunction::geometric(0.25);
  for (std::int64_t r : {4, 8}) {
    FloydChart c1(line, kHalf, {0}, r);
    FloydChart c2(line, quarter, {0}, r);
    auto pi = [](const Vertex& x) { return Vertex{2 * x[0]}; };
    auto varpi = [](const Vertex& x) {
      return Vertex{x[0] >= 0 ? x[0] / 2 : -((-x[0] + 1) / 2)};
    };
    const auto rep = induced_boundary_map(c1, c2, pi, varpi);
    CHECK(rep.failure.empty());
    CHECK(rep.bijective);
    CHECK(rep.inverse_ok);
    // Ends go to ends of the same sign.
    const auto pos1 = c1.assignment(std::vector<Vertex>{{100}});
    const auto pos2 = c2.assignment(std::vector<Vertex>{{100}});
    CHECK(rep.forward[pos2[0]] == pos1[0]);

    const auto ident = induced_boundary_map(c1, c1, [](const Vertex& x) { return x; },
                                            [](const Vertex& x) { return x; });
    CHECK(ident.bijective);
    for (std::size_t c = 0; c < ident.forward.size(); ++c) CHECK(ident.forward[c] == c);
  }

  // Right multiplication by a letter moves points by 1 and fixes the ends.
  auto tree = make_graph("tree:3");
  const auto group = make_z2_free_product(3);
  FloydChart tc(tree, kHalf, {}, 4);
  auto right = [group](const Vertex& x) { return group->multiply(x, {1}); };
  const auto rep = induced_boundary_map(tc, tc, right, right);
  CHECK(rep.bijective);
  CHECK(rep.inverse_ok);
  for (std::size_t c = 0; c < rep.forward.size(); ++c) CHECK(rep.forward[c] == c);

  // Collapsing the line onto one end is caught.
  FloydChart lc(line, kHalf, {0}, 4);
  auto fold = [](const Vertex& x) { return Vertex{std::abs(x[0])}; };
  const auto bad = induced_boundary_map(lc, lc, fold, fold);
  CHECK_FALSE(bad.bijective);
}

TEST_CASE("projection of ray classes onto clusters") {
  auto line = make_graph("line");
  FloydChart lc(line, kHalf, {0}, 5);
  std::vector<std::vector<RaySegment>> classes(2);
  for (std::int64_t k = 0; k <= 8; ++k) {
    if (classes[0].empty()) classes[0].emplace_back();
    if (classes[1].empty()) classes[1].emplace_back();
    classes[0][0].vertices.push_back({k});
    classes[1][0].vertices.push_back({-k});
  }
  const auto rep = hyperbolic_to_floyd_projection(classes, lc);
  CHECK(rep.well_defined);
  CHECK(rep.surjective);
  CHECK(rep.class_image[0] != rep.class_image[1]);

  // A class holding both ends is split.
  std::vector<std::vector<RaySegment>> merged{{classes[0][0], classes[1][0]}};
  const auto split = hyperbolic_to_floyd_projection(merged, lc);
  CHECK_FALSE(split.well_defined);
  CHECK(split.failure.find("split") != std::string::npos);

  // One class only reaches one end.
  const auto partial = hyperbolic_to_floyd_projection({classes[0]}, lc);
  CHECK(partial.well_defined);
  CHECK_FALSE(partial.surjective);
  CHECK(partial.missed.size() == 1);
}

TEST_CASE("chart json") {
  auto line = make_graph("line");
  FloydChart lc(line, kHalf, {0}, 3);
  const auto j = lc.to_json();
  CHECK(j["clusters"].size() == 2);
  CHECK(j["clusters"][0]["cluster_id"] == 0);
  CHECK(j["tail"] == 0.25);
  CHECK(j["rays"][0]["vertices"].size() == 6);
  CHECK(j.dump() == FloydChart(line, kHalf, {0}, 3).to_json().dump());
}
