#include <algorithm>
#include <random>

#include "coarsekit/hyperbolic.hpp"
#include "coarsekit/suites.hpp"

namespace coarsekit::suites {

using nlohmann::json;
using namespace coarsekit::hyperbolic;

namespace {

std::vector<std::string> names(const json& list) { return list.get<std::vector<std::string>>(); }

json ray_json(const LocallyFiniteGraph& g, const RaySegment& seg) {
  json out = json::array();
  for (const auto& v : seg.vertices) out.push_back(g.label(v));
  return out;
}

void run_gromov_product(const Manifest& m, SuiteReport& r) {
  std::mt19937_64 rng(m.seed() ^ 0x67726fULL);
  for (const auto& name : names(m.plan("hyperbolic").at("delta_graphs"))) {
    auto g = m.graph(name);
    const auto pts = ball(*g, g->root(), 3).vertices;
    for (int t = 0; t < 50; ++t) {
      const auto& x = pts[rng() % pts.size()];
      const auto& y = pts[rng() % pts.size()];
      const auto& w = pts[rng() % pts.size()];
      const double xy = gromov_product(*g, x, y, w);
      const double yx = gromov_product(*g, y, x, w);
      const auto dx = static_cast<double>(g->distance(w, x));
      const auto dy = static_cast<double>(g->distance(w, y));
      const bool ok = xy == yx && xy >= 0.0 && xy <= std::min(dx, dy) && gromov_product(*g, x, x, w) == dx;
      r.check(ok, [&] { return json{{"graph", name}, {"x", g->label(x)}, {"y", g->label(y)}, {"w", g->label(w)}}; });
    }
  }
  // On the tree the product at the root is the common prefix length.
  auto tree = m.graph("tree");
  const auto words = ball(*tree, {}, 4).vertices;
  for (std::size_t i = 0; i < words.size(); i += 7) {
    for (std::size_t j = 0; j < words.size(); j += 5) {
      const auto& a = words[i];
      const auto& b = words[j];
      std::size_t k = 0;
      while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
      r.check(gromov_product(*tree, a, b, {}) == static_cast<double>(k),
              [&] { return json{{"x", tree->label(a)}, {"y", tree->label(b)}}; });
    }
  }
}

// δ by the Gromov-product form of the definition.
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

void run_delta(const Manifest& m, SuiteReport& r) {
  const auto radii = m.knob_ints("delta_radii");
  json rows = json::object();
  for (const auto& name : names(m.plan("hyperbolic").at("delta_graphs"))) {
    auto g = m.graph(name);
    json row = json::array();
    for (auto rad : radii) {
      const auto est = delta_estimate(*g, g->root(), rad);
      row.push_back({{"radius", rad}, {"delta", number(est.delta)}, {"exhaustive", est.exhaustive},
                     {"quadruples", est.quadruples}});
      if (est.exhaustive && ball(*g, g->root(), rad).size() <= 25) {
        const double want = delta_by_products(*g, ball(*g, g->root(), rad).vertices);
        r.check(std::abs(est.delta - want) <= 1e-12, [&] {
          return json{{"graph", name}, {"radius", rad}, {"delta", est.delta}, {"oracle", want}};
        });
      }
      if (!est.exhaustive) {
        // Sampling never exceeds the full scan on the same ball.
        const auto full = delta_estimate(*g, g->root(), rad, std::size_t{1} << 20);
        r.check(est.delta <= full.delta, [&] { return json{{"graph", name}, {"radius", rad}}; });
      }
    }
    rows[name] = row;
  }
  // Trees are 0-hyperbolic.
  auto tree = m.graph("tree");
  for (auto rad : radii) {
    const auto est = delta_estimate(*tree, tree->root(), rad);
    r.check(est.delta == 0.0, [&] { return json{{"graph", "tree"}, {"radius", rad}, {"delta", est.delta}}; });
  }
  r.details["estimates"] = rows;
}

void run_ray_equivalence(const Manifest& m, SuiteReport& r) {
  for (const auto& name : {"line", "tree", "grid"}) {
    auto g = m.graph(name);
    const auto rays = rays_from(*g, g->root(), 3);
    bool ok = true;
    for (std::size_t i = 0; i < rays.size() && ok; ++i) {
      ok = rays_equivalent(*g, rays[i], rays[i], 0);
      for (std::size_t j = 0; j < rays.size() && ok; ++j) {
        ok = rays_equivalent(*g, rays[i], rays[j], 1) == rays_equivalent(*g, rays[j], rays[i], 1) &&
             hausdorff(*g, rays[i].vertices, rays[j].vertices) == hausdorff(*g, rays[j].vertices, rays[i].vertices);
      }
    }
    r.check(ok, [&] { return json{{"graph", name}, {"check", "reflexive and symmetric"}}; });
  }
  // On the tree two rays of length R+1 are 1-close iff they agree up to depth R.
  auto tree = m.graph("tree");
  for (std::int64_t rad : {2, 3, 4}) {
    const auto rays = rays_from(*tree, {}, static_cast<std::size_t>(rad + 1));
    const auto classes = ray_classes(*tree, rays, 1);
    bool ok = classes.size() == static_cast<std::size_t>(3 * (1 << (rad - 1)));
    for (const auto& c : classes) {
      for (auto i : c) {
        ok = ok && rays[i].vertices[static_cast<std::size_t>(rad)] == rays[c[0]].vertices[static_cast<std::size_t>(rad)];
      }
    }
    r.check(ok, [&] { return json{{"graph", "tree"}, {"length", rad + 1}, {"classes", classes.size()}}; });
  }
  // Line: two classes, one per end.
  auto line = m.graph("line");
  const auto lc = ray_classes(*line, rays_from(*line, {0}, 6), 1);
  r.check(lc.size() == 2, [&] { return json{{"graph", "line"}, {"classes", lc.size()}}; });
}

// Rays long enough to leave the chart region on every side from p.
std::size_t ray_length(const Manifest& m, const floyd::FloydChart& chart, const Vertex& p) {
  const auto d = chart.graph()->distance(chart.basepoint(), p);
  return static_cast<std::size_t>(2 * d + chart.radius() + m.knob_int("ray_margin"));
}

void run_accessibility(const Manifest& m, SuiteReport& r) {
  const auto& plan = m.plan("hyperbolic");
  json rows = json::array();
  for (const auto& name : names(plan.at("charts"))) {
    const auto chart = m.build_chart(name);
    const auto& g = *chart.graph();
    for (const auto& label : names(plan.at("basepoints").at(name))) {
      const Vertex p = g.parse(label);
      const auto len = ray_length(m, chart, p);
      const auto rep = accessibility_witnesses(chart, p, len);
      rows.push_back({{"chart", name}, {"basepoint", label}, {"length", len}, {"rays", rep.rays},
                      {"clusters", chart.clusters().size()}});
      r.check(rep.ok, [&] {
        return json{{"chart", name}, {"basepoint", label}, {"length", len}, {"failure", rep.failure}};
      });
      // Every ray from p converges: its tail lands in a single cluster.
      const auto rays = rays_from(g, p, len, std::size_t{1} << 20);
      for (std::size_t i = 0; i < rays.size(); ++i) {
        const auto tail = ray_tail(g, rays[i], chart.basepoint(), chart.radius());
        if (tail.vertices.empty()) continue;
        const auto as = chart.assignment(tail.vertices);
        r.check(as.size() == 1, [&] {
          return json{{"chart", name}, {"basepoint", label}, {"ray", ray_json(g, rays[i])}, {"clusters", as}};
        });
      }
    }
  }
  r.details["charts"] = rows;
}

void run_basepoint_change(const Manifest& m, SuiteReport& r) {
  const auto& plan = m.plan("hyperbolic");
  for (const auto& name : names(plan.at("charts"))) {
    const auto chart = m.build_chart(name);
    const auto& g = *chart.graph();
    const auto labels = names(plan.at("basepoints").at(name));
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        const Vertex p = g.parse(labels[i]);
        const Vertex q = g.parse(labels[j]);
        const auto len = std::max(ray_length(m, chart, p), ray_length(m, chart, q));
        const auto c = basepoint_change_check(chart, p, q, len, 1);
        r.check(c.agree && c.from_p.surjective && c.from_q.surjective && c.from_p.well_defined &&
                    c.from_q.well_defined,
                [&] {
                  return json{{"chart", name}, {"p", labels[i]}, {"q", labels[j]}, {"length", len},
                              {"from_p", c.from_p.failure}, {"from_q", c.from_q.failure}};
                });
      }
    }
  }
}

void run_projection(const Manifest& m, SuiteReport& r) {
  const auto& plan = m.plan("hyperbolic");
  json rows = json::array();
  for (const auto& name : names(plan.at("charts"))) {
    const auto chart = m.build_chart(name);
    const auto& g = *chart.graph();
    for (const auto& label : names(plan.at("basepoints").at(name))) {
      const Vertex p = g.parse(label);
      const auto len = ray_length(m, chart, p);
      const auto classes = class_tails(chart, p, len, 1);
      const auto proj = floyd::hyperbolic_to_floyd_projection(classes, chart);
      rows.push_back({{"chart", name}, {"basepoint", label}, {"classes", classes.size()},
                      {"missed", proj.missed}});
      r.check(proj.well_defined && proj.surjective, [&] {
        return json{{"chart", name}, {"basepoint", label}, {"failure", proj.failure}, {"missed", proj.missed}};
      });
    }
  }
  r.details["projections"] = rows;
}

void run_transport(const Manifest& m, SuiteReport& r) {
  std::mt19937_64 rng(m.seed() ^ 0x7472616eULL);
  const auto count = static_cast<std::size_t>(m.knob_int("rays"));
  struct Case {
    std::string name;
    GraphRef source;
    GraphRef target;
    floyd::VertexFunction f;
    std::int64_t bound;
  };
  auto line = m.graph("line");
  auto grid = m.graph("grid");
  auto tree = m.graph("tree");
  const auto t3 = m.group("T3");
  const std::vector<Case> cases{
      {"line doubling", line, line, [](const Vertex& x) { return Vertex{2 * x[0]}; }, 1},
      {"line to grid staircase", line, grid, [](const Vertex& x) { return Vertex{(x[0] + 1) / 2, x[0] / 2}; }, 1},
      {"line to grid diagonal", line, grid, [](const Vertex& x) { return Vertex{x[0], x[0]}; }, 1},
      {"tree right multiplication", tree, tree, [t3](const Vertex& x) { return t3->multiply(x, {1}); }, 1},
  };
  json rows = json::array();
  for (const auto& c : cases) {
    const auto pts = ball(*c.source, c.source->root(), 3).vertices;
    std::int64_t worst_tube = 0;
    std::int64_t worst_h = 0;
    for (std::size_t t = 0; t < count; ++t) {
      const auto& p = pts[rng() % pts.size()];
      const auto rays = rays_from(*c.source, p, 6);
      const auto& ray = rays[rng() % rays.size()];
      const auto tr = qi_ray_transport(*c.target, c.f, ray);
      worst_tube = std::max(worst_tube, tr.tube_radius);
      worst_h = std::max(worst_h, tr.hausdorff);
      const bool ends = tr.geodesic.vertices.front() == c.f(ray.vertices.front()) &&
                        tr.geodesic.vertices.back() == c.f(ray.vertices.back());
      r.check(is_valid_ray(*c.target, tr.geodesic) && ends && tr.tube_radius <= c.bound && tr.hausdorff <= c.bound,
              [&] {
                return json{{"map", c.name}, {"ray", ray_json(*c.source, ray)}, {"tube_radius", tr.tube_radius},
                            {"hausdorff", tr.hausdorff}, {"bound", c.bound}};
              });
    }
    rows.push_back({{"map", c.name}, {"max_tube_radius", worst_tube}, {"max_hausdorff", worst_h}});
  }
  r.details["uniform_bounds"] = rows;
}

}  // namespace

std::vector<Suite> hyperbolic_suites() {
  return {
      {"hyperbolic.gromov-product", "hyperbolic", "Gromov product identities", run_gromov_product},
      {"hyperbolic.delta", "hyperbolic", "four-point delta against the product definition", run_delta},
      {"hyperbolic.ray-equivalence", "hyperbolic", "ray classes under bounded Hausdorff distance",
       run_ray_equivalence},
      {"hyperbolic.accessibility", "hyperbolic", "every cluster is the limit of a ray from each basepoint",
       run_accessibility},
      {"hyperbolic.basepoint-change", "hyperbolic", "cluster images do not depend on the basepoint",
       run_basepoint_change},
      {"hyperbolic.projection", "hyperbolic", "ray classes project onto the Floyd clusters", run_projection},
      {"hyperbolic.transport", "hyperbolic", "quasi-isometries carry rays into uniform tubes", run_transport},
  };
}

}  // namespace coarsekit::suites
