#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "coarsekit/action.hpp"
#include "coarsekit/floyd.hpp"
#include "coarsekit/suites.hpp"

namespace coarsekit::suites {

using nlohmann::json;
using namespace coarsekit::floyd;

namespace {

using Adjacency = std::vector<std::vector<std::size_t>>;

Adjacency random_connected(std::size_t n, std::size_t extra, std::mt19937_64& rng) {
  Adjacency adj(n);
  auto link = [&](std::size_t a, std::size_t b) {
    if (a == b || std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end()) return;
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (std::size_t i = 1; i < n; ++i) link(i, rng() % i);
  for (std::size_t k = 0; k < extra; ++k) link(rng() % n, rng() % n);
  return adj;
}

// Minimum of the rescaled length over every simple x-y path.
double simple_path_minimum(const Adjacency& adj, const FloydFunction& f, std::size_t v, std::size_t x,
                           std::size_t y) {
  std::vector<std::int64_t> d(adj.size(), -1);
  d[v] = 0;
  std::deque<std::size_t> q{v};
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (auto w : adj[u]) {
      if (d[w] < 0) d[w] = d[u] + 1, q.push_back(w);
    }
  }
  if (x == y) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> on(adj.size(), false);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t u, double acc) {
    if (acc >= best) return;
    if (u == y) {
      best = acc;
      return;
    }
    on[u] = true;
    for (auto w : adj[u]) {
      if (!on[w]) dfs(w, acc + f(std::min(d[u], d[w])));
    }
    on[u] = false;
  };
  dfs(x, 0.0);
  return best;
}

json adjacency_json(const Adjacency& adj) { return adj; }

void run_oracle(const Manifest& m, SuiteReport& r) {
  const auto graphs = m.knob_int("random_graphs");
  const auto max_n = static_cast<std::size_t>(m.knob_int("graph_vertices"));
  std::vector<FloydFunction> fs;
  for (const auto& name : m.plan("oracle").at("functions")) fs.push_back(m.function(name.get<std::string>()));
  std::mt19937_64 rng(m.seed() ^ 0x6f726163ULL);
  double worst = 0.0;
  for (std::int64_t t = 0; t < graphs; ++t) {
    const std::size_t n = 2 + rng() % (max_n - 1);
    const auto adj = random_connected(n, rng() % 6, rng);
    const std::size_t v = rng() % n;
    FiniteGraph g(adj, "random");
    for (const auto& f : fs) {
      FloydBall fb(g, f, {static_cast<std::int64_t>(v)}, static_cast<std::int64_t>(n));
      double err = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          const double want = simple_path_minimum(adj, f, v, x, y);
          const double got = fb.distance({static_cast<std::int64_t>(x)}, {static_cast<std::int64_t>(y)});
          err = std::max(err, std::abs(got - want));
        }
      }
      worst = std::max(worst, err);
      r.check(err <= 1e-12, [&] {
        return json{{"adjacency", adjacency_json(adj)}, {"basepoint", v}, {"function", f.spec()},
                    {"error", err}};
      });
    }
  }
  r.details["max_error"] = number(worst);
}

void run_metric(const Manifest& m, SuiteReport& r) {
  const auto f = m.function("geom");
  // Fixed value from the line: δ_0(1, 2) = f(1).
  const auto d12 = floyd_distance(*m.graph("line"), f, {0}, {1}, {2}, 8);
  r.check(d12.value == f(1) && d12.tail == f.tail(8), [&] {
    return json{{"value", d12.value}, {"tail", d12.tail}};
  });
  r.details["line_1_2"] = {{"value", number(d12.value)}, {"tail", number(d12.tail)}};
  for (const auto& name : {"line", "grid", "tree"}) {
    auto g = m.graph(name);
    const FloydBall ball(*g, f, g->root(), 3);
    const auto tab = ball.table();
    const std::size_t n = tab.size();
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      ok = tab[i][i] == 0.0;
      for (std::size_t j = 0; j < n && ok; ++j) {
        ok = std::abs(tab[i][j] - tab[j][i]) <= 1e-15 && (i == j || tab[i][j] > 0.0);
        for (std::size_t k = 0; k < n && ok; ++k) ok = tab[i][k] <= tab[i][j] + tab[j][k] + 1e-15;
      }
    }
    r.check(ok, [&] { return json{{"graph", name}, {"radius", 3}}; });
    // Larger truncations only shorten distances.
    const auto& reg = ball.region();
    const Vertex x = reg.vertices[reg.size() / 2];
    const Vertex y = reg.vertices.back();
    double last = std::numeric_limits<double>::infinity();
    bool mono = true;
    for (std::int64_t rad = 3; rad <= 7; ++rad) {
      const double d = floyd_distance(*g, f, g->root(), x, y, rad).value;
      mono = mono && d <= last;
      last = d;
    }
    r.check(mono, [&] { return json{{"graph", name}, {"x", x}, {"y", y}}; });
  }
}

void run_karlsson(const Manifest& m, SuiteReport& r) {
  const auto& plan = m.plan("karlsson");
  const auto f = m.function(plan.at("function").get<std::string>());
  const auto radii = m.knob_ints("karlsson_radii");
  json rows = json::object();
  for (const auto& gname : plan.at("graphs")) {
    const auto name = gname.get<std::string>();
    auto g = m.graph(name);
    double last = std::numeric_limits<double>::infinity();
    json row = json::array();
    for (auto rad : radii) {
      const auto k = karlsson_defect(*g, f, g->root(), rad, GeodesicSample{48, 2, 8, m.seed()});
      const bool ok = k.defect <= k.bound && k.defect < last;
      row.push_back({{"R", rad}, {"defect", number(k.defect)}, {"bound", number(k.bound)}, {"samples", k.samples}});
      r.check(ok, [&] {
        return json{{"graph", name}, {"R", rad}, {"defect", k.defect}, {"bound", k.bound}, {"previous", last}};
      });
      last = k.defect;
    }
    rows[name] = row;
  }
  r.details["defects"] = rows;
}

void run_perspectivity(const Manifest& m, SuiteReport& r) {
  const auto& plan = m.plan("perspectivity");
  const auto f = m.function(plan.at("function").get<std::string>());
  const auto control = m.function(plan.at("control").get<std::string>());
  const auto radii = m.knob_ints("perspectivity_radii");
  const auto& graphs = plan.at("graphs");
  const auto& sats = plan.at("saturations");
  json rows = json::object();
  auto series = [&](const std::string& label, const LocallyFiniteGraph& g, const NeighborRule& rule) {
    double last = std::numeric_limits<double>::infinity();
    json row = json::array();
    for (auto rad : radii) {
      const auto d = perspectivity_defect(g, f, g.root(), rule, rad);
      row.push_back(number(d.defect));
      const bool ok = d.defect <= last;
      r.check(ok, [&] { return json{{"entourage", label}, {"R", rad}, {"defect", d.defect}, {"previous", last}}; });
      last = d.defect;
    }
    r.check(last < 1e-2, [&] { return json{{"entourage", label}, {"final_defect", last}}; });
    const auto c = perspectivity_defect(g, control, g.root(), rule, radii.back());
    r.check(c.defect > 0.5, [&] { return json{{"entourage", label}, {"control_defect", c.defect}}; });
    row.push_back({{"control", number(c.defect)}});
    rows[label] = row;
  };
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto name = graphs[i].get<std::string>();
    auto g = m.graph(name);
    series(name + "/width-1", *g, width_neighbors(*g, 1));
    if (i < sats.size()) {
      const auto a = m.action(sats[i].get<std::string>());
      const auto k = ball(a.graph(), a.graph().root(), 1).vertices;
      series(name + "/" + a.name() + "/sat-ball-1", a.graph(), action::Saturation(a, k).rule());
    }
  }
  r.details["defects"] = rows;
}

void run_cluster_stability(const Manifest& m, SuiteReport& r) {
  const auto& plan = m.plan("clusters");
  const auto f = m.function(plan.at("function").get<std::string>());
  const auto radii = m.knob_ints("chart_radii");
  json rows = json::object();
  for (const auto& gname : plan.at("graphs")) {
    const auto name = gname.get<std::string>();
    auto g = m.graph(name);
    json row = json::array();
    for (auto rad : radii) {
      const FloydChart coarse_chart(g, f, g->root(), rad);
      const FloydChart fine(g, f, g->root(), 2 * rad);
      // Each fine cluster lands in exactly one coarse cluster, and every
      // coarse cluster is hit.
      std::vector<bool> hit(coarse_chart.clusters().size(), false);
      bool ok = true;
      for (const auto& c : fine.clusters()) {
        std::vector<Vertex> pts;
        for (std::size_t ray : c.rays) pts.push_back(fine.rays()[ray].vertices[static_cast<std::size_t>(rad)]);
        const auto as = coarse_chart.assignment(pts);
        ok = ok && as.size() == 1;
        for (auto a : as) hit[a] = true;
      }
      for (bool h : hit) ok = ok && h;
      row.push_back({{"R", rad}, {"clusters", coarse_chart.clusters().size()},
                     {"clusters_2R", fine.clusters().size()}});
      r.check(ok, [&] { return json{{"graph", name}, {"R", rad}}; });
    }
    rows[name] = row;
  }
  r.details["charts"] = rows;
}

void run_compactness(const Manifest& m, SuiteReport& r) {
  for (const auto& name : {"line", "grid", "tree", "free2"}) {
    const auto chart = m.build_chart(name);
    const auto rep = compactness_criterion(chart, standard_sets(chart));
    r.check(rep.holds, [&] { return json{{"chart", name}}; });
    // Monotone in A: supersets never lose clusters.
    const auto small = chart.assignment([](const Vertex& x) { return !x.empty() && x[0] >= 0; });
    const auto all = chart.assignment([](const Vertex&) { return true; });
    r.check(std::includes(all.begin(), all.end(), small.begin(), small.end()),
            [&] { return json{{"chart", name}, {"check", "monotone"}}; });
  }
}

void run_close_same_boundary(const Manifest& m, SuiteReport& r) {
  const auto f = m.function("geom");
  auto line = m.graph("line");
  auto grid = m.graph("grid");
  const FloydChart lc(line, f, {0}, 6);
  const FloydChart gc(grid, f, {0, 0}, 6);
  struct Case {
    std::string name;
    const FloydChart* chart;
    std::function<bool(const Vertex&)> a, b;
    NeighborRule e;
    bool premise;
  };
  const std::vector<Case> cases{
      {"line: nonneg vs nonneg", &lc, [](const Vertex& x) { return x[0] >= 0; },
       [](const Vertex& x) { return x[0] >= 0; }, width_neighbors(*line, 0), true},
      {"line: evens vs nonneg", &lc, [](const Vertex& x) { return x[0] >= 0 && x[0] % 2 == 0; },
       [](const Vertex& x) { return x[0] >= 0; }, width_neighbors(*line, 1), true},
      {"line: multiples of 3 vs nonneg", &lc, [](const Vertex& x) { return x[0] >= 0 && x[0] % 3 == 0; },
       [](const Vertex& x) { return x[0] >= 0; }, width_neighbors(*line, 2), true},
      {"grid: diagonal vs strip", &gc, [](const Vertex& x) { return x[0] == x[1] && x[0] >= 0; },
       [](const Vertex& x) { return std::abs(x[0] - x[1]) <= 1 && x[0] + x[1] >= -1; },
       width_neighbors(*grid, 1), true},
      {"line: negative vs nonneg", &lc, [](const Vertex& x) { return x[0] < 0; },
       [](const Vertex& x) { return x[0] >= 0; }, width_neighbors(*line, 1), false},
  };
  for (const auto& c : cases) {
    const auto rep = closesameboundary_check(*c.chart, c.a, c.b, c.e);
    const bool ok = rep.premise == c.premise && (!rep.premise || (rep.holds && rep.a_clusters == rep.b_clusters));
    r.check(ok, [&] {
      return json{{"case", c.name}, {"premise", rep.premise}, {"holds", rep.holds},
                  {"a_clusters", rep.a_clusters}, {"b_clusters", rep.b_clusters}};
    });
  }
}

json ratio_json(const RatioCheck& c) {
  json j{{"sup", number(c.sup)}, {"argmax", c.argmax}, {"numeric_ok", c.numeric_ok}, {"unbounded", c.unbounded}};
  j["analytic_ok"] = c.analytic_ok ? json(*c.analytic_ok) : json(nullptr);
  j["analytic_bound"] = c.analytic_bound ? number(*c.analytic_bound) : json(nullptr);
  return j;
}

void run_qi_extension(const Manifest& m, SuiteReport& r) {
  const auto& plan = m.plan("qi");
  const auto f1 = m.function(plan.at("f1").get<std::string>());
  const auto f2 = m.function(plan.at("f2").get<std::string>());
  const auto alpha = IndexMap::parse(plan.at("alpha").get<std::string>());
  const auto beta = IndexMap::parse(plan.at("beta").get<std::string>());
  const double d = plan.at("D").get<double>();
  const auto n_max = m.knob_int("qi_nmax");
  const auto rep = qi_condition_check(alpha, f1, f2, d, n_max, beta);
  r.check(rep.forward.analytic_ok == true && rep.reverse.analytic_ok == true && rep.extension &&
              rep.homeomorphism,
          [&] { return json{{"forward", ratio_json(rep.forward)}, {"reverse", ratio_json(rep.reverse)}}; });
  r.details["forward"] = ratio_json(rep.forward);
  r.details["reverse"] = ratio_json(rep.reverse);
  // The closed form agrees with the scan, and swapping f1, f2 exchanges the
  // two ratio families.
  std::mt19937_64 rng(m.seed() ^ 0x7169ULL);
  for (int t = 0; t < 40; ++t) {
    const auto g1 = FloydFunction::geometric(0.2 + 0.7 * static_cast<double>(rng() % 1000) / 1000.0);
    const auto g2 = FloydFunction::geometric(0.2 + 0.7 * static_cast<double>(rng() % 1000) / 1000.0);
    const IndexMap a{static_cast<std::int64_t>(1 + rng() % 3), static_cast<std::int64_t>(1 + rng() % 3),
                     static_cast<std::int64_t>(rng() % 2)};
    const double dd = 1.0 + static_cast<double>(rng() % 4);
    const auto x = qi_condition_check(a, g1, g2, dd, n_max);
    const auto y = qi_condition_check(a, g2, g1, dd, n_max);
    bool ok = x.forward.ok() == y.reverse.ok() && x.reverse.ok() == y.forward.ok() && x.forward.sup == y.reverse.sup;
    if (x.forward.analytic_ok == true) ok = ok && x.forward.numeric_ok;
    if (x.forward.analytic_bound) ok = ok && x.forward.sup <= *x.forward.analytic_bound * (1 + 1e-9);
    r.check(ok, [&] {
      return json{{"f1", g1.spec()}, {"f2", g2.spec()}, {"alpha", a.spec()}, {"D", dd},
                  {"forward", ratio_json(x.forward)}, {"reverse", ratio_json(x.reverse)}};
    });
  }
}

// Odd extension of an index map to the line.
VertexFunction line_map(const IndexMap& map) {
  return [map](const Vertex& x) { return Vertex{x[0] >= 0 ? map(x[0]) : -map(-x[0])}; };
}

void run_induced_map(const Manifest& m, SuiteReport& r) {
  const auto& plan = m.plan("boundary_map");
  const auto f1 = m.function(plan.at("f1").get<std::string>());
  const auto f2 = m.function(plan.at("f2").get<std::string>());
  const auto pi = line_map(IndexMap::parse(plan.at("pi").get<std::string>()));
  const auto varpi = line_map(IndexMap::parse(plan.at("varpi").get<std::string>()));
  auto line = m.graph("line");
  json rows = json::array();
  for (auto rad : m.knob_ints("chart_radii")) {
    const FloydChart c1(line, f1, {0}, 2 * rad);
    const FloydChart c2(line, f2, {0}, 2 * rad);
    const auto rep = induced_boundary_map(c1, c2, pi, varpi);
    const auto pos1 = c1.assignment(std::vector<Vertex>{{1000}});
    const auto pos2 = c2.assignment(std::vector<Vertex>{{1000}});
    const bool ends = pos1.size() == 1 && pos2.size() == 1 && rep.forward.at(pos2[0]) == pos1[0];
    r.check(rep.failure.empty() && rep.bijective && rep.inverse_ok && ends, [&] {
      return json{{"R", 2 * rad}, {"failure", rep.failure}, {"bijective", rep.bijective},
                  {"inverse_ok", rep.inverse_ok}};
    });
    rows.push_back({{"R", 2 * rad}, {"clusters", c1.clusters().size()}, {"bijective", rep.bijective}});
  }
  // Right multiplication by a generator moves points by 1 and fixes every
  // tree end.
  auto tree = m.graph("tree");
  const auto group = m.group("T3");
  const auto tc = m.build_chart("tree");
  auto right = [group](const Vertex& x) { return group->multiply(x, {1}); };
  const auto rep = induced_boundary_map(tc, tc, right, right);
  bool fixed = rep.bijective && rep.inverse_ok;
  for (std::size_t c = 0; c < rep.forward.size(); ++c) fixed = fixed && rep.forward[c] == c;
  r.check(fixed, [&] { return json{{"map", "tree right multiplication"}, {"failure", rep.failure}}; });
  // Folding the line onto one end is not a bijection.
  const auto lc = m.build_chart("line");
  auto fold = [](const Vertex& x) { return Vertex{std::abs(x[0])}; };
  r.check(!induced_boundary_map(lc, lc, fold, fold).bijective, [] { return json{{"map", "fold"}}; });
  r.details["line"] = rows;
}

}  // namespace

std::vector<Suite> floyd_suites() {
  return {
      {"floyd.oracle", "floyd", "truncated Floyd distance equals simple-path minimization", run_oracle},
      {"floyd.metric", "floyd", "Floyd ball distances form a metric shrinking with the radius", run_metric},
      {"floyd.karlsson", "floyd", "geodesics outside ball(v, R) are small and shrink with R", run_karlsson},
      {"floyd.perspectivity", "floyd", "width and saturation entourages decay; the flat control does not",
       run_perspectivity},
      {"floyd.cluster-stability", "floyd", "clusters at 2R refine clusters at R", run_cluster_stability},
      {"floyd.compactness", "floyd", "unbounded sets reach the boundary", run_compactness},
      {"floyd.close-same-boundary", "floyd", "close sets have the same boundary clusters", run_close_same_boundary},
      {"floyd.qi-extension", "floyd", "ratio conditions for extending quasi-isometries", run_qi_extension},
      {"floyd.induced-map", "floyd", "quasi-isometries induce boundary bijections", run_induced_map},
  };
}

}  // namespace coarsekit::suites
