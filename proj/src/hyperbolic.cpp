#include "coarsekit/hyperbolic.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "coarsekit/error.hpp"

namespace coarsekit::hyperbolic {

double gromov_product(const LocallyFiniteGraph& g, const Vertex& x, const Vertex& y, const Vertex& w) {
  return 0.5 * static_cast<double>(g.distance(x, w) + g.distance(y, w) - g.distance(x, y));
}

DeltaEstimate delta_estimate(const LocallyFiniteGraph& g, const Vertex& center, std::int64_t radius,
                             std::size_t exhaustive_limit, std::size_t samples, std::uint64_t seed) {
  const Region reg = ball(g, center, radius);
  const std::size_t n = reg.size();
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) d[i][j] = d[j][i] = g.distance(reg.vertices[i], reg.vertices[j]);
  }
  DeltaEstimate out;
  std::int64_t best = -1;
  auto visit = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t e) {
    ++out.quadruples;
    std::array<std::int64_t, 3> s{d[a][b] + d[c][e], d[a][c] + d[b][e], d[a][e] + d[b][c]};
    std::sort(s.begin(), s.end());
    const std::int64_t gap = s[2] - s[1];
    if (gap > best) {
      best = gap;
      out.witness = {reg.vertices[a], reg.vertices[b], reg.vertices[c], reg.vertices[e]};
    }
  };
  if (n <= exhaustive_limit) {
    out.exhaustive = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b)
        for (std::size_t c = b; c < n; ++c)
          for (std::size_t e = c; e < n; ++e) visit(a, b, c, e);
  } else {
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < samples; ++t) visit(rng() % n, rng() % n, rng() % n, rng() % n);
  }
  out.delta = 0.5 * static_cast<double>(std::max<std::int64_t>(best, 0));
  return out;
}

std::vector<RaySegment> rays_from(const LocallyFiniteGraph& g, const Vertex& p, std::size_t length,
                                  std::size_t budget) {
  std::vector<RaySegment> out;
  std::vector<Vertex> path{p};
  std::function<void()> dfs = [&]() {
    if (path.size() == length + 1) {
      if (out.size() >= budget) throw BudgetError("ray enumeration exceeds the budget");
      out.push_back({path, true});
      return;
    }
    const auto k = static_cast<std::int64_t>(path.size());
    auto next = g.neighbors(path.back());
    std::sort(next.begin(), next.end());
    for (const auto& w : next) {
      if (g.distance(p, w) != k) continue;
      path.push_back(w);
      dfs();
      path.pop_back();
    }
  };
  dfs();
  return out;
}

std::int64_t hausdorff(const LocallyFiniteGraph& g, const std::vector<Vertex>& a,
                       const std::vector<Vertex>& b) {
  if (a.empty() || b.empty()) throw PreconditionError("Hausdorff distance of an empty set");
  auto one_side = [&](const std::vector<Vertex>& from, const std::vector<Vertex>& to) {
    std::int64_t worst = 0;
    for (const auto& x : from) {
      std::int64_t near = g.distance(x, to.front());
      for (const auto& y : to) near = std::min(near, g.distance(x, y));
      worst = std::max(worst, near);
    }
    return worst;
  };
  return std::max(one_side(a, b), one_side(b, a));
}

bool rays_equivalent(const LocallyFiniteGraph& g, const RaySegment& a, const RaySegment& b,
                     std::int64_t bound) {
  return hausdorff(g, a.vertices, b.vertices) <= bound;
}

std::vector<std::vector<std::size_t>> ray_classes(const LocallyFiniteGraph& g,
                                                  const std::vector<RaySegment>& rays,
                                                  std::int64_t bound) {
  std::vector<std::size_t> parent(rays.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rays.size(); ++j) {
      if (find(i) == find(j)) continue;
      if (rays_equivalent(g, rays[i], rays[j], bound)) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> groups(rays.size());
  for (std::size_t i = 0; i < rays.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& c : groups) {
    if (!c.empty()) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

RaySegment ray_tail(const LocallyFiniteGraph& g, const RaySegment& seg, const Vertex& v,
                    std::int64_t r) {
  std::size_t start = seg.vertices.size();
  while (start > 0 && g.distance(v, seg.vertices[start - 1]) >= r) --start;
  return {std::vector<Vertex>(seg.vertices.begin() + static_cast<std::ptrdiff_t>(start),
                              seg.vertices.end()),
          seg.geodesic};
}

std::vector<std::vector<RaySegment>> class_tails(const floyd::FloydChart& chart, const Vertex& p,
                                                 std::size_t length, std::int64_t bound) {
  const auto& g = *chart.graph();
  const auto rays = rays_from(g, p, length);
  std::vector<std::vector<RaySegment>> out;
  for (const auto& cls : ray_classes(g, rays, bound)) {
    std::vector<RaySegment> tails;
    for (auto i : cls) tails.push_back(ray_tail(g, rays[i], chart.basepoint(), chart.radius()));
    out.push_back(std::move(tails));
  }
  return out;
}

AccessibilityReport accessibility_witnesses(const floyd::FloydChart& chart, const Vertex& p,
                                            std::size_t length) {
  const auto& g = *chart.graph();
  const auto rays = rays_from(g, p, length);
  AccessibilityReport out;
  out.rays = rays.size();
  out.witness.assign(chart.clusters().size(), std::nullopt);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const auto tail = ray_tail(g, rays[i], chart.basepoint(), chart.radius());
    if (tail.vertices.empty()) continue;
    const auto assigned = chart.assignment(tail.vertices);
    if (assigned.size() == 1 && !out.witness[assigned[0]]) out.witness[assigned[0]] = i;
  }
  out.ok = true;
  for (std::size_t c = 0; c < out.witness.size(); ++c) {
    if (!out.witness[c]) {
      out.ok = false;
      if (out.failure.empty()) {
        out.failure = "cluster " + std::to_string(c) + " has no ray tail from " + g.label(p);
      }
    }
  }
  return out;
}

BasepointChange basepoint_change_check(const floyd::FloydChart& chart, const Vertex& p,
                                       const Vertex& q, std::size_t length, std::int64_t bound) {
  BasepointChange out;
  out.from_p = floyd::hyperbolic_to_floyd_projection(class_tails(chart, p, length, bound), chart);
  out.from_q = floyd::hyperbolic_to_floyd_projection(class_tails(chart, q, length, bound), chart);
  auto image = [](const floyd::ProjectionReport& r) {
    std::set<std::size_t> s;
    for (const auto& c : r.class_image) {
      if (c) s.insert(*c);
    }
    return s;
  };
  out.agree = out.from_p.well_defined && out.from_q.well_defined &&
              image(out.from_p) == image(out.from_q);
  return out;
}

Transport qi_ray_transport(const LocallyFiniteGraph& y, const floyd::VertexFunction& f,
                           const RaySegment& ray, std::int64_t max_tube) {
  if (ray.vertices.empty()) throw PreconditionError("empty ray");
  std::vector<Vertex> image;
  for (const auto& x : ray.vertices) image.push_back(f(x));
  const Vertex& a = image.front();
  const Vertex& b = image.back();
  const std::int64_t total = y.distance(a, b);
  for (std::int64_t t = 0; t <= max_tube; ++t) {
    const Region tb = tube(y, image, t);
    // Layered search over tube vertices on some a-b geodesic.
    std::vector<std::int64_t> da(tb.size()), db(tb.size());
    for (std::size_t i = 0; i < tb.size(); ++i) {
      da[i] = y.distance(a, tb.vertices[i]);
      db[i] = y.distance(tb.vertices[i], b);
    }
    std::vector<std::optional<std::size_t>> parent(tb.size());
    std::vector<bool> reached(tb.size(), false);
    const std::size_t ia = *tb.find(a);
    const std::size_t ib = *tb.find(b);
    reached[ia] = true;
    std::vector<std::size_t> layer{ia};
    for (std::int64_t k = 0; k < total && !layer.empty(); ++k) {
      std::vector<std::size_t> next;
      for (auto u : layer) {
        for (auto w : tb.adjacency[u]) {
          if (da[w] != k + 1 || da[w] + db[w] != total) continue;
          if (!reached[w] || tb.rank[u] < tb.rank[*parent[w]]) parent[w] = u;
          if (!reached[w]) {
            reached[w] = true;
            next.push_back(w);
          }
        }
      }
      layer = std::move(next);
    }
    if (!reached[ib]) continue;
    Transport out;
    out.tube_radius = t;
    std::vector<Vertex> path{b};
    for (std::size_t cur = ib; cur != ia; cur = *parent[cur]) path.push_back(tb.vertices[*parent[cur]]);
    std::reverse(path.begin(), path.end());
    out.geodesic = {std::move(path), true};
    out.hausdorff = hausdorff(y, out.geodesic.vertices, image);
    return out;
  }
  throw BudgetError("no geodesic within tube radius " + std::to_string(max_tube));
}

}  // namespace coarsekit::hyperbolic
