#include "coarsekit/floyd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

namespace coarsekit::floyd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(15) << x;
  return os.str();
}

nlohmann::json number6(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::round(x * 1e6) / 1e6;
}

bool within(double value, double threshold) {
  return value <= threshold * (1.0 + 1e-12) + 1e-15;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// FloydFunction

FloydFunction FloydFunction::geometric(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw PreconditionError("geometric Floyd function needs 0 < λ < 1");
  FloydFunction f;
  f.kind_ = Kind::kGeometric;
  f.lambda_ = lambda;
  f.spec_ = "geom:" + fmt(lambda);
  return f;
}

FloydFunction FloydFunction::power(double a) {
  if (!(a > 1.0)) throw PreconditionError("power Floyd function needs a > 1");
  FloydFunction f;
  f.kind_ = Kind::kPower;
  f.a_ = a;
  f.spec_ = "power:" + fmt(a);
  return f;
}

FloydFunction FloydFunction::table(std::vector<double> values, double ratio) {
  if (values.empty()) throw PreconditionError("table Floyd function needs values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw PreconditionError("table values must be positive");
    if (i && values[i] > values[i - 1]) throw PreconditionError("table values must not increase");
  }
  if (!(ratio > 0.0 && ratio < 1.0)) throw PreconditionError("table tail ratio must be in (0,1)");
  FloydFunction f;
  f.kind_ = Kind::kTable;
  f.lambda_ = ratio;
  f.spec_ = "table:";
  for (std::size_t i = 0; i < values.size(); ++i) f.spec_ += (i ? "," : "") + fmt(values[i]);
  f.spec_ += "@" + fmt(ratio);
  f.table_ = std::move(values);
  return f;
}

FloydFunction FloydFunction::constant(double c) {
  if (!(c > 0.0)) throw PreconditionError("constant control needs c > 0");
  FloydFunction f;
  f.kind_ = Kind::kConstant;
  f.c_ = c;
  f.spec_ = "const:" + fmt(c);
  return f;
}

FloydFunction FloydFunction::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error("Floyd function spec '" + spec + "' lacks ':'");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  try {
    if (kind == "geom") return geometric(std::stod(arg));
    if (kind == "power") return power(std::stod(arg));
    if (kind == "const") return constant(std::stod(arg));
    if (kind == "table") {
      const auto at = arg.find('@');
      if (at == std::string::npos) throw Error("table spec needs '@ratio'");
      std::vector<double> values;
      std::stringstream ss(arg.substr(0, at));
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
      return table(std::move(values), std::stod(arg.substr(at + 1)));
    }
  } catch (const std::logic_error&) {
    throw Error("malformed Floyd function spec '" + spec + "'");
  }
  throw Error("unknown Floyd function kind '" + kind + "'");
}

std::string FloydFunction::spec() const { return spec_; }

double FloydFunction::operator()(std::int64_t n) const {
  n = std::max<std::int64_t>(n, 0);
  switch (kind_) {
    case Kind::kGeometric:
      return std::pow(lambda_, static_cast<double>(n));
    case Kind::kPower:
      return std::pow(1.0 + static_cast<double>(n), -a_);
    case Kind::kTable: {
      const auto m = static_cast<std::int64_t>(table_.size());
      if (n < m) return table_[static_cast<std::size_t>(n)];
      return table_.back() * std::pow(lambda_, static_cast<double>(n - m + 1));
    }
    case Kind::kConstant:
      return c_;
  }
  return 0.0;
}

double FloydFunction::log_value(std::int64_t n) const {
  n = std::max<std::int64_t>(n, 0);
  switch (kind_) {
    case Kind::kGeometric:
      return static_cast<double>(n) * std::log(lambda_);
    case Kind::kPower:
      return -a_ * std::log1p(static_cast<double>(n));
    case Kind::kTable: {
      const auto m = static_cast<std::int64_t>(table_.size());
      if (n < m) return std::log(table_[static_cast<std::size_t>(n)]);
      return std::log(table_.back()) + static_cast<double>(n - m + 1) * std::log(lambda_);
    }
    case Kind::kConstant:
      return std::log(c_);
  }
  return 0.0;
}

double FloydFunction::tail(std::int64_t r) const {
  r = std::max<std::int64_t>(r, 0);
  const double rr = static_cast<double>(r);
  switch (kind_) {
    case Kind::kGeometric:
      return std::pow(lambda_, rr) / (1.0 - lambda_);
    case Kind::kPower:
      // f(R) + ∫_{R}^{∞} (1+x)^{-a} dx
      return std::pow(1.0 + rr, -a_) + std::pow(1.0 + rr, 1.0 - a_) / (a_ - 1.0);
    case Kind::kTable: {
      const auto m = static_cast<std::int64_t>(table_.size());
      if (r >= m) return (*this)(r) / (1.0 - lambda_);
      double s = 0.0;
      for (std::int64_t n = r; n < m; ++n) s += table_[static_cast<std::size_t>(n)];
      return s + table_.back() * lambda_ / (1.0 - lambda_);
    }
    case Kind::kConstant:
      return kInf;
  }
  return kInf;
}

double FloydFunction::ratio_bound() const {
  switch (kind_) {
    case Kind::kGeometric:
      return 1.0 / lambda_;
    case Kind::kPower:
      return std::pow(2.0, a_);
    case Kind::kTable: {
      double k = 1.0 / lambda_;
      for (std::size_t i = 0; i + 1 < table_.size(); ++i) k = std::max(k, table_[i] / table_[i + 1]);
      return k;
    }
    case Kind::kConstant:
      return 1.0;
  }
  return 1.0;
}

double FloydFunction::default_tolerance() const {
  return kind_ == Kind::kGeometric ? 1e-6 : 1e-3;
}

// ---------------------------------------------------------------------------
// FloydBall

FloydBall::FloydBall(const LocallyFiniteGraph& g, FloydFunction f, const Vertex& v,
                     std::int64_t radius, std::size_t budget)
    : f_(std::move(f)), region_(ball(g, v, radius, budget)) {
  init(g, v, true);
}

FloydBall::FloydBall(const LocallyFiniteGraph& g, FloydFunction f, const Vertex& v,
                     const Vertex& center, std::int64_t radius, std::size_t budget)
    : f_(std::move(f)), region_(ball(g, center, radius, budget)) {
  init(g, v, center == v);
}

FloydBall::FloydBall(const LocallyFiniteGraph& g, FloydFunction f, const Vertex& v,
                     const std::vector<Vertex>& seeds, std::int64_t radius, std::size_t budget)
    : f_(std::move(f)), region_(tube(g, seeds, radius, budget)) {
  init(g, v, false);
}

void FloydBall::init(const LocallyFiniteGraph& g, const Vertex& v, bool centered) {
  if (centered) {
    vdepth_ = region_.depth;
  } else {
    vdepth_.resize(region_.size());
    for (std::size_t i = 0; i < region_.size(); ++i) vdepth_[i] = g.distance(v, region_.vertices[i]);
  }
  const std::int64_t top = *std::max_element(vdepth_.begin(), vdepth_.end());
  fcache_.resize(static_cast<std::size_t>(top) + 1);
  for (std::int64_t d = 0; d <= top; ++d) fcache_[static_cast<std::size_t>(d)] = f_(d);
}

double FloydBall::edge_weight(std::size_t a, std::size_t b) const {
  return fcache_[static_cast<std::size_t>(std::min(vdepth_[a], vdepth_[b]))];
}

std::vector<double> FloydBall::dijkstra(const std::vector<std::size_t>& sources,
                                        std::vector<std::size_t>* parent) const {
  const std::size_t n = region_.size();
  std::vector<double> dist(n, kInf);
  if (parent) parent->assign(n, n);
  using Item = std::tuple<double, std::size_t, std::size_t>;  // distance, rank, index
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (std::size_t s : sources) {
    if (dist[s] > 0.0) {
      dist[s] = 0.0;
      pq.emplace(0.0, region_.rank[s], s);
    }
  }
  std::vector<bool> done(n, false);
  while (!pq.empty()) {
    auto [d, rk, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = true;
    for (std::size_t w : region_.adjacency[u]) {
      const double nd = d + edge_weight(u, w);
      if (nd < dist[w]) {
        dist[w] = nd;
        if (parent) (*parent)[w] = u;
        pq.emplace(nd, region_.rank[w], w);
      }
    }
  }
  return dist;
}

std::vector<double> FloydBall::distances_from(const std::vector<std::size_t>& sources) const {
  return dijkstra(sources, nullptr);
}

double FloydBall::distance(const Vertex& x, const Vertex& y) const {
  const auto ix = region_.find(x);
  const auto iy = region_.find(y);
  if (!ix || !iy) throw PreconditionError("vertex outside the Floyd ball");
  if (*ix == *iy) return 0.0;
  return dijkstra({*ix}, nullptr)[*iy];
}

std::vector<std::size_t> FloydBall::path(std::size_t x, std::size_t y) const {
  std::vector<std::size_t> parent;
  dijkstra({x}, &parent);
  std::vector<std::size_t> out{y};
  while (out.back() != x) {
    const std::size_t p = parent[out.back()];
    if (p == region_.size()) return {};
    out.push_back(p);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::vector<double>> FloydBall::table() const {
  std::vector<std::vector<double>> out(region_.size());
  for (std::size_t i = 0; i < region_.size(); ++i) out[i] = dijkstra({i}, nullptr);
  return out;
}

FloydDistance floyd_distance(const LocallyFiniteGraph& g, const FloydFunction& f, const Vertex& v,
                             const Vertex& x, const Vertex& y, std::int64_t r) {
  if (r < 1) throw PreconditionError("Floyd radius must be at least 1");
  FloydBall fb(g, f, v, r);
  return {fb.distance(x, y), f.tail(r)};
}

Refinement refine_radius(const LocallyFiniteGraph& g, const FloydFunction& f, const Vertex& v,
                         const Vertex& x, const Vertex& y, double tol, std::size_t vertex_budget) {
  if (!(tol > 0.0)) throw PreconditionError("refinement tolerance must be positive");
  Refinement out;
  std::int64_t r = std::max<std::int64_t>({1, g.distance(v, x), g.distance(v, y)});
  std::size_t size_r = 0;
  double value_r = 0.0;
  try {
    FloydBall fb(g, f, v, r, vertex_budget);
    size_r = fb.region().size();
    value_r = fb.distance(x, y);
  } catch (const BudgetError&) {
    out.radius = r;
    return out;
  }
  out.rounds = 1;
  out.value = value_r;
  out.previous = value_r;
  out.radius = r;
  while (true) {
    std::size_t size_2r = 0;
    double value_2r = 0.0;
    try {
      FloydBall fb(g, f, v, 2 * r, vertex_budget);
      size_2r = fb.region().size();
      value_2r = fb.distance(x, y);
    } catch (const BudgetError&) {
      out.verdict = Verdict::kInconclusive;
      return out;
    }
    ++out.rounds;
    out.previous = value_r;
    out.value = value_2r;
    out.radius = 2 * r;
    if (size_2r == size_r) {
      // The ball exhausted the component: every path is inside.
      out.verdict = Verdict::kYes;
      out.exact = true;
      out.slack = 0.0;
      return out;
    }
    const double diff = std::abs(value_r - value_2r);
    if (diff < tol && f.tail(r) < tol) {
      out.verdict = Verdict::kYes;
      out.slack = diff + f.tail(r);
      return out;
    }
    r *= 2;
    size_r = size_2r;
    value_r = value_2r;
  }
}

double local_floyd_bound(const LocallyFiniteGraph& g, const FloydFunction& f, const Vertex& v,
                         const Vertex& a, const Vertex& b, std::int64_t margin) {
  if (a == b) return 0.0;
  const std::int64_t len = g.distance(a, b);
  FloydBall fb(g, f, v, a, len + margin);
  return fb.distance(a, b);
}

double segment_floyd_bound(const LocallyFiniteGraph& g, const FloydFunction& f, const Vertex& v,
                           const RaySegment& seg, std::int64_t margin) {
  if (seg.vertices.size() < 2 || seg.vertices.front() == seg.vertices.back()) return 0.0;
  FloydBall fb(g, f, v, seg.vertices, margin);
  return fb.distance(seg.vertices.front(), seg.vertices.back());
}

// ---------------------------------------------------------------------------
// Karlsson defect

namespace {

// Seeded walk from v that increases d(v, ·) at every step; nullopt at a dead end.
std::optional<Vertex> outward_walk(const LocallyFiniteGraph& g, const Vertex& v,
                                   std::int64_t depth, std::mt19937_64& rng) {
  Vertex x = v;
  for (std::int64_t d = 0; d < depth; ++d) {
    std::vector<Vertex> next;
    for (Vertex& n : g.neighbors(x)) {
      if (g.distance(v, n) == d + 1) next.push_back(std::move(n));
    }
    if (next.empty()) return std::nullopt;
    x = next[rng() % next.size()];
  }
  return x;
}

}  // namespace

std::vector<RaySegment> sample_geodesics_outside(const LocallyFiniteGraph& g, const Vertex& v,
                                                 std::int64_t r, const GeodesicSample& s) {
  std::mt19937_64 rng(s.seed);
  std::vector<RaySegment> out;
  for (std::size_t attempt = 0; attempt < 20 * s.count && out.size() < s.count; ++attempt) {
    const std::int64_t depth = r + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(s.spread + 1));
    auto start = outward_walk(g, v, depth, rng);
    if (!start) continue;
    const std::int64_t len = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(s.max_length + 1));
    RaySegment seg;
    seg.vertices.push_back(*start);
    for (std::int64_t k = 1; k <= len; ++k) {
      std::vector<Vertex> next;
      for (Vertex& n : g.neighbors(seg.vertices.back())) {
        if (g.distance(*start, n) == k && g.distance(v, n) >= r) next.push_back(std::move(n));
      }
      if (next.empty()) break;
      seg.vertices.push_back(next[rng() % next.size()]);
    }
    out.push_back(std::move(seg));
  }
  return out;
}

KarlssonReport karlsson_defect(const LocallyFiniteGraph& g, const FloydFunction& f,
                               const Vertex& v, std::int64_t r,
                               const std::vector<RaySegment>& geodesics, std::int64_t margin) {
  if (geodesics.empty()) throw PreconditionError("empty geodesic sample");
  KarlssonReport rep;
  rep.bound = 2.0 * f.tail(r - 1);
  rep.samples = geodesics.size();
  for (std::size_t i = 0; i < geodesics.size(); ++i) {
    const auto& seg = geodesics[i];
    for (const Vertex& x : seg.vertices) {
      if (g.distance(v, x) < r) throw PreconditionError("sampled geodesic meets the ball");
    }
    const double value = segment_floyd_bound(g, f, v, seg, margin);
    if (value > rep.defect) {
      rep.defect = value;
      rep.worst = i;
    }
  }
  return rep;
}

KarlssonReport karlsson_defect(const LocallyFiniteGraph& g, const FloydFunction& f,
                               const Vertex& v, std::int64_t r, const GeodesicSample& s) {
  return karlsson_defect(g, f, v, r, sample_geodesics_outside(g, v, r, s));
}

// ---------------------------------------------------------------------------
// Perspectivity defect

NeighborRule width_neighbors(const LocallyFiniteGraph& g, std::int64_t w) {
  return [&g, w](const Vertex& p) { return ball(g, p, w).vertices; };
}

std::vector<Vertex> band_points(const LocallyFiniteGraph& g, const Vertex& v, std::int64_t r,
                                const BandSample& s) {
  std::mt19937_64 rng(s.seed);
  std::vector<Vertex> out;
  try {
    const Region reg = ball(g, v, r + s.span, 20000);
    for (std::size_t i = 0; i < reg.size(); ++i) {
      if (reg.depth[i] >= r) out.push_back(reg.vertices[i]);
    }
    std::sort(out.begin(), out.end());
    if (out.size() > s.max_points) {
      for (std::size_t i = 0; i < s.max_points; ++i) {
        std::swap(out[i], out[i + rng() % (out.size() - i)]);
      }
      out.resize(s.max_points);
      std::sort(out.begin(), out.end());
    }
    return out;
  } catch (const BudgetError&) {
  }
  VertexSet seen;
  for (std::size_t attempt = 0; attempt < 4 * s.max_points && out.size() < s.max_points; ++attempt) {
    const std::int64_t depth = r + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(s.span + 1));
    auto p = outward_walk(g, v, depth, rng);
    if (p && seen.insert(*p).second) out.push_back(*p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PerspectivityDefect perspectivity_defect(const LocallyFiniteGraph& g, const FloydFunction& f,
                                         const Vertex& v, const NeighborRule& e, std::int64_t r,
                                         const BandSample& s) {
  PerspectivityDefect out;
  for (const Vertex& p : band_points(g, v, r, s)) {
    std::vector<Vertex> qs;
    std::int64_t reach = 0;
    for (Vertex& q : e(p)) {
      if (g.distance(v, q) < r) continue;
      reach = std::max(reach, g.distance(p, q));
      qs.push_back(std::move(q));
    }
    if (qs.empty()) continue;
    FloydBall fb(g, f, v, p, reach + s.margin);
    const auto dist = fb.distances_from({*fb.region().find(p)});
    for (const Vertex& q : qs) {
      ++out.pairs;
      const double d = dist[*fb.region().find(q)];
      if (out.pairs == 1 || d > out.defect) {
        out.defect = d;
        out.p = p;
        out.q = q;
      }
    }
  }
  if (out.pairs == 0) throw InconclusiveError("no entourage pair beyond radius " + std::to_string(r));
  return out;
}

// ---------------------------------------------------------------------------
// Boundary chart

FloydChart::FloydChart(GraphRef g, FloydFunction f, const Vertex& v, std::int64_t r,
                       std::int64_t margin, std::optional<double> threshold)
    : graph_(std::move(g)), ball_(*graph_, f, v, r + margin), v_(v), r_(r) {
  if (r < 1) throw PreconditionError("chart radius must be at least 1");
  threshold_ = threshold.value_or(4.0 * f.tail(r));
  if (!(threshold_ > 0.0) || !std::isfinite(threshold_)) {
    throw PreconditionError("cluster threshold must be positive and finite");
  }
  const Region& reg = ball_.region();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg.depth[i] == r) anchors_.push_back(i);
  }
  if (anchors_.empty()) throw PreconditionError("no vertex at depth " + std::to_string(r));
  std::sort(anchors_.begin(), anchors_.end(),
            [&](std::size_t a, std::size_t b) { return reg.rank[a] < reg.rank[b]; });

  auto step = [&](std::size_t i, std::int64_t want) {
    std::optional<std::size_t> best;
    for (std::size_t j : reg.adjacency[i]) {
      if (reg.depth[j] == want && (!best || reg.rank[j] < reg.rank[*best])) best = j;
    }
    return best;
  };
  for (std::size_t a : anchors_) {
    std::vector<std::size_t> chain{a};
    while (reg.depth[chain.back()] > 0) chain.push_back(*step(chain.back(), reg.depth[chain.back()] - 1));
    std::reverse(chain.begin(), chain.end());
    while (reg.depth[chain.back()] < r + margin) {
      auto next = step(chain.back(), reg.depth[chain.back()] + 1);
      if (!next) break;
      chain.push_back(*next);
    }
    RaySegment ray;
    for (std::size_t i : chain) ray.vertices.push_back(reg.vertices[i]);
    rays_.push_back(std::move(ray));
  }

  const std::size_t m = anchors_.size();
  std::vector<std::vector<double>> d(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = ball_.distances_from({anchors_[i]});
    for (std::size_t j = 0; j < m; ++j) d[i][j] = row[anchors_[j]];
  }
  UnionFind uf(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (within(d[i][j], threshold_)) uf.unite(i, j);
    }
  }
  std::vector<std::size_t> id_of_root(m, m);
  ray_cluster_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t root = uf.find(i);
    if (id_of_root[root] == m) {
      id_of_root[root] = clusters_.size();
      clusters_.push_back({clusters_.size(), {}, 0.0, kInf});
    }
    ray_cluster_[i] = id_of_root[root];
    clusters_[ray_cluster_[i]].rays.push_back(i);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      auto& c = clusters_[ray_cluster_[i]];
      if (ray_cluster_[i] == ray_cluster_[j]) {
        c.internal_diameter = std::max(c.internal_diameter, d[i][j]);
      } else {
        c.separation = std::min(c.separation, d[i][j]);
      }
    }
  }
}

std::vector<std::size_t> FloydChart::assign_indices(const std::vector<std::size_t>& sources) const {
  if (sources.empty()) return {};
  const auto dist = ball_.distances_from(sources);
  std::vector<std::size_t> out;
  for (const auto& c : clusters_) {
    for (std::size_t ray : c.rays) {
      if (within(dist[anchors_[ray]], threshold_)) {
        out.push_back(c.id);
        break;
      }
    }
  }
  return out;
}

std::vector<std::size_t> FloydChart::assignment(const std::vector<Vertex>& a) const {
  const Region& reg = ball_.region();
  const LocallyFiniteGraph& g = *graph_;
  std::vector<std::size_t> sources;
  for (const Vertex& x : a) {
    if (auto i = reg.find(x)) {
      if (reg.depth[*i] >= r_) sources.push_back(*i);
      continue;
    }
    // Move inward along a geodesic to the region boundary.
    Vertex cur = x;
    std::int64_t d = g.distance(v_, cur);
    while (d > reg.radius) {
      std::optional<Vertex> best;
      for (Vertex& n : g.neighbors(cur)) {
        if (g.distance(v_, n) == d - 1 && (!best || n < *best)) best = std::move(n);
      }
      cur = *best;
      --d;
    }
    sources.push_back(*reg.find(cur));
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  return assign_indices(sources);
}

std::vector<std::size_t> FloydChart::assignment(const std::function<bool(const Vertex&)>& in_a) const {
  const Region& reg = ball_.region();
  std::vector<std::size_t> sources;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg.depth[i] >= r_ && in_a(reg.vertices[i])) sources.push_back(i);
  }
  return assign_indices(sources);
}

coarse::ChartTable FloydChart::chart_table() const {
  coarse::ChartTable t;
  t.points = ball_.region().size();
  t.clusters = clusters_.size();
  for (const auto& c : clusters_) {
    std::vector<std::size_t> src;
    for (std::size_t ray : c.rays) src.push_back(anchors_[ray]);
    t.distance.push_back(ball_.distances_from(src));
  }
  return t;
}

nlohmann::json to_json(const ClusterReport& c) {
  return {{"cluster_id", c.id},
          {"rays", c.rays},
          {"internal_diameter", number6(c.internal_diameter)},
          {"separation", number6(c.separation)}};
}

nlohmann::json FloydChart::to_json() const {
  const LocallyFiniteGraph& g = *graph_;
  nlohmann::json rays = nlohmann::json::array();
  for (std::size_t i = 0; i < rays_.size(); ++i) {
    nlohmann::json verts = nlohmann::json::array();
    for (const Vertex& x : rays_[i].vertices) verts.push_back(g.label(x));
    rays.push_back({{"ray_id", i}, {"cluster_id", ray_cluster_[i]}, {"vertices", verts}});
  }
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : clusters_) clusters.push_back(floyd::to_json(c));
  return {{"graph", g.name()},
          {"floyd", ball_.function().spec()},
          {"basepoint", g.label(v_)},
          {"radius", r_},
          {"threshold", number6(threshold_)},
          {"tail", number6(ball_.function().tail(r_))},
          {"clusters", clusters},
          {"rays", rays}};
}

CompactnessReport compactness_criterion(const FloydChart& chart,
                                        const std::vector<SampledSet>& sets) {
  CompactnessReport rep;
  const Region& reg = chart.ball().region();
  for (const auto& s : sets) {
    CompactnessRow row;
    row.name = s.name;
    for (std::size_t i = 0; i < reg.size() && !row.unbounded; ++i) {
      row.unbounded = reg.depth[i] >= chart.radius() && s.contains(reg.vertices[i]);
    }
    if (row.unbounded) {
      row.clusters = chart.assignment(s.contains);
      if (row.clusters.empty()) rep.holds = false;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::vector<SampledSet> standard_sets(const FloydChart& chart) {
  std::vector<SampledSet> out;
  const GraphRef g = chart.graph();
  const Vertex v = chart.basepoint();
  for (std::int64_t k : {chart.radius() - 1, chart.radius()}) {
    out.push_back({"complement of ball(v," + std::to_string(k) + ")",
                   [g, v, k](const Vertex& x) { return g->distance(v, x) > k; }});
  }
  for (const auto& c : chart.clusters()) {
    VertexSet pts;
    for (std::size_t ray : c.rays) {
      for (const Vertex& x : chart.rays()[ray].vertices) pts.insert(x);
    }
    out.push_back({"rays of cluster " + std::to_string(c.id),
                   [pts](const Vertex& x) { return pts.count(x) > 0; }});
  }
  return out;
}

CloseSameBoundary closesameboundary_check(const FloydChart& chart,
                                          const std::function<bool(const Vertex&)>& in_a,
                                          const std::function<bool(const Vertex&)>& in_b,
                                          const NeighborRule& e) {
  CloseSameBoundary out;
  out.premise = true;
  const Region& reg = chart.ball().region();
  for (std::size_t i = 0; i < reg.size() && out.premise; ++i) {
    const Vertex& p = reg.vertices[i];
    if (!in_a(p)) continue;
    const auto qs = e(p);
    out.premise = std::any_of(qs.begin(), qs.end(), in_b);
  }
  out.a_clusters = chart.assignment(in_a);
  out.b_clusters = chart.assignment(in_b);
  out.holds = std::includes(out.b_clusters.begin(), out.b_clusters.end(), out.a_clusters.begin(),
                            out.a_clusters.end());
  return out;
}

// ---------------------------------------------------------------------------
// Quasi-isometry conditions

std::int64_t IndexMap::operator()(std::int64_t n) const {
  const std::int64_t q = num * n;
  std::int64_t fl = q / den;
  if ((q % den != 0) && ((q < 0) != (den < 0))) --fl;
  return std::max<std::int64_t>(0, fl + offset);
}

IndexMap IndexMap::parse(const std::string& text) {
  static const std::regex re(R"(^\s*(\d*)\s*n\s*(?:/\s*(\d+))?\s*(?:([+-])\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw Error("cannot parse index map '" + text + "'");
  IndexMap out;
  out.num = m[1].length() ? std::stoll(m[1]) : 1;
  out.den = m[2].length() ? std::stoll(m[2]) : 1;
  if (out.den == 0) throw Error("index map has zero denominator");
  if (m[4].length()) out.offset = (m[3] == "-" ? -1 : 1) * std::stoll(m[4]);
  return out;
}

std::string IndexMap::spec() const {
  std::string s = (num == 1 ? "" : std::to_string(num)) + "n";
  if (den != 1) s += "/" + std::to_string(den);
  if (offset > 0) s += "+" + std::to_string(offset);
  if (offset < 0) s += std::to_string(offset);
  return s;
}

RatioCheck ratio_check(const FloydFunction& num, const FloydFunction& den, const IndexMap& map,
                       double d, std::int64_t n_max) {
  using Kind = FloydFunction::Kind;
  RatioCheck out;
  double best = -kInf;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    const double lr = num.log_value(n) - den.log_value(map(n));
    if (lr > best) {
      best = lr;
      out.argmax = n;
    }
  }
  out.sup = std::exp(best);
  out.numeric_ok = best <= std::log(d) + 1e-12;

  const double p = static_cast<double>(map.num);
  const double q = static_cast<double>(map.den);
  const double c = static_cast<double>(map.offset);
  if (map.num < 0 || map.den <= 0 || map.offset < 0) return out;
  if (num.kind() == Kind::kGeometric && den.kind() == Kind::kGeometric) {
    // λn^n / λd^{⌊pn/q⌋+c} ≤ (λn/λd^{p/q})^n λd^{-c}, with equality at n = 0.
    if (q * std::log(num.lambda()) <= p * std::log(den.lambda()) + 1e-12) {
      out.analytic_bound = std::pow(den.lambda(), -c);
      out.analytic_ok = *out.analytic_bound <= d * (1.0 + 1e-12);
    } else {
      out.unbounded = true;
      out.analytic_ok = false;
    }
  } else if (num.kind() == Kind::kPower && den.kind() == Kind::kPower) {
    // (1+α(n))^{ad} / (1+n)^{an}; (1+α(n))/(1+n) ≤ max(p/q, 1+c).
    if (map.num == 0 || den.exponent() <= num.exponent()) {
      out.analytic_bound = std::pow(std::max(p / q, 1.0 + c), den.exponent());
      if (*out.analytic_bound <= d * (1.0 + 1e-12)) {
        out.analytic_ok = true;
      } else if (std::pow(1.0 + c, den.exponent()) > d * (1.0 + 1e-12)) {
        out.analytic_ok = false;
      }
    } else {
      out.unbounded = true;
      out.analytic_ok = false;
    }
  } else if (num.kind() == Kind::kPower && den.kind() == Kind::kGeometric && map.num > 0) {
    // (1+n)^{-a} λ^{-α(n)} grows exponentially.
    out.unbounded = true;
    out.analytic_ok = false;
  }
  return out;
}

QiConditionReport qi_condition_check(const IndexMap& alpha, const FloydFunction& f1,
                                     const FloydFunction& f2, double d, std::int64_t n_max,
                                     std::optional<IndexMap> beta) {
  QiConditionReport rep;
  rep.forward = ratio_check(f2, f1, alpha, d, n_max);
  rep.reverse = ratio_check(f1, f2, beta.value_or(alpha), d, n_max);
  rep.extension = rep.forward.ok();
  rep.homeomorphism = rep.extension && rep.reverse.ok();
  return rep;
}

// ---------------------------------------------------------------------------
// Boundary maps

namespace {

// Ray vertices from depth R on, continued outward (smallest id first) to
// depth 4R so that maps shrinking distances still reach the target chart.
std::vector<Vertex> ray_tail(const FloydChart& chart, const RaySegment& ray) {
  const LocallyFiniteGraph& g = *chart.graph();
  std::vector<Vertex> out;
  for (std::size_t k = static_cast<std::size_t>(chart.radius()); k < ray.vertices.size(); ++k) {
    out.push_back(ray.vertices[k]);
  }
  for (auto d = static_cast<std::int64_t>(ray.vertices.size()); d <= 4 * chart.radius(); ++d) {
    std::optional<Vertex> next;
    for (Vertex& n : g.neighbors(out.back())) {
      if (g.distance(chart.basepoint(), n) == d && (!next || n < *next)) next = std::move(n);
    }
    if (!next) break;
    out.push_back(std::move(*next));
  }
  return out;
}

std::vector<std::optional<std::size_t>> cluster_images(const FloydChart& from,
                                                       const FloydChart& to,
                                                       const VertexFunction& map,
                                                       std::string& failure) {
  std::vector<std::optional<std::size_t>> out(from.clusters().size());
  for (const auto& c : from.clusters()) {
    for (std::size_t ray : c.rays) {
      std::vector<Vertex> image;
      for (const Vertex& x : ray_tail(from, from.rays()[ray])) image.push_back(map(x));
      const auto assigned = to.assignment(image);
      if (assigned.size() != 1) {
        if (failure.empty()) {
          failure = "ray " + std::to_string(ray) + " of cluster " + std::to_string(c.id) +
                    " maps to " + std::to_string(assigned.size()) + " clusters";
        }
        out[c.id].reset();
        break;
      }
      if (out[c.id] && *out[c.id] != assigned[0]) {
        if (failure.empty()) {
          failure = "rays " + std::to_string(c.rays.front()) + " and " + std::to_string(ray) +
                    " of cluster " + std::to_string(c.id) + " map to different clusters";
        }
        out[c.id].reset();
        break;
      }
      out[c.id] = assigned[0];
    }
  }
  return out;
}

bool is_bijection(const std::vector<std::optional<std::size_t>>& m, std::size_t target) {
  if (m.size() != target) return false;
  std::vector<bool> hit(target, false);
  for (const auto& x : m) {
    if (!x || hit[*x]) return false;
    hit[*x] = true;
  }
  return true;
}

}  // namespace

BoundaryMapReport induced_boundary_map(const FloydChart& chart1, const FloydChart& chart2,
                                       const VertexFunction& pi, const VertexFunction& varpi) {
  BoundaryMapReport rep;
  rep.forward = cluster_images(chart2, chart1, pi, rep.failure);
  rep.backward = cluster_images(chart1, chart2, varpi, rep.failure);
  rep.bijective = is_bijection(rep.forward, chart1.clusters().size());
  rep.inverse_ok = rep.bijective && is_bijection(rep.backward, chart2.clusters().size());
  for (std::size_t c = 0; rep.inverse_ok && c < rep.forward.size(); ++c) {
    rep.inverse_ok = rep.backward[*rep.forward[c]] == c;
  }
  return rep;
}

ProjectionReport hyperbolic_to_floyd_projection(const std::vector<std::vector<RaySegment>>& classes,
                                                const FloydChart& chart) {
  ProjectionReport rep;
  rep.well_defined = true;
  std::set<std::size_t> hit;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    std::set<std::size_t> image;
    std::size_t first_ray = 0;
    for (std::size_t i = 0; i < classes[k].size(); ++i) {
      const auto assigned = chart.assignment(classes[k][i].vertices);
      if (assigned.empty() && rep.failure.empty()) {
        rep.failure = "ray " + std::to_string(i) + " of class " + std::to_string(k) +
                      " does not reach the chart radius";
      }
      for (std::size_t c : assigned) {
        if (image.empty()) first_ray = i;
        if (image.insert(c).second && image.size() > 1 && rep.failure.empty()) {
          rep.failure = "class " + std::to_string(k) + " split: rays " +
                        std::to_string(first_ray) + " and " + std::to_string(i) +
                        " reach different clusters";
        }
      }
    }
    if (image.size() == 1) {
      rep.class_image.push_back(*image.begin());
      hit.insert(*image.begin());
    } else {
      rep.class_image.push_back(std::nullopt);
      rep.well_defined = false;
    }
  }
  for (std::size_t c = 0; c < chart.clusters().size(); ++c) {
    if (!hit.count(c)) rep.missed.push_back(c);
  }
  rep.surjective = rep.missed.empty();
  return rep;
}

}  // namespace coarsekit::floyd
