#include "coarsekit/action.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <functional>
#include <memory>
#include <random>

namespace coarsekit::action {

namespace {

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string vlabel(const LocallyFiniteGraph& g, const Vertex& v) { return g.label(v); }

}  // namespace

GraphAction::GraphAction(GroupRef group, GraphRef graph, ActFn act, TransporterFn transporter,
                         std::string name)
    : group_(std::move(group)),
      graph_(std::move(graph)),
      act_(std::move(act)),
      transporter_(std::move(transporter)),
      name_(std::move(name)) {}

std::vector<Element> GraphAction::transporter(const Vertex& x, const Vertex& y) const {
  auto out = transporter_(x, y);
  sort_unique(out);
  return out;
}

GraphAction cayley_action(GroupRef group) {
  auto graph = std::make_shared<CayleyGraph>(group, "cayley:" + group->name());
  const GroupOracle* g = group.get();
  return GraphAction(
      group, graph, [g](const Element& h, const Vertex& x) { return g->multiply(h, x); },
      [g](const Vertex& x, const Vertex& y) {
        return std::vector<Element>{g->multiply(y, g->invert(x))};
      },
      "left:" + group->name());
}

GraphAction translation_action(std::int64_t step) {
  if (step == 0) throw PreconditionError("translation step must be nonzero");
  return GraphAction(
      make_zn(1), make_graph("line"),
      [step](const Element& k, const Vertex& x) { return Vertex{x[0] + step * k[0]}; },
      [step](const Vertex& x, const Vertex& y) {
        const std::int64_t d = y[0] - x[0];
        if (d % step != 0) return std::vector<Element>{};
        return std::vector<Element>{{d / step}};
      },
      "shift:" + std::to_string(step));
}

GraphAction dihedral_action() {
  return GraphAction(
      make_infinite_dihedral(), make_graph("line"),
      [](const Element& g, const Vertex& x) {
        return Vertex{(g[1] != 0 ? -x[0] : x[0]) + g[0]};
      },
      [](const Vertex& x, const Vertex& y) {
        return std::vector<Element>{{y[0] - x[0], 0}, {y[0] + x[0], 1}};
      },
      "dihedral");
}

GraphAction permutation_action(GroupRef group, GraphRef graph) {
  const auto n = graph->size();
  if (!n) throw PreconditionError("permutation action needs a finite graph");
  auto elements = std::make_shared<std::vector<Element>>(group->ball(1 << 20));
  for (const auto& e : *elements) {
    if (e.size() != *n) throw PreconditionError("permutation degree differs from the vertex count");
  }
  return GraphAction(
      group, graph,
      [](const Element& g, const Vertex& x) {
        return Vertex{g.at(static_cast<std::size_t>(x[0]))};
      },
      [elements](const Vertex& x, const Vertex& y) {
        std::vector<Element> out;
        for (const auto& g : *elements) {
          if (g[static_cast<std::size_t>(x[0])] == y[0]) out.push_back(g);
        }
        return out;
      },
      "perm:" + graph->name());
}

GraphAction trivial_action(GraphRef graph) {
  return GraphAction(
      make_zn(0), graph, [](const Element&, const Vertex& x) { return x; },
      [](const Vertex& x, const Vertex& y) {
        return x == y ? std::vector<Element>{Element{}} : std::vector<Element>{};
      },
      "trivial");
}

ActionCheck check_action(const GraphAction& a, const std::vector<Element>& elements,
                         const std::vector<Vertex>& vertices) {
  const auto& grp = a.group();
  const auto& g = a.graph();
  auto fail = [](std::string msg) { return ActionCheck{false, std::move(msg)}; };
  for (const auto& v : vertices) {
    if (a.act(grp.identity(), v) != v) return fail("identity moves " + vlabel(g, v));
    for (const auto& x : elements) {
      const Vertex xv = a.act(x, v);
      if (!g.contains(xv)) return fail("image outside the graph");
      for (const auto& y : elements) {
        if (a.act(grp.multiply(x, y), v) != a.act(x, a.act(y, v))) {
          return fail("compatibility fails at " + vlabel(g, v));
        }
      }
      auto image = g.neighbors(v);
      for (auto& w : image) w = a.act(x, w);
      auto expect = g.neighbors(xv);
      sort_unique(image);
      sort_unique(expect);
      if (image != expect) return fail("not an automorphism at " + vlabel(g, v));
      const auto t = a.transporter(v, xv);
      if (!std::binary_search(t.begin(), t.end(), x)) return fail("transporter misses an element");
      for (const auto& s : t) {
        if (a.act(s, v) != xv) return fail("transporter element does not transport");
      }
    }
  }
  return {};
}

Saturation::Saturation(const GraphAction& a, std::vector<Vertex> base)
    : action_(a), base_(std::move(base)) {
  if (base_.empty()) throw PreconditionError("saturation of the empty set");
  sort_unique(base_);
}

bool Saturation::contains(const Vertex& p, const Vertex& q) const {
  const auto& grp = action_.group();
  for (const auto& x : base_) {
    for (const auto& g : action_.transporter(x, p)) {
      const Vertex back = action_.act(grp.invert(g), q);
      if (std::binary_search(base_.begin(), base_.end(), back)) return true;
    }
  }
  return false;
}

std::vector<Vertex> Saturation::neighbors(const Vertex& p) const {
  std::vector<Vertex> out;
  for (const auto& x : base_) {
    for (const auto& g : action_.transporter(x, p)) {
      for (const auto& y : base_) out.push_back(action_.act(g, y));
    }
  }
  sort_unique(out);
  return out;
}

coarse::Relation Saturation::restrict(const Region& region) const {
  coarse::Relation r(region.size());
  for (std::size_t i = 0; i < region.size(); ++i) {
    for (const auto& q : neighbors(region.vertices[i])) {
      if (auto j = region.find(q)) r.insert(i, *j);
    }
  }
  return r;
}

floyd::NeighborRule Saturation::rule() const {
  auto self = std::make_shared<Saturation>(*this);
  return [self](const Vertex& p) { return self->neighbors(p); };
}

Saturation saturation(const GraphAction& a, const std::vector<Vertex>& base) {
  return Saturation(a, base);
}

std::vector<VertexPair> width_pairs(const LocallyFiniteGraph& g, const Vertex& center,
                                    std::int64_t radius, std::int64_t w) {
  const Region reg = ball(g, center, radius);
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const Region near = ball(g, reg.vertices[i], w);
    for (const auto& q : near.vertices) {
      if (auto j = reg.find(q)) idx.emplace_back(i, *j);
    }
  }
  sort_unique(idx);
  std::vector<VertexPair> out;
  out.reserve(idx.size());
  for (auto [i, j] : idx) out.emplace_back(reg.vertices[i], reg.vertices[j]);
  return out;
}

namespace {

// Breadth-first search over Sat(U)-steps from p, up to `depth` steps.
struct SatSearch {
  VertexMap<Vertex> parent;
  VertexMap<std::size_t> steps;
};

SatSearch sat_bfs(const Saturation& sat, const Vertex& p, std::size_t depth) {
  SatSearch s;
  s.steps[p] = 0;
  std::deque<Vertex> q{p};
  while (!q.empty()) {
    Vertex u = q.front();
    q.pop_front();
    const std::size_t k = s.steps[u];
    if (k == depth) continue;
    for (const auto& w : sat.neighbors(u)) {
      if (s.steps.emplace(w, k + 1).second) {
        s.parent[w] = u;
        q.push_back(w);
      }
    }
  }
  return s;
}

}  // namespace

EpsPhiResult eps_phi_member(const GraphAction& a, const std::vector<VertexPair>& e,
                            std::size_t depth, std::size_t max_set, std::int64_t pool_radius) {
  EpsPhiResult out;
  if (e.empty()) {
    out.verdict = Verdict::kYes;
    out.witness = EpsPhiWitness{};
    return out;
  }
  const auto& g = a.graph();
  std::vector<Vertex> pool;
  bool whole = false;
  if (auto n = g.size(); n && *n <= 64) {
    const Region all = ball(g, g.root(), static_cast<std::int64_t>(*n));
    pool = all.vertices;
    whole = all.size() == *n;
  }
  if (!whole) pool = ball(g, g.root(), pool_radius).vertices;

  // Group the pairs by source so each candidate runs one search per source.
  std::vector<Vertex> sources;
  for (const auto& [p, q] : e) sources.push_back(p);
  sort_unique(sources);

  std::optional<EpsPhiWitness> best;
  std::vector<std::size_t> pick;
  auto try_candidate = [&]() {
    ++out.candidates_tried;
    std::vector<Vertex> u;
    for (auto i : pick) u.push_back(pool[i]);
    const Saturation sat(a, u);
    const std::size_t limit = best ? best->depth - 1 : depth;
    if (limit == 0) return;
    VertexMap<SatSearch> searches;
    std::size_t need = 0;
    for (const auto& p : sources) {
      searches.emplace(p, sat_bfs(sat, p, limit));
    }
    for (const auto& [p, q] : e) {
      if (p == q) {
        // (p, p) needs p in the orbit of U.
        if (!sat.contains(p, p)) return;
        need = std::max<std::size_t>(need, 1);
        continue;
      }
      const auto& s = searches.at(p);
      auto it = s.steps.find(q);
      if (it == s.steps.end()) return;
      need = std::max(need, it->second);
    }
    EpsPhiWitness w;
    w.depth = std::max<std::size_t>(need, 1);
    w.u = sat.base();
    for (const auto& [p, q] : e) {
      const auto& s = searches.at(p);
      std::vector<Vertex> chain{q};
      if (p == q) chain.push_back(p);
      while (chain.back() != p) chain.push_back(s.parent.at(chain.back()));
      std::reverse(chain.begin(), chain.end());
      w.chains.push_back(std::move(chain));
    }
    best = std::move(w);
  };

  // Subsets of the pool by size, then by breadth-first index order.
  for (std::size_t k = 1; k <= std::min(max_set, pool.size()); ++k) {
    pick.resize(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      try_candidate();
      if (best && best->depth == 1) break;
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == pool.size() - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (best && best->depth == 1) break;
  }
  out.search_exhausted = whole;
  if (best) {
    out.verdict = Verdict::kYes;
    out.witness = std::move(best);
  } else {
    out.verdict = whole ? Verdict::kNo : Verdict::kInconclusive;
  }
  return out;
}

DiscontinuityReport is_properly_discontinuous(const GraphAction& a, const std::vector<Vertex>& k) {
  DiscontinuityReport out;
  for (const auto& x : k) {
    for (const auto& y : k) {
      for (auto& g : a.transporter(x, y)) out.elements.push_back(std::move(g));
    }
  }
  sort_unique(out.elements);
  return out;
}

std::vector<std::vector<Element>> tuple_finiteness(const GraphAction& a,
                                                   const std::vector<std::vector<Vertex>>& sets,
                                                   std::size_t budget) {
  if (sets.size() < 2) throw PreconditionError("tuple finiteness needs at least two sets");
  std::vector<std::vector<Element>> out;
  std::vector<Element> suffix;
  // Chooses g_m with g_m·B_m meeting `target`, then recurses with g_m·B_m.
  std::function<void(std::size_t, const std::vector<Vertex>&)> rec =
      [&](std::size_t m, const std::vector<Vertex>& target) {
        std::vector<Element> choices;
        for (const auto& b : sets[m - 1]) {
          for (const auto& t : target) {
            for (auto& g : a.transporter(b, t)) choices.push_back(std::move(g));
          }
        }
        sort_unique(choices);
        for (const auto& g : choices) {
          suffix.push_back(g);
          if (m == 1) {
            if (out.size() >= budget) throw BudgetError("tuple enumeration exceeds the budget");
            out.emplace_back(suffix.rbegin(), suffix.rend());
          } else {
            std::vector<Vertex> moved;
            for (const auto& b : sets[m - 1]) moved.push_back(a.act(g, b));
            rec(m - 1, moved);
          }
          suffix.pop_back();
        }
      };
  rec(sets.size() - 1, sets.back());
  sort_unique(out);
  return out;
}

namespace {

std::vector<Vertex> greedy_cover(const GraphAction& a, std::int64_t radius) {
  const Region reg = ball(a.graph(), a.graph().root(), radius);
  std::vector<Vertex> k;
  for (const auto& v : reg.vertices) {
    bool covered = false;
    for (const auto& x : k) {
      if (!a.transporter(x, v).empty()) {
        covered = true;
        break;
      }
    }
    if (!covered) k.push_back(v);
  }
  return k;
}

}  // namespace

FundamentalDomain find_fundamental_domain(const GraphAction& a, std::int64_t radius) {
  FundamentalDomain out;
  out.radius = radius;
  out.vertices = greedy_cover(a, radius);
  const auto wider = greedy_cover(a, radius + 2);
  out.cocompact = wider.size() == out.vertices.size();
  if (!out.cocompact) {
    out.failure = "orbit cover grows from " + std::to_string(out.vertices.size()) + " to " +
                  std::to_string(wider.size()) + " vertices between radius " +
                  std::to_string(radius) + " and " + std::to_string(radius + 2);
  }
  for (const auto& v : out.vertices) {
    out.spread = std::max(out.spread, a.graph().distance(a.graph().root(), v));
  }
  return out;
}

MilnorSvarcCertificate milnor_svarc_map(const GraphAction& a, const Vertex& x0,
                                        std::int64_t radius) {
  MilnorSvarcCertificate c;
  const auto& grp = a.group();
  const auto& g = a.graph();
  auto fail = [&](const std::string& msg) {
    if (c.failure.empty()) c.failure = msg;
  };

  std::int64_t stretch = 1;
  for (const auto& s : grp.generators()) stretch = std::max(stretch, g.distance(x0, a.act(s, x0)));
  c.group_ball = grp.ball(radius);
  c.region = ball(g, x0, std::max<std::int64_t>(1, radius * stretch));
  c.map.source = c.group_ball.size();
  c.map.target = c.region.size();
  for (const auto& h : c.group_ball) {
    auto j = c.region.find(a.act(h, x0));
    if (!j) {
      fail("orbit map leaves the region");
      return c;
    }
    c.map.assignment.push_back(*j);
  }

  const auto fd = find_fundamental_domain(a, radius);
  if (!fd.cocompact) {
    fail("quasi-density: no fundamental domain (" + fd.failure + ")");
  }
  c.domain = {x0};
  for (const auto& v : fd.vertices) {
    if (a.transporter(x0, v).empty()) c.domain.push_back(v);
  }
  c.properly_discontinuous = is_properly_discontinuous(a, c.domain).finite;

  c.generator_images = true;
  for (const auto& gen : grp.ball(std::min<std::int64_t>(radius, 2))) {
    const Saturation sat(a, {x0, a.act(gen, x0)});
    for (const auto& h : c.group_ball) {
      ++c.generator_pairs;
      if (!sat.contains(a.act(h, x0), a.act(grp.multiply(h, gen), x0))) {
        c.generator_images = false;
        fail("generator images: φ(Δ_" + grp.to_string(gen) + ") leaves Sat({x0, g·x0})");
        break;
      }
    }
  }

  c.properness = true;
  for (std::int64_t r = 0; r <= radius; ++r) {
    std::vector<Element> pre;
    for (std::size_t i = 0; i < c.region.size(); ++i) {
      if (c.region.depth[i] > r) continue;
      for (auto& h : a.transporter(x0, c.region.vertices[i])) {
        if (g.distance(x0, a.act(h, x0)) > r) {
          c.properness = false;
          fail("properness: transporter element lands outside the ball");
        }
        pre.push_back(std::move(h));
      }
    }
    sort_unique(pre);
    c.preimage_sizes.push_back(pre.size());
  }

  // Orbit representative of x: the first element carrying a domain point to x.
  auto representative = [&](const Vertex& x) -> std::optional<Element> {
    for (const auto& k : c.domain) {
      auto t = a.transporter(k, x);
      if (!t.empty()) return t.front();
    }
    return std::nullopt;
  };

  c.quasi_density = fd.cocompact;
  if (fd.cocompact) {
    const Saturation sat(a, c.domain);
    for (const auto& x : c.region.vertices) {
      auto h = representative(x);
      if (!h || !sat.contains(x, a.act(*h, x0))) {
        c.quasi_density = false;
        fail("quasi-density: " + g.label(x) + " is not Sat(K)-close to the orbit");
        break;
      }
    }
  }

  c.quasi_inverse = true;
  for (const auto& h : c.group_ball) {
    auto back = representative(a.act(h, x0));
    if (!back) {
      c.quasi_inverse = false;
      fail("quasi-inverse: orbit point without representative");
      break;
    }
    const Element diff = grp.multiply(grp.invert(h), *back);
    if (a.act(diff, x0) != x0) {
      c.quasi_inverse = false;
      fail("quasi-inverse: f(h·x0) differs from h outside Stab(x0)");
      break;
    }
    c.quasi_inverse_displacement = std::max(c.quasi_inverse_displacement, grp.word_length(diff));
  }
  return c;
}

std::vector<Element> pi_k(const GraphAction& a, const std::vector<Vertex>& k,
                          const std::vector<Vertex>& s) {
  std::vector<Element> out;
  for (const auto& x : k) {
    for (const auto& y : s) {
      for (auto& g : a.transporter(x, y)) out.push_back(std::move(g));
    }
  }
  sort_unique(out);
  return out;
}

std::vector<Vertex> lambda_k(const GraphAction& a, const std::vector<Vertex>& k,
                             const std::vector<Element>& f) {
  std::vector<Vertex> out;
  for (const auto& g : f) {
    for (const auto& x : k) out.push_back(a.act(g, x));
  }
  sort_unique(out);
  return out;
}

std::vector<std::vector<Element>> sample_group_rays(const GroupOracle& g, std::size_t count,
                                                    std::size_t length, std::int64_t shift,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto shifts = g.ball(shift);
  const auto gens = g.generators();
  std::vector<std::vector<Element>> out;
  for (std::size_t attempt = 0; out.size() < count && attempt < 20 * count + 20; ++attempt) {
    const Element& g0 = shifts[rng() % shifts.size()];
    Element w = g.identity();
    std::vector<Element> ray{g0};
    for (std::size_t j = 0; j < length; ++j) {
      std::vector<Element> next;
      for (const auto& s : gens) {
        Element n = g.multiply(w, s);
        if (g.word_length(n) == g.word_length(w) + 1) next.push_back(std::move(n));
      }
      if (next.empty()) break;
      w = next[rng() % next.size()];
      ray.push_back(g.multiply(g0, w));
    }
    if (std::find(out.begin(), out.end(), ray) == out.end()) out.push_back(std::move(ray));
  }
  return out;
}

PullbackReport compare_pullbacks(const GraphAction& a, const Vertex& x0,
                                 const floyd::FloydChart& chart, const std::vector<Vertex>& k,
                                 const std::vector<std::vector<Element>>& rays) {
  PullbackReport out;
  out.cluster_gap = std::numeric_limits<double>::infinity();
  for (const auto& c : chart.clusters()) out.cluster_gap = std::min(out.cluster_gap, c.separation);
  const auto& g = a.graph();
  const Vertex& v = chart.basepoint();
  std::int64_t reach = 0;
  for (const auto& x : k) reach = std::max(reach, g.distance(x0, x));
  const std::int64_t cutoff = chart.radius() + reach;
  for (const auto& f : rays) {
    std::vector<Element> tail;
    std::vector<Vertex> orbit;
    for (const auto& h : f) {
      Vertex p = a.act(h, x0);
      if (g.distance(v, p) < cutoff) continue;
      tail.push_back(h);
      orbit.push_back(std::move(p));
    }
    PullbackRow row;
    row.orbit_clusters = chart.assignment(orbit);
    row.domain_clusters = chart.assignment(lambda_k(a, k, tail));
    if (row.orbit_clusters.empty() || row.domain_clusters.empty()) {
      ++out.inconclusive;
    } else {
      row.agree = row.orbit_clusters == row.domain_clusters;
      if (!row.agree) ++out.mismatches;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

GroupDefect group_perspectivity_defect(const GraphAction& a, const std::vector<Vertex>& k,
                                       const floyd::FloydFunction& f, const Vertex& v,
                                       std::int64_t r, const floyd::BandSample& s) {
  if (k.empty()) throw PreconditionError("empty K");
  const auto& g = a.graph();
  std::vector<Element> translates;
  for (const auto& p : floyd::band_points(g, v, r, s)) {
    for (const auto& x : k) {
      auto t = a.transporter(x, p);
      if (!t.empty()) translates.push_back(t.front());
    }
  }
  sort_unique(translates);
  if (translates.empty()) throw InconclusiveError("no translate of K reaches depth R");
  GroupDefect out;
  out.translates = translates.size();
  out.worst = translates.front();
  for (const auto& h : translates) {
    std::vector<Vertex> pts;
    for (const auto& x : k) pts.push_back(a.act(h, x));
    sort_unique(pts);
    if (pts.size() < 2) continue;
    const floyd::FloydBall fb(g, f, v, pts, s.margin);
    std::vector<std::size_t> idx;
    for (const auto& p : pts) idx.push_back(*fb.region().find(p));
    double diam = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto d = fb.distances_from({idx[i]});
      for (std::size_t j = i + 1; j < idx.size(); ++j) diam = std::max(diam, d[idx[j]]);
    }
    if (diam > out.defect) {
      out.defect = diam;
      out.worst = h;
    }
  }
  return out;
}

}  // namespace coarsekit::action
