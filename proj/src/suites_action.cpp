#include <algorithm>
#include <limits>
#include <random>

#include "coarsekit/action.hpp"
#include "coarsekit/suites.hpp"

namespace coarsekit::suites {

using nlohmann::json;
using namespace coarsekit::action;

namespace {

std::vector<std::string> names(const json& list) { return list.get<std::vector<std::string>>(); }

std::vector<std::string> all_actions(const Manifest& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m.json().at("actions").items()) out.push_back(k);
  return out;
}

bool meets(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
  return std::any_of(a.begin(), a.end(),
                     [&](const Vertex& x) { return std::find(b.begin(), b.end(), x) != b.end(); });
}

std::vector<Vertex> translate(const GraphAction& a, const Element& g, const std::vector<Vertex>& s) {
  std::vector<Vertex> out;
  for (const auto& x : s) out.push_back(a.act(g, x));
  return out;
}

// Nonempty random subset of the ball around the root.
std::vector<Vertex> random_set(const GraphAction& a, std::int64_t radius, std::mt19937_64& rng) {
  const auto pool = ball(a.graph(), a.graph().root(), radius).vertices;
  std::vector<Vertex> out;
  for (const auto& v : pool) {
    if (rng() % 3 == 0) out.push_back(v);
  }
  if (out.empty()) out.push_back(pool[rng() % pool.size()]);
  std::sort(out.begin(), out.end());
  return out;
}

json vertices_json(const LocallyFiniteGraph& g, const std::vector<Vertex>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(g.label(v));
  return out;
}

void run_invariants(const Manifest& m, SuiteReport& r) {
  for (const auto& name : all_actions(m)) {
    const auto a = m.action(name);
    const auto chk = check_action(a, a.group().ball(2), ball(a.graph(), a.graph().root(), 2).vertices);
    r.check(chk.ok, [&] { return json{{"action", name}, {"failure", chk.failure}}; });
  }
}

void run_saturation(const Manifest& m, SuiteReport& r) {
  std::mt19937_64 rng(m.seed() ^ 0x736174ULL);
  const auto trials = m.knob_int("tuple_trials");
  for (const auto& name : all_actions(m)) {
    const auto a = m.action(name);
    const auto region = ball(a.graph(), a.graph().root(), 3);
    const auto elems = a.group().ball(1);
    for (std::int64_t t = 0; t < trials; ++t) {
      const auto base = random_set(a, 1, rng);
      const Saturation sat(a, base);
      auto bigger = base;
      bigger.push_back(region.vertices[rng() % region.size()]);
      std::sort(bigger.begin(), bigger.end());
      bigger.erase(std::unique(bigger.begin(), bigger.end()), bigger.end());
      const Saturation sat2(a, bigger);
      std::string broken;
      for (const auto& x : base) {
        if (!sat.contains(x, x)) broken = "diagonal on A";
      }
      for (std::size_t i = 0; i < region.size() && broken.empty(); ++i) {
        const auto& p = region.vertices[i];
        const auto nb = sat.neighbors(p);
        for (const auto& q : nb) {
          if (!sat.contains(q, p)) broken = "symmetry";
          if (!sat2.contains(p, q)) broken = "monotone in A";
          for (const auto& g : elems) {
            if (!sat.contains(a.act(g, p), a.act(g, q))) broken = "invariance";
          }
        }
        for (const auto& q : ball(a.graph(), p, 2).vertices) {
          if (sat.contains(p, q) != std::binary_search(nb.begin(), nb.end(), q)) broken = "neighbors";
        }
      }
      r.check(broken.empty(), [&] {
        return json{{"action", name}, {"base", vertices_json(a.graph(), base)}, {"broken", broken}};
      });
    }
  }
  // Translations: Sat({0, 1}) is the width-1 relation.
  const auto z = m.action("Z-line");
  const auto reg = ball(z.graph(), {0}, 6);
  const auto sat = Saturation(z, {{0}, {1}}).restrict(reg);
  bool width1 = true;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    for (std::size_t j = 0; j < reg.size(); ++j) {
      width1 = width1 && sat.contains(i, j) == (std::llabs(reg.vertices[i][0] - reg.vertices[j][0]) <= 1);
    }
  }
  r.check(width1, [] { return json{{"action", "Z-line"}, {"base", {"0", "1"}}}; });
}

void run_basis(const Manifest& m, SuiteReport& r) {
  json rows = json::array();
  for (const auto& name : names(m.plan("actions").at("pullbacks"))) {
    const auto a = m.action(name);
    for (std::int64_t w : {1, 2}) {
      const auto e = width_pairs(a.graph(), a.graph().root(), 4, w);
      const auto res = eps_phi_member(a, e, 3, 3);
      bool ok = res.verdict == Verdict::kYes && res.witness.has_value();
      if (ok) {
        const Saturation sat(a, res.witness->u);
        ok = res.witness->chains.size() == e.size();
        for (std::size_t i = 0; ok && i < e.size(); ++i) {
          const auto& c = res.witness->chains[i];
          ok = c.size() >= 2 && c.size() <= res.witness->depth + 1 && c.front() == e[i].first &&
               c.back() == e[i].second;
          for (std::size_t s = 0; ok && s + 1 < c.size(); ++s) ok = sat.contains(c[s], c[s + 1]);
        }
        rows.push_back({{"action", name}, {"width", w}, {"depth", res.witness->depth},
                        {"u", vertices_json(a.graph(), res.witness->u)}});
      }
      r.check(ok, [&] { return json{{"action", name}, {"width", w}, {"verdict", to_string(res.verdict)}}; });
    }
  }
  // Non-cocompact action: no small saturation chain is ever claimed.
  const auto triv = m.action(m.plan("actions").at("non_cocompact").get<std::string>());
  const std::vector<VertexPair> far{{triv.graph().root(), triv.graph().parse("5")}};
  const auto res = eps_phi_member(triv, far, 4, 1);
  r.check(res.verdict != Verdict::kYes, [&] { return json{{"action", triv.name()}, {"pair", {"0", "5"}}}; });
  r.details["witnesses"] = rows;
}

void run_properness(const Manifest& m, SuiteReport& r) {
  for (const auto& name : names(m.plan("actions").at("milnor_svarc"))) {
    const auto a = m.action(name);
    const auto k = ball(a.graph(), a.graph().root(), 1).vertices;
    const auto rep = is_properly_discontinuous(a, k);
    // Brute force over a group ball that contains every candidate.
    std::vector<Element> want;
    for (const auto& g : a.group().ball(4)) {
      if (meets(translate(a, g, k), k)) want.push_back(g);
    }
    std::sort(want.begin(), want.end());
    r.check(rep.finite && rep.elements == want, [&] {
      return json{{"action", name}, {"found", rep.elements.size()}, {"brute_force", want.size()}};
    });
  }
}

void run_tuple_finiteness(const Manifest& m, SuiteReport& r) {
  std::mt19937_64 rng(m.seed() ^ 0x7475706cULL);
  const auto trials = m.knob_int("tuple_trials");
  struct Plan {
    std::string action;
    std::int64_t set_radius;
    std::int64_t search;
  };
  for (const Plan& p : {Plan{"Z-line", 2, 9}, Plan{"Z2-grid", 1, 4}, Plan{"F2-tree", 1, 4}}) {
    const auto a = m.action(p.action);
    const auto elems = a.group().ball(p.search);
    for (std::int64_t t = 0; t < trials; ++t) {
      std::vector<std::vector<Vertex>> sets;
      for (int i = 0; i < 3; ++i) sets.push_back(random_set(a, p.set_radius, rng));
      const auto got = tuple_finiteness(a, sets);
      std::vector<std::vector<Element>> want;
      for (const auto& g1 : elems) {
        const auto b1 = translate(a, g1, sets[0]);
        for (const auto& g2 : elems) {
          const auto b2 = translate(a, g2, sets[1]);
          if (meets(b1, b2) && meets(b2, sets[2])) want.push_back({g1, g2});
        }
      }
      std::sort(want.begin(), want.end());
      r.check(got == want, [&] {
        json s = json::array();
        for (const auto& x : sets) s.push_back(vertices_json(a.graph(), x));
        return json{{"action", p.action}, {"sets", s}, {"found", got.size()}, {"brute_force", want.size()}};
      });
    }
  }
}

void run_fundamental_domain(const Manifest& m, SuiteReport& r) {
  json rows = json::object();
  for (const auto& name : names(m.plan("actions").at("milnor_svarc"))) {
    const auto a = m.action(name);
    const auto d = find_fundamental_domain(a, 4);
    // The translates of the domain cover a larger ball.
    bool covers = d.cocompact;
    for (const auto& v : ball(a.graph(), a.graph().root(), 6).vertices) {
      if (!covers) break;
      bool hit = false;
      for (const auto& x : d.vertices) hit = hit || !a.transporter(x, v).empty();
      covers = hit;
    }
    r.check(covers, [&] { return json{{"action", name}, {"failure", d.failure}}; });
    rows[name] = vertices_json(a.graph(), d.vertices);
  }
  const auto name = m.plan("actions").at("non_cocompact").get<std::string>();
  const auto d = find_fundamental_domain(m.action(name), 4);
  r.check(!d.cocompact, [&] { return json{{"action", name}, {"expected", "not cocompact"}}; });
  r.details["domains"] = rows;
}

void run_milnor_svarc(const Manifest& m, SuiteReport& r) {
  const auto radius = m.knob_int("ms_radius");
  json rows = json::object();
  for (const auto& name : names(m.plan("actions").at("milnor_svarc"))) {
    const auto a = m.action(name);
    const auto c = milnor_svarc_map(a, a.graph().root(), radius);
    rows[name] = {{"radius", radius},
                  {"group_ball", c.group_ball.size()},
                  {"region", c.region.size()},
                  {"domain", vertices_json(a.graph(), c.domain)},
                  {"generator_pairs", c.generator_pairs},
                  {"preimage_sizes", c.preimage_sizes},
                  {"quasi_inverse_displacement", c.quasi_inverse_displacement}};
    r.check(c.ok(), [&] { return json{{"action", name}, {"radius", radius}, {"failure", c.failure}}; });
  }
  const auto name = m.plan("actions").at("non_cocompact").get<std::string>();
  const auto bad = milnor_svarc_map(m.action(name), {0}, std::min<std::int64_t>(radius, 4));
  r.check(!bad.ok() && bad.failure.rfind("quasi-density", 0) == 0,
          [&] { return json{{"action", name}, {"failure", bad.failure}}; });
  r.details["certificates"] = rows;
}

void run_pi_lambda(const Manifest& m, SuiteReport& r) {
  std::mt19937_64 rng(m.seed() ^ 0x706cULL);
  const auto trials = m.knob_int("tuple_trials");
  for (const auto& name : names(m.plan("actions").at("milnor_svarc"))) {
    const auto a = m.action(name);
    const auto k = ball(a.graph(), a.graph().root(), 1).vertices;
    const auto elems = a.group().ball(2);
    for (std::int64_t t = 0; t < trials; ++t) {
      const auto s = random_set(a, 3, rng);
      std::vector<Element> f;
      for (const auto& g : elems) {
        if (rng() % 4 == 0) f.push_back(g);
      }
      if (f.empty()) f.push_back(elems.front());
      std::sort(f.begin(), f.end());
      const auto pis = pi_k(a, k, s);
      const auto back = lambda_k(a, k, pis);
      bool ok = std::includes(back.begin(), back.end(), s.begin(), s.end());
      const auto again = pi_k(a, k, lambda_k(a, k, f));
      ok = ok && std::includes(again.begin(), again.end(), f.begin(), f.end());
      // Definition of Π_K by brute force over the group ball.
      for (const auto& g : a.group().ball(5)) {
        const bool in = std::binary_search(pis.begin(), pis.end(), g);
        if (meets(translate(a, g, k), s) != in) ok = false;
      }
      r.check(ok, [&] { return json{{"action", name}, {"set", vertices_json(a.graph(), s)}}; });
    }
  }
}

void run_group_perspectivity(const Manifest& m, SuiteReport& r) {
  const auto f = m.function(m.plan("actions").at("pullback_function").get<std::string>());
  const auto flat = m.function(m.plan("perspectivity").at("control").get<std::string>());
  const auto radii = m.knob_ints("perspectivity_radii");
  json rows = json::object();
  for (const auto& name : names(m.plan("actions").at("pullbacks"))) {
    const auto a = m.action(name);
    const Vertex v = a.graph().root();
    const auto k = ball(a.graph(), v, 1).vertices;
    json row = json::array();
    double last = std::numeric_limits<double>::infinity();
    for (auto rad : radii) {
      const auto d = group_perspectivity_defect(a, k, f, v, rad);
      // Translates of K near depth R have diameter ≤ 2·diam(K)·f(R - 2).
      const double bound = 4.0 * f(rad - 2);
      row.push_back({{"R", rad}, {"defect", number(d.defect)}, {"translates", d.translates}});
      r.check(d.defect <= last && d.defect <= bound + 1e-12, [&] {
        return json{{"action", name}, {"R", rad}, {"defect", d.defect}, {"previous", last}, {"bound", bound}};
      });
      last = d.defect;
    }
    const auto c = group_perspectivity_defect(a, k, flat, v, radii.back());
    r.check(c.defect > 0.5, [&] { return json{{"action", name}, {"control_defect", c.defect}}; });
    rows[name] = row;
  }
  r.details["defects"] = rows;
}

void run_pullbacks(const Manifest& m, SuiteReport& r) {
  const auto f = m.function(m.plan("actions").at("pullback_function").get<std::string>());
  const auto count = static_cast<std::size_t>(m.knob_int("rays"));
  json rows = json::array();
  for (const auto& name : names(m.plan("actions").at("pullbacks"))) {
    const auto a = m.action(name);
    const Vertex x0 = a.graph().root();
    const auto k = ball(a.graph(), x0, 1).vertices;
    for (auto rad : m.knob_ints("chart_radii")) {
      const floyd::FloydChart chart(a.graph_ref(), f, x0, rad);
      const auto rays =
          sample_group_rays(a.group(), count, static_cast<std::size_t>(2 * rad + 6), 2, m.seed());
      const auto rep = compare_pullbacks(a, x0, chart, k, rays);
      for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& row = rep.rows[i];
        if (row.orbit_clusters.empty() && row.domain_clusters.empty()) {
          r.inconclude({{"action", name}, {"R", rad}, {"ray", i}});
          continue;
        }
        r.check(row.agree, [&] {
          json ray = json::array();
          for (const auto& g : rays[i]) ray.push_back(a.group().to_string(g));
          return json{{"action", name}, {"R", rad}, {"ray", ray}, {"orbit_clusters", row.orbit_clusters},
                      {"domain_clusters", row.domain_clusters}};
        });
      }
      if (rays.size() < count) r.inconclude({{"action", name}, {"R", rad}, {"rays", rays.size()}});
      rows.push_back({{"action", name}, {"R", rad}, {"rays", rays.size()}, {"mismatches", rep.mismatches},
                      {"cluster_gap", number(rep.cluster_gap)}});
    }
  }
  r.details["pairs"] = rows;
}

}  // namespace

std::vector<Suite> action_suites() {
  return {
      {"action.invariants", "action", "actions are by automorphisms with consistent transporters", run_invariants},
      {"action.saturation", "action", "saturations are symmetric, invariant and monotone", run_saturation},
      {"action.basis", "action", "width entourages are covered by compositions of saturations", run_basis},
      {"action.properness", "action", "{g : gK meets K} is finite and matches brute force", run_properness},
      {"action.tuple-finiteness", "action", "chains of meeting translates are finite", run_tuple_finiteness},
      {"action.fundamental-domain", "action", "cocompact actions have a finite orbit cover",
       run_fundamental_domain},
      {"action.milnor-svarc", "action", "orbit maps are coarse equivalences", run_milnor_svarc},
      {"action.pi-lambda", "action", "passing between subsets of the group and the space", run_pi_lambda},
      {"action.group-perspectivity", "action", "translates of K shrink near the boundary",
       run_group_perspectivity},
      {"action.pullbacks", "action", "pullbacks through the orbit and through K agree", run_pullbacks},
  };
}

}  // namespace coarsekit::suites
