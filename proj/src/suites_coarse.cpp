#include <random>
#include <set>

#include "coarsekit/coarse.hpp"
#include "coarsekit/floyd.hpp"
#include "coarsekit/suites.hpp"

namespace coarsekit::suites {

using nlohmann::json;
using namespace coarsekit::coarse;

namespace {

// Relations on ≤ 3 points as 9-bit masks.
using Mask = std::uint32_t;

Mask to_mask(const Relation& r) {
  Mask m = 0;
  for (const auto& [a, b] : r.pairs()) m |= Mask{1} << (a * r.carrier() + b);
  return m;
}

Relation from_mask(Mask m, std::size_t n) {
  Relation r(n);
  for (std::size_t k = 0; k < n * n; ++k) {
    if ((m >> k) & 1u) r.insert(k / n, k % n);
  }
  return r;
}

Mask mask_inverse(Mask m, std::size_t n) {
  Mask out = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if ((m >> (a * n + b)) & 1u) out |= Mask{1} << (b * n + a);
    }
  }
  return out;
}

Mask mask_compose(Mask second, Mask first, std::size_t n) {
  Mask out = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!((first >> (a * n + c)) & 1u)) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if ((second >> (c * n + b)) & 1u) out |= Mask{1} << (a * n + b);
      }
    }
  }
  return out;
}

// Brute-force closure over the whole relation lattice of an n ≤ 3 carrier.
std::set<Mask> lattice_closure(std::size_t n, const std::vector<Mask>& gens) {
  std::vector<bool> in(std::size_t{1} << (n * n), false);
  Mask diag = 0;
  for (std::size_t i = 0; i < n; ++i) diag |= Mask{1} << (i * n + i);
  in[diag] = true;
  for (Mask g : gens) in[g] = true;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Mask> cur;
    for (Mask m = 0; m < in.size(); ++m) {
      if (in[m]) cur.push_back(m);
    }
    for (Mask a : cur) {
      auto add = [&](Mask x) {
        if (!in[x]) in[x] = true, changed = true;
      };
      add(mask_inverse(a, n));
      for (Mask b : cur) {
        add(a | b);
        add(mask_compose(a, b, n));
      }
    }
  }
  std::set<Mask> out;
  for (Mask m = 0; m < in.size(); ++m) {
    if (in[m]) out.insert(m);
  }
  return out;
}

Relation random_relation(std::size_t n, std::mt19937_64& rng, double p) {
  std::bernoulli_distribution coin(p);
  Relation r(n);
  for (Point a = 0; a < n; ++a) {
    for (Point b = 0; b < n; ++b) {
      if (coin(rng)) r.insert(a, b);
    }
  }
  return r;
}

std::vector<Relation> random_generators(std::size_t n, std::mt19937_64& rng) {
  std::vector<Relation> gens;
  const std::size_t k = rng() % 3;
  for (std::size_t i = 0; i < k; ++i) gens.push_back(random_relation(n, rng, 0.15));
  return gens;
}

json gens_json(std::size_t n, const std::vector<Relation>& gens) {
  json out = json::array();
  for (const auto& g : gens) out.push_back(to_json(g));
  return {{"carrier", n}, {"generators", out}};
}

Subset subset_of_mask(std::uint32_t m, std::size_t n) {
  Subset b;
  for (Point p = 0; p < n; ++p) {
    if ((m >> p) & 1u) b.push_back(p);
  }
  return b;
}

void run_basis_closure(const Manifest& m, SuiteReport& r) {
  const auto trials = m.knob_int("closure_trials");
  std::mt19937_64 rng(m.seed() ^ 0x62617369ULL);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::int64_t t = 0; t < trials; ++t) {
      const auto gens = random_generators(n, rng);
      std::vector<Mask> masks;
      for (const auto& g : gens) masks.push_back(to_mask(g));
      std::set<Mask> got;
      for (const Relation& e : basis_closure(n, gens)) got.insert(to_mask(e));
      const auto want = lattice_closure(n, masks);
      r.check(got == want, [&] {
        return json{{"instance", gens_json(n, gens)}, {"closure_size", got.size()}, {"oracle_size", want.size()}};
      });
    }
  }
}

void run_axioms(const Manifest& m, SuiteReport& r) {
  const auto trials = m.knob_int("coarse_trials");
  const auto max_n = static_cast<std::size_t>(m.knob_int("coarse_points"));
  std::mt19937_64 rng(m.seed() ^ 0x6178696fULL);
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng() % max_n;
    const auto gens = random_generators(n, rng);
    const CoarseStructure eps = generated_structure(n, gens);
    std::vector<std::string> broken;
    if (!is_member(eps, Relation::diagonal(n))) broken.push_back("diagonal");
    for (const auto& g : gens) {
      if (!is_member(eps, g)) broken.push_back("generator");
    }
    for (const Relation& e : eps.basis) {
      if (!is_member(eps, e.inverse())) broken.push_back("inverse");
      for (int s = 0; s < 4; ++s) {
        if (!is_member(eps, e & random_relation(n, rng, 0.5))) broken.push_back("subset");
      }
      for (const Relation& f : eps.basis) {
        if (!is_member(eps, e | f)) broken.push_back("union");
        if (!is_member(eps, compose(e, f))) broken.push_back("composition");
      }
    }
    r.check(broken.empty(), [&] { return json{{"instance", gens_json(n, gens)}, {"broken", broken}}; });
  }
}

void run_bounded_sets(const Manifest& m, SuiteReport& r) {
  const auto trials = m.knob_int("coarse_trials");
  const auto max_n = static_cast<std::size_t>(m.knob_int("coarse_points"));
  std::mt19937_64 rng(m.seed() ^ 0x626f756eULL);
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng() % max_n;
    const auto gens = random_generators(n, rng);
    const CoarseStructure eps = generated_structure(n, gens);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const Subset b = subset_of_mask(mask, n);
      const bool square = is_bounded(eps, b);
      const bool point = is_bounded_by_point(eps, b);
      r.check(square == point, [&] {
        return json{{"instance", gens_json(n, gens)}, {"set", b}, {"square", square}, {"point", point}};
      });
    }
  }
}

void run_intersection(const Manifest& m, SuiteReport& r) {
  const auto trials = m.knob_int("coarse_trials");
  std::mt19937_64 rng(m.seed() ^ 0x696e7465ULL);
  const std::size_t n = 3;
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::vector<Relation> ga{random_relation(n, rng, 0.2)};
    const std::vector<Relation> gb{random_relation(n, rng, 0.2)};
    const CoarseStructure a = generated_structure(n, ga);
    const CoarseStructure b = generated_structure(n, gb);
    std::set<Mask> both;
    for (Mask mk = 0; mk < 512; ++mk) {
      const Relation e = from_mask(mk, n);
      if (is_member(a, e) && is_member(b, e)) both.insert(mk);
    }
    bool ok = both.count(to_mask(Relation::diagonal(n))) == 1;
    for (Mask e : both) {
      ok = ok && both.count(mask_inverse(e, n)) == 1;
      for (Mask f : both) {
        ok = ok && both.count(e | f) == 1 && both.count(mask_compose(e, f, n)) == 1;
      }
      // Downward closed.
      for (Mask s = e; ok && s; s = (s - 1) & e) ok = both.count(s) == 1;
    }
    r.check(ok, [&] { return json{{"first", gens_json(n, ga)}, {"second", gens_json(n, gb)}}; });
  }
}

void run_bornologous(const Manifest& m, SuiteReport& r) {
  const auto trials = m.knob_int("coarse_trials");
  std::mt19937_64 rng(m.seed() ^ 0x626f726eULL);
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::size_t n = 2 + rng() % 2;
    const std::vector<Relation> ge{random_relation(n, rng, 0.15)};
    const std::vector<Relation> gz{random_relation(n, rng, 0.15)};
    const CoarseStructure eps = generated_structure(n, ge);
    const CoarseStructure zeta = generated_structure(n, gz);
    CarrierMap f{n, n, {}};
    for (Point p = 0; p < n; ++p) f.assignment.push_back(rng() % n);
    // Definitional check over every relation, plus the composition rule.
    bool definitional = true;
    bool composition = true;
    std::vector<Relation> sent;
    for (Mask mk = 0; mk < (Mask{1} << (n * n)); ++mk) {
      const Relation e = from_mask(mk, n);
      if (!is_member(eps, e)) continue;
      if (is_member(zeta, image(f, e))) {
        sent.push_back(e);
      } else {
        definitional = false;
      }
    }
    for (std::size_t i = 0; i < sent.size() && composition; i += 7) {
      for (std::size_t j = 0; j < sent.size() && composition; j += 5) {
        composition = is_member(zeta, image(f, compose(sent[i], sent[j])));
      }
    }
    const bool via_basis = is_bornologous(f, eps, zeta);
    r.check(via_basis == definitional && composition, [&] {
      return json{{"source", gens_json(n, ge)}, {"target", gens_json(n, gz)}, {"map", f.assignment},
                  {"via_basis", via_basis}, {"definitional", definitional}, {"composition", composition}};
    });
  }
}

void run_subspace(const Manifest& m, SuiteReport& r) {
  const auto trials = m.knob_int("coarse_trials");
  const auto max_n = static_cast<std::size_t>(m.knob_int("coarse_points"));
  std::mt19937_64 rng(m.seed() ^ 0x73756273ULL);
  std::size_t certified = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::size_t n = 2 + rng() % (max_n - 1);
    const std::vector<Relation> gens{random_relation(n, rng, 0.2)};
    const CoarseStructure eps = generated_structure(n, gens);
    Subset a;
    for (Point p = 0; p < n; ++p) {
      if (rng() % 2 || p == 0) a.push_back(p);
    }
    auto [sub, inc] = subspace(eps, a);
    bool ok = is_coarse_map(inc, sub, eps);
    for (const Relation& e : sub.basis) ok = ok && is_member(eps, image(inc, e));
    // Quasi-dense subsets of coarsely connected spaces give equivalences.
    if (auto w = quasi_density_witness(a, eps); w && is_coarsely_connected(eps)) {
      CarrierMap g{n, a.size(), {}};
      for (Point x = 0; x < n; ++x) {
        for (Point i = 0; i < a.size(); ++i) {
          if (eps.basis[*w].contains(x, a[i])) {
            g.assignment.push_back(i);
            break;
          }
        }
      }
      const auto cert = is_coarse_equivalence(inc, g, sub, eps);
      ok = ok && cert.ok;
      ++certified;
    }
    r.check(ok, [&] { return json{{"instance", gens_json(n, gens)}, {"subset", a}}; });
  }
  r.details["equivalences"] = certified;
}

// Chart table with clusters a and b merged (distance to the union).
ChartTable merge_clusters(const ChartTable& t, std::size_t a, std::size_t b) {
  ChartTable out;
  out.points = t.points;
  for (std::size_t c = 0; c < t.clusters; ++c) {
    if (c == b) continue;
    auto row = t.distance[c];
    if (c == a) {
      for (std::size_t p = 0; p < row.size(); ++p) row[p] = std::min(row[p], t.distance[b][p]);
    }
    out.distance.push_back(std::move(row));
  }
  out.clusters = out.distance.size();
  return out;
}

void run_perspectivity_conditions(const Manifest& m, SuiteReport& r) {
  const std::vector<double> radii{0.5, 0.25, 0.125};
  json rows = json::object();
  for (const auto& name : {"line", "grid", "tree"}) {
    const auto chart = m.build_chart(name);
    const auto table = chart.chart_table();
    const auto& region = chart.ball().region();
    Relation unit = Relation::diagonal(region.size());
    for (std::size_t p = 0; p < region.size(); ++p) {
      for (std::size_t q : region.adjacency[p]) unit.insert(p, q);
    }
    const auto width1 = perspectivity_conditions_equiv(unit, table, radii);
    r.check(width1.perspective, [&] { return json{{"chart", name}, {"relation", "width-1"}}; });
    const auto diag = perspectivity_conditions_equiv(Relation::diagonal(region.size()), table, radii);
    r.check(diag.perspective, [&] { return json{{"chart", name}, {"relation", "diagonal"}}; });
    // Control: the full relation joins every cluster to the base point.
    const auto full = perspectivity_conditions_equiv(Relation::full(region.size()), table, radii);
    r.check(!full.perspective, [&] { return json{{"chart", name}, {"relation", "full"}}; });
    // Merging boundary clusters keeps the entourage perspective.
    std::size_t merged_ok = 0;
    for (std::size_t b = 1; b < table.clusters; ++b) {
      const auto q = merge_clusters(table, 0, b);
      const auto rep = perspectivity_conditions_equiv(unit, q, radii);
      if (rep.perspective) ++merged_ok;
      r.check(rep.perspective, [&] { return json{{"chart", name}, {"merged", json::array({0, b})}}; });
    }
    rows[name] = {{"clusters", table.clusters}, {"points", table.points}, {"quotients_perspective", merged_ok}};
  }
  r.details["charts"] = rows;
}

}  // namespace

std::vector<Suite> coarse_suites() {
  return {
      {"coarse.basis-closure", "coarse", "generated basis equals brute-force lattice closure", run_basis_closure},
      {"coarse.axioms", "coarse", "generated structures satisfy the coarse axioms", run_axioms},
      {"coarse.bounded-sets", "coarse", "B x B bounded iff some B x {b} is", run_bounded_sets},
      {"coarse.intersection", "coarse", "intersections of coarse structures are coarse structures",
       run_intersection},
      {"coarse.bornologous", "coarse", "basis test for bornologous maps and composition of images",
       run_bornologous},
      {"coarse.subspace", "coarse", "inclusions are coarse embeddings; quasi-dense ones are equivalences",
       run_subspace},
      {"coarse.perspectivity-conditions", "coarse",
       "separation conditions on Floyd chart tables and their quotients", run_perspectivity_conditions},
  };
}

}  // namespace coarsekit::suites
