#include <map>
#include <optional>
#include <random>

#include "coarsekit/error.hpp"
#include "coarsekit/suites.hpp"
#include "coarsekit/topo_glue.hpp"

namespace coarsekit::suites {

using nlohmann::json;
using namespace coarsekit::topo;

namespace {

std::size_t brute_force_count(std::size_t n) {
  const std::size_t subsets = std::size_t{1} << n;
  const PointSet full = static_cast<PointSet>(subsets - 1);
  std::size_t count = 0;
  for (std::uint64_t fam = 0; fam < (std::uint64_t{1} << subsets); ++fam) {
    auto has = [&](PointSet s) { return (fam >> s) & 1u; };
    if (!has(0) || !has(full)) continue;
    bool ok = true;
    for (PointSet a = 0; a < subsets && ok; ++a) {
      if (!has(a)) continue;
      for (PointSet b = 0; b < subsets && ok; ++b) {
        if (has(b) && (!has(a | b) || !has(a & b))) ok = false;
      }
    }
    if (ok) ++count;
  }
  return count;
}

// Every topology on 1..n points, names prefixed.
std::vector<SpaceRef> spaces(std::size_t n, const std::string& prefix) {
  std::vector<SpaceRef> out;
  for (std::size_t k = 1; k <= n; ++k) {
    for (auto& s : enumerate_topologies(k, prefix)) out.push_back(share(std::move(s)));
  }
  return out;
}

json point_map_json(const PointMap& m) {
  return {{"source", to_json(*m.source)}, {"target", to_json(*m.target)}, {"assignment", m.assignment}};
}

std::string rerun(const Manifest& m, const std::string& id) {
  return "coarsekit verify " + id + " --seed " + std::to_string(m.seed()) + " --budget " + m.budget_name();
}

// Continuous maps between enumerated spaces, cached by space pointer.
class MapCache {
 public:
  const std::vector<PointMap>& get(const SpaceRef& src, const SpaceRef& dst) {
    auto key = std::make_pair(src.get(), dst.get());
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, enumerate_continuous_maps(src, dst)).first;
    return it->second;
  }

 private:
  std::map<std::pair<const FinSpace*, const FinSpace*>, std::vector<PointMap>> cache_;
};

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[rng() % v.size()];
}

// Calls fn(f) for every admissible map between spaces of ≤ n points.
template <class Fn>
void for_each_map(std::size_t n, const std::string& xp, const std::string& yp, Fn&& fn) {
  const auto xs = spaces(n, xp);
  const auto ys = spaces(n, yp);
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      for (const auto& f : enumerate_admissible_maps(x, y)) fn(f);
    }
  }
}

void run_count(const Manifest& m, SuiteReport& r) {
  const auto n = static_cast<std::size_t>(m.knob_int("topo_points"));
  json counts = json::object();
  for (std::size_t k = 1; k <= std::max<std::size_t>(n, 3); ++k) {
    const auto listed = enumerate_topologies(k).size();
    const auto brute = brute_force_count(k);
    counts[std::to_string(k)] = listed;
    r.check(listed == brute, [&] { return json{{"points", k}, {"enumerated", listed}, {"brute_force", brute}}; });
  }
  r.details["counts"] = counts;
}

void run_glueing(const Manifest& m, SuiteReport& r) {
  const auto n = static_cast<std::size_t>(m.knob_int("topo_points"));
  std::size_t maps = 0;
  for_each_map(n, "x", "y", [&](const AdmissibleMap& f) {
    ++maps;
    const auto& x = *f.source();
    const auto& y = *f.target();
    std::optional<GluedSpace> glued;
    try {
      glued = glue(f);
    } catch (const Error& e) {
      r.fail({{"map", to_json(f)}, {"error", e.what()}});
      return;
    }
    const GluedSpace& gs = *glued;
    bool ok = gs.space.size() == x.size() + y.size();
    const PointSet base = gs.base_mask();
    for (PointSet a = 0; ok && a <= gs.space.full(); ++a) {
      const PointSet ax = a & base;
      const PointSet ay = a >> x.size();
      const bool expected = x.is_closed(ax) && y.is_closed(ay) && is_subset(f.eval(ax), ay);
      ok = gs.space.is_closed(a) == expected;
    }
    // Base and boundary are recovered as subspaces; the base is open.
    for (PointSet a = 0; ok && a <= x.full(); ++a) ok = x.is_closed(a) == ((gs.space.closure(a) & base) == a);
    for (PointSet b = 0; ok && b <= y.full(); ++b) {
      ok = y.is_closed(b) == ((gs.space.closure(gs.embed_boundary(b)) >> x.size()) == b);
    }
    ok = ok && gs.space.is_closed(gs.space.full() & ~base);
    r.check(ok, [&] { return json{{"map", to_json(f)}, {"rerun", rerun(m, "topo.glueing")}}; });
  });
  r.details["maps"] = maps;
}

void run_continuity(const Manifest& m, SuiteReport& r) {
  const auto n = static_cast<std::size_t>(m.knob_int("topo_points"));
  const auto aux = static_cast<std::size_t>(m.knob_int("topo_aux"));
  std::mt19937_64 rng(m.seed() ^ 0x636f6e74ULL);
  std::size_t pairs = 0;
  for (const auto& x : spaces(n, "x")) {
    for (const auto& y : spaces(n, "y")) {
      const auto maps = enumerate_admissible_maps(x, y);
      // Exhaustive over pairs on small families, sampled partners otherwise.
      const bool exhaustive = maps.size() <= 64;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        std::vector<std::size_t> partners;
        if (exhaustive) {
          for (std::size_t j = 0; j < maps.size(); ++j) partners.push_back(j);
        } else {
          partners.push_back(i);
          for (std::size_t k = 0; k < 4 * aux; ++k) partners.push_back(rng() % maps.size());
        }
        for (std::size_t j : partners) {
          const auto& f = maps[i];
          const auto& g = maps[j];
          bool pointwise = true;
          for (PointSet a : x->closed_sets()) pointwise = pointwise && is_subset(f.eval(a), g.eval(a));
          const bool cont = id_glue_continuous(f, g);
          ++pairs;
          r.check(cont == pointwise, [&] {
            return json{{"f", to_json(f)}, {"g", to_json(g)}, {"continuous", cont}, {"pointwise", pointwise},
                        {"rerun", rerun(m, "topo.continuity")}};
          });
        }
      }
    }
  }
  r.details["pairs"] = pairs;
}

// Auxiliary data for the pullback suites: spaces Y, Z and continuous maps
// pi: Y -> X, varpi: Z -> W drawn from the enumeration.
struct Aux {
  std::vector<SpaceRef> ys, zs, us, vs;
  MapCache cache;
  std::mt19937_64 rng;

  Aux(std::size_t n, std::uint64_t seed)
      : ys(spaces(n, "y")), zs(spaces(n, "z")), us(spaces(n, "u")), vs(spaces(n, "v")), rng(seed) {}

  PointMap into(const std::vector<SpaceRef>& pool, const SpaceRef& target) {
    const auto& src = pick(pool, rng);
    return pick(cache.get(src, target), rng);
  }
};

void run_pullback_universal(const Manifest& m, SuiteReport& r) {
  const auto n = static_cast<std::size_t>(m.knob_int("topo_points"));
  const auto aux_n = static_cast<std::size_t>(m.knob_int("topo_aux"));
  Aux aux(n, m.seed() ^ 0x756e6976ULL);
  std::size_t skipped = 0;
  for_each_map(n, "x", "w", [&](const AdmissibleMap& f) {
    for (std::size_t k = 0; k < aux_n; ++k) {
      const PointMap pi = aux.into(aux.ys, f.source());
      const PointMap varpi = aux.into(aux.zs, f.target());
      const AdmissibleMap fs = pullback(f, pi, varpi);
      // pi+varpi out of the pullback glueing is continuous.
      const GluedSpace src = glue(fs);
      const GluedSpace dst = glue(f);
      const bool first = sum_map(src, dst, pi, varpi).is_continuous();
      r.check(first, [&] {
        return json{{"f", to_json(f)}, {"pi", point_map_json(pi)}, {"varpi", point_map_json(varpi)},
                    {"rerun", rerun(m, "topo.pullback-universal")}};
      });
      // Universal property against candidates f'.
      for (std::size_t t = 0; t < 4; ++t) {
        const AdmissibleMap fp = t == 0 ? fs : random_admissible_map(pi.source, varpi.source, aux.rng);
        bool ok = false;
        try {
          ok = check_pullback_universal(f, pi, varpi, fp);
        } catch (const PreconditionError&) {
          ++skipped;
          continue;
        }
        r.check(ok, [&] {
          return json{{"f", to_json(f)}, {"pi", point_map_json(pi)}, {"varpi", point_map_json(varpi)},
                      {"fprime", to_json(fp)}, {"rerun", rerun(m, "topo.pullback-universal")}};
        });
      }
    }
  });
  r.details["candidates_without_hypothesis"] = skipped;
}

void run_pullback_composition(const Manifest& m, SuiteReport& r) {
  const auto n = static_cast<std::size_t>(m.knob_int("topo_points"));
  const auto aux_n = static_cast<std::size_t>(m.knob_int("topo_aux"));
  Aux aux(n, m.seed() ^ 0x636f6d70ULL);
  std::size_t strict = 0;
  for_each_map(n, "x", "w", [&](const AdmissibleMap& f) {
    for (std::size_t k = 0; k < aux_n; ++k) {
      const PointMap pi = aux.into(aux.ys, f.source());
      const PointMap varpi = aux.into(aux.zs, f.target());
      const PointMap rho = aux.into(aux.us, pi.source);
      const PointMap varrho = aux.into(aux.vs, varpi.source);
      const auto c = check_pullback_composition(f, pi, varpi, rho, varrho);
      if (c.strict_witness) ++strict;
      r.check(c.holds, [&] {
        return json{{"f", to_json(f)},           {"pi", point_map_json(pi)},
                    {"varpi", point_map_json(varpi)}, {"rho", point_map_json(rho)},
                    {"varrho", point_map_json(varrho)}, {"rerun", rerun(m, "topo.pullback-composition")}};
      });
    }
  });
  r.details["strict_inclusions"] = strict;
}

void run_eight_lemma(const Manifest& m, SuiteReport& r) {
  const auto n = static_cast<std::size_t>(m.knob_int("topo_points"));
  const auto aux_n = static_cast<std::size_t>(m.knob_int("topo_aux"));
  Aux aux(n, m.seed() ^ 0x65696768ULL);
  for_each_map(n, "x", "w", [&](const AdmissibleMap& f) {
    for (std::size_t k = 0; k < aux_n; ++k) {
      const PointMap pi = aux.into(aux.ys, f.source());
      const PointMap varpi = aux.into(aux.zs, f.target());
      // g = f** and a random g below it that meets the hypothesis.
      std::vector<AdmissibleMap> gs{pullback(f, pi, varpi)};
      for (std::size_t t = 0; t < 4 && gs.size() < 2; ++t) {
        AdmissibleMap g = random_admissible_map(pi.source, varpi.source, aux.rng);
        if (sum_map(glue(g), glue(f), pi, varpi).is_continuous()) gs.push_back(std::move(g));
      }
      for (const auto& g : gs) {
        const auto e = check_eight_lemma(f, pi, varpi, g);
        r.check(e.holds, [&] {
          return json{{"f", to_json(f)},      {"pi", point_map_json(pi)},
                      {"varpi", point_map_json(varpi)}, {"g", to_json(g)},
                      {"failed_arrows", e.failed_arrows}, {"rerun", rerun(m, "topo.eight-lemma")}};
        });
      }
    }
  });
}

}  // namespace

std::vector<Suite> topo_suites() {
  return {
      {"topo.count", "topo", "topology enumeration matches a brute-force count", run_count},
      {"topo.glueing", "topo", "glued families are topologies recovering base and boundary", run_glueing},
      {"topo.continuity", "topo", "id between glueings is continuous iff f(A) is inside g(A)", run_continuity},
      {"topo.pullback-universal", "topo", "pullback glueing is universal among compatible glueings",
       run_pullback_universal},
      {"topo.pullback-composition", "topo", "pullback along composites is inside the iterated pullback",
       run_pullback_composition},
      {"topo.eight-lemma", "topo", "every arrow of the eight-term pullback diagram is continuous", run_eight_lemma},
  };
}

}  // namespace coarsekit::suites
