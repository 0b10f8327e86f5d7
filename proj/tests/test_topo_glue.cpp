#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "coarsekit/error.hpp"
#include "coarsekit/topo_glue.hpp"

using namespace coarsekit;
using namespace coarsekit::topo;

namespace {

// Independent count: scan every family of subsets of an n-point set and keep
// the ones that are topologies' closed-set families.
std::size_t brute_force_topology_count(std::size_t n) {
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

SpaceRef sierpinski_ab() { return share(FinSpace({"a", "b"}, {0b00, 0b01, 0b11})); }

std::vector<PointSet> subsets_of(const FinSpace& s) {
  std::vector<PointSet> out;
  for (PointSet t = 0; t <= s.full(); ++t) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("FinSpace validates its closed sets") {
  CHECK_THROWS_AS(FinSpace({"a", "b"}, {0b01, 0b11}), Error);
  CHECK_THROWS_AS(FinSpace({"a", "b"}, {0b00, 0b01}), Error);
  CHECK_THROWS_AS(FinSpace({"a", "b", "c"}, {0b000, 0b001, 0b010, 0b111}), Error);
  const FinSpace s = *sierpinski_ab();
  CHECK(s.closure(0b10) == 0b11);
  CHECK(s.closure(0b01) == 0b01);
  CHECK(s.distinct_point_closures() == std::vector<PointSet>{0b01, 0b11});
}

TEST_CASE("glue: Sierpinski base over one boundary point") {
  SpaceRef x = sierpinski_ab();
  SpaceRef y = share(FinSpace::discrete({"w"}));
  AdmissibleMap f(x, y, {0b1, 0b1});
  const GluedSpace g = glue(f);
  // points a=0, b=1, w=2
  CHECK(g.space.closed_sets() == std::vector<PointSet>{0b000, 0b100, 0b101, 0b111});
}

TEST_CASE("glue: zero map gives the disjoint union") {
  for (const FinSpace& xs : enumerate_topologies(2, "x")) {
    for (const FinSpace& ys : enumerate_topologies(2, "y")) {
      SpaceRef x = share(xs), y = share(ys);
      AdmissibleMap f(x, y, std::vector<PointSet>(x->distinct_point_closures().size(), 0));
      std::set<PointSet> expected;
      for (PointSet a : x->closed_sets()) {
        for (PointSet b : y->closed_sets()) expected.insert(a | (b << 2));
      }
      const GluedSpace g = glue(f);
      CHECK(std::set<PointSet>(g.space.closed_sets().begin(), g.space.closed_sets().end()) ==
            expected);
    }
  }
}

TEST_CASE("glue: discrete point forced to carry its boundary image") {
  SpaceRef x = share(FinSpace::discrete({"x"}));
  SpaceRef y = share(FinSpace::discrete({"w"}));
  const GluedSpace g = glue(AdmissibleMap(x, y, {0b1}));
  CHECK(g.space.closed_sets() == std::vector<PointSet>{0b00, 0b10, 0b11});
  CHECK_FALSE(g.space.is_closed(0b01));
}

TEST_CASE("glue rejects overlapping point names") {
  SpaceRef x = share(FinSpace::discrete({"p"}));
  CHECK_THROWS_AS(glue(AdmissibleMap(x, x, {0})), Error);
}

TEST_CASE("glued spaces recover base and boundary; base is open") {
  for (const FinSpace& xs : enumerate_topologies(2, "x")) {
    for (const FinSpace& ys : enumerate_topologies(2, "y")) {
      SpaceRef x = share(xs), y = share(ys);
      for (const AdmissibleMap& f : enumerate_admissible_maps(x, y)) {
        const GluedSpace g = glue(f);
        const PointSet xm = g.base_mask();
        CHECK(g.space.is_closed(g.space.full() & ~xm));
        std::set<PointSet> on_x, on_y;
        for (PointSet c : g.space.closed_sets()) {
          on_x.insert(c & xm);
          on_y.insert(c >> 2);
        }
        CHECK(on_x == std::set<PointSet>(x->closed_sets().begin(), x->closed_sets().end()));
        CHECK(on_y == std::set<PointSet>(y->closed_sets().begin(), y->closed_sets().end()));
      }
    }
  }
}

TEST_CASE("admissible maps are empty- and union-preserving") {
  for (const FinSpace& xs : enumerate_topologies(3, "x")) {
    SpaceRef x = share(xs);
    SpaceRef y = share(FinSpace({"u", "v"}, {0b00, 0b01, 0b11}));
    std::mt19937_64 rng(7);
    for (int k = 0; k < 5; ++k) {
      AdmissibleMap f = random_admissible_map(x, y, rng);
      CHECK(f.eval(0) == 0);
      for (PointSet a : x->closed_sets()) {
        CHECK(y->is_closed(f.eval(a)));
        for (PointSet b : x->closed_sets()) CHECK(f.eval(a | b) == (f.eval(a) | f.eval(b)));
      }
    }
  }
}

TEST_CASE("id_glue_continuous examples") {
  SpaceRef x = share(FinSpace::discrete({"a"}));
  SpaceRef y = share(FinSpace::discrete({"w"}));
  AdmissibleMap full(x, y, {0b1});
  AdmissibleMap none(x, y, {0b0});
  CHECK(id_glue_continuous(full, full));
  CHECK_FALSE(id_glue_continuous(full, none));
  CHECK(id_glue_continuous(none, full));
}

TEST_CASE("id_glue_continuous matches pointwise containment on 2-point spaces") {
  for (const FinSpace& xs : enumerate_topologies(2, "x")) {
    for (const FinSpace& ys : enumerate_topologies(2, "y")) {
      SpaceRef x = share(xs), y = share(ys);
      const auto maps = enumerate_admissible_maps(x, y);
      for (const auto& f : maps) {
        for (const auto& g : maps) {
          bool pointwise = true;
          for (PointSet a : x->closed_sets()) pointwise &= is_subset(f.eval(a), g.eval(a));
          CHECK(id_glue_continuous(f, g) == pointwise);
        }
      }
    }
  }
}

TEST_CASE("pullback along identities is the map itself") {
  SpaceRef x = sierpinski_ab();
  SpaceRef w = share(FinSpace({"u", "v"}, {0b00, 0b10, 0b11}));
  for (const AdmissibleMap& f : enumerate_admissible_maps(x, w)) {
    CHECK(pullback(f, PointMap::identity(x), PointMap::identity(w)) == f);
  }
}

TEST_CASE("pullback along a point inclusion") {
  SpaceRef x = sierpinski_ab();
  SpaceRef w = share(FinSpace::discrete({"u", "v"}));
  SpaceRef y = share(FinSpace::discrete({"y"}));
  AdmissibleMap f(x, w, {0b01, 0b11});
  PointMap pi(y, x, {1});  // y -> b
  AdmissibleMap fs = pullback(f, pi, PointMap::identity(w));
  CHECK(fs.table() == std::vector<PointSet>{f.eval(x->closure(0b10))});
}

TEST_CASE("pullback formula evaluates on every closed set") {
  std::mt19937_64 rng(11);
  const auto tops = enumerate_topologies(2, "s");
  for (int trial = 0; trial < 40; ++trial) {
    auto pick = [&](const std::string& pre) {
      const auto ts = enumerate_topologies(2, pre);
      return share(ts[rng() % ts.size()]);
    };
    SpaceRef x = pick("x"), w = pick("w"), y = pick("y"), z = pick("z");
    const auto pis = enumerate_continuous_maps(y, x);
    const auto varpis = enumerate_continuous_maps(z, w);
    const PointMap& pi = pis[rng() % pis.size()];
    const PointMap& varpi = varpis[rng() % varpis.size()];
    AdmissibleMap f = random_admissible_map(x, w, rng);
    AdmissibleMap fs = pullback(f, pi, varpi);
    for (PointSet a : y->closed_sets()) {
      CHECK(fs.eval(a) == z->closure(varpi.preimage(f.eval(x->closure(pi.image(a))))));
    }
    // pi+varpi is continuous out of the pullback glueing.
    CHECK(sum_map(glue(fs), glue(f), pi, varpi).is_continuous());
  }
  CHECK(tops.size() == 4);
}

TEST_CASE("pullback rejects discontinuous maps") {
  SpaceRef x = sierpinski_ab();
  SpaceRef y = share(FinSpace::discrete({"p", "q"}));
  SpaceRef ybad = share(FinSpace::indiscrete({"p", "q"}));
  SpaceRef w = share(FinSpace::discrete({"w"}));
  AdmissibleMap f(x, w, {0b1, 0b1});
  CHECK_NOTHROW(pullback(f, PointMap(y, x, {0, 1}), PointMap::identity(w)));
  CHECK_THROWS_AS(pullback(f, PointMap(ybad, x, {0, 1}), PointMap::identity(w)),
                  PreconditionError);
}

TEST_CASE("check_pullback_universal: f' = f* and smaller maps") {
  SpaceRef x = sierpinski_ab();
  SpaceRef w = share(FinSpace::discrete({"u", "v"}));
  SpaceRef y = share(FinSpace::discrete({"p", "q"}));
  SpaceRef z = share(FinSpace::discrete({"r"}));
  AdmissibleMap f(x, w, {0b01, 0b11});
  PointMap pi(y, x, {0, 1});
  PointMap varpi(z, w, {1});
  AdmissibleMap fs = pullback(f, pi, varpi);
  CHECK(check_pullback_universal(f, pi, varpi, fs));
  AdmissibleMap zero(y, z, {0, 0});
  CHECK(check_pullback_universal(f, pi, varpi, zero));
  // A map larger than f* breaks the hypothesis instead of returning false.
  AdmissibleMap big(y, z, {0b1, 0b1});
  if (!(big == fs)) CHECK_THROWS_AS(check_pullback_universal(f, pi, varpi, big), PreconditionError);
}

TEST_CASE("check_pullback_composition with identities is an equality") {
  SpaceRef x = sierpinski_ab();
  SpaceRef w = share(FinSpace({"u", "v"}, {0b00, 0b10, 0b11}));
  for (const AdmissibleMap& f : enumerate_admissible_maps(x, w)) {
    const PointMap ix = PointMap::identity(x), iw = PointMap::identity(w);
    const CompositionCheck c = check_pullback_composition(f, ix, iw, ix, iw);
    CHECK(c.holds);
    CHECK_FALSE(c.strict_witness.has_value());
  }
}

TEST_CASE("check_eight_lemma on identities and on g = f**") {
  SpaceRef x = sierpinski_ab();
  SpaceRef w = share(FinSpace({"u", "v"}, {0b00, 0b10, 0b11}));
  SpaceRef y = share(FinSpace({"p", "q"}, {0b00, 0b01, 0b11}));
  SpaceRef z = share(FinSpace::discrete({"r"}));
  for (const AdmissibleMap& f : enumerate_admissible_maps(x, w)) {
    const PointMap ix = PointMap::identity(x), iw = PointMap::identity(w);
    CHECK(check_eight_lemma(f, ix, iw, f).holds);
    for (const PointMap& pi : enumerate_continuous_maps(y, x)) {
      for (const PointMap& varpi : enumerate_continuous_maps(z, w)) {
        const EightLemmaCheck r = check_eight_lemma(f, pi, varpi, pullback(f, pi, varpi));
        CHECK(r.holds);
      }
    }
  }
}

TEST_CASE("enumerate_topologies counts match brute force") {
  CHECK(enumerate_topologies(1).size() == 1);
  CHECK(enumerate_topologies(2).size() == 4);
  CHECK(enumerate_topologies(3).size() == 29);
  CHECK(brute_force_topology_count(1) == 1);
  CHECK(brute_force_topology_count(2) == 4);
  CHECK(brute_force_topology_count(3) == 29);
  CHECK(enumerate_topologies(4).size() == 355);
  CHECK(brute_force_topology_count(4) == 355);
  CHECK_THROWS_AS(enumerate_topologies(5), BudgetError);
}

TEST_CASE("enumerate_admissible_maps counts") {
  SpaceRef one = share(FinSpace::discrete({"x"}));
  SpaceRef w = share(FinSpace::discrete({"w"}));
  CHECK(enumerate_admissible_maps(one, w).size() == 2);
  SpaceRef d2 = share(FinSpace::discrete({"a", "b"}));
  SpaceRef i2 = share(FinSpace::indiscrete({"u", "v"}));
  CHECK(enumerate_admissible_maps(d2, i2).size() == 4);
  for (const FinSpace& xs : enumerate_topologies(3, "x")) {
    SpaceRef x = share(xs);
    std::size_t expected = 1;
    for (std::size_t k = 0; k < x->distinct_point_closures().size(); ++k) {
      expected *= x->closed_sets().size();
    }
    CHECK(enumerate_admissible_maps(x, share(FinSpace(xs.points(), xs.closed_sets()))).size() ==
          expected);
  }
  CHECK_THROWS_AS(enumerate_admissible_maps(d2, i2, 3), BudgetError);
}

TEST_CASE("JSON round trip") {
  SpaceRef x = sierpinski_ab();
  SpaceRef w = share(FinSpace({"u", "v"}, {0b00, 0b10, 0b11}));
  AdmissibleMap f(x, w, {0b10, 0b11});
  const auto j = to_json(f);
  CHECK(j["source"]["closed"] == nlohmann::json::parse(R"([[],["a"],["a","b"]])"));
  CHECK(map_from_json(j) == f);
  CHECK(space_from_json(to_json(*w)) == *w);
  for (PointSet s : subsets_of(*x)) CHECK(set_from_json(*x, set_to_json(*x, s)) == s);
}
