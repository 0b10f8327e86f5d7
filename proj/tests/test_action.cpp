#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "coarsekit/action.hpp"

using namespace coarsekit;
using namespace coarsekit::action;

namespace {

std::vector<Vertex> ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Vertex> out;
  for (auto x : xs) out.push_back({x});
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

}  // namespace

TEST_CASE("built-in actions are actions by automorphisms") {
  for (const auto& a : {cayley_action(make_zn(1)), cayley_action(make_zn(2)), cayley_action(make_free(2)),
                        cayley_action(make_z2_free_product(3)), translation_action(2), dihedral_action(),
                        trivial_action(make_graph("line"))}) {
    const auto elems = a.group().ball(2);
    const auto verts = ball(a.graph(), a.graph().root(), 2).vertices;
    const auto chk = check_action(a, elems, verts);
    CHECK_MESSAGE(chk.ok, a.name() << ": " << chk.failure);
  }
  auto swap = permutation_action(make_permutation_group(2, {{1, 0}}), FiniteGraph::path(2));
  CHECK(check_action(swap, swap.group().ball(4), ints({0, 1})).ok);
  auto c4 = permutation_action(make_permutation_group(4, {{1, 2, 3, 0}}), FiniteGraph::cycle(4));
  CHECK(check_action(c4, c4.group().ball(4), ints({0, 1, 2, 3})).ok);
  // A permutation that is not a graph automorphism is caught.
  auto bad = permutation_action(make_permutation_group(3, {{1, 0, 2}}), FiniteGraph::path(3));
  CHECK_FALSE(check_action(bad, bad.group().ball(2), ints({0, 1, 2})).ok);
}

TEST_CASE("saturations of small sets") {
  auto swap = permutation_action(make_permutation_group(2, {{1, 0}}), FiniteGraph::path(2));
  const Region two = ball(swap.graph(), {0}, 1);
  const auto diag = saturation(swap, ints({0})).restrict(two);
  CHECK(diag == coarse::Relation::diagonal(2));
  CHECK(saturation(swap, ints({0, 1})).restrict(two) == coarse::Relation::full(2));

  // On the line, Sat({0, 1}) under translations is the width-1 relation.
  auto z = cayley_action(make_zn(1));
  const Region reg = ball(z.graph(), {0}, 5);
  std::vector<std::vector<double>> metric(reg.size(), std::vector<double>(reg.size()));
  for (std::size_t i = 0; i < reg.size(); ++i) {
    for (std::size_t j = 0; j < reg.size(); ++j) {
      metric[i][j] = static_cast<double>(std::llabs(reg.vertices[i][0] - reg.vertices[j][0]));
    }
  }
  CHECK(saturation(z, ints({0, 1})).restrict(reg) == coarse::Relation::width(metric, 1));
  CHECK(saturation(z, ints({0, 2})).contains({7}, {5}));
  CHECK_FALSE(saturation(z, ints({0, 2})).contains({7}, {6}));
  CHECK(saturation(z, ints({3})).neighbors({-4}) == ints({-4}));
  CHECK_THROWS_AS(saturation(z, {}), PreconditionError);

  // Shift by 2 only reaches half the line from a singleton.
  auto shift = translation_action(2);
  CHECK(saturation(shift, ints({0})).neighbors({1}).empty());
  CHECK(saturation(shift, ints({0, 1})).neighbors({4}) == ints({4, 5}));
}

TEST_CASE("membership in the action structure") {
  auto z = cayley_action(make_zn(1));
  SUBCASE("a fundamental domain covers width 1 at depth 1") {
    const auto e = width_pairs(z.graph(), {0}, 6, 1);
    const auto r = eps_phi_member(z, e, 3, 2);
    REQUIRE(r.verdict == Verdict::kYes);
    CHECK(r.witness->depth == 1);
    CHECK(r.witness->u == ints({0, 1}));
  }
  SUBCASE("width 2 needs two compositions of Sat({0, 1})") {
    const auto e = width_pairs(z.graph(), {0}, 6, 2);
    const auto r = eps_phi_member(z, e, 3, 2);
    REQUIRE(r.verdict == Verdict::kYes);
    CHECK(r.witness->depth == 2);
    CHECK(r.witness->u == ints({0, 1}));
    const Saturation sat(z, r.witness->u);
    for (const auto& chain : r.witness->chains) {
      CHECK(chain.size() <= 3);
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) CHECK(sat.contains(chain[i], chain[i + 1]));
    }
    // A larger budget finds a single saturation.
    CHECK(eps_phi_member(z, e, 3, 3).witness->depth == 1);
  }
  SUBCASE("no composition of singleton saturations leaves the diagonal") {
    auto triv = trivial_action(make_graph("line"));
    const std::vector<VertexPair> e{{{0}, {5}}};
    const auto r = eps_phi_member(triv, e, 4, 1);
    CHECK(r.verdict == Verdict::kInconclusive);
    CHECK_FALSE(r.search_exhausted);
    CHECK(eps_phi_member(triv, e, 4, 1, 5).verdict == Verdict::kInconclusive);
    // Pairs at distance 5 fit one saturation once U may contain both ends.
    CHECK(eps_phi_member(triv, e, 1, 2, 5).verdict == Verdict::kYes);
  }
  SUBCASE("finite carriers give a definite no") {
    auto triv = trivial_action(FiniteGraph::path(4));
    const std::vector<VertexPair> e{{{0}, {3}}};
    const auto r = eps_phi_member(triv, e, 3, 1);
    CHECK(r.verdict == Verdict::kNo);
    CHECK(r.search_exhausted);
    CHECK(r.candidates_tried == 4);
    CHECK(eps_phi_member(triv, e, 3, 2).verdict == Verdict::kYes);
  }
  SUBCASE("a diagonal pair off the orbit of U is not covered") {
    auto shift = translation_action(2);
    const std::vector<VertexPair> e{{{1}, {1}}};
    const auto r = eps_phi_member(shift, e, 2, 1);
    REQUIRE(r.verdict == Verdict::kYes);
    CHECK(r.witness->u == ints({1}));
  }
}

TEST_CASE("proper discontinuity of the free group on its tree") {
  auto f2 = cayley_action(make_free(2));
  const auto k = ball(f2.graph(), {}, 1).vertices;
  const auto r = is_properly_discontinuous(f2, k);
  CHECK(r.finite);
  CHECK(r.elements.size() == 17);
  auto b2 = f2.group().ball(2);
  std::sort(b2.begin(), b2.end());
  CHECK(r.elements == b2);
}

TEST_CASE("tuple finiteness agrees with brute force") {
  auto check = [](const GraphAction& a, const std::vector<std::vector<Vertex>>& sets, std::int64_t search) {
    const auto got = tuple_finiteness(a, sets);
    const auto elems = a.group().ball(search);
    std::vector<std::vector<Element>> want;
    const std::size_t n = sets.size() - 1;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<Element> t;
      for (auto i : idx) t.push_back(elems[i]);
      bool ok = meets(translate(a, t[n - 1], sets[n - 1]), sets[n]);
      for (std::size_t i = 0; ok && i + 1 < n; ++i) {
        ok = meets(translate(a, t[i], sets[i]), translate(a, t[i + 1], sets[i + 1]));
      }
      if (ok) want.push_back(t);
      std::size_t p = 0;
      while (p < n && ++idx[p] == elems.size()) idx[p++] = 0;
      if (p == n) break;
    }
    std::sort(want.begin(), want.end());
    CHECK(got == want);
    return got.size();
  };
  auto z = cayley_action(make_zn(1));
  CHECK(check(z, {ints({0, 1}), ints({2}), ints({3, 4})}, 10) == 4);
  CHECK(check(z, {ints({0}), ints({0, 1, 2}), ints({0, 1}), ints({5})}, 12) > 0);
  auto f2 = cayley_action(make_free(2));
  const auto b1 = ball(f2.graph(), {}, 1).vertices;
  CHECK(check(f2, {b1, ints({1}), b1}, 4) > 0);
  CHECK_THROWS_AS(tuple_finiteness(z, {ints({0})}), PreconditionError);
  CHECK_THROWS_AS(tuple_finiteness(z, {ints({0, 1, 2}), ints({0, 1, 2}), ints({0})}, 3), BudgetError);
}

TEST_CASE("fundamental domains") {
  const auto shift = find_fundamental_domain(translation_action(2), 6);
  CHECK(shift.cocompact);
  CHECK(shift.vertices == ints({0, 1}));
  CHECK(shift.spread == 1);
  const auto f2 = find_fundamental_domain(cayley_action(make_free(2)), 3);
  CHECK(f2.cocompact);
  CHECK(f2.vertices == std::vector<Vertex>{Vertex{}});
  CHECK(find_fundamental_domain(dihedral_action(), 5).vertices == ints({0}));
  const auto triv = find_fundamental_domain(trivial_action(make_graph("line")), 4);
  CHECK_FALSE(triv.cocompact);
  CHECK(triv.failure.find("grows") != std::string::npos);
  // Finite carriers are cocompact under any action.
  CHECK(find_fundamental_domain(trivial_action(FiniteGraph::path(3)), 4).cocompact);
}

TEST_CASE("orbit map certificates") {
  SUBCASE("integers on the line") {
    const auto c = milnor_svarc_map(cayley_action(make_zn(1)), {0}, 6);
    CHECK_MESSAGE(c.ok(), c.failure);
    CHECK(c.preimage_sizes == std::vector<std::size_t>{1, 3, 5, 7, 9, 11, 13});
    CHECK(c.quasi_inverse_displacement == 0);
    CHECK(c.map.source == 13);
  }
  SUBCASE("lattice and free group") {
    CHECK(milnor_svarc_map(cayley_action(make_zn(2)), {0, 0}, 6).ok());
    const auto f2 = milnor_svarc_map(cayley_action(make_free(2)), {}, 4);
    CHECK_MESSAGE(f2.ok(), f2.failure);
    CHECK(f2.preimage_sizes.back() == 161);
  }
  SUBCASE("a base point with a nontrivial stabilizer") {
    const auto c = milnor_svarc_map(dihedral_action(), {0}, 5);
    CHECK_MESSAGE(c.ok(), c.failure);
    CHECK(c.quasi_inverse_displacement == 1);
    // Every ball of radius r has 2(2r + 1) preimages.
    CHECK(c.preimage_sizes[3] == 14);
  }
  SUBCASE("a non-transitive cocompact action") {
    const auto c = milnor_svarc_map(translation_action(2), {0}, 5);
    CHECK_MESSAGE(c.ok(), c.failure);
    CHECK(c.domain == ints({0, 1}));
  }
  SUBCASE("a non-cocompact action names the failing step") {
    const auto c = milnor_svarc_map(trivial_action(make_graph("line")), {0}, 4);
    CHECK_FALSE(c.ok());
    CHECK(c.failure.rfind("quasi-density", 0) == 0);
  }
}

TEST_CASE("passing between subsets of the group and of the graph") {
  auto z = cayley_action(make_zn(1));
  const auto k = ints({0, 1});
  const auto pi = pi_k(z, k, ints({5}));
  CHECK(pi == std::vector<Element>{{4}, {5}});
  CHECK(lambda_k(z, k, pi) == ints({4, 5, 6}));

  auto f2 = cayley_action(make_free(2));
  const auto kf = ball(f2.graph(), {}, 1).vertices;
  const auto s = ball(f2.graph(), Vertex{1, 2}, 1).vertices;
  // S ⊆ Λ_K(Π_K(S)) and F ⊆ Π_K(Λ_K(F)).
  const auto back = lambda_k(f2, kf, pi_k(f2, kf, s));
  for (const auto& x : s) CHECK(std::binary_search(back.begin(), back.end(), x));
  const std::vector<Element> f{{1}, {1, 1}, {1, 1, 2}};
  const auto again = pi_k(f2, kf, lambda_k(f2, kf, f));
  for (const auto& g : f) CHECK(std::binary_search(again.begin(), again.end(), g));
}

TEST_CASE("sampled group rays are geodesic and distinct") {
  const auto g = make_free(2);
  const auto rays = sample_group_rays(*g, 12, 8, 2, 5);
  CHECK(rays.size() == 12);
  for (const auto& r : rays) {
    CHECK(r.size() == 9);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      CHECK(g->word_length(g->multiply(g->invert(r[i]), r[i + 1])) == 1);
    }
    CHECK(g->word_length(g->multiply(g->invert(r.front()), r.back())) == 8);
  }
  CHECK(sample_group_rays(*make_zn(1), 10, 6, 3, 1).size() == 10);
}

TEST_CASE("pullbacks through the orbit and through K agree") {
  const auto f = floyd::FloydFunction::geometric(0.5);
  for (const char* spec : {"zn:1", "zn:2", "free:2"}) {
    auto a = cayley_action(make_group(spec));
    const Vertex x0 = a.group().identity();
    const auto k = ball(a.graph(), x0, 1).vertices;
    for (std::int64_t r : {3, 4}) {
      const floyd::FloydChart chart(a.graph_ref(), f, x0, r);
      const auto rays = sample_group_rays(a.group(), 10, static_cast<std::size_t>(2 * r + 6), 2, 9);
      REQUIRE(rays.size() == 10);
      const auto rep = compare_pullbacks(a, x0, chart, k, rays);
      CHECK_MESSAGE(rep.mismatches == 0, spec << " R=" << r);
      CHECK(rep.inconclusive == 0);
    }
  }
}

TEST_CASE("translates of K shrink in the Floyd metric") {
  auto z = cayley_action(make_zn(1));
  const auto geom = floyd::FloydFunction::geometric(0.5);
  CHECK(group_perspectivity_defect(z, ints({0}), geom, {0}, 6).defect == 0.0);
  double last = 1.0;
  for (std::int64_t r : {4, 6, 8}) {
    const auto d = group_perspectivity_defect(z, ints({0, 1}), geom, {0}, r);
    CHECK(d.defect <= 2 * geom(r - 1) + 1e-12);
    CHECK(d.defect < last);
    last = d.defect;
  }
  const auto flat = floyd::FloydFunction::constant(1.0);
  CHECK(group_perspectivity_defect(z, ints({0, 1}), flat, {0}, 8).defect == doctest::Approx(1.0));

  // The saturation as an entourage for the band scan.
  auto f2 = cayley_action(make_free(2));
  const auto k = ball(f2.graph(), {}, 1).vertices;
  const auto rule = saturation(f2, k).rule();
  double prev = 1.0;
  for (std::int64_t r : {4, 8, 12}) {
    const auto d = floyd::perspectivity_defect(f2.graph(), geom, {}, rule, r);
    CHECK(d.defect < prev);
    prev = d.defect;
  }
  CHECK(prev < 1e-2);
}
