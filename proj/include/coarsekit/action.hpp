#pragma once

// Group actions on graphs by automorphisms. Every action exposes finite
// transporters {g : g·x = y}, which is what keeps saturations and orbit
// enumerations finite.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarsekit/coarse.hpp"
#include "coarsekit/error.hpp"
#include "coarsekit/floyd.hpp"
#include "coarsekit/graph.hpp"
#include "coarsekit/group.hpp"

namespace coarsekit::action {

using ActFn = std::function<Vertex(const Element&, const Vertex&)>;
using TransporterFn = std::function<std::vector<Element>(const Vertex&, const Vertex&)>;

class GraphAction {
 public:
  GraphAction(GroupRef group, GraphRef graph, ActFn act, TransporterFn transporter, std::string name);

  const GroupOracle& group() const { return *group_; }
  const GroupRef& group_ref() const { return group_; }
  const LocallyFiniteGraph& graph() const { return *graph_; }
  const GraphRef& graph_ref() const { return graph_; }
  const std::string& name() const { return name_; }

  Vertex act(const Element& g, const Vertex& x) const { return act_(g, x); }
  /// {g : g·x = y}, sorted.
  std::vector<Element> transporter(const Vertex& x, const Vertex& y) const;

 private:
  GroupRef group_;
  GraphRef graph_;
  ActFn act_;
  TransporterFn transporter_;
  std::string name_;
};

/// Left multiplication on a Cayley graph; ε_G is the ε_φ of this action.
GraphAction cayley_action(GroupRef group);
/// ℤ on the line by n -> n + step·k.
GraphAction translation_action(std::int64_t step);
/// Infinite dihedral group on the line; Stab(0) = {e, reflection}.
GraphAction dihedral_action();
/// A permutation group acting on a finite graph with matching vertex count.
GraphAction permutation_action(GroupRef group, GraphRef graph);
/// The trivial group.
GraphAction trivial_action(GraphRef graph);

struct ActionCheck {
  bool ok = true;
  std::string failure;
};

/// Identity, compatibility, automorphism and transporter invariants on the
/// given sample of elements and vertices.
ActionCheck check_action(const GraphAction& a, const std::vector<Element>& elements,
                         const std::vector<Vertex>& vertices);

/// Sat(A) = {(g·x, g·x') : g ∈ G, x, x' ∈ A}.
class Saturation {
 public:
  /// Throws PreconditionError for empty A.
  Saturation(const GraphAction& a, std::vector<Vertex> base);

  const std::vector<Vertex>& base() const { return base_; }
  bool contains(const Vertex& p, const Vertex& q) const;
  /// {q : (p, q) ∈ Sat(A)}, sorted.
  std::vector<Vertex> neighbors(const Vertex& p) const;
  /// Restriction to a finite region, on region indices.
  coarse::Relation restrict(const Region& region) const;
  floyd::NeighborRule rule() const;

 private:
  GraphAction action_;
  std::vector<Vertex> base_;
};

Saturation saturation(const GraphAction& a, const std::vector<Vertex>& base);

using VertexPair = std::pair<Vertex, Vertex>;

/// Pairs of ball(center, radius) at graph distance ≤ w.
std::vector<VertexPair> width_pairs(const LocallyFiniteGraph& g, const Vertex& center,
                                    std::int64_t radius, std::int64_t w);

struct EpsPhiWitness {
  std::size_t depth = 0;
  std::vector<Vertex> u;
  /// One Sat(U)-chain per pair of e.
  std::vector<std::vector<Vertex>> chains;
};

struct EpsPhiResult {
  Verdict verdict = Verdict::kInconclusive;
  std::optional<EpsPhiWitness> witness;
  std::size_t candidates_tried = 0;
  bool search_exhausted = false;
};

/// Searches e ⊆ Sat(U)^{∘n} for n ≤ depth and |U| ≤ max_set over subsets of
/// a candidate pool (ball(root, pool_radius), or the whole carrier when it is
/// finite and fits). NO only when the pool is the whole finite carrier and
/// every candidate failed.
EpsPhiResult eps_phi_member(const GraphAction& a, const std::vector<VertexPair>& e,
                            std::size_t depth, std::size_t max_set, std::int64_t pool_radius = 2);

struct DiscontinuityReport {
  bool finite = true;
  std::vector<Element> elements;
};

/// {g : g·K ∩ K ≠ ∅} via transporters.
DiscontinuityReport is_properly_discontinuous(const GraphAction& a, const std::vector<Vertex>& k);

/// Tuples (g_1..g_n) with g_i·B_i ∩ g_{i+1}·B_{i+1} ≠ ∅ (i < n) and
/// g_n·B_n ∩ B_{n+1} ≠ ∅; needs n + 1 ≥ 2 sets. Sorted.
std::vector<std::vector<Element>> tuple_finiteness(const GraphAction& a,
                                                   const std::vector<std::vector<Vertex>>& sets,
                                                   std::size_t budget = 1u << 20);

struct FundamentalDomain {
  std::vector<Vertex> vertices;
  std::int64_t radius = 0;
  /// Farthest distance from the root of a domain vertex.
  std::int64_t spread = 0;
  bool cocompact = false;
  std::string failure;
};

/// Greedy orbit cover of ball(root, radius), re-run at radius + 2 as a
/// stability check.
FundamentalDomain find_fundamental_domain(const GraphAction& a, std::int64_t radius);

struct MilnorSvarcCertificate {
  /// Group ball -> region, g ↦ g·x0.
  coarse::CarrierMap map;
  std::vector<Element> group_ball;
  Region region;
  std::vector<Vertex> domain;

  bool properly_discontinuous = false;
  /// φ(Δ_g) ⊆ Sat({x0, g·x0}).
  bool generator_images = false;
  std::size_t generator_pairs = 0;
  /// φ⁻¹(ball(x0, r)) finite, for every r ≤ radius.
  bool properness = false;
  std::vector<std::size_t> preimage_sizes;
  /// Every region vertex is Sat(K)-close to the orbit.
  bool quasi_density = false;
  /// Orbit-representative quasi-inverse; f∘φ moves by Stab(x0) only.
  bool quasi_inverse = false;
  std::int64_t quasi_inverse_displacement = 0;
  std::string failure;

  bool ok() const {
    return properly_discontinuous && generator_images && properness && quasi_density &&
           quasi_inverse;
  }
};

MilnorSvarcCertificate milnor_svarc_map(const GraphAction& a, const Vertex& x0,
                                        std::int64_t radius);

/// Π_K(S) = {g : g·K ∩ S ≠ ∅}, sorted.
std::vector<Element> pi_k(const GraphAction& a, const std::vector<Vertex>& k,
                          const std::vector<Vertex>& s);
/// Λ_K(F) = F·K, sorted.
std::vector<Vertex> lambda_k(const GraphAction& a, const std::vector<Vertex>& k,
                             const std::vector<Element>& f);

/// Seeded geodesic rays g0·(s1, s1 s2, ...) in the group, of the given length.
std::vector<std::vector<Element>> sample_group_rays(const GroupOracle& g, std::size_t count,
                                                    std::size_t length, std::int64_t shift,
                                                    std::uint64_t seed);

struct PullbackRow {
  std::vector<std::size_t> orbit_clusters;
  std::vector<std::size_t> domain_clusters;
  bool agree = false;
};

struct PullbackReport {
  std::vector<PullbackRow> rows;
  std::size_t mismatches = 0;
  std::size_t inconclusive = 0;
  /// Smallest separation between distinct clusters of the chart.
  double cluster_gap = 0.0;
};

/// Cluster assignments of φ_{x0}(F) and φ(F, K) for each sampled F, using the
/// part of F whose orbit points lie at depth ≥ R + max d(x0, K).
PullbackReport compare_pullbacks(const GraphAction& a, const Vertex& x0,
                                 const floyd::FloydChart& chart, const std::vector<Vertex>& k,
                                 const std::vector<std::vector<Element>>& rays);

struct GroupDefect {
  double defect = 0.0;
  std::size_t translates = 0;
  Element worst;
};

/// max over sampled g with g·K ⊄ ball(v, R - 1) of the δ_v-diameter of g·K;
/// throws InconclusiveError when no translate qualifies.
GroupDefect group_perspectivity_defect(const GraphAction& a, const std::vector<Vertex>& k,
                                       const floyd::FloydFunction& f, const Vertex& v,
                                       std::int64_t r, const floyd::BandSample& s = {});

}  // namespace coarsekit::action
