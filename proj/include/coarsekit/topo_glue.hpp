#pragma once

// Finite topological spaces, admissible closed-set maps and Artin-Wraith
// glueings. Everything here is exact: a space with n points stores its whole
// closed-set family as a membership bitmap over the 2^n subsets.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace coarsekit::topo {

/// Subset of a finite point set; bit i stands for point i.
using PointSet = std::uint32_t;

inline constexpr std::size_t kMaxPoints = 12;

inline bool is_subset(PointSet a, PointSet b) { return (a & ~b) == 0; }

class FinSpace {
 public:
  /// Validates that the family contains the empty set and the whole space and
  /// is closed under pairwise union and intersection.
  FinSpace(std::vector<std::string> points, std::vector<PointSet> closed_sets);

  static FinSpace discrete(std::vector<std::string> points);
  static FinSpace indiscrete(std::vector<std::string> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<std::string>& points() const { return points_; }
  /// Sorted ascending by mask value.
  const std::vector<PointSet>& closed_sets() const { return closed_sets_; }
  PointSet full() const { return size() == 32 ? ~PointSet{0} : (PointSet{1} << size()) - 1; }

  bool is_closed(PointSet s) const;
  /// Closed-set family as a bitmap over the 64 subsets; spaces of ≤ 6 points.
  std::uint64_t family_mask() const;
  /// Smallest closed set containing s.
  PointSet closure(PointSet s) const;
  PointSet point_closure(std::size_t i) const { return point_closures_[i]; }
  /// Distinct values of cl{x}, in order of first occurrence by point index.
  const std::vector<PointSet>& distinct_point_closures() const { return distinct_closures_; }

  /// Index of a point by name; throws when absent.
  std::size_t index_of(const std::string& name) const;

  friend bool operator==(const FinSpace& a, const FinSpace& b) {
    return a.points_ == b.points_ && a.closed_sets_ == b.closed_sets_;
  }

 private:
  std::vector<std::string> points_;
  std::vector<PointSet> closed_sets_;
  std::vector<std::uint64_t> member_bits_;
  std::vector<PointSet> point_closures_;
  std::vector<PointSet> distinct_closures_;
};

using SpaceRef = std::shared_ptr<const FinSpace>;

inline SpaceRef share(FinSpace s) { return std::make_shared<const FinSpace>(std::move(s)); }

/// Point map between finite spaces. Continuity is not implied by construction.
struct PointMap {
  SpaceRef source;
  SpaceRef target;
  std::vector<std::size_t> assignment;

  PointMap(SpaceRef src, SpaceRef dst, std::vector<std::size_t> assign);
  static PointMap identity(SpaceRef space);

  PointSet image(PointSet s) const;
  PointSet preimage(PointSet s) const;
  /// Preimage of every closed set is closed.
  bool is_continuous() const;
};

/// this ∘ first: apply `first`, then `second`.
PointMap compose(const PointMap& second, const PointMap& first);

/// Union-preserving map Closed(X) -> Closed(Y), stored by its value on each
/// distinct point closure. Every closed set is the union of the closures of
/// its points, so this table determines the map and makes admissibility hold
/// by construction.
class AdmissibleMap {
 public:
  /// `table[k]` is the value on `source->distinct_point_closures()[k]`.
  AdmissibleMap(SpaceRef source, SpaceRef target, std::vector<PointSet> table);

  const SpaceRef& source() const { return source_; }
  const SpaceRef& target() const { return target_; }
  const std::vector<PointSet>& table() const { return table_; }
  /// Value attached to point i (the value of its closure).
  PointSet point_value(std::size_t i) const { return point_values_[i]; }

  /// f(A) for a closed A of the source; for non-closed A this is still the
  /// union of the point closure values.
  PointSet eval(PointSet a) const;

  /// Value of f on each distinct point closure, i.e. eval(cl{x}). Tables whose
  /// entries are not monotone in the closure order induce the same map as
  /// their normalized form.
  std::vector<PointSet> normalized_table() const;

  /// Equality as maps Closed(X) -> Closed(Y).
  friend bool operator==(const AdmissibleMap& a, const AdmissibleMap& b) {
    return *a.source_ == *b.source_ && *a.target_ == *b.target_ &&
           a.normalized_table() == b.normalized_table();
  }

 private:
  SpaceRef source_;
  SpaceRef target_;
  std::vector<PointSet> table_;
  std::vector<PointSet> point_values_;
};

/// X +_f Y. Points of X come first (indices 0..|X|-1), then points of Y.
struct GluedSpace {
  SpaceRef base;
  SpaceRef boundary;
  AdmissibleMap map;
  FinSpace space;

  PointSet base_mask() const { return (PointSet{1} << base->size()) - 1; }
  PointSet embed_boundary(PointSet s) const { return s << base->size(); }
};

GluedSpace glue(const AdmissibleMap& f);

/// ψ+φ on the disjoint unions, as a PointMap between the glued spaces.
PointMap sum_map(const GluedSpace& src, const GluedSpace& dst, const PointMap& on_base,
                 const PointMap& on_boundary);

/// id: X+_f Y -> X+_g Y continuous, decided by the preimage test.
bool id_glue_continuous(const AdmissibleMap& f, const AdmissibleMap& g);

/// f*(A) = Cl_Z(varpi^{-1}(f(Cl_X pi(A)))), with pi: Y -> X and varpi: Z -> W.
AdmissibleMap pullback(const AdmissibleMap& f, const PointMap& pi, const PointMap& varpi);

/// Given pi+varpi: Y+_{f'}Z -> X+_f W continuous, decides whether
/// id+id: Y+_{f'}Z -> Y+_{f*}Z is continuous. Throws PreconditionError when
/// the hypothesis fails.
bool check_pullback_universal(const AdmissibleMap& f, const PointMap& pi, const PointMap& varpi,
                              const AdmissibleMap& fprime);

struct CompositionCheck {
  bool holds = false;
  /// A closed set A of U with f**(A) strictly inside (f*)*(A), when one exists.
  std::optional<PointSet> strict_witness;
};

/// f** ⊆ (f*)*, with f** the pullback along (pi∘rho, varpi∘varrho).
CompositionCheck check_pullback_composition(const AdmissibleMap& f, const PointMap& pi,
                                            const PointMap& varpi, const PointMap& rho,
                                            const PointMap& varrho);

struct EightLemmaCheck {
  bool holds = false;
  /// Names of diagram arrows that failed the continuity test.
  std::vector<std::string> failed_arrows;
};

/// Builds f*, (f*)*, f**, f', (f')' and tests every arrow of the eight-term
/// diagram plus id+varpi: Y+_g Z -> Y+_{f*}W. `g` must make
/// pi+varpi: Y+_g Z -> X+_f W continuous (PreconditionError otherwise).
EightLemmaCheck check_eight_lemma(const AdmissibleMap& f, const PointMap& pi,
                                  const PointMap& varpi, const AdmissibleMap& g);

/// All topologies on n points (n ≤ 4), named prefix0..prefix{n-1}, as
/// closed-set families, deduplicated and sorted. Built from preorders.
std::vector<FinSpace> enumerate_topologies(std::size_t n, const std::string& prefix = "p");

/// Every table assignment of closed sets of Y to distinct closures of X.
std::vector<AdmissibleMap> enumerate_admissible_maps(const SpaceRef& x, const SpaceRef& y,
                                                     std::size_t budget = 1u << 20);

/// All continuous maps source -> target.
std::vector<PointMap> enumerate_continuous_maps(const SpaceRef& source, const SpaceRef& target,
                                                std::size_t budget = 1u << 16);

/// Uniformly random admissible map (table entries drawn independently).
AdmissibleMap random_admissible_map(const SpaceRef& x, const SpaceRef& y, std::mt19937_64& rng);

// JSON: points as strings, closed sets as sorted arrays of point names.
nlohmann::json to_json(const FinSpace& s);
FinSpace space_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AdmissibleMap& f);
AdmissibleMap map_from_json(const nlohmann::json& j);
nlohmann::json set_to_json(const FinSpace& s, PointSet set);
PointSet set_from_json(const FinSpace& s, const nlohmann::json& j);

}  // namespace coarsekit::topo
