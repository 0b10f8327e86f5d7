#pragma once

// Coarse structures on finite carriers. A structure is never materialized as
// its (downward closed, exponentially large) family of entourages: membership
// means "dominated by some basis element". Infinite carriers are handled as
// sequences of nested finite truncations, see TruncationSequence below.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coarsekit/error.hpp"

namespace coarsekit::coarse {

using Point = std::size_t;
/// Sorted, duplicate-free list of carrier points.
using Subset = std::vector<Point>;
using Pair = std::pair<Point, Point>;

Subset make_subset(std::vector<Point> pts);

/// A relation e ⊆ X × X on a carrier of n points, stored as an n×n bitmap.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t carrier);

  static Relation diagonal(std::size_t carrier);
  static Relation full(std::size_t carrier);
  static Relation from_pairs(std::size_t carrier, const std::vector<Pair>& pairs);
  /// B × C.
  static Relation product(std::size_t carrier, const Subset& b, const Subset& c);
  /// {(x, y) : d(x, y) ≤ width}; `metric` is an n×n distance matrix.
  static Relation width(const std::vector<std::vector<double>>& metric, double width);

  std::size_t carrier() const { return n_; }
  bool contains(Point a, Point b) const;
  void insert(Point a, Point b);
  std::size_t pair_count() const;
  bool empty() const { return pair_count() == 0; }
  /// Lexicographically sorted.
  std::vector<Pair> pairs() const;

  Relation inverse() const;
  bool subset_of(const Relation& other) const;
  Relation operator|(const Relation& other) const;
  Relation operator&(const Relation& other) const;

  friend bool operator==(const Relation& a, const Relation& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }
  friend bool operator<(const Relation& a, const Relation& b) {
    return a.n_ != b.n_ ? a.n_ < b.n_ : a.words_ < b.words_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// e' ∘ e = {(a, b) : ∃c, (a, c) ∈ e, (c, b) ∈ e'}.
Relation compose(const Relation& e_prime, const Relation& e);

/// 𝔅(Y, u) = {x : ∃y ∈ Y, (x, y) ∈ u}.
Subset neighborhood(const Subset& y, const Relation& u);

/// Y × Y ⊆ u.
bool is_small(const Relation& u, const Subset& y);

using CoarseBasis = std::vector<Relation>;

/// Smallest family containing the generators and Δ that is closed under
/// inverse, composition and union; exact duplicates removed, sorted.
/// Throws BudgetError once the family exceeds `budget` elements.
CoarseBasis basis_closure(std::size_t carrier, const std::vector<Relation>& generators,
                          std::size_t budget = 1u << 14);

struct CoarseStructure {
  std::size_t carrier = 0;
  CoarseBasis basis;
  /// Topological boundedness of subsets, for properness checks. Unset means
  /// "not supplied".
  std::function<bool(const Subset&)> topologically_bounded;
  /// Optional integer labels of carrier points (used to match points across
  /// truncations).
  std::vector<std::int64_t> labels;
};

/// Generated structure; uses the closed basis when it fits the budget and the
/// single-element basis {equivalence closure} otherwise (same membership).
CoarseStructure generated_structure(std::size_t carrier, const std::vector<Relation>& generators);

/// ε_d on a finite metric space, basis = width relations for the given widths.
CoarseStructure metric_structure(const std::vector<std::vector<double>>& metric,
                                 const std::vector<double>& widths);

/// Index of the dominating basis element chosen by the tie-break rule
/// (fewest pairs, then lexicographic), or nullopt.
std::optional<std::size_t> dominating_element(const CoarseStructure& eps, const Relation& e);

bool is_member(const CoarseStructure& eps, const Relation& e);
bool is_bounded(const CoarseStructure& eps, const Subset& b);
/// Second criterion for boundedness: some b with B × {b} a member.
bool is_bounded_by_point(const CoarseStructure& eps, const Subset& b);
bool is_coarsely_connected(const CoarseStructure& eps);
/// Requires `topologically_bounded`; throws PreconditionError when missing.
bool is_proper_space(const CoarseStructure& eps);

/// Sets B×{b} ⊆ e for a basis element e, i.e. 𝔅({b}, e); every bounded set
/// lies inside one of these.
std::vector<Subset> maximal_bounded_sets(const CoarseStructure& eps);

struct CarrierMap {
  std::size_t source = 0;
  std::size_t target = 0;
  std::vector<Point> assignment;

  Point operator()(Point p) const { return assignment[p]; }
  static CarrierMap identity(std::size_t n);
};

/// f(e) = {(f(a), f(b)) : (a, b) ∈ e}.
Relation image(const CarrierMap& f, const Relation& e);
Subset preimage(const CarrierMap& f, const Subset& b);
CarrierMap compose(const CarrierMap& second, const CarrierMap& first);

/// Checks f(e) ∈ ζ for every basis element e of ε.
bool is_bornologous(const CarrierMap& f, const CoarseStructure& eps, const CoarseStructure& zeta);
bool is_proper_map(const CarrierMap& f, const CoarseStructure& eps, const CoarseStructure& zeta);
bool is_coarse_map(const CarrierMap& f, const CoarseStructure& eps, const CoarseStructure& zeta);
/// {(f(s), g(s))} ∈ ε_target.
bool are_close(const CarrierMap& f, const CarrierMap& g, const CoarseStructure& eps_target);

struct CertificateResult {
  bool ok = false;
  /// First failing condition when !ok.
  std::string failure;
  /// Basis indices dominating {(f g y, y)} in ζ and {(g f x, x)} in ε.
  std::optional<std::size_t> fg_close_witness;
  std::optional<std::size_t> gf_close_witness;
};

/// f: (X,ε) -> (Y,ζ) and g: Y -> X coarse and quasi-inverse to each other.
CertificateResult is_coarse_equivalence(const CarrierMap& f, const CarrierMap& g,
                                        const CoarseStructure& eps, const CoarseStructure& zeta);

/// Basis index e with 𝔅(A, e) = X, by the tie-break rule; nullopt if none.
std::optional<std::size_t> quasi_density_witness(const Subset& a, const CoarseStructure& eps);
bool is_quasi_dense(const Subset& a, const CoarseStructure& eps);

/// ε|_A with the inclusion map A -> X.
std::pair<CoarseStructure, CarrierMap> subspace(const CoarseStructure& eps, const Subset& a);

// ---------------------------------------------------------------------------
// Truncation sequences for infinite carriers.

/// Nested finite truncations of one infinite carrier. Points carry integer
/// labels shared across levels; basis element i denotes the same generator at
/// every level (e.g. the width-r relation for the i-th sampled r).
struct TruncationSequence {
  std::vector<CoarseStructure> levels;
  /// Basis indices 0..probes-1 are the generators probed by the verdicts.
  std::size_t probes = 1;
  /// Labels of sample points; chosen so that probed neighbourhoods of them
  /// fit inside every truncation but the first.
  std::vector<std::int64_t> core;

  const CoarseStructure& last() const { return levels.back(); }
  std::optional<Point> find(std::size_t level, std::int64_t label) const;
};

/// Label-matched map between two truncation sequences.
struct TruncatedMap {
  std::function<std::int64_t(std::int64_t)> rule;
  CarrierMap at(const TruncationSequence& src, const TruncationSequence& dst,
                std::size_t level) const;
};

/// 0, 1, 2, 4, ... up to the first power of two ≥ diameter.
std::vector<double> width_grid(double diameter);

/// Integer truncations [-N, N] (or the points of `keep` within it) with ε_d of
/// |a - b|; basis = width relations over width_grid(2N), so index i means the
/// same width at every level. Core = labels of the first level.
TruncationSequence integer_line_truncations(const std::vector<std::int64_t>& radii,
                                            const std::function<bool(std::int64_t)>& keep = {},
                                            std::size_t probes = 4);

/// Stability rule: YES when the last two observations agree; NO when the
/// observations strictly increase across every consecutive level (growth
/// signal, needs ≥ 3 levels); otherwise INCONCLUSIVE.
Verdict stable_verdict(const std::vector<std::optional<std::size_t>>& observations);

Verdict is_proper_space(const TruncationSequence& seq);
Verdict is_proper_map(const TruncatedMap& f, const TruncationSequence& src,
                      const TruncationSequence& dst);
Verdict is_bornologous(const TruncatedMap& f, const TruncationSequence& src,
                       const TruncationSequence& dst);
Verdict are_close(const TruncatedMap& f, const TruncatedMap& g, const TruncationSequence& src,
                  const TruncationSequence& dst);
Verdict is_quasi_dense(const std::function<bool(std::int64_t)>& in_a,
                       const TruncationSequence& seq);

struct SequenceCertificate {
  Verdict verdict = Verdict::kInconclusive;
  std::string failure;
  /// Dominating basis indices at the last level.
  std::optional<std::size_t> fg_close_witness;
  std::optional<std::size_t> gf_close_witness;
};

SequenceCertificate is_coarse_equivalence(const TruncatedMap& f, const TruncatedMap& g,
                                          const TruncationSequence& x,
                                          const TruncationSequence& y);

// ---------------------------------------------------------------------------
// Perspective entourages against a finite boundary chart.

/// Finite chart data supplied by a compactification: for every truncation
/// point and every boundary cluster, a chart distance from the point to the
/// cluster (infinity when not computed).
struct ChartTable {
  std::size_t points = 0;
  std::size_t clusters = 0;
  /// distance[c][p]
  std::vector<std::vector<double>> distance;
};

struct PerspectivityRow {
  std::size_t cluster = 0;
  double v_radius = 0.0;
  /// Largest U radius ≤ v_radius with e ∩ (U × (X - V)) = ∅ on the chart.
  double u_radius = 0.0;
  std::size_t u_points = 0;
  bool holds = false;
};

struct PerspectivityReport {
  bool perspective = false;
  std::vector<PerspectivityRow> rows;
};

/// Separation condition: ∀ cluster x, ∀ V = {δ(·, x) ≤ ρ}, ∃ U = {δ(·, x) ≤ ρ'}
/// with ρ' ≤ ρ, U non-empty, and no pair of e from U to the complement of V.
PerspectivityReport perspectivity_conditions_equiv(const Relation& e, const ChartTable& chart,
                                                   const std::vector<double>& v_radii);

nlohmann::json to_json(const Relation& e);
Relation relation_from_json(std::size_t carrier, const nlohmann::json& j);

}  // namespace coarsekit::coarse
