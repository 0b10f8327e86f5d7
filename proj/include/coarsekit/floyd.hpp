#pragma once

// Floyd functions, truncated Floyd metrics, boundary clusters and the defect
// scans built on them. Every distance computed here is a shortest path inside
// a finite ball, hence an upper bound for the true infimum.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coarsekit/coarse.hpp"
#include "coarsekit/error.hpp"
#include "coarsekit/graph.hpp"

namespace coarsekit::floyd {

class FloydFunction {
 public:
  enum class Kind { kGeometric, kPower, kTable, kConstant };

  /// λⁿ, 0 < λ < 1.
  static FloydFunction geometric(double lambda);
  /// (1+n)^(-a), a > 1.
  static FloydFunction power(double a);
  /// values[0..m-1], then values[m-1]·ratioᵏ; values positive, non-increasing.
  static FloydFunction table(std::vector<double> values, double ratio);
  /// Control only: not summable.
  static FloydFunction constant(double c);
  /// "geom:0.5", "power:2", "table:1,0.5,0.4@0.5", "const:1".
  static FloydFunction parse(const std::string& spec);

  Kind kind() const { return kind_; }
  std::string spec() const;
  double operator()(std::int64_t n) const;
  double log_value(std::int64_t n) const;
  /// Closed-form upper bound for Σ_{n≥R} f(n); infinite for the constant control.
  double tail(std::int64_t r) const;
  /// sup f(n)/f(n+1).
  double ratio_bound() const;
  bool is_floyd() const { return kind_ != Kind::kConstant; }
  /// Default stabilization tolerance: 1e-6 geometric, 1e-3 otherwise.
  double default_tolerance() const;
  double lambda() const { return lambda_; }
  double exponent() const { return a_; }

 private:
  Kind kind_ = Kind::kGeometric;
  std::string spec_;
  double lambda_ = 0.5;
  double a_ = 0.0;
  double c_ = 1.0;
  std::vector<double> table_;
};

/// Floyd-weighted shortest paths on a ball around `center`; edge {a, b} has
/// weight f(min(d(v,a), d(v,b))) for the basepoint v.
class FloydBall {
 public:
  FloydBall(const LocallyFiniteGraph& g, FloydFunction f, const Vertex& v, std::int64_t radius,
            std::size_t budget = 1u << 21);
  FloydBall(const LocallyFiniteGraph& g, FloydFunction f, const Vertex& v, const Vertex& center,
            std::int64_t radius, std::size_t budget = 1u << 21);
  /// Over tube(seeds, radius).
  FloydBall(const LocallyFiniteGraph& g, FloydFunction f, const Vertex& v,
            const std::vector<Vertex>& seeds, std::int64_t radius, std::size_t budget = 1u << 21);

  const Region& region() const { return region_; }
  const FloydFunction& function() const { return f_; }
  std::int64_t radius() const { return region_.radius; }
  /// d(v, ·) for region vertices.
  std::int64_t basepoint_depth(std::size_t i) const { return vdepth_[i]; }
  double edge_weight(std::size_t a, std::size_t b) const;

  /// Multi-source shortest distances; ties broken by lexicographic vertex id.
  std::vector<double> distances_from(const std::vector<std::size_t>& sources) const;
  /// Throws PreconditionError when either vertex lies outside the ball.
  double distance(const Vertex& x, const Vertex& y) const;
  /// Witness path as region indices.
  std::vector<std::size_t> path(std::size_t x, std::size_t y) const;
  /// All pairs (small balls only).
  std::vector<std::vector<double>> table() const;

 private:
  void init(const LocallyFiniteGraph& g, const Vertex& v, bool centered);
  std::vector<double> dijkstra(const std::vector<std::size_t>& sources,
                               std::vector<std::size_t>* parent) const;

  FloydFunction f_;
  Region region_;
  std::vector<std::int64_t> vdepth_;
  std::vector<double> fcache_;
};

struct FloydDistance {
  double value = 0.0;
  double tail = 0.0;
};

/// δ_v(x, y) upper bound inside ball(v, R) and the tail T(R).
FloydDistance floyd_distance(const LocallyFiniteGraph& g, const FloydFunction& f, const Vertex& v,
                             const Vertex& x, const Vertex& y, std::int64_t r);

struct Refinement {
  Verdict verdict = Verdict::kInconclusive;
  /// value(2R) on success; on budget exhaustion the last value computed.
  double value = 0.0;
  double previous = 0.0;
  /// |value(R) - value(2R)| + T(R); zero once the ball stops growing.
  double slack = 0.0;
  std::int64_t radius = 0;
  std::size_t rounds = 0;
  bool exact = false;
};

/// Doubling schedule from R = max(1, d(v,x), d(v,y)) until both the
/// inter-radius change and the tail are below tol.
Refinement refine_radius(const LocallyFiniteGraph& g, const FloydFunction& f, const Vertex& v,
                         const Vertex& x, const Vertex& y, double tol,
                         std::size_t vertex_budget = 1u << 20);

/// Upper bound for δ_v(a, b) from the ball around a of radius d(a,b) + margin.
double local_floyd_bound(const LocallyFiniteGraph& g, const FloydFunction& f, const Vertex& v,
                         const Vertex& a, const Vertex& b, std::int64_t margin);
/// Upper bound for δ_v between the ends of a path, from the tube of radius
/// `margin` around it.
double segment_floyd_bound(const LocallyFiniteGraph& g, const FloydFunction& f, const Vertex& v,
                           const RaySegment& seg, std::int64_t margin);

struct GeodesicSample {
  std::size_t count = 64;
  /// Start depth is R + [0, spread].
  std::int64_t spread = 2;
  std::int64_t max_length = 8;
  std::uint64_t seed = 1;
};

/// Seeded geodesic segments with every vertex at distance ≥ R from v.
std::vector<RaySegment> sample_geodesics_outside(const LocallyFiniteGraph& g, const Vertex& v,
                                                 std::int64_t r, const GeodesicSample& s);

struct KarlssonReport {
  double defect = 0.0;
  /// 2·T(R-1).
  double bound = 0.0;
  std::size_t samples = 0;
  std::size_t worst = 0;
};

/// Max endpoint δ_v bound (segment_floyd_bound) over the geodesics; throws
/// PreconditionError on an empty sample.
KarlssonReport karlsson_defect(const LocallyFiniteGraph& g, const FloydFunction& f,
                               const Vertex& v, std::int64_t r,
                               const std::vector<RaySegment>& geodesics, std::int64_t margin = 6);
KarlssonReport karlsson_defect(const LocallyFiniteGraph& g, const FloydFunction& f,
                               const Vertex& v, std::int64_t r, const GeodesicSample& s = {});

/// e-neighbours of a vertex: the q with (p, q) ∈ e.
using NeighborRule = std::function<std::vector<Vertex>(const Vertex&)>;

/// ball(p, w).
NeighborRule width_neighbors(const LocallyFiniteGraph& g, std::int64_t w);

struct BandSample {
  std::int64_t span = 2;
  std::size_t max_points = 256;
  std::int64_t margin = 4;
  std::uint64_t seed = 1;
};

/// Vertices with R ≤ d(v, ·) ≤ R + span; a seeded subset when large.
std::vector<Vertex> band_points(const LocallyFiniteGraph& g, const Vertex& v, std::int64_t r,
                                const BandSample& s);

struct PerspectivityDefect {
  double defect = 0.0;
  std::size_t pairs = 0;
  Vertex p;
  Vertex q;
};

/// sup of δ_v(p, q) bounds over (p, q) ∈ e with min(d(v,p), d(v,q)) ≥ R;
/// throws InconclusiveError when no pair qualifies.
PerspectivityDefect perspectivity_defect(const LocallyFiniteGraph& g, const FloydFunction& f,
                                         const Vertex& v, const NeighborRule& e, std::int64_t r,
                                         const BandSample& s = {});

struct ClusterReport {
  std::size_t id = 0;
  std::vector<std::size_t> rays;
  double internal_diameter = 0.0;
  /// Infinite for a single cluster.
  double separation = 0.0;
};

/// Boundary chart at radius R: one ray per depth-R vertex, single-linkage
/// clusters of the depth-R points under δ_v with the given threshold
/// (default 4·T(R)).
class FloydChart {
 public:
  FloydChart(GraphRef g, FloydFunction f, const Vertex& v, std::int64_t r, std::int64_t margin = 2,
             std::optional<double> threshold = std::nullopt);

  std::int64_t radius() const { return r_; }
  double threshold() const { return threshold_; }
  const FloydBall& ball() const { return ball_; }
  const Vertex& basepoint() const { return v_; }
  const GraphRef& graph() const { return graph_; }
  /// Geodesics from v through each depth-R vertex, extended outward inside the
  /// chart region; sorted by the id of the depth-R vertex.
  const std::vector<RaySegment>& rays() const { return rays_; }
  const std::vector<ClusterReport>& clusters() const { return clusters_; }
  std::size_t cluster_of_ray(std::size_t ray) const { return ray_cluster_[ray]; }
  /// Depth-R vertex of each ray (region index).
  std::size_t ray_anchor(std::size_t ray) const { return anchors_[ray]; }

  /// Clusters within the threshold of a point of A at depth ≥ R; sorted. Points
  /// beyond the region are first moved inward along a geodesic to the region
  /// boundary (a move of δ_v-length ≤ T(R + margin)). Empty for sets inside
  /// ball(v, R - 1).
  std::vector<std::size_t> assignment(const std::vector<Vertex>& a) const;
  /// Region points only.
  std::vector<std::size_t> assignment(const std::function<bool(const Vertex&)>& in_a) const;

  /// δ_v from each region point to each cluster.
  coarse::ChartTable chart_table() const;
  nlohmann::json to_json() const;

 private:
  std::vector<std::size_t> assign_indices(const std::vector<std::size_t>& sources) const;

  GraphRef graph_;
  FloydBall ball_;
  Vertex v_;
  std::int64_t r_;
  double threshold_;
  std::vector<RaySegment> rays_;
  std::vector<std::size_t> anchors_;
  std::vector<std::size_t> ray_cluster_;
  std::vector<ClusterReport> clusters_;
};

nlohmann::json to_json(const ClusterReport& c);

struct SampledSet {
  std::string name;
  std::function<bool(const Vertex&)> contains;
};

struct CompactnessRow {
  std::string name;
  /// False when the set has no point at depth ≥ R (excluded).
  bool unbounded = false;
  std::vector<std::size_t> clusters;
};

struct CompactnessReport {
  bool holds = true;
  std::vector<CompactnessRow> rows;
};

/// Every sampled set reaching depth R gets a nonempty assignment.
CompactnessReport compactness_criterion(const FloydChart& chart,
                                        const std::vector<SampledSet>& sets);
/// Complements of ball(v, R-1) and ball(v, R), and each cluster's rays.
std::vector<SampledSet> standard_sets(const FloydChart& chart);

struct CloseSameBoundary {
  /// A ⊆ 𝔅(B, e) on the chart region.
  bool premise = false;
  bool holds = false;
  std::vector<std::size_t> a_clusters;
  std::vector<std::size_t> b_clusters;
};

CloseSameBoundary closesameboundary_check(const FloydChart& chart,
                                          const std::function<bool(const Vertex&)>& in_a,
                                          const std::function<bool(const Vertex&)>& in_b,
                                          const NeighborRule& e);

/// n -> max(0, ⌊num·n/den⌋ + offset).
struct IndexMap {
  std::int64_t num = 1;
  std::int64_t den = 1;
  std::int64_t offset = 0;

  std::int64_t operator()(std::int64_t n) const;
  /// "n", "2n", "n/2", "3n/2+1".
  static IndexMap parse(const std::string& text);
  std::string spec() const;
};

struct RatioCheck {
  double sup = 0.0;
  std::int64_t argmax = 0;
  bool numeric_ok = false;
  /// Closed-form verdict for geometric/power pairs when decidable.
  std::optional<bool> analytic_ok;
  std::optional<double> analytic_bound;
  bool unbounded = false;

  bool ok() const { return analytic_ok.value_or(numeric_ok); }
};

struct QiConditionReport {
  /// f2(n) / f1(α(n)) ≤ D.
  RatioCheck forward;
  /// f1(n) / f2(β(n)) ≤ D.
  RatioCheck reverse;
  bool extension = false;
  bool homeomorphism = false;
};

/// β defaults to α.
QiConditionReport qi_condition_check(const IndexMap& alpha, const FloydFunction& f1,
                                     const FloydFunction& f2, double d, std::int64_t n_max,
                                     std::optional<IndexMap> beta = std::nullopt);

/// sup_{n ≤ n_max} num(n) / den(map(n)).
RatioCheck ratio_check(const FloydFunction& num, const FloydFunction& den, const IndexMap& map,
                       double d, std::int64_t n_max);

using VertexFunction = std::function<Vertex(const Vertex&)>;

struct BoundaryMapReport {
  /// chart2 cluster -> chart1 cluster under π.
  std::vector<std::optional<std::size_t>> forward;
  /// chart1 cluster -> chart2 cluster under ϖ.
  std::vector<std::optional<std::size_t>> backward;
  bool bijective = false;
  bool inverse_ok = false;
  std::string failure;
};

/// π: graph of chart2 -> graph of chart1, ϖ its quasi-inverse.
BoundaryMapReport induced_boundary_map(const FloydChart& chart1, const FloydChart& chart2,
                                       const VertexFunction& pi, const VertexFunction& varpi);

struct ProjectionReport {
  std::vector<std::optional<std::size_t>> class_image;
  bool well_defined = false;
  bool surjective = false;
  std::vector<std::size_t> missed;
  std::string failure;
};

/// Ray classes -> Floyd clusters through the assignment of the rays.
ProjectionReport hyperbolic_to_floyd_projection(const std::vector<std::vector<RaySegment>>& classes,
                                                const FloydChart& chart);

}  // namespace coarsekit::floyd
