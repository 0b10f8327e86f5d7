#pragma once

// Gromov hyperbolicity on truncations: four-point δ, geodesic ray segments,
// ray classes, and their relation to Floyd charts.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarsekit/floyd.hpp"
#include "coarsekit/graph.hpp"

namespace coarsekit::hyperbolic {

/// (x | y)_w.
double gromov_product(const LocallyFiniteGraph& g, const Vertex& x, const Vertex& y, const Vertex& w);

struct DeltaEstimate {
  double delta = 0.0;
  std::size_t quadruples = 0;
  bool exhaustive = false;
  std::array<Vertex, 4> witness;
};

/// Four-point δ over ball(center, radius): exhaustive when the ball has at
/// most `exhaustive_limit` vertices, otherwise `samples` seeded quadruples.
DeltaEstimate delta_estimate(const LocallyFiniteGraph& g, const Vertex& center, std::int64_t radius,
                             std::size_t exhaustive_limit = 48, std::size_t samples = 200000,
                             std::uint64_t seed = 1);

/// Every geodesic segment of the given length starting at p, in
/// lexicographic order of vertex ids. Throws BudgetError past `budget`.
std::vector<RaySegment> rays_from(const LocallyFiniteGraph& g, const Vertex& p, std::size_t length,
                                  std::size_t budget = 1u << 16);

/// Hausdorff distance between two finite vertex sets.
std::int64_t hausdorff(const LocallyFiniteGraph& g, const std::vector<Vertex>& a,
                       const std::vector<Vertex>& b);

bool rays_equivalent(const LocallyFiniteGraph& g, const RaySegment& a, const RaySegment& b,
                     std::int64_t bound);

/// Classes of the "Hausdorff ≤ bound" relation closed under transitivity;
/// each class sorted, classes ordered by first member.
std::vector<std::vector<std::size_t>> ray_classes(const LocallyFiniteGraph& g,
                                                  const std::vector<RaySegment>& rays,
                                                  std::int64_t bound);

/// Longest suffix of the segment at distance ≥ R from v.
RaySegment ray_tail(const LocallyFiniteGraph& g, const RaySegment& seg, const Vertex& v,
                    std::int64_t r);

/// Ray classes from p, as tails outside ball(v, R).
std::vector<std::vector<RaySegment>> class_tails(const floyd::FloydChart& chart, const Vertex& p,
                                                 std::size_t length, std::int64_t bound);

struct AccessibilityReport {
  /// Per cluster, the index of a ray from p whose tail is assigned to that
  /// cluster alone.
  std::vector<std::optional<std::size_t>> witness;
  bool ok = false;
  std::size_t rays = 0;
  std::string failure;
};

AccessibilityReport accessibility_witnesses(const floyd::FloydChart& chart, const Vertex& p,
                                            std::size_t length);

struct BasepointChange {
  floyd::ProjectionReport from_p;
  floyd::ProjectionReport from_q;
  /// Same cluster image sets from both basepoints.
  bool agree = false;
};

BasepointChange basepoint_change_check(const floyd::FloydChart& chart, const Vertex& p,
                                       const Vertex& q, std::size_t length, std::int64_t bound);

struct Transport {
  /// Geodesic in the target between the images of the endpoints.
  RaySegment geodesic;
  /// Smallest tube radius around the image that contains such a geodesic.
  std::int64_t tube_radius = 0;
  std::int64_t hausdorff = 0;
};

/// Image of a geodesic segment under a map X -> Y, straightened to a Y-geodesic
/// inside the thinnest tube around the image. Throws BudgetError when no tube
/// up to `max_tube` works.
Transport qi_ray_transport(const LocallyFiniteGraph& y, const floyd::VertexFunction& f,
                           const RaySegment& ray, std::int64_t max_tube = 16);

}  // namespace coarsekit::hyperbolic
