#pragma once

// Locally finite graphs given by a root and a neighbour oracle, plus finite
// breadth-first truncations (balls).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coarsekit/group.hpp"

namespace coarsekit {

using Vertex = Element;
using VertexHash = ElementHash;
using VertexSet = ElementSet;
template <class T>
using VertexMap = ElementMap<T>;

class LocallyFiniteGraph {
 public:
  virtual ~LocallyFiniteGraph() = default;

  virtual std::string name() const = 0;
  virtual Vertex root() const = 0;
  /// Finite, duplicate-free, fixed order.
  virtual std::vector<Vertex> neighbors(const Vertex& v) const = 0;
  virtual bool contains(const Vertex& v) const = 0;
  /// Graph distance. The default is breadth-first search from a.
  virtual std::int64_t distance(const Vertex& a, const Vertex& b) const;
  /// Vertex count of finite graphs.
  virtual std::optional<std::size_t> size() const { return std::nullopt; }
  virtual std::string label(const Vertex& v) const;
  /// Inverse of label(); throws Error for unknown vertices.
  virtual Vertex parse(const std::string& text) const;
};

using GraphRef = std::shared_ptr<const LocallyFiniteGraph>;

/// Cayley graph: g ~ g·s for generators s. Distance is the word metric.
class CayleyGraph final : public LocallyFiniteGraph {
 public:
  CayleyGraph(GroupRef group, std::string name);
  std::string name() const override { return name_; }
  Vertex root() const override { return group_->identity(); }
  std::vector<Vertex> neighbors(const Vertex& v) const override;
  bool contains(const Vertex& v) const override;
  std::int64_t distance(const Vertex& a, const Vertex& b) const override;
  std::optional<std::size_t> size() const override;
  std::string label(const Vertex& v) const override { return group_->to_string(v); }
  Vertex parse(const std::string& text) const override;
  const GroupRef& group() const { return group_; }

 private:
  GroupRef group_;
  std::string name_;
};

/// Finite graph on vertices {0..n-1}.
class FiniteGraph final : public LocallyFiniteGraph {
 public:
  FiniteGraph(std::vector<std::vector<std::size_t>> adjacency, std::string name);
  /// Lines "id: n1 n2 ..."; ids are arbitrary tokens, '#' starts a comment.
  /// Edges are symmetrized.
  static std::shared_ptr<FiniteGraph> parse_adjacency(const std::string& text,
                                                      const std::string& name = "file");
  static std::shared_ptr<FiniteGraph> cycle(std::size_t n);
  static std::shared_ptr<FiniteGraph> path(std::size_t n);

  std::string name() const override { return name_; }
  Vertex root() const override { return {0}; }
  std::vector<Vertex> neighbors(const Vertex& v) const override;
  bool contains(const Vertex& v) const override;
  std::int64_t distance(const Vertex& a, const Vertex& b) const override;
  std::optional<std::size_t> size() const override { return adjacency_.size(); }
  std::string label(const Vertex& v) const override;
  Vertex parse(const std::string& text) const override;
  bool is_connected() const;
  const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::string> names_;
  std::string name_;
  /// All-pairs distances (-1 = disconnected).
  std::vector<std::vector<std::int32_t>> dist_;
};

/// The half-line ℕ with n ~ n+1.
class HalfLine final : public LocallyFiniteGraph {
 public:
  std::string name() const override { return "halfline"; }
  Vertex root() const override { return {0}; }
  std::vector<Vertex> neighbors(const Vertex& v) const override;
  bool contains(const Vertex& v) const override { return v.size() == 1 && v[0] >= 0; }
  std::int64_t distance(const Vertex& a, const Vertex& b) const override;
  std::string label(const Vertex& v) const override { return std::to_string(v[0]); }
};

/// "line", "grid", "tree:k", "free:k", "cycle:n", "path:n", "halfline",
/// "cayley:<group spec>", "file:<path>".
GraphRef make_graph(const std::string& spec);

/// Breadth-first ball around a center, with induced adjacency.
struct Region {
  Vertex center;
  std::int64_t radius = 0;
  std::vector<Vertex> vertices;
  /// Distance from the center.
  std::vector<std::int64_t> depth;
  std::vector<std::vector<std::size_t>> adjacency;
  /// Position of each vertex in lexicographic id order (tie-breaks).
  std::vector<std::size_t> rank;
  VertexMap<std::size_t> index;

  std::optional<std::size_t> find(const Vertex& v) const;
  std::size_t size() const { return vertices.size(); }
};

/// Throws BudgetError when the ball exceeds `budget` vertices.
Region ball(const LocallyFiniteGraph& g, const Vertex& center, std::int64_t radius,
            std::size_t budget = 1u << 21);

/// Vertices within `radius` of the seed set; depth is the distance to the
/// seeds and `center` the first seed.
Region tube(const LocallyFiniteGraph& g, const std::vector<Vertex>& seeds, std::int64_t radius,
            std::size_t budget = 1u << 21);

/// Ordered vertex list of a path.
struct RaySegment {
  std::vector<Vertex> vertices;
  bool geodesic = true;

  std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
};

/// Consecutive vertices adjacent; with the geodesic flag also
/// d(first, k-th) = k.
bool is_valid_ray(const LocallyFiniteGraph& g, const RaySegment& r);

}  // namespace coarsekit
