#include "coarsekit/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "coarsekit/error.hpp"

namespace coarsekit {

std::int64_t LocallyFiniteGraph::distance(const Vertex& a, const Vertex& b) const {
  if (a == b) return 0;
  VertexMap<std::int64_t> dist{{a, 0}};
  std::deque<Vertex> queue{a};
  while (!queue.empty()) {
    Vertex cur = queue.front();
    queue.pop_front();
    for (Vertex& n : neighbors(cur)) {
      if (dist.count(n)) continue;
      const std::int64_t d = dist[cur] + 1;
      if (n == b) return d;
      dist.emplace(n, d);
      queue.push_back(std::move(n));
      if (dist.size() > (1u << 22)) throw BudgetError("distance search exceeded its budget");
    }
  }
  throw PreconditionError("vertices are in different components");
}

std::string LocallyFiniteGraph::label(const Vertex& v) const {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

Vertex LocallyFiniteGraph::parse(const std::string& text) const {
  Vertex v;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) v.push_back(std::stoll(item));
  } catch (const std::logic_error&) {
    throw Error("cannot parse vertex '" + text + "'");
  }
  if (!contains(v)) throw Error("vertex '" + text + "' is not in " + name());
  return v;
}

CayleyGraph::CayleyGraph(GroupRef group, std::string name)
    : group_(std::move(group)), name_(std::move(name)) {}

std::vector<Vertex> CayleyGraph::neighbors(const Vertex& v) const {
  std::vector<Vertex> out;
  for (const Element& s : group_->generators()) {
    Vertex n = group_->multiply(v, s);
    if (n != v && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
  }
  return out;
}

bool CayleyGraph::contains(const Vertex& v) const {
  try {
    return group_->normal_form(v) == v;
  } catch (const Error&) {
    return false;
  }
}

std::int64_t CayleyGraph::distance(const Vertex& a, const Vertex& b) const {
  return group_->word_length(group_->multiply(group_->invert(a), b));
}

std::optional<std::size_t> CayleyGraph::size() const {
  if (group_->name().rfind("perm", 0) == 0) return group_->ball(1 << 30).size();
  if (group_->name() == "zn:0") return 1;
  return std::nullopt;
}

Vertex CayleyGraph::parse(const std::string& text) const {
  // Words such as "ab'" for free groups and "abc" for ℤ/2 free products.
  const std::string gname = group_->name();
  const bool free = gname.rfind("free", 0) == 0;
  if ((free || gname.rfind("z2star", 0) == 0) && !text.empty() &&
      std::isalpha(static_cast<unsigned char>(text[0]))) {
    Vertex w;
    if (text != "e") {
      for (std::size_t i = 0; i < text.size(); ++i) {
        const std::int64_t letter = text[i] - 'a';
        if (free) {
          const bool inv = i + 1 < text.size() && text[i + 1] == '\'';
          w.push_back(inv ? -(letter + 1) : letter + 1);
          if (inv) ++i;
        } else {
          w.push_back(letter);
        }
      }
    }
    return group_->normal_form(w);
  }
  return LocallyFiniteGraph::parse(text);
}

FiniteGraph::FiniteGraph(std::vector<std::vector<std::size_t>> adjacency, std::string name)
    : adjacency_(std::move(adjacency)), name_(std::move(name)) {
  const std::size_t n = adjacency_.size();
  if (n == 0) throw PreconditionError("finite graph has no vertices");
  // Symmetrize and drop loops and duplicates, keeping first-seen order.
  std::vector<std::vector<std::size_t>> sym(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b : adjacency_[a]) {
      if (b >= n) throw PreconditionError("finite graph edge points outside the vertex set");
      if (a == b) continue;
      if (std::find(sym[a].begin(), sym[a].end(), b) == sym[a].end()) sym[a].push_back(b);
      if (std::find(sym[b].begin(), sym[b].end(), a) == sym[b].end()) sym[b].push_back(a);
    }
  }
  adjacency_ = std::move(sym);
  for (std::size_t i = 0; i < n; ++i) names_.push_back(std::to_string(i));
  if (n <= 4096) {
    dist_.assign(n, std::vector<std::int32_t>(n, -1));
    for (std::size_t s = 0; s < n; ++s) {
      auto& row = dist_[s];
      row[s] = 0;
      std::deque<std::size_t> queue{s};
      while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        for (std::size_t nb : adjacency_[cur]) {
          if (row[nb] < 0) {
            row[nb] = row[cur] + 1;
            queue.push_back(nb);
          }
        }
      }
    }
  }
}

std::shared_ptr<FiniteGraph> FiniteGraph::parse_adjacency(const std::string& text,
                                                          const std::string& name) {
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> adj;
  auto id_of = [&](const std::string& token) {
    auto [it, fresh] = ids.emplace(token, names.size());
    if (fresh) {
      names.push_back(token);
      adj.emplace_back();
    }
    return it->second;
  };
  std::stringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error("graph file line " + std::to_string(lineno) + ": missing ':'");
    }
    std::stringstream head(line.substr(0, colon));
    std::string id;
    head >> id;
    if (id.empty()) throw Error("graph file line " + std::to_string(lineno) + ": empty id");
    const std::size_t a = id_of(id);
    std::stringstream rest(line.substr(colon + 1));
    std::string tok;
    while (rest >> tok) {
      const std::size_t b = id_of(tok);
      adj[a].push_back(b);
    }
  }
  auto g = std::make_shared<FiniteGraph>(std::move(adj), name);
  g->names_ = std::move(names);
  return g;
}

std::shared_ptr<FiniteGraph> FiniteGraph::cycle(std::size_t n) {
  if (n < 3) throw PreconditionError("cycle needs at least 3 vertices");
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) adj[i] = {(i + 1) % n, (i + n - 1) % n};
  return std::make_shared<FiniteGraph>(std::move(adj), "cycle:" + std::to_string(n));
}

std::shared_ptr<FiniteGraph> FiniteGraph::path(std::size_t n) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i + 1 < n; ++i) adj[i].push_back(i + 1);
  return std::make_shared<FiniteGraph>(std::move(adj), "path:" + std::to_string(n));
}

std::vector<Vertex> FiniteGraph::neighbors(const Vertex& v) const {
  std::vector<Vertex> out;
  for (std::size_t b : adjacency_.at(static_cast<std::size_t>(v.at(0)))) {
    out.push_back({static_cast<std::int64_t>(b)});
  }
  return out;
}

bool FiniteGraph::contains(const Vertex& v) const {
  return v.size() == 1 && v[0] >= 0 && static_cast<std::size_t>(v[0]) < adjacency_.size();
}

std::int64_t FiniteGraph::distance(const Vertex& a, const Vertex& b) const {
  if (dist_.empty()) return LocallyFiniteGraph::distance(a, b);
  const std::int32_t d = dist_.at(static_cast<std::size_t>(a.at(0))).at(static_cast<std::size_t>(b.at(0)));
  if (d < 0) throw PreconditionError("vertices are in different components");
  return d;
}

std::string FiniteGraph::label(const Vertex& v) const {
  return names_.at(static_cast<std::size_t>(v.at(0)));
}

Vertex FiniteGraph::parse(const std::string& text) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == text) return {static_cast<std::int64_t>(i)};
  }
  throw Error("vertex '" + text + "' is not in " + name_);
}

bool FiniteGraph::is_connected() const {
  if (dist_.empty()) {
    return ball(*this, root(), static_cast<std::int64_t>(adjacency_.size())).size() ==
           adjacency_.size();
  }
  return std::all_of(dist_[0].begin(), dist_[0].end(), [](std::int32_t d) { return d >= 0; });
}

std::vector<Vertex> HalfLine::neighbors(const Vertex& v) const {
  if (v[0] == 0) return {{1}};
  return {{v[0] + 1}, {v[0] - 1}};
}

std::int64_t HalfLine::distance(const Vertex& a, const Vertex& b) const {
  return std::abs(a[0] - b[0]);
}

GraphRef make_graph(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "line" && arg.empty()) return std::make_shared<CayleyGraph>(make_zn(1), "line");
    if (kind == "grid" && arg.empty()) return std::make_shared<CayleyGraph>(make_zn(2), "grid");
    if (kind == "tree") {
      return std::make_shared<CayleyGraph>(make_z2_free_product(std::stoul(arg)), spec);
    }
    if (kind == "free") return std::make_shared<CayleyGraph>(make_free(std::stoul(arg)), spec);
    if (kind == "cycle") return FiniteGraph::cycle(std::stoul(arg));
    if (kind == "path") return FiniteGraph::path(std::stoul(arg));
    if (kind == "halfline" && arg.empty()) return std::make_shared<HalfLine>();
    if (kind == "cayley") return std::make_shared<CayleyGraph>(make_group(arg), spec);
    if (kind == "file") {
      std::ifstream in(arg);
      if (!in) throw Error("cannot open graph file '" + arg + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      return FiniteGraph::parse_adjacency(buf.str(), spec);
    }
  } catch (const std::logic_error&) {
    throw Error("malformed graph spec '" + spec + "'");
  }
  throw Error("unknown graph spec '" + spec + "'");
}

std::optional<std::size_t> Region::find(const Vertex& v) const {
  auto it = index.find(v);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

Region ball(const LocallyFiniteGraph& g, const Vertex& center, std::int64_t radius,
            std::size_t budget) {
  return tube(g, {center}, radius, budget);
}

Region tube(const LocallyFiniteGraph& g, const std::vector<Vertex>& seeds, std::int64_t radius,
            std::size_t budget) {
  if (seeds.empty()) throw PreconditionError("tube needs a seed");
  Region r;
  r.center = seeds.front();
  r.radius = radius;
  for (const Vertex& s : seeds) {
    if (!g.contains(s)) throw PreconditionError("ball center is not a vertex");
    if (r.index.emplace(s, r.vertices.size()).second) {
      r.vertices.push_back(s);
      r.depth.push_back(0);
    }
  }
  std::vector<std::vector<Vertex>> nbrs;
  for (std::size_t i = 0; i < r.vertices.size(); ++i) {
    nbrs.push_back(g.neighbors(r.vertices[i]));
    if (r.depth[i] == radius) continue;
    for (const Vertex& n : nbrs.back()) {
      if (r.index.count(n)) continue;
      r.index.emplace(n, r.vertices.size());
      r.vertices.push_back(n);
      r.depth.push_back(r.depth[i] + 1);
      if (r.vertices.size() > budget) {
        throw BudgetError("ball of radius " + std::to_string(radius) + " exceeds " +
                          std::to_string(budget) + " vertices");
      }
    }
  }
  r.adjacency.resize(r.vertices.size());
  for (std::size_t i = 0; i < r.vertices.size(); ++i) {
    for (const Vertex& n : nbrs[i]) {
      if (auto j = r.find(n)) r.adjacency[i].push_back(*j);
    }
  }
  std::vector<std::size_t> order(r.vertices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return r.vertices[a] < r.vertices[b]; });
  r.rank.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) r.rank[order[i]] = i;
  return r;
}

bool is_valid_ray(const LocallyFiniteGraph& g, const RaySegment& r) {
  if (r.vertices.empty()) return false;
  for (std::size_t i = 0; i + 1 < r.vertices.size(); ++i) {
    const auto nb = g.neighbors(r.vertices[i]);
    if (std::find(nb.begin(), nb.end(), r.vertices[i + 1]) == nb.end()) return false;
  }
  if (r.geodesic) {
    for (std::size_t k = 0; k < r.vertices.size(); ++k) {
      if (g.distance(r.vertices.front(), r.vertices[k]) != static_cast<std::int64_t>(k)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace coarsekit
