#include "coarsekit/topo_glue.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "coarsekit/error.hpp"

namespace coarsekit::topo {

namespace {

std::vector<std::string> default_names(std::size_t n, const std::string& prefix) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FinSpace

FinSpace::FinSpace(std::vector<std::string> points, std::vector<PointSet> closed_sets)
    : points_(std::move(points)) {
  if (points_.size() > kMaxPoints) {
    throw Error("FinSpace: at most " + std::to_string(kMaxPoints) + " points supported");
  }
  {
    std::set<std::string> seen(points_.begin(), points_.end());
    if (seen.size() != points_.size()) throw Error("FinSpace: duplicate point names");
  }
  const std::size_t subsets = std::size_t{1} << points_.size();
  member_bits_.assign((subsets + 63) / 64, 0);
  const PointSet all = full();
  for (PointSet c : closed_sets) {
    if (!is_subset(c, all)) throw Error("FinSpace: closed set references unknown points");
    member_bits_[c / 64] |= std::uint64_t{1} << (c % 64);
  }
  if (!is_closed(0) || !is_closed(all)) {
    throw Error("FinSpace: closed sets must contain the empty set and the whole space");
  }
  for (std::size_t s = 0; s < subsets; ++s) {
    if (!is_closed(static_cast<PointSet>(s))) continue;
    closed_sets_.push_back(static_cast<PointSet>(s));
  }
  for (PointSet a : closed_sets_) {
    for (PointSet b : closed_sets_) {
      if (!is_closed(a | b) || !is_closed(a & b)) {
        throw Error("FinSpace: closed sets not closed under union and intersection");
      }
    }
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    PointSet c = closure(PointSet{1} << i);
    point_closures_.push_back(c);
    if (std::find(distinct_closures_.begin(), distinct_closures_.end(), c) ==
        distinct_closures_.end()) {
      distinct_closures_.push_back(c);
    }
  }
}

FinSpace FinSpace::discrete(std::vector<std::string> points) {
  std::vector<PointSet> all;
  const std::size_t subsets = std::size_t{1} << points.size();
  for (std::size_t s = 0; s < subsets; ++s) all.push_back(static_cast<PointSet>(s));
  return FinSpace(std::move(points), std::move(all));
}

FinSpace FinSpace::indiscrete(std::vector<std::string> points) {
  const PointSet all = (PointSet{1} << points.size()) - 1;
  return FinSpace(std::move(points), {0, all});
}

std::uint64_t FinSpace::family_mask() const {
  if (size() > 6) throw Error("FinSpace::family_mask: at most 6 points");
  return member_bits_[0];
}

bool FinSpace::is_closed(PointSet s) const {
  if (!is_subset(s, full())) return false;
  return (member_bits_[s / 64] >> (s % 64)) & 1u;
}

PointSet FinSpace::closure(PointSet s) const {
  PointSet out = full();
  for (PointSet c : closed_sets_) {
    if (is_subset(s, c)) out &= c;
  }
  return out;
}

std::size_t FinSpace::index_of(const std::string& name) const {
  auto it = std::find(points_.begin(), points_.end(), name);
  if (it == points_.end()) throw Error("FinSpace: unknown point '" + name + "'");
  return static_cast<std::size_t>(it - points_.begin());
}

// ---------------------------------------------------------------------------
// PointMap

PointMap::PointMap(SpaceRef src, SpaceRef dst, std::vector<std::size_t> assign)
    : source(std::move(src)), target(std::move(dst)), assignment(std::move(assign)) {
  if (assignment.size() != source->size()) throw Error("PointMap: assignment is not total");
  for (std::size_t t : assignment) {
    if (t >= target->size()) throw Error("PointMap: assignment out of range");
  }
}

PointMap PointMap::identity(SpaceRef space) {
  std::vector<std::size_t> id(space->size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
  return PointMap(space, space, std::move(id));
}

PointSet PointMap::image(PointSet s) const {
  PointSet out = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if ((s >> i) & 1u) out |= PointSet{1} << assignment[i];
  }
  return out;
}

PointSet PointMap::preimage(PointSet s) const {
  PointSet out = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if ((s >> assignment[i]) & 1u) out |= PointSet{1} << i;
  }
  return out;
}

bool PointMap::is_continuous() const {
  for (PointSet c : target->closed_sets()) {
    if (!source->is_closed(preimage(c))) return false;
  }
  return true;
}

PointMap compose(const PointMap& second, const PointMap& first) {
  if (!(*first.target == *second.source)) throw PreconditionError("compose: maps not composable");
  std::vector<std::size_t> out(first.assignment.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = second.assignment[first.assignment[i]];
  return PointMap(first.source, second.target, std::move(out));
}

// ---------------------------------------------------------------------------
// AdmissibleMap

AdmissibleMap::AdmissibleMap(SpaceRef source, SpaceRef target, std::vector<PointSet> table)
    : source_(std::move(source)), target_(std::move(target)), table_(std::move(table)) {
  const auto& closures = source_->distinct_point_closures();
  if (table_.size() != closures.size()) {
    throw Error("AdmissibleMap: table must have one entry per distinct point closure");
  }
  for (PointSet v : table_) {
    if (!target_->is_closed(v)) throw Error("AdmissibleMap: table value is not closed in target");
  }
  point_values_.resize(source_->size());
  for (std::size_t i = 0; i < source_->size(); ++i) {
    auto it = std::find(closures.begin(), closures.end(), source_->point_closure(i));
    point_values_[i] = table_[static_cast<std::size_t>(it - closures.begin())];
  }
}

PointSet AdmissibleMap::eval(PointSet a) const {
  PointSet out = 0;
  for (std::size_t i = 0; i < point_values_.size(); ++i) {
    if ((a >> i) & 1u) out |= point_values_[i];
  }
  return out;
}

std::vector<PointSet> AdmissibleMap::normalized_table() const {
  std::vector<PointSet> out;
  for (PointSet c : source_->distinct_point_closures()) out.push_back(eval(c));
  return out;
}

// ---------------------------------------------------------------------------
// Glueing

GluedSpace glue(const AdmissibleMap& f) {
  const SpaceRef& x = f.source();
  const SpaceRef& y = f.target();
  const std::size_t nx = x->size();
  const std::size_t n = nx + y->size();
  if (n > kMaxPoints) throw Error("glue: combined space too large");
  std::vector<std::string> names = x->points();
  for (const auto& p : y->points()) {
    if (std::find(names.begin(), names.end(), p) != names.end()) {
      throw Error("glue: point sets are not disjoint ('" + p + "')");
    }
    names.push_back(p);
  }
  std::vector<PointSet> closed;
  for (PointSet a : x->closed_sets()) {
    const PointSet fa = f.eval(a) << nx;
    for (PointSet b : y->closed_sets()) {
      const PointSet s = a | (b << nx);
      if (is_subset(fa, s)) closed.push_back(s);
    }
  }
  return GluedSpace{x, y, f, FinSpace(std::move(names), std::move(closed))};
}

PointMap sum_map(const GluedSpace& src, const GluedSpace& dst, const PointMap& on_base,
                 const PointMap& on_boundary) {
  if (!(*on_base.source == *src.base) || !(*on_base.target == *dst.base) ||
      !(*on_boundary.source == *src.boundary) || !(*on_boundary.target == *dst.boundary)) {
    throw PreconditionError("sum_map: component maps do not match the glued spaces");
  }
  std::vector<std::size_t> assign;
  for (std::size_t t : on_base.assignment) assign.push_back(t);
  for (std::size_t t : on_boundary.assignment) assign.push_back(t + dst.base->size());
  return PointMap(share(src.space), share(dst.space), std::move(assign));
}

bool id_glue_continuous(const AdmissibleMap& f, const AdmissibleMap& g) {
  if (!(*f.source() == *g.source()) || !(*f.target() == *g.target())) {
    throw PreconditionError("id_glue_continuous: maps do not share source and target");
  }
  const GluedSpace gf = glue(f);
  const GluedSpace gg = glue(g);
  // Preimage under the identity is the set itself.
  for (PointSet c : gg.space.closed_sets()) {
    if (!gf.space.is_closed(c)) return false;
  }
  return true;
}

AdmissibleMap pullback(const AdmissibleMap& f, const PointMap& pi, const PointMap& varpi) {
  if (!(*pi.target == *f.source())) throw PreconditionError("pullback: pi does not land in X");
  if (!(*varpi.target == *f.target())) throw PreconditionError("pullback: varpi does not land in W");
  if (!pi.is_continuous()) throw PreconditionError("pullback: pi is not continuous");
  if (!varpi.is_continuous()) throw PreconditionError("pullback: varpi is not continuous");
  const FinSpace& x = *f.source();
  const FinSpace& y = *pi.source;
  const FinSpace& z = *varpi.source;
  std::vector<PointSet> table;
  for (PointSet c : y.distinct_point_closures()) {
    const PointSet in_x = x.closure(pi.image(c));
    table.push_back(z.closure(varpi.preimage(f.eval(in_x))));
  }
  return AdmissibleMap(pi.source, varpi.source, std::move(table));
}

namespace {

bool sum_continuous(const AdmissibleMap& src, const AdmissibleMap& dst, const PointMap& on_base,
                    const PointMap& on_boundary) {
  const GluedSpace a = glue(src);
  const GluedSpace b = glue(dst);
  return sum_map(a, b, on_base, on_boundary).is_continuous();
}

}  // namespace

bool check_pullback_universal(const AdmissibleMap& f, const PointMap& pi, const PointMap& varpi,
                              const AdmissibleMap& fprime) {
  if (!(*fprime.source() == *pi.source) || !(*fprime.target() == *varpi.source)) {
    throw PreconditionError("check_pullback_universal: f' must map Closed(Y) to Closed(Z)");
  }
  if (!sum_continuous(fprime, f, pi, varpi)) {
    throw PreconditionError("check_pullback_universal: pi+varpi: Y+_{f'}Z -> X+_f W is not continuous");
  }
  const AdmissibleMap fstar = pullback(f, pi, varpi);
  return id_glue_continuous(fprime, fstar);
}

CompositionCheck check_pullback_composition(const AdmissibleMap& f, const PointMap& pi,
                                            const PointMap& varpi, const PointMap& rho,
                                            const PointMap& varrho) {
  if (!(*rho.target == *pi.source) || !(*varrho.target == *varpi.source)) {
    throw PreconditionError("check_pullback_composition: maps are not composable");
  }
  const AdmissibleMap fss = pullback(f, compose(pi, rho), compose(varpi, varrho));
  const AdmissibleMap fs = pullback(f, pi, varpi);
  const AdmissibleMap fs_s = pullback(fs, rho, varrho);
  CompositionCheck out;
  out.holds = true;
  for (PointSet a : rho.source->closed_sets()) {
    const PointSet lhs = fss.eval(a);
    const PointSet rhs = fs_s.eval(a);
    if (!is_subset(lhs, rhs)) {
      out.holds = false;
      return out;
    }
    if (lhs != rhs && !out.strict_witness) out.strict_witness = a;
  }
  return out;
}

EightLemmaCheck check_eight_lemma(const AdmissibleMap& f, const PointMap& pi,
                                  const PointMap& varpi, const AdmissibleMap& g) {
  if (!(*g.source() == *pi.source) || !(*g.target() == *varpi.source)) {
    throw PreconditionError("check_eight_lemma: g must map Closed(Y) to Closed(Z)");
  }
  if (!sum_continuous(g, f, pi, varpi)) {
    throw PreconditionError("check_eight_lemma: pi+varpi: Y+_g Z -> X+_f W is not continuous");
  }
  const SpaceRef& x = f.source();
  const SpaceRef& w = f.target();
  const SpaceRef& y = pi.source;
  const SpaceRef& z = varpi.source;
  const PointMap id_x = PointMap::identity(x);
  const PointMap id_y = PointMap::identity(y);
  const PointMap id_z = PointMap::identity(z);
  const PointMap id_w = PointMap::identity(w);

  const AdmissibleMap fs = pullback(f, pi, id_w);          // Y -> W
  const AdmissibleMap fs_s = pullback(fs, id_y, varpi);    // Y -> Z
  const AdmissibleMap fss = pullback(f, pi, varpi);        // Y -> Z
  const AdmissibleMap fp = pullback(f, id_x, varpi);       // X -> Z
  const AdmissibleMap fp_p = pullback(fp, pi, id_z);       // Y -> Z
  const AdmissibleMap& fpp = fss;

  EightLemmaCheck out;
  auto arrow = [&](const char* name, const AdmissibleMap& a, const AdmissibleMap& b,
                   const PointMap& on_base, const PointMap& on_boundary) {
    if (!sum_continuous(a, b, on_base, on_boundary)) out.failed_arrows.emplace_back(name);
  };
  arrow("id+id: Y+gZ -> Y+f**Z", g, fss, id_y, id_z);
  arrow("id+id: Y+f**Z -> Y+(f*)*Z", fss, fs_s, id_y, id_z);
  arrow("id+varpi: Y+(f*)*Z -> Y+f*W", fs_s, fs, id_y, varpi);
  arrow("pi+id: Y+f*W -> X+fW", fs, f, pi, id_w);
  arrow("pi+varpi: Y+gZ -> X+fW", g, f, pi, varpi);
  arrow("id+id: Y+gZ -> Y+f''Z", g, fpp, id_y, id_z);
  arrow("id+id: Y+f''Z -> Y+(f')'Z", fpp, fp_p, id_y, id_z);
  arrow("pi+id: Y+(f')'Z -> X+f'Z", fp_p, fp, pi, id_z);
  arrow("id+varpi: X+f'Z -> X+fW", fp, f, id_x, varpi);
  arrow("id+varpi: Y+gZ -> Y+f*W", g, fs, id_y, varpi);
  out.holds = out.failed_arrows.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration

std::vector<FinSpace> enumerate_topologies(std::size_t n, const std::string& prefix) {
  if (n > 4) throw BudgetError("enumerate_topologies: n must be at most 4");
  // Finite topologies correspond to preorders: A is closed iff it is a
  // down-set of the specialization preorder (y ≤ x iff y ∈ cl{x}).
  const std::size_t pairs = n * n;
  std::set<std::vector<PointSet>> families;
  for (std::uint32_t rel = 0; rel < (std::uint32_t{1} << pairs); ++rel) {
    auto le = [&](std::size_t a, std::size_t b) { return (rel >> (a * n + b)) & 1u; };
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) ok = le(a, a);
    for (std::size_t a = 0; a < n && ok; ++a) {
      for (std::size_t b = 0; b < n && ok; ++b) {
        for (std::size_t c = 0; c < n && ok; ++c) {
          if (le(a, b) && le(b, c) && !le(a, c)) ok = false;
        }
      }
    }
    if (!ok) continue;
    std::vector<PointSet> closed;
    for (PointSet s = 0; s < (PointSet{1} << n); ++s) {
      bool down = true;
      for (std::size_t x = 0; x < n && down; ++x) {
        if (!((s >> x) & 1u)) continue;
        for (std::size_t y = 0; y < n && down; ++y) {
          if (le(y, x) && !((s >> y) & 1u)) down = false;
        }
      }
      if (down) closed.push_back(s);
    }
    families.insert(std::move(closed));
  }
  std::vector<FinSpace> out;
  for (const auto& fam : families) out.emplace_back(default_names(n, prefix), fam);
  return out;
}

std::vector<AdmissibleMap> enumerate_admissible_maps(const SpaceRef& x, const SpaceRef& y,
                                                     std::size_t budget) {
  const std::size_t slots = x->distinct_point_closures().size();
  const auto& values = y->closed_sets();
  std::size_t total = 1;
  for (std::size_t i = 0; i < slots; ++i) {
    total *= values.size();
    if (total > budget) throw BudgetError("enumerate_admissible_maps: budget exceeded");
  }
  std::vector<AdmissibleMap> out;
  out.reserve(total);
  std::vector<std::size_t> digit(slots, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<PointSet> table(slots);
    for (std::size_t i = 0; i < slots; ++i) table[i] = values[digit[i]];
    out.emplace_back(x, y, std::move(table));
    for (std::size_t i = 0; i < slots; ++i) {
      if (++digit[i] < values.size()) break;
      digit[i] = 0;
    }
  }
  return out;
}

std::vector<PointMap> enumerate_continuous_maps(const SpaceRef& source, const SpaceRef& target,
                                                std::size_t budget) {
  const std::size_t n = source->size();
  const std::size_t m = target->size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= m;
    if (total > budget) throw BudgetError("enumerate_continuous_maps: budget exceeded");
  }
  std::vector<PointMap> out;
  std::vector<std::size_t> assign(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    PointMap candidate(source, target, assign);
    if (candidate.is_continuous()) out.push_back(std::move(candidate));
    for (std::size_t i = 0; i < n; ++i) {
      if (++assign[i] < m) break;
      assign[i] = 0;
    }
  }
  return out;
}

AdmissibleMap random_admissible_map(const SpaceRef& x, const SpaceRef& y, std::mt19937_64& rng) {
  const auto& values = y->closed_sets();
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<PointSet> table;
  for (std::size_t i = 0; i < x->distinct_point_closures().size(); ++i) {
    table.push_back(values[pick(rng)]);
  }
  return AdmissibleMap(x, y, std::move(table));
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json set_to_json(const FinSpace& s, PointSet set) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((set >> i) & 1u) names.push_back(s.points()[i]);
  }
  std::sort(names.begin(), names.end());
  return names;
}

PointSet set_from_json(const FinSpace& s, const nlohmann::json& j) {
  PointSet out = 0;
  for (const auto& name : j) out |= PointSet{1} << s.index_of(name.get<std::string>());
  return out;
}

nlohmann::json to_json(const FinSpace& s) {
  std::vector<nlohmann::json> closed;
  for (PointSet c : s.closed_sets()) closed.push_back(set_to_json(s, c));
  std::sort(closed.begin(), closed.end());
  return {{"points", s.points()}, {"closed", closed}};
}

FinSpace space_from_json(const nlohmann::json& j) {
  std::vector<std::string> points = j.at("points").get<std::vector<std::string>>();
  FinSpace probe = FinSpace::discrete(points);
  std::vector<PointSet> closed;
  for (const auto& c : j.at("closed")) closed.push_back(set_from_json(probe, c));
  return FinSpace(std::move(points), std::move(closed));
}

nlohmann::json to_json(const AdmissibleMap& f) {
  nlohmann::json table = nlohmann::json::array();
  const auto& closures = f.source()->distinct_point_closures();
  for (std::size_t k = 0; k < closures.size(); ++k) {
    table.push_back({{"closure", set_to_json(*f.source(), closures[k])},
                     {"value", set_to_json(*f.target(), f.table()[k])}});
  }
  return {{"source", to_json(*f.source())}, {"target", to_json(*f.target())}, {"table", table}};
}

AdmissibleMap map_from_json(const nlohmann::json& j) {
  SpaceRef src = share(space_from_json(j.at("source")));
  SpaceRef dst = share(space_from_json(j.at("target")));
  const auto& closures = src->distinct_point_closures();
  std::vector<PointSet> table(closures.size(), 0);
  std::vector<bool> seen(closures.size(), false);
  for (const auto& row : j.at("table")) {
    const PointSet c = set_from_json(*src, row.at("closure"));
    auto it = std::find(closures.begin(), closures.end(), c);
    if (it == closures.end()) throw Error("map_from_json: table references an unknown closure");
    const auto k = static_cast<std::size_t>(it - closures.begin());
    table[k] = set_from_json(*dst, row.at("value"));
    seen[k] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error("map_from_json: table misses a point closure");
  }
  return AdmissibleMap(src, dst, std::move(table));
}

}  // namespace coarsekit::topo
