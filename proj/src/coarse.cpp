#include "coarsekit/coarse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace coarsekit::coarse {

Subset make_subset(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// ---------------------------------------------------------------------------
// Relation

Relation::Relation(std::size_t carrier) : n_(carrier), words_((carrier * carrier + 63) / 64, 0) {}

Relation Relation::diagonal(std::size_t carrier) {
  Relation r(carrier);
  for (Point i = 0; i < carrier; ++i) r.insert(i, i);
  return r;
}

Relation Relation::full(std::size_t carrier) {
  Relation r(carrier);
  for (Point i = 0; i < carrier; ++i) {
    for (Point j = 0; j < carrier; ++j) r.insert(i, j);
  }
  return r;
}

Relation Relation::from_pairs(std::size_t carrier, const std::vector<Pair>& pairs) {
  Relation r(carrier);
  for (const auto& [a, b] : pairs) r.insert(a, b);
  return r;
}

Relation Relation::product(std::size_t carrier, const Subset& b, const Subset& c) {
  Relation r(carrier);
  for (Point x : b) {
    for (Point y : c) r.insert(x, y);
  }
  return r;
}

Relation Relation::width(const std::vector<std::vector<double>>& metric, double width) {
  Relation r(metric.size());
  for (Point i = 0; i < metric.size(); ++i) {
    for (Point j = 0; j < metric.size(); ++j) {
      if (metric[i][j] <= width) r.insert(i, j);
    }
  }
  return r;
}

bool Relation::contains(Point a, Point b) const {
  const std::size_t k = a * n_ + b;
  return (words_[k / 64] >> (k % 64)) & 1u;
}

void Relation::insert(Point a, Point b) {
  if (a >= n_ || b >= n_) throw Error("Relation: pair outside the carrier");
  const std::size_t k = a * n_ + b;
  words_[k / 64] |= std::uint64_t{1} << (k % 64);
}

std::size_t Relation::pair_count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<Pair> Relation::pairs() const {
  std::vector<Pair> out;
  for (Point a = 0; a < n_; ++a) {
    for (Point b = 0; b < n_; ++b) {
      if (contains(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

Relation Relation::inverse() const {
  Relation r(n_);
  for (Point a = 0; a < n_; ++a) {
    for (Point b = 0; b < n_; ++b) {
      if (contains(a, b)) r.insert(b, a);
    }
  }
  return r;
}

bool Relation::subset_of(const Relation& other) const {
  if (n_ != other.n_) throw Error("Relation: carrier mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

Relation Relation::operator|(const Relation& other) const {
  if (n_ != other.n_) throw Error("Relation: carrier mismatch");
  Relation r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= other.words_[i];
  return r;
}

Relation Relation::operator&(const Relation& other) const {
  if (n_ != other.n_) throw Error("Relation: carrier mismatch");
  Relation r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= other.words_[i];
  return r;
}

Relation compose(const Relation& e_prime, const Relation& e) {
  const std::size_t n = e.carrier();
  if (e_prime.carrier() != n) throw Error("compose: carrier mismatch");
  Relation r(n);
  for (Point a = 0; a < n; ++a) {
    for (Point c = 0; c < n; ++c) {
      if (!e.contains(a, c)) continue;
      for (Point b = 0; b < n; ++b) {
        if (e_prime.contains(c, b)) r.insert(a, b);
      }
    }
  }
  return r;
}

Subset neighborhood(const Subset& y, const Relation& u) {
  Subset out;
  for (Point x = 0; x < u.carrier(); ++x) {
    for (Point t : y) {
      if (u.contains(x, t)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

bool is_small(const Relation& u, const Subset& y) {
  for (Point a : y) {
    for (Point b : y) {
      if (!u.contains(a, b)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Bases and structures

CoarseBasis basis_closure(std::size_t carrier, const std::vector<Relation>& generators,
                          std::size_t budget) {
  std::set<Relation> seen;
  std::vector<Relation> family;
  std::vector<Relation> pending;
  auto add = [&](Relation r) {
    if (seen.insert(r).second) {
      if (seen.size() > budget) throw BudgetError("basis_closure: family exceeds budget");
      pending.push_back(std::move(r));
    }
  };
  add(Relation::diagonal(carrier));
  for (const Relation& g : generators) {
    if (g.carrier() != carrier) throw Error("basis_closure: generator carrier mismatch");
    add(g);
  }
  while (!pending.empty()) {
    Relation a = std::move(pending.back());
    pending.pop_back();
    family.push_back(a);
    add(a.inverse());
    add(compose(a, a));
    for (std::size_t i = 0; i + 1 < family.size(); ++i) {
      const Relation b = family[i];
      add(a | b);
      add(compose(a, b));
      add(compose(b, a));
    }
  }
  std::sort(family.begin(), family.end());
  return family;
}

namespace {

Relation equivalence_closure(std::size_t carrier, const std::vector<Relation>& generators) {
  Relation r = Relation::diagonal(carrier);
  for (const Relation& g : generators) r = r | g | g.inverse();
  // Warshall
  for (Point k = 0; k < carrier; ++k) {
    for (Point i = 0; i < carrier; ++i) {
      if (!r.contains(i, k)) continue;
      for (Point j = 0; j < carrier; ++j) {
        if (r.contains(k, j)) r.insert(i, j);
      }
    }
  }
  return r;
}

bool precedes(const Relation& a, const Relation& b) {
  const std::size_t ca = a.pair_count(), cb = b.pair_count();
  if (ca != cb) return ca < cb;
  return a.pairs() < b.pairs();
}

}  // namespace

CoarseStructure generated_structure(std::size_t carrier, const std::vector<Relation>& generators) {
  CoarseStructure s;
  s.carrier = carrier;
  try {
    s.basis = basis_closure(carrier, generators, std::size_t{1} << 9);
  } catch (const BudgetError&) {
    s.basis = {equivalence_closure(carrier, generators)};
  }
  return s;
}

CoarseStructure metric_structure(const std::vector<std::vector<double>>& metric,
                                 const std::vector<double>& widths) {
  CoarseStructure s;
  s.carrier = metric.size();
  for (double w : widths) s.basis.push_back(Relation::width(metric, w));
  s.topologically_bounded = [](const Subset&) { return true; };
  return s;
}

std::optional<std::size_t> dominating_element(const CoarseStructure& eps, const Relation& e) {
  if (e.carrier() != eps.carrier) throw Error("is_member: carrier mismatch");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < eps.basis.size(); ++i) {
    if (!e.subset_of(eps.basis[i])) continue;
    if (!best || precedes(eps.basis[i], eps.basis[*best])) best = i;
  }
  return best;
}

bool is_member(const CoarseStructure& eps, const Relation& e) {
  if (e.carrier() != eps.carrier) throw Error("is_member: carrier mismatch");
  for (const Relation& b : eps.basis) {
    if (e.subset_of(b)) return true;
  }
  return false;
}

bool is_bounded(const CoarseStructure& eps, const Subset& b) {
  return is_member(eps, Relation::product(eps.carrier, b, b));
}

bool is_bounded_by_point(const CoarseStructure& eps, const Subset& b) {
  if (b.empty()) return true;
  for (Point p = 0; p < eps.carrier; ++p) {
    if (is_member(eps, Relation::product(eps.carrier, b, {p}))) return true;
  }
  return false;
}

bool is_coarsely_connected(const CoarseStructure& eps) {
  Relation all(eps.carrier);
  for (const Relation& b : eps.basis) all = all | b;
  return all == Relation::full(eps.carrier);
}

std::vector<Subset> maximal_bounded_sets(const CoarseStructure& eps) {
  std::set<Subset> out;
  for (const Relation& e : eps.basis) {
    for (Point b = 0; b < eps.carrier; ++b) out.insert(neighborhood({b}, e));
  }
  return {out.begin(), out.end()};
}

bool is_proper_space(const CoarseStructure& eps) {
  if (!eps.topologically_bounded) {
    throw PreconditionError("is_proper_space: no topological boundedness predicate supplied");
  }
  const Relation diag = Relation::diagonal(eps.carrier);
  bool has_neighborhood = false;
  for (const Relation& e : eps.basis) has_neighborhood |= diag.subset_of(e);
  if (!has_neighborhood) return false;
  for (const Subset& b : maximal_bounded_sets(eps)) {
    if (!eps.topologically_bounded(b)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Maps

CarrierMap CarrierMap::identity(std::size_t n) {
  CarrierMap f{n, n, {}};
  for (Point i = 0; i < n; ++i) f.assignment.push_back(i);
  return f;
}

Relation image(const CarrierMap& f, const Relation& e) {
  if (e.carrier() != f.source) throw Error("image: carrier mismatch");
  Relation r(f.target);
  for (const auto& [a, b] : e.pairs()) r.insert(f(a), f(b));
  return r;
}

Subset preimage(const CarrierMap& f, const Subset& b) {
  std::vector<bool> in(f.target, false);
  for (Point p : b) in[p] = true;
  Subset out;
  for (Point s = 0; s < f.source; ++s) {
    if (in[f(s)]) out.push_back(s);
  }
  return out;
}

CarrierMap compose(const CarrierMap& second, const CarrierMap& first) {
  if (first.target != second.source) throw Error("compose: carrier maps not composable");
  CarrierMap out{first.source, second.target, {}};
  for (Point p : first.assignment) out.assignment.push_back(second(p));
  return out;
}

bool is_bornologous(const CarrierMap& f, const CoarseStructure& eps, const CoarseStructure& zeta) {
  for (const Relation& e : eps.basis) {
    if (!is_member(zeta, image(f, e))) return false;
  }
  return true;
}

bool is_proper_map(const CarrierMap& f, const CoarseStructure& eps, const CoarseStructure& zeta) {
  for (const Subset& b : maximal_bounded_sets(zeta)) {
    if (!is_bounded(eps, preimage(f, b))) return false;
  }
  return true;
}

bool is_coarse_map(const CarrierMap& f, const CoarseStructure& eps, const CoarseStructure& zeta) {
  return is_bornologous(f, eps, zeta) && is_proper_map(f, eps, zeta);
}

namespace {

Relation graph_pairs(const CarrierMap& f, const CarrierMap& g) {
  Relation r(f.target);
  for (Point s = 0; s < f.source; ++s) r.insert(f(s), g(s));
  return r;
}

}  // namespace

bool are_close(const CarrierMap& f, const CarrierMap& g, const CoarseStructure& eps_target) {
  if (f.source != g.source || f.target != g.target) throw Error("are_close: maps differ in shape");
  return is_member(eps_target, graph_pairs(f, g));
}

CertificateResult is_coarse_equivalence(const CarrierMap& f, const CarrierMap& g,
                                        const CoarseStructure& eps, const CoarseStructure& zeta) {
  CertificateResult out;
  if (!is_bornologous(f, eps, zeta)) {
    out.failure = "f is not bornologous";
    return out;
  }
  if (!is_bornologous(g, zeta, eps)) {
    out.failure = "g is not bornologous";
    return out;
  }
  out.fg_close_witness =
      dominating_element(zeta, graph_pairs(compose(f, g), CarrierMap::identity(zeta.carrier)));
  if (!out.fg_close_witness) {
    out.failure = "f∘g is not close to id_Y";
    return out;
  }
  out.gf_close_witness =
      dominating_element(eps, graph_pairs(compose(g, f), CarrierMap::identity(eps.carrier)));
  if (!out.gf_close_witness) {
    out.failure = "g∘f is not close to id_X";
    return out;
  }
  if (!is_proper_map(f, eps, zeta)) {
    out.failure = "f is not proper";
    return out;
  }
  if (!is_proper_map(g, zeta, eps)) {
    out.failure = "g is not proper";
    return out;
  }
  out.ok = true;
  return out;
}

std::optional<std::size_t> quasi_density_witness(const Subset& a, const CoarseStructure& eps) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < eps.basis.size(); ++i) {
    if (neighborhood(a, eps.basis[i]).size() != eps.carrier) continue;
    if (!best || precedes(eps.basis[i], eps.basis[*best])) best = i;
  }
  return best;
}

bool is_quasi_dense(const Subset& a, const CoarseStructure& eps) {
  return quasi_density_witness(a, eps).has_value();
}

std::pair<CoarseStructure, CarrierMap> subspace(const CoarseStructure& eps, const Subset& a) {
  CoarseStructure sub;
  sub.carrier = a.size();
  for (const Relation& e : eps.basis) {
    Relation r(a.size());
    for (Point i = 0; i < a.size(); ++i) {
      for (Point j = 0; j < a.size(); ++j) {
        if (e.contains(a[i], a[j])) r.insert(i, j);
      }
    }
    sub.basis.push_back(std::move(r));
  }
  if (eps.topologically_bounded) {
    sub.topologically_bounded = [pred = eps.topologically_bounded, a](const Subset& s) {
      Subset lifted;
      for (Point p : s) lifted.push_back(a[p]);
      return pred(lifted);
    };
  }
  if (!eps.labels.empty()) {
    for (Point p : a) sub.labels.push_back(eps.labels[p]);
  }
  CarrierMap inc{a.size(), eps.carrier, a};
  return {std::move(sub), std::move(inc)};
}

// ---------------------------------------------------------------------------
// Truncation sequences

std::optional<Point> TruncationSequence::find(std::size_t level, std::int64_t label) const {
  const auto& ls = levels.at(level).labels;
  auto it = std::lower_bound(ls.begin(), ls.end(), label);
  if (it == ls.end() || *it != label) return std::nullopt;
  return static_cast<Point>(it - ls.begin());
}

CarrierMap TruncatedMap::at(const TruncationSequence& src, const TruncationSequence& dst,
                            std::size_t level) const {
  const CoarseStructure& s = src.levels.at(level);
  CarrierMap f{s.carrier, dst.levels.at(level).carrier, {}};
  for (std::int64_t label : s.labels) {
    auto p = dst.find(level, rule(label));
    if (!p) {
      throw InconclusiveError("truncated map: image of " + std::to_string(label) +
                              " leaves the target truncation");
    }
    f.assignment.push_back(*p);
  }
  return f;
}

TruncationSequence integer_line_truncations(const std::vector<std::int64_t>& radii,
                                            const std::function<bool(std::int64_t)>& keep,
                                            std::size_t probes) {
  TruncationSequence seq;
  seq.probes = probes;
  for (std::int64_t n : radii) {
    CoarseStructure level;
    for (std::int64_t k = -n; k <= n; ++k) {
      if (!keep || keep(k)) level.labels.push_back(k);
    }
    level.carrier = level.labels.size();
    std::vector<std::vector<double>> metric(level.carrier, std::vector<double>(level.carrier));
    for (Point i = 0; i < level.carrier; ++i) {
      for (Point j = 0; j < level.carrier; ++j) {
        metric[i][j] = static_cast<double>(std::llabs(level.labels[i] - level.labels[j]));
      }
    }
    const double diam = 2.0 * static_cast<double>(n);
    for (const double w : width_grid(diam)) level.basis.push_back(Relation::width(metric, w));
    level.topologically_bounded = [](const Subset&) { return true; };
    seq.levels.push_back(std::move(level));
  }
  if (!seq.levels.empty()) seq.core = seq.levels.front().labels;
  return seq;
}

std::vector<double> width_grid(double diameter) {
  std::vector<double> out{0.0};
  double w = 1.0;
  while (true) {
    out.push_back(w);
    if (w >= diameter) break;
    w *= 2.0;
  }
  return out;
}

Verdict stable_verdict(const std::vector<std::optional<std::size_t>>& observations) {
  const std::size_t n = observations.size();
  if (n < 2) return Verdict::kInconclusive;
  auto value = [](const std::optional<std::size_t>& o) {
    return o ? *o : std::numeric_limits<std::size_t>::max();
  };
  if (observations[n - 1] == observations[n - 2]) {
    return observations[n - 1] ? Verdict::kYes : Verdict::kNo;
  }
  if (n >= 3) {
    bool increasing = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!(value(observations[i]) < value(observations[i + 1]))) increasing = false;
    }
    if (increasing) return Verdict::kNo;
  }
  return Verdict::kInconclusive;
}

namespace {

Verdict combine(const std::vector<Verdict>& vs) {
  bool all_yes = true;
  for (Verdict v : vs) {
    if (v == Verdict::kNo) return Verdict::kNo;
    if (v != Verdict::kYes) all_yes = false;
  }
  return all_yes ? Verdict::kYes : Verdict::kInconclusive;
}

void require_levels(const TruncationSequence& seq, const char* op) {
  if (seq.levels.size() < 2) {
    throw InconclusiveError(std::string(op) + ": at least two truncations are required");
  }
}

std::size_t probe_count(const TruncationSequence& seq) {
  std::size_t p = seq.probes;
  for (const auto& level : seq.levels) p = std::min(p, level.basis.size());
  return p;
}

}  // namespace

Verdict is_proper_space(const TruncationSequence& seq) {
  require_levels(seq, "is_proper_space");
  std::vector<Verdict> vs;
  for (std::size_t i = 0; i < probe_count(seq); ++i) {
    for (std::int64_t b : seq.core) {
      std::vector<std::optional<std::size_t>> obs;
      for (std::size_t k = 0; k < seq.levels.size(); ++k) {
        auto p = seq.find(k, b);
        if (!p) throw Error("is_proper_space: core point missing from a truncation");
        const Subset ball = neighborhood({*p}, seq.levels[k].basis[i]);
        if (!seq.levels[k].topologically_bounded(ball)) {
          obs.emplace_back(std::nullopt);
        } else {
          obs.emplace_back(ball.size());
        }
      }
      vs.push_back(stable_verdict(obs));
    }
  }
  return combine(vs);
}

Verdict is_proper_map(const TruncatedMap& f, const TruncationSequence& src,
                      const TruncationSequence& dst) {
  require_levels(src, "is_proper_map");
  std::vector<CarrierMap> maps;
  for (std::size_t k = 0; k < src.levels.size(); ++k) maps.push_back(f.at(src, dst, k));
  std::vector<Verdict> vs;
  for (std::size_t i = 0; i < probe_count(dst); ++i) {
    for (std::int64_t b : dst.core) {
      std::vector<std::optional<std::size_t>> obs;
      for (std::size_t k = 0; k < src.levels.size(); ++k) {
        auto p = dst.find(k, b);
        if (!p) throw Error("is_proper_map: core point missing from a truncation");
        obs.emplace_back(preimage(maps[k], neighborhood({*p}, dst.levels[k].basis[i])).size());
      }
      vs.push_back(stable_verdict(obs));
    }
  }
  return combine(vs);
}

Verdict is_bornologous(const TruncatedMap& f, const TruncationSequence& src,
                       const TruncationSequence& dst) {
  require_levels(src, "is_bornologous");
  std::vector<std::vector<std::optional<std::size_t>>> obs(probe_count(src));
  for (std::size_t k = 0; k < src.levels.size(); ++k) {
    const CarrierMap m = f.at(src, dst, k);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      obs[i].push_back(dominating_element(dst.levels[k], image(m, src.levels[k].basis[i])));
    }
  }
  std::vector<Verdict> vs;
  for (const auto& o : obs) vs.push_back(stable_verdict(o));
  return combine(vs);
}

Verdict are_close(const TruncatedMap& f, const TruncatedMap& g, const TruncationSequence& src,
                  const TruncationSequence& dst) {
  require_levels(src, "are_close");
  std::vector<std::optional<std::size_t>> obs;
  for (std::size_t k = 0; k < src.levels.size(); ++k) {
    obs.push_back(dominating_element(dst.levels[k], graph_pairs(f.at(src, dst, k),
                                                                g.at(src, dst, k))));
  }
  return stable_verdict(obs);
}

Verdict is_quasi_dense(const std::function<bool(std::int64_t)>& in_a,
                       const TruncationSequence& seq) {
  require_levels(seq, "is_quasi_dense");
  std::vector<std::optional<std::size_t>> obs;
  for (const CoarseStructure& level : seq.levels) {
    Subset a;
    for (Point p = 0; p < level.carrier; ++p) {
      if (in_a(level.labels[p])) a.push_back(p);
    }
    obs.push_back(quasi_density_witness(a, level));
  }
  return stable_verdict(obs);
}

SequenceCertificate is_coarse_equivalence(const TruncatedMap& f, const TruncatedMap& g,
                                          const TruncationSequence& x,
                                          const TruncationSequence& y) {
  SequenceCertificate out;
  TruncatedMap id{[](std::int64_t v) { return v; }};
  TruncatedMap fg{[f, g](std::int64_t v) { return f.rule(g.rule(v)); }};
  TruncatedMap gf{[f, g](std::int64_t v) { return g.rule(f.rule(v)); }};
  struct Step {
    const char* failure;
    std::function<Verdict()> run;
  };
  const std::vector<Step> steps = {
      {"f is not bornologous", [&] { return is_bornologous(f, x, y); }},
      {"g is not bornologous", [&] { return is_bornologous(g, y, x); }},
      {"f∘g is not close to id_Y", [&] { return are_close(fg, id, y, y); }},
      {"g∘f is not close to id_X", [&] { return are_close(gf, id, x, x); }},
      {"f is not proper", [&] { return is_proper_map(f, x, y); }},
      {"g is not proper", [&] { return is_proper_map(g, y, x); }},
  };
  bool all_yes = true;
  for (const Step& s : steps) {
    const Verdict v = s.run();
    if (v == Verdict::kNo) {
      out.verdict = Verdict::kNo;
      out.failure = s.failure;
      return out;
    }
    if (v == Verdict::kInconclusive) {
      all_yes = false;
      if (out.failure.empty()) out.failure = std::string("unstable: ") + s.failure;
    }
  }
  const std::size_t last = x.levels.size() - 1;
  out.fg_close_witness = dominating_element(
      y.last(), graph_pairs(fg.at(y, y, last), CarrierMap::identity(y.last().carrier)));
  out.gf_close_witness = dominating_element(
      x.last(), graph_pairs(gf.at(x, x, last), CarrierMap::identity(x.last().carrier)));
  out.verdict = all_yes ? Verdict::kYes : Verdict::kInconclusive;
  if (all_yes) out.failure.clear();
  return out;
}

// ---------------------------------------------------------------------------
// Perspective entourages

PerspectivityReport perspectivity_conditions_equiv(const Relation& e, const ChartTable& chart,
                                                   const std::vector<double>& v_radii) {
  if (chart.clusters == 0 || chart.distance.size() != chart.clusters) {
    throw PreconditionError("perspectivity_conditions_equiv: no chart supplied");
  }
  if (e.carrier() != chart.points) throw Error("perspectivity_conditions_equiv: carrier mismatch");
  PerspectivityReport out;
  out.perspective = true;
  const auto pairs = e.pairs();
  for (std::size_t c = 0; c < chart.clusters; ++c) {
    const auto& dist = chart.distance[c];
    std::vector<double> candidates(dist.begin(), dist.end());
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (double rho : v_radii) {
      PerspectivityRow row;
      row.cluster = c;
      row.v_radius = rho;
      for (double r : candidates) {
        if (r > rho || !std::isfinite(r)) continue;
        bool separated = true;
        for (const auto& [p, q] : pairs) {
          if (dist[p] <= r && !(dist[q] <= rho)) {
            separated = false;
            break;
          }
        }
        if (separated) {
          row.holds = true;
          row.u_radius = r;
          row.u_points = static_cast<std::size_t>(
              std::count_if(dist.begin(), dist.end(), [r](double d) { return d <= r; }));
          break;
        }
      }
      out.perspective = out.perspective && row.holds;
      out.rows.push_back(row);
    }
  }
  return out;
}

nlohmann::json to_json(const Relation& e) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [a, b] : e.pairs()) arr.push_back({a, b});
  return arr;
}

Relation relation_from_json(std::size_t carrier, const nlohmann::json& j) {
  Relation r(carrier);
  for (const auto& p : j) r.insert(p.at(0).get<Point>(), p.at(1).get<Point>());
  return r;
}

}  // namespace coarsekit::coarse
