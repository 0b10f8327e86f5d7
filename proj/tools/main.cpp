// coarsekit command-line tool.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coarsekit/action.hpp"
#include "coarsekit/coarse.hpp"
#include "coarsekit/error.hpp"
#include "coarsekit/floyd.hpp"
#include "coarsekit/hyperbolic.hpp"
#include "coarsekit/manifest.hpp"
#include "coarsekit/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coarsekit;
using suites::number;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 3;

struct Globals {
  std::string manifest_path;
  std::string budget;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool timing = false;
};

Manifest load_manifest(const Globals& g) {
  Manifest m = g.manifest_path.empty() ? Manifest::from_json(json::object()) : Manifest::load(g.manifest_path);
  if (!g.budget.empty()) m.set_budget(g.budget);
  if (g.seed) m.set_seed(*g.seed);
  return m;
}

fs::path output_dir(const Globals& g, const Manifest& m) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("COARSEKIT_OUT"); env && *env) return env;
  return m.json().at("output_dir").get<std::string>();
}

void write_artifact(const Globals& g, const Manifest& m, const std::string& name, const std::string& body) {
  const fs::path dir = output_dir(g, m);
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / name).string());
  out << body;
}

void emit(const Globals& g, const Manifest& m, const std::string& name, const json& j) {
  const std::string body = j.dump(2) + "\n";
  write_artifact(g, m, name, body);
  std::cout << body;
}

GraphRef resolve_graph(const Manifest& m, const std::string& s) {
  if (m.json().at("graphs").contains(s)) return m.graph(s);
  return make_graph(s);
}

floyd::FloydFunction resolve_function(const Manifest& m, const std::string& s) {
  if (m.json().at("floyd").contains(s)) return m.function(s);
  return floyd::FloydFunction::parse(s);
}

std::vector<Vertex> parse_vertices(const LocallyFiniteGraph& g, const std::string& list) {
  std::vector<Vertex> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(g.parse(item));
  }
  return out;
}

json labels(const LocallyFiniteGraph& g, const std::vector<Vertex>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(g.label(v));
  return out;
}

std::string safe(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  }
  return s;
}

// Named vertex maps for transport.
floyd::VertexFunction named_map(const std::string& name) {
  if (name == "double") return [](const Vertex& x) { return Vertex{2 * x[0]}; };
  if (name == "half") return [](const Vertex& x) { return Vertex{x[0] >= 0 ? x[0] / 2 : -((-x[0] + 1) / 2)}; };
  if (name == "staircase") return [](const Vertex& x) { return Vertex{(x[0] + 1) / 2, x[0] / 2}; };
  if (name == "diagonal") return [](const Vertex& x) { return Vertex{x[0], x[0]}; };
  if (name == "right") {
    auto group = make_z2_free_product(3);
    return [group](const Vertex& x) { return group->multiply(x, {1}); };
  }
  if (name == "identity") return [](const Vertex& x) { return x; };
  throw Error("unknown map '" + name + "' (double, half, staircase, diagonal, right, identity)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarsekit: coarse structures, Floyd boundaries and verification suites"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--manifest", g.manifest_path, "Manifest JSON (defaults built in)");
  app.add_option("--budget", g.budget, "Budget level (tiny, default)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output directory (else $COARSEKIT_OUT, else the manifest)");

  std::function<int()> action;
  auto run = [&](std::function<int(const Manifest&)> fn) {
    return [&g, &action, fn] {
      action = [&g, fn] { return fn(load_manifest(g)); };
    };
  };

  // graph build
  auto* graph = app.add_subcommand("graph", "Graph construction")->require_subcommand(1);
  std::string graph_name = "line";
  std::int64_t graph_radius = 3;
  auto* build = graph->add_subcommand("build", "Breadth-first ball with its edges");
  build->add_option("--graph", graph_name, "Manifest name or graph spec");
  build->add_option("--radius", graph_radius)->check(CLI::NonNegativeNumber);
  build->callback(run([&](const Manifest& m) {
    auto gr = resolve_graph(m, graph_name);
    const Region reg = ball(*gr, gr->root(), graph_radius);
    json edges = json::array();
    std::string csv = "a,b\n";
    for (std::size_t i = 0; i < reg.size(); ++i) {
      for (auto j : reg.adjacency[i]) {
        if (i < j) {
          edges.push_back({gr->label(reg.vertices[i]), gr->label(reg.vertices[j])});
          csv += gr->label(reg.vertices[i]) + "," + gr->label(reg.vertices[j]) + "\n";
        }
      }
    }
    write_artifact(g, m, "graph-" + safe(graph_name) + ".csv", csv);
    emit(g, m, "graph-" + safe(graph_name) + ".json",
         {{"graph", gr->name()}, {"radius", graph_radius}, {"vertices", labels(*gr, reg.vertices)},
          {"depth", reg.depth}, {"edges", edges}});
    return kExitPass;
  }));

  // floyd dist|clusters|karlsson
  auto* floyd_cmd = app.add_subcommand("floyd", "Floyd metric and boundary charts")->require_subcommand(1);
  std::string fgraph = "line", ffun = "geom", fv, fx, fy, fchart;
  std::int64_t fr = 8;
  std::vector<std::int64_t> fradii{4, 6, 8};
  auto* dist = floyd_cmd->add_subcommand("dist", "Truncated Floyd distance and its tail");
  dist->add_option("--graph", fgraph);
  dist->add_option("--f", ffun, "Manifest name or spec such as geom:0.5");
  dist->add_option("--v", fv, "Basepoint (default: root)");
  dist->add_option("--x", fx)->required();
  dist->add_option("--y", fy)->required();
  dist->add_option("--R", fr)->check(CLI::PositiveNumber);
  dist->callback(run([&](const Manifest& m) {
    auto gr = resolve_graph(m, fgraph);
    const auto f = resolve_function(m, ffun);
    const Vertex v = fv.empty() ? gr->root() : gr->parse(fv);
    const auto d = floyd::floyd_distance(*gr, f, v, gr->parse(fx), gr->parse(fy), fr);
    emit(g, m, "floyd-dist.json",
         {{"graph", gr->name()}, {"f", f.spec()}, {"v", gr->label(v)}, {"x", fx}, {"y", fy}, {"R", fr},
          {"value", number(d.value)}, {"tail", number(d.tail)},
          {"tail_log2", d.tail > 0 ? number(std::log2(d.tail)) : json(nullptr)}});
    return kExitPass;
  }));
  auto* clusters = floyd_cmd->add_subcommand("clusters", "Boundary chart of a manifest chart or graph");
  clusters->add_option("--chart", fchart, "Manifest chart name");
  clusters->add_option("--graph", fgraph);
  clusters->add_option("--f", ffun);
  clusters->add_option("--v", fv);
  clusters->add_option("--R", fr)->check(CLI::PositiveNumber);
  clusters->callback(run([&](const Manifest& m) {
    std::optional<floyd::FloydChart> chart;
    if (!fchart.empty()) {
      chart.emplace(m.build_chart(fchart));
    } else {
      auto gr = resolve_graph(m, fgraph);
      chart.emplace(gr, resolve_function(m, ffun), fv.empty() ? gr->root() : gr->parse(fv), fr);
    }
    emit(g, m, "floyd-clusters.json", chart->to_json());
    return kExitPass;
  }));
  auto* karlsson = floyd_cmd->add_subcommand("karlsson", "Karlsson defect table");
  karlsson->add_option("--graph", fgraph);
  karlsson->add_option("--f", ffun);
  karlsson->add_option("--R", fradii, "Radii")->check(CLI::PositiveNumber);
  karlsson->callback(run([&](const Manifest& m) {
    auto gr = resolve_graph(m, fgraph);
    const auto f = resolve_function(m, ffun);
    json rows = json::array();
    std::string csv = "R,defect,bound,samples\n";
    for (auto r : fradii) {
      const auto k = floyd::karlsson_defect(*gr, f, gr->root(), r, floyd::GeodesicSample{48, 2, 8, m.seed()});
      rows.push_back({{"R", r}, {"defect", number(k.defect)}, {"bound", number(k.bound)}, {"samples", k.samples}});
      csv += std::to_string(r) + "," + number(k.defect).dump() + "," + number(k.bound).dump() + "," +
             std::to_string(k.samples) + "\n";
    }
    write_artifact(g, m, "karlsson.csv", csv);
    emit(g, m, "karlsson.json", {{"graph", gr->name()}, {"f", f.spec()}, {"rows", rows}});
    return kExitPass;
  }));

  // coarse closure|certify
  auto* coarse_cmd = app.add_subcommand("coarse", "Coarse structures on finite carriers")->require_subcommand(1);
  std::size_t carrier = 3;
  std::string gens_text = "[]";
  auto* closure = coarse_cmd->add_subcommand("closure", "Closed basis generated by relations");
  closure->add_option("--carrier", carrier)->check(CLI::Range(1, 64));
  closure->add_option("--generators", gens_text, "JSON list of relations, each a list of [a, b] pairs");
  closure->callback(run([&](const Manifest& m) {
    std::vector<coarse::Relation> gens;
    for (const auto& r : json::parse(gens_text)) gens.push_back(coarse::relation_from_json(carrier, r));
    const auto basis = coarse::basis_closure(carrier, gens);
    json out = json::array();
    for (const auto& e : basis) out.push_back(coarse::to_json(e));
    emit(g, m, "coarse-closure.json", {{"carrier", carrier}, {"size", basis.size()}, {"basis", out}});
    return kExitPass;
  }));
  std::string certify_map = "evens";
  std::vector<std::int64_t> trunc_radii{16, 32, 64, 128};
  auto* certify = coarse_cmd->add_subcommand("certify", "Coarse-equivalence certificate on line truncations");
  certify->add_option("--map", certify_map, "evens (2Z -> Z) or collapse (point -> Z)");
  certify->add_option("--radii", trunc_radii)->check(CLI::PositiveNumber);
  certify->callback(run([&](const Manifest& m) {
    auto floor_half = [](std::int64_t n) { return n >= 0 ? n / 2 : -((-n + 1) / 2); };
    auto even = [](std::int64_t n) { return n % 2 == 0; };
    auto y = coarse::integer_line_truncations(trunc_radii);
    y.core = coarse::integer_line_truncations({4}).core;
    coarse::TruncationSequence x;
    coarse::TruncatedMap f{[](std::int64_t n) { return n; }};
    coarse::TruncatedMap back{[&](std::int64_t n) { return 2 * floor_half(n); }};
    if (certify_map == "evens") {
      x = coarse::integer_line_truncations(trunc_radii, even);
      x.core = coarse::integer_line_truncations({4}, even).core;
    } else if (certify_map == "collapse") {
      for (std::size_t k = 0; k < trunc_radii.size(); ++k) {
        coarse::CoarseStructure s;
        s.carrier = 1;
        s.labels = {0};
        s.basis = {coarse::Relation::diagonal(1), coarse::Relation::full(1)};
        s.topologically_bounded = [](const coarse::Subset&) { return true; };
        x.levels.push_back(s);
      }
      x.core = {0};
      x.probes = 2;
      back = coarse::TruncatedMap{[](std::int64_t) { return std::int64_t{0}; }};
    } else {
      throw Error("unknown map '" + certify_map + "'");
    }
    const auto cert = coarse::is_coarse_equivalence(f, back, x, y);
    json out{{"map", certify_map}, {"radii", trunc_radii}, {"verdict", to_string(cert.verdict)},
             {"failure", cert.failure}};
    out["fg_close_witness"] = cert.fg_close_witness ? json(*cert.fg_close_witness) : json(nullptr);
    out["gf_close_witness"] = cert.gf_close_witness ? json(*cert.gf_close_witness) : json(nullptr);
    emit(g, m, "coarse-certify.json", out);
    return cert.verdict == Verdict::kYes ? kExitPass : cert.verdict == Verdict::kNo ? kExitFail : kExitInconclusive;
  }));

  // action sat|msvarc|pullbacks|defect
  auto* action_cmd = app.add_subcommand("action", "Group actions on graphs")->require_subcommand(1);
  std::string aname = "Z-line", abase, af = "geom";
  std::int64_t aradius = 3;
  std::size_t arays = 10;
  std::vector<std::int64_t> aradii{4, 8, 12};
  auto* sat = action_cmd->add_subcommand("sat", "Saturation restricted to a ball");
  sat->add_option("--action", aname);
  sat->add_option("--base", abase, "Vertices separated by ';' (default: the root)");
  sat->add_option("--radius", aradius)->check(CLI::NonNegativeNumber);
  sat->callback(run([&](const Manifest& m) {
    const auto a = m.action(aname);
    const auto& gr = a.graph();
    auto base = abase.empty() ? std::vector<Vertex>{gr.root()} : parse_vertices(gr, abase);
    const action::Saturation s(a, base);
    const Region reg = ball(gr, gr.root(), aradius);
    json pairs = json::array();
    for (const auto& [p, q] : s.restrict(reg).pairs()) pairs.push_back({gr.label(reg.vertices[p]), gr.label(reg.vertices[q])});
    emit(g, m, "action-sat.json", {{"action", a.name()}, {"base", labels(gr, s.base())}, {"radius", aradius}, {"pairs", pairs}});
    return kExitPass;
  }));
  auto* msvarc = action_cmd->add_subcommand("msvarc", "Orbit-map certificate");
  msvarc->add_option("--action", aname);
  msvarc->add_option("--radius", aradius)->check(CLI::PositiveNumber);
  msvarc->callback(run([&](const Manifest& m) {
    const auto a = m.action(aname);
    const auto c = action::milnor_svarc_map(a, a.graph().root(), aradius);
    emit(g, m, "action-msvarc.json",
         {{"action", a.name()}, {"radius", aradius}, {"ok", c.ok()}, {"failure", c.failure},
          {"group_ball", c.group_ball.size()}, {"region", c.region.size()}, {"domain", labels(a.graph(), c.domain)},
          {"properly_discontinuous", c.properly_discontinuous}, {"generator_images", c.generator_images},
          {"generator_pairs", c.generator_pairs}, {"properness", c.properness},
          {"preimage_sizes", c.preimage_sizes}, {"quasi_density", c.quasi_density},
          {"quasi_inverse", c.quasi_inverse}, {"quasi_inverse_displacement", c.quasi_inverse_displacement}});
    return c.ok() ? kExitPass : kExitFail;
  }));
  auto* pullbacks = action_cmd->add_subcommand("pullbacks", "Compare orbit and domain pullbacks on sampled rays");
  pullbacks->add_option("--action", aname);
  pullbacks->add_option("--f", af);
  pullbacks->add_option("--R", aradius)->check(CLI::PositiveNumber);
  pullbacks->add_option("--rays", arays)->check(CLI::PositiveNumber);
  pullbacks->callback(run([&](const Manifest& m) {
    const auto a = m.action(aname);
    const Vertex x0 = a.graph().root();
    const floyd::FloydChart chart(a.graph_ref(), resolve_function(m, af), x0, aradius);
    const auto k = ball(a.graph(), x0, 1).vertices;
    const auto rays = action::sample_group_rays(a.group(), arays, static_cast<std::size_t>(2 * aradius + 6), 2, m.seed());
    const auto rep = action::compare_pullbacks(a, x0, chart, k, rays);
    json rows = json::array();
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      json ray = json::array();
      for (const auto& e : rays[i]) ray.push_back(a.group().to_string(e));
      rows.push_back({{"ray", ray}, {"orbit_clusters", rep.rows[i].orbit_clusters},
                      {"domain_clusters", rep.rows[i].domain_clusters}, {"agree", rep.rows[i].agree}});
    }
    emit(g, m, "action-pullbacks.json",
         {{"action", a.name()}, {"R", aradius}, {"mismatches", rep.mismatches}, {"inconclusive", rep.inconclusive},
          {"cluster_gap", number(rep.cluster_gap)}, {"rows", rows}});
    return rep.mismatches ? kExitFail : rep.inconclusive ? kExitInconclusive : kExitPass;
  }));
  auto* defect = action_cmd->add_subcommand("defect", "Floyd diameters of translates of K = ball(root, 1)");
  defect->add_option("--action", aname);
  defect->add_option("--f", af);
  defect->add_option("--R", aradii)->check(CLI::PositiveNumber);
  defect->callback(run([&](const Manifest& m) {
    const auto a = m.action(aname);
    const Vertex v = a.graph().root();
    const auto k = ball(a.graph(), v, 1).vertices;
    const auto f = resolve_function(m, af);
    json rows = json::array();
    std::string csv = "R,defect,translates\n";
    for (auto r : aradii) {
      const auto d = action::group_perspectivity_defect(a, k, f, v, r);
      rows.push_back({{"R", r}, {"defect", number(d.defect)}, {"translates", d.translates},
                      {"worst", a.group().to_string(d.worst)}});
      csv += std::to_string(r) + "," + number(d.defect).dump() + "," + std::to_string(d.translates) + "\n";
    }
    write_artifact(g, m, "action-defect.csv", csv);
    emit(g, m, "action-defect.json", {{"action", a.name()}, {"f", f.spec()}, {"rows", rows}});
    return kExitPass;
  }));

  // hyperbolic delta|rays|transport
  auto* hyp = app.add_subcommand("hyperbolic", "Hyperbolicity and geodesic rays")->require_subcommand(1);
  std::string hgraph = "tree", hp, hchart = "tree", hmap = "double", htarget = "line";
  std::int64_t hradius = 2;
  std::size_t hlength = 6;
  auto* delta = hyp->add_subcommand("delta", "Four-point delta on a ball");
  delta->add_option("--graph", hgraph);
  delta->add_option("--radius", hradius)->check(CLI::NonNegativeNumber);
  delta->callback(run([&](const Manifest& m) {
    auto gr = resolve_graph(m, hgraph);
    const auto d = hyperbolic::delta_estimate(*gr, gr->root(), hradius, 48, 200000, m.seed());
    emit(g, m, "hyperbolic-delta.json",
         {{"graph", gr->name()}, {"radius", hradius}, {"delta", number(d.delta)}, {"exhaustive", d.exhaustive},
          {"quadruples", d.quadruples},
          {"witness", labels(*gr, std::vector<Vertex>(d.witness.begin(), d.witness.end()))}});
    return kExitPass;
  }));
  auto* rays_cmd = hyp->add_subcommand("rays", "Ray classes from a basepoint and their chart clusters");
  rays_cmd->add_option("--chart", hchart);
  rays_cmd->add_option("--p", hp, "Ray basepoint (default: chart basepoint)");
  rays_cmd->add_option("--length", hlength)->check(CLI::PositiveNumber);
  rays_cmd->callback(run([&](const Manifest& m) {
    const auto chart = m.build_chart(hchart);
    const auto& gr = *chart.graph();
    const Vertex p = hp.empty() ? chart.basepoint() : gr.parse(hp);
    const auto classes = hyperbolic::class_tails(chart, p, hlength, 1);
    const auto proj = floyd::hyperbolic_to_floyd_projection(classes, chart);
    const auto acc = hyperbolic::accessibility_witnesses(chart, p, hlength);
    json out = json::array();
    for (std::size_t c = 0; c < classes.size(); ++c) {
      json members = json::array();
      for (const auto& seg : classes[c]) members.push_back(labels(gr, seg.vertices));
      out.push_back({{"class", c}, {"cluster_id", proj.class_image[c] ? json(*proj.class_image[c]) : json(nullptr)},
                     {"tails", members}});
    }
    emit(g, m, "hyperbolic-rays.json",
         {{"chart", hchart}, {"p", gr.label(p)}, {"length", hlength}, {"classes", out},
          {"well_defined", proj.well_defined}, {"surjective", proj.surjective}, {"accessible", acc.ok},
          {"failure", acc.failure}});
    return proj.well_defined && proj.surjective && acc.ok ? kExitPass : kExitFail;
  }));
  auto* transport = hyp->add_subcommand("transport", "Straighten the image of a geodesic under a named map");
  transport->add_option("--graph", hgraph, "Source graph");
  transport->add_option("--target", htarget, "Target graph");
  transport->add_option("--map", hmap, "double, half, staircase, diagonal, right, identity");
  transport->add_option("--p", hp, "Start vertex (default: root)");
  transport->add_option("--length", hlength)->check(CLI::PositiveNumber);
  transport->callback(run([&](const Manifest& m) {
    auto src = resolve_graph(m, hgraph);
    auto dst = resolve_graph(m, htarget);
    const Vertex p = hp.empty() ? src->root() : src->parse(hp);
    const auto rays = hyperbolic::rays_from(*src, p, hlength);
    if (rays.empty()) throw InconclusiveError("no geodesic of that length");
    const auto t = hyperbolic::qi_ray_transport(*dst, named_map(hmap), rays.front());
    emit(g, m, "hyperbolic-transport.json",
         {{"map", hmap}, {"ray", labels(*src, rays.front().vertices)}, {"geodesic", labels(*dst, t.geodesic.vertices)},
          {"tube_radius", t.tube_radius}, {"hausdorff", t.hausdorff}});
    return kExitPass;
  }));

  // verify <suite|group|all>
  std::string selector = "all";
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("selector", selector, "Suite id, group (topo, coarse, floyd, action, hyperbolic) or all");
  verify->add_flag("--timing", g.timing, "Print per-suite seconds to stderr");
  auto* manifest_cmd = app.add_subcommand("manifest", "Print the effective manifest");
  manifest_cmd->callback(run([&](const Manifest& m) {
    std::cout << m.json().dump(2) << "\n";
    return kExitPass;
  }));
  auto* list = app.add_subcommand("list", "List suite ids");
  list->callback([&] {
    action = [] {
      for (const auto& s : suites::registry()) std::cout << s.id << "  " << s.description << "\n";
      return kExitPass;
    };
  });
  verify->callback(run([&](const Manifest& m) {
    const auto reports = suites::run(m, selector);
    const auto report = suites::report_json(m, selector, reports);
    write_artifact(g, m, "verify-" + safe(selector) + ".json", report.dump(2) + "\n");
    for (const auto& r : reports) {
      std::cout << suites::to_string(r.status()) << "  " << r.id << "  " << r.passed << "/" << r.instances << "\n";
      if (g.timing) std::cerr << r.id << " " << r.seconds << "s\n";
    }
    std::cout << "report: " << (output_dir(g, m) / ("verify-" + safe(selector) + ".json")).string() << "\n";
    return suites::exit_code(reports);
  }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const InconclusiveError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
