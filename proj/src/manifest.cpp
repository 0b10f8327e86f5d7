#include "coarsekit/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "coarsekit/error.hpp"

namespace coarsekit {

using nlohmann::json;

json Manifest::defaults() {
  return json::parse(R"({
  "seed": 1,
  "budget": "default",
  "output_dir": "coarsekit-out",
  "graphs": {
    "line": "line",
    "grid": "grid",
    "tree": "tree:3",
    "free2": "free:2",
    "c6": "cycle:6",
    "c8": "cycle:8",
    "halfline": "halfline"
  },
  "groups": {
    "Z": "zn:1",
    "Z2": "zn:2",
    "F2": "free:2",
    "T3": "z2star:3",
    "Dinf": "dinf"
  },
  "actions": {
    "Z-line": {"kind": "cayley", "group": "Z"},
    "Z2-grid": {"kind": "cayley", "group": "Z2"},
    "F2-tree": {"kind": "cayley", "group": "F2"},
    "T3-tree": {"kind": "cayley", "group": "T3"},
    "Dinf-line": {"kind": "dihedral"},
    "shift2-line": {"kind": "shift", "step": 2},
    "trivial-line": {"kind": "trivial", "graph": "line"}
  },
  "floyd": {
    "geom": "geom:0.5",
    "geom4": "geom:0.25",
    "power": "power:2",
    "flat": "const:1"
  },
  "charts": {
    "line": {"graph": "line", "function": "geom", "basepoint": "0", "radius": 4},
    "grid": {"graph": "grid", "function": "geom", "basepoint": "0,0", "radius": 4},
    "tree": {"graph": "tree", "function": "geom", "basepoint": "e", "radius": 4},
    "free2": {"graph": "free2", "function": "geom", "basepoint": "e", "radius": 3}
  },
  "plan": {
    "oracle": {"functions": ["geom", "power"]},
    "karlsson": {"graphs": ["line", "grid", "tree"], "function": "geom"},
    "perspectivity": {
      "graphs": ["line", "grid", "tree"],
      "function": "geom",
      "control": "flat",
      "saturations": ["Z-line", "Z2-grid", "T3-tree"]
    },
    "clusters": {"graphs": ["line", "grid", "tree", "halfline"], "function": "geom"},
    "qi": {"f1": "geom", "f2": "geom4", "alpha": "2n", "beta": "n/2", "D": 1},
    "boundary_map": {"f1": "geom", "f2": "geom4", "pi": "2n", "varpi": "n/2"},
    "actions": {
      "milnor_svarc": ["Z-line", "Z2-grid", "F2-tree", "Dinf-line", "shift2-line"],
      "pullbacks": ["Z-line", "Z2-grid", "F2-tree"],
      "pullback_function": "geom",
      "non_cocompact": "trivial-line"
    },
    "hyperbolic": {
      "charts": ["line", "tree"],
      "basepoints": {"line": ["0", "7"], "tree": ["e", "a"]},
      "delta_graphs": ["tree", "c6", "grid"]
    }
  },
  "budgets": {
    "tiny": {
      "topo_points": 2,
      "topo_aux": 1,
      "coarse_points": 4,
      "coarse_trials": 10,
      "closure_trials": 20,
      "random_graphs": 10,
      "graph_vertices": 8,
      "karlsson_radii": [4, 6],
      "perspectivity_radii": [4, 12],
      "chart_radii": [3, 4],
      "ms_radius": 3,
      "rays": 10,
      "tuple_trials": 5,
      "delta_radii": [1, 2],
      "ray_margin": 3,
      "qi_nmax": 20
    },
    "default": {
      "topo_points": 3,
      "topo_aux": 2,
      "coarse_points": 5,
      "coarse_trials": 40,
      "closure_trials": 60,
      "random_graphs": 50,
      "graph_vertices": 12,
      "karlsson_radii": [4, 6, 8],
      "perspectivity_radii": [4, 8, 12],
      "chart_radii": [3, 4],
      "ms_radius": 6,
      "rays": 10,
      "tuple_trials": 20,
      "delta_radii": [1, 2, 4],
      "ray_margin": 3,
      "qi_nmax": 60
    }
  }
})");
}

Manifest Manifest::from_json(const nlohmann::json& overrides) {
  if (!overrides.is_object()) throw Error("manifest: top level must be an object");
  Manifest m;
  m.json_ = defaults();
  m.json_.merge_patch(overrides);
  m.budget_ = m.json_.at("budget").get<std::string>();
  m.validate();
  return m;
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("manifest: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error("manifest: " + path + ": " + e.what());
  }
  return from_json(j);
}

void Manifest::set_seed(std::uint64_t seed) { json_["seed"] = seed; }

void Manifest::set_budget(const std::string& name) {
  if (!json_.at("budgets").contains(name)) throw Error("manifest: unknown budget '" + name + "'");
  budget_ = name;
  json_["budget"] = name;
}

namespace {

const nlohmann::json& section(const nlohmann::json& j, const std::string& key, const std::string& name) {
  const auto& s = j.at(key);
  auto it = s.find(name);
  if (it == s.end()) throw Error("manifest: unresolved reference " + key + "." + name);
  return *it;
}

}  // namespace

std::string Manifest::graph_spec(const std::string& name) const {
  return section(json_, "graphs", name).get<std::string>();
}

GraphRef Manifest::graph(const std::string& name) const { return make_graph(graph_spec(name)); }

GroupRef Manifest::group(const std::string& name) const {
  return make_group(section(json_, "groups", name).get<std::string>());
}

floyd::FloydFunction Manifest::function(const std::string& name) const {
  return floyd::FloydFunction::parse(section(json_, "floyd", name).get<std::string>());
}

action::GraphAction Manifest::action(const std::string& name) const {
  const auto& a = section(json_, "actions", name);
  const auto kind = a.at("kind").get<std::string>();
  if (kind == "cayley") return action::cayley_action(group(a.at("group").get<std::string>()));
  if (kind == "shift") return action::translation_action(a.at("step").get<std::int64_t>());
  if (kind == "dihedral") return action::dihedral_action();
  if (kind == "trivial") return action::trivial_action(graph(a.at("graph").get<std::string>()));
  if (kind == "perm") {
    return action::permutation_action(group(a.at("group").get<std::string>()),
                                      graph(a.at("graph").get<std::string>()));
  }
  throw Error("manifest: actions." + name + ": unknown kind '" + kind + "'");
}

ChartSpec Manifest::chart(const std::string& name) const {
  const auto& c = section(json_, "charts", name);
  ChartSpec s;
  s.graph = c.at("graph").get<std::string>();
  s.function = c.at("function").get<std::string>();
  s.basepoint = graph(s.graph)->parse(c.at("basepoint").get<std::string>());
  s.radius = c.at("radius").get<std::int64_t>();
  return s;
}

floyd::FloydChart Manifest::build_chart(const std::string& name) const {
  const ChartSpec s = chart(name);
  return floyd::FloydChart(graph(s.graph), function(s.function), s.basepoint, s.radius);
}

const nlohmann::json& Manifest::knob(const std::string& key) const {
  const auto& b = json_.at("budgets").at(budget_);
  auto it = b.find(key);
  if (it == b.end()) throw Error("manifest: budgets." + budget_ + "." + key + " missing");
  return *it;
}

const nlohmann::json& Manifest::plan(const std::string& key) const { return section(json_, "plan", key); }

void Manifest::validate() const {
  auto at = [](const std::string& path, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      throw Error("manifest: " + path + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error("manifest: " + path + ": " + e.what());
    }
  };
  at("seed", [&] { (void)seed(); });
  for (const auto& [k, v] : json_.at("graphs").items()) at("graphs." + k, [&] { make_graph(v.get<std::string>()); });
  for (const auto& [k, v] : json_.at("groups").items()) at("groups." + k, [&] { make_group(v.get<std::string>()); });
  for (const auto& [k, v] : json_.at("floyd").items()) {
    at("floyd." + k, [&] { floyd::FloydFunction::parse(v.get<std::string>()); });
  }
  for (const auto& [k, v] : json_.at("actions").items()) at("actions." + k, [&] { (void)action(k); });
  for (const auto& [k, v] : json_.at("charts").items()) {
    at("charts." + k, [&] {
      const auto s = chart(k);
      (void)function(s.function);
      if (s.radius < 1) throw Error("radius must be positive");
    });
  }
  if (!json_.at("budgets").contains(budget_)) throw Error("manifest: unknown budget '" + budget_ + "'");
  for (const auto& [name, b] : json_.at("budgets").items()) {
    for (const auto& [k, v] : b.items()) {
      const bool ok = v.is_number_integer() ? v.get<std::int64_t>() > 0
                      : v.is_array()
                          ? !v.empty() && std::all_of(v.begin(), v.end(),
                                                      [](const nlohmann::json& x) {
                                                        return x.is_number_integer() &&
                                                               x.get<std::int64_t>() > 0;
                                                      })
                          : false;
      if (!ok) throw Error("manifest: budgets." + name + "." + k + " must be positive");
    }
  }
  const auto& p = json_.at("plan");
  auto graphs = [&](const std::string& path, const nlohmann::json& list) {
    for (const auto& g : list) at(path, [&] { (void)graph(g.get<std::string>()); });
  };
  at("plan", [&] {
    for (const auto& f : p.at("oracle").at("functions")) (void)function(f.get<std::string>());
    graphs("plan.karlsson.graphs", p.at("karlsson").at("graphs"));
    (void)function(p.at("karlsson").at("function").get<std::string>());
    graphs("plan.perspectivity.graphs", p.at("perspectivity").at("graphs"));
    (void)function(p.at("perspectivity").at("function").get<std::string>());
    (void)function(p.at("perspectivity").at("control").get<std::string>());
    for (const auto& a : p.at("perspectivity").at("saturations")) (void)action(a.get<std::string>());
    graphs("plan.clusters.graphs", p.at("clusters").at("graphs"));
    (void)function(p.at("clusters").at("function").get<std::string>());
    for (const char* k : {"f1", "f2"}) (void)function(p.at("qi").at(k).get<std::string>());
    for (const char* k : {"alpha", "beta"}) floyd::IndexMap::parse(p.at("qi").at(k).get<std::string>());
    for (const char* k : {"f1", "f2"}) (void)function(p.at("boundary_map").at(k).get<std::string>());
    for (const char* k : {"pi", "varpi"}) floyd::IndexMap::parse(p.at("boundary_map").at(k).get<std::string>());
    const auto& acts = p.at("actions");
    for (const char* k : {"milnor_svarc", "pullbacks"}) {
      for (const auto& a : acts.at(k)) (void)action(a.get<std::string>());
    }
    (void)function(acts.at("pullback_function").get<std::string>());
    (void)action(acts.at("non_cocompact").get<std::string>());
    const auto& h = p.at("hyperbolic");
    for (const auto& c : h.at("charts")) {
      const auto s = chart(c.get<std::string>());
      auto g = graph(s.graph);
      for (const auto& b : h.at("basepoints").at(c.get<std::string>())) (void)g->parse(b.get<std::string>());
    }
    graphs("plan.hyperbolic.delta_graphs", h.at("delta_graphs"));
  });
}

}  // namespace coarsekit
