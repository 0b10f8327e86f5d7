#pragma once

// Run manifests: named graphs, groups, actions, Floyd functions and charts,
// per-budget knobs, and the seed. Every run is a pure function of the
// manifest.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "coarsekit/action.hpp"
#include "coarsekit/floyd.hpp"
#include "coarsekit/graph.hpp"
#include "coarsekit/group.hpp"

namespace coarsekit {

struct ChartSpec {
  std::string graph;
  std::string function;
  Vertex basepoint;
  std::int64_t radius = 4;
};

class Manifest {
 public:
  /// Built-in defaults; also shipped as manifests/default.json.
  static nlohmann::json defaults();
  /// Merges `overrides` onto the defaults and validates. Throws Error with
  /// the offending path when a reference does not resolve.
  static Manifest from_json(const nlohmann::json& overrides);
  static Manifest load(const std::string& path);

  const nlohmann::json& json() const { return json_; }
  std::uint64_t seed() const { return json_.at("seed").get<std::uint64_t>(); }
  const std::string& budget_name() const { return budget_; }
  void set_seed(std::uint64_t seed);
  void set_budget(const std::string& name);

  GraphRef graph(const std::string& name) const;
  std::string graph_spec(const std::string& name) const;
  GroupRef group(const std::string& name) const;
  floyd::FloydFunction function(const std::string& name) const;
  action::GraphAction action(const std::string& name) const;
  ChartSpec chart(const std::string& name) const;
  floyd::FloydChart build_chart(const std::string& name) const;

  /// Knob of the selected budget.
  const nlohmann::json& knob(const std::string& key) const;
  std::int64_t knob_int(const std::string& key) const { return knob(key).get<std::int64_t>(); }
  std::vector<std::int64_t> knob_ints(const std::string& key) const {
    return knob(key).get<std::vector<std::int64_t>>();
  }
  /// Section of the suite plan, e.g. plan("karlsson").
  const nlohmann::json& plan(const std::string& key) const;

 private:
  void validate() const;

  nlohmann::json json_;
  std::string budget_;
};

}  // namespace coarsekit
