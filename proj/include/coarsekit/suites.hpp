#pragma once

// Verification suites. Each suite runs a family of instances drawn from the
// manifest and counts passes, failures and inconclusive instances; failures
// carry a payload with the instance data.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coarsekit/manifest.hpp"

namespace coarsekit::suites {

enum class Status { kPass, kFail, kInconclusive };
std::string to_string(Status s);

struct SuiteReport {
  std::string id;
  std::string description;
  std::size_t instances = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t inconclusive = 0;
  /// At most a handful of failing or inconclusive payloads.
  nlohmann::json counterexamples = nlohmann::json::array();
  /// Suite-specific figures (defects, bounds, counts).
  nlohmann::json details = nlohmann::json::object();
  /// Not serialized: reports must be byte-identical across runs.
  double seconds = 0.0;

  Status status() const;
  void pass() { ++instances, ++passed; }
  void fail(nlohmann::json payload);
  void inconclude(nlohmann::json payload);
  /// pass() or fail(payload).
  void check(bool ok, const std::function<nlohmann::json()>& payload);
};

nlohmann::json to_json(const SuiteReport& r);

/// Rounded to 6 decimals; null when not finite.
nlohmann::json number(double x);

struct Suite {
  std::string id;
  /// "topo", "coarse", "floyd", "action" or "hyperbolic".
  std::string group;
  std::string description;
  std::function<void(const Manifest&, SuiteReport&)> run;
};

/// Every suite, ordered by id.
const std::vector<Suite>& registry();

/// Suites matching "all", a group name, or a suite id. Throws Error when
/// nothing matches.
std::vector<const Suite*> select(const std::string& selector);

/// Runs the selection; reports come back ordered by id. Exceptions escaping
/// a suite are recorded as inconclusive (budget) or failed (anything else).
std::vector<SuiteReport> run(const Manifest& m, const std::string& selector);

nlohmann::json report_json(const Manifest& m, const std::string& selector,
                           const std::vector<SuiteReport>& reports);

/// 0 all pass, 1 any failure, 2 inconclusive only.
int exit_code(const std::vector<SuiteReport>& reports);

// Suite groups, one per source file.
std::vector<Suite> topo_suites();
std::vector<Suite> coarse_suites();
std::vector<Suite> floyd_suites();
std::vector<Suite> action_suites();
std::vector<Suite> hyperbolic_suites();

}  // namespace coarsekit::suites
