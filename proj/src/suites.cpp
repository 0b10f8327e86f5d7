#include "coarsekit/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

#include "coarsekit/error.hpp"

namespace coarsekit::suites {

using nlohmann::json;

namespace {
constexpr std::size_t kMaxPayloads = 5;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kPass: return "pass";
    case Status::kFail: return "fail";
    case Status::kInconclusive: return "inconclusive";
  }
  return "?";
}

Status SuiteReport::status() const {
  if (failed > 0) return Status::kFail;
  if (inconclusive > 0 || instances == 0) return Status::kInconclusive;
  return Status::kPass;
}

void SuiteReport::fail(json payload) {
  ++instances;
  ++failed;
  if (counterexamples.size() < kMaxPayloads) {
    counterexamples.push_back({{"kind", "counterexample"}, {"instance", std::move(payload)}});
  }
}

void SuiteReport::inconclude(json payload) {
  ++instances;
  ++inconclusive;
  if (counterexamples.size() < kMaxPayloads) {
    counterexamples.push_back({{"kind", "inconclusive"}, {"instance", std::move(payload)}});
  }
}

void SuiteReport::check(bool ok, const std::function<json()>& payload) {
  if (ok) {
    pass();
  } else {
    fail(payload());
  }
}

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

json to_json(const SuiteReport& r) {
  return {{"id", r.id},
          {"description", r.description},
          {"status", to_string(r.status())},
          {"instances", r.instances},
          {"passed", r.passed},
          {"failed", r.failed},
          {"inconclusive", r.inconclusive},
          {"counterexamples", r.counterexamples},
          {"details", r.details}};
}

const std::vector<Suite>& registry() {
  static const std::vector<Suite> all = [] {
    std::vector<Suite> out;
    for (auto group : {topo_suites(), coarse_suites(), floyd_suites(), action_suites(),
                       hyperbolic_suites()}) {
      for (auto& s : group) out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const Suite& a, const Suite& b) { return a.id < b.id; });
    return out;
  }();
  return all;
}

std::vector<const Suite*> select(const std::string& selector) {
  std::vector<const Suite*> out;
  for (const auto& s : registry()) {
    if (selector == "all" || s.group == selector || s.id == selector) out.push_back(&s);
  }
  if (out.empty()) throw Error("no suite matches '" + selector + "'");
  return out;
}

std::vector<SuiteReport> run(const Manifest& m, const std::string& selector) {
  const auto chosen = select(selector);
  std::vector<std::future<SuiteReport>> jobs;
  for (const Suite* s : chosen) {
    jobs.push_back(std::async(std::launch::async, [s, &m] {
      SuiteReport r;
      r.id = s->id;
      r.description = s->description;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        s->run(m, r);
      } catch (const BudgetError& e) {
        r.inconclude({{"error", "budget"}, {"message", e.what()}});
      } catch (const InconclusiveError& e) {
        r.inconclude({{"error", "inconclusive"}, {"message", e.what()}});
      } catch (const std::exception& e) {
        r.fail({{"error", "exception"}, {"message", e.what()}});
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return r;
    }));
  }
  std::vector<SuiteReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

json report_json(const Manifest& m, const std::string& selector,
                 const std::vector<SuiteReport>& reports) {
  json suites = json::array();
  std::size_t pass = 0, fail = 0, inc = 0;
  for (const auto& r : reports) {
    suites.push_back(to_json(r));
    switch (r.status()) {
      case Status::kPass: ++pass; break;
      case Status::kFail: ++fail; break;
      case Status::kInconclusive: ++inc; break;
    }
  }
  return {{"selector", selector},
          {"seed", m.seed()},
          {"budget", m.budget_name()},
          {"summary", {{"suites", reports.size()}, {"pass", pass}, {"fail", fail}, {"inconclusive", inc}}},
          {"suites", suites}};
}

int exit_code(const std::vector<SuiteReport>& reports) {
  bool inc = false;
  for (const auto& r : reports) {
    if (r.status() == Status::kFail) return 1;
    if (r.status() == Status::kInconclusive) inc = true;
  }
  return inc ? 2 : 0;
}

}  // namespace coarsekit::suites
