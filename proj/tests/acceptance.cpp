// Acceptance run: one PASS/FAIL line per criterion, at the default budget.
// Usage: acceptance <path-to-coarsekit-cli> <scratch-dir>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "coarsekit/manifest.hpp"
#include "coarsekit/suites.hpp"

using nlohmann::json;
using namespace coarsekit;
namespace fs = std::filesystem;

namespace {

constexpr double kOracleTol = 1e-12;
constexpr double kDecayTol = 1e-2;
constexpr double kControlFloor = 0.5;

std::map<std::string, suites::SuiteReport> by_id;
int failures = 0;

const suites::SuiteReport& suite(const std::string& id) { return by_id.at(id); }

bool passed(const std::string& id) {
  const auto& r = suite(id);
  return r.status() == suites::Status::kPass && r.instances > 0;
}

void line(int n, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << n << "  " << name << "  " << detail << std::endl;
}

std::string counts(const std::string& id) {
  const auto& r = suite(id);
  std::ostringstream ss;
  ss << id << " " << r.passed << "/" << r.instances;
  return ss.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <coarsekit> <scratch-dir>\n";
    return 3;
  }
  const std::string cli = argv[1];
  const fs::path scratch = argv[2];

  const Manifest m = Manifest::from_json(json::object());
  for (auto& r : suites::run(m, "all")) by_id.emplace(r.id, std::move(r));

  // 1. Glueing suite, exhaustive on at most 3 points.
  {
    bool ok = suite("topo.count").details.at("counts").at("3") == 29;
    std::string detail = "topologies(3)=29";
    for (const auto* id : {"topo.count", "topo.glueing", "topo.continuity", "topo.pullback-universal",
                           "topo.pullback-composition", "topo.eight-lemma"}) {
      ok = ok && passed(id) && suite(id).failed == 0;
      detail += "; " + counts(id);
    }
    line(1, "glueing", ok, detail);
  }

  // 2. Floyd oracle: 50 graphs x 2 families, exact to 1e-12.
  {
    const auto& r = suite("floyd.oracle");
    const double err = r.details.at("max_error").get<double>();
    const bool ok = passed("floyd.oracle") && r.instances >= 100 && err <= kOracleTol;
    line(2, "floyd-oracle", ok, counts("floyd.oracle") + "; max_error=" + std::to_string(err) + " tol=1e-12");
  }

  // 3. Karlsson: defect <= 2^(3-R) and strictly decreasing for R in {4,6,8}.
  {
    bool ok = passed("floyd.karlsson");
    std::string detail;
    for (const auto* g : {"line", "grid", "tree"}) {
      const auto& rows = suite("floyd.karlsson").details.at("defects").at(g);
      std::vector<std::int64_t> radii;
      double prev = INFINITY;
      for (const auto& row : rows) {
        const auto r = row.at("R").get<std::int64_t>();
        const double d = row.at("defect").get<double>();
        radii.push_back(r);
        ok = ok && d <= std::ldexp(1.0, static_cast<int>(3 - r)) && d < prev;
        prev = d;
      }
      ok = ok && radii == std::vector<std::int64_t>{4, 6, 8};
      detail += std::string(g) + "@8=" + std::to_string(prev) + " ";
    }
    line(3, "karlsson", ok, detail + "bound=2^(3-R)");
  }

  // 4. Perspectivity decay below 1e-2, flat control above 0.5.
  {
    bool ok = passed("floyd.perspectivity");
    double worst = 0, control = INFINITY;
    for (const auto& [key, series] : suite("floyd.perspectivity").details.at("defects").items()) {
      double prev = INFINITY;
      for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double d = series[i].get<double>();
        ok = ok && d <= prev;
        prev = d;
      }
      worst = std::max(worst, prev);
      control = std::min(control, series.back().at("control").get<double>());
      ok = ok && series.size() == 4;
    }
    ok = ok && worst < kDecayTol && control > kControlFloor;
    line(4, "perspectivity", ok,
         "final_max=" + std::to_string(worst) + " tol=1e-2; control_min=" + std::to_string(control) + " floor=0.5");
  }

  // 5. Orbit-map certificates at radius 6.
  {
    bool ok = passed("action.milnor-svarc");
    const auto& certs = suite("action.milnor-svarc").details.at("certificates");
    for (const auto* a : {"Z-line", "Z2-grid", "F2-tree"}) {
      ok = ok && certs.contains(a) && certs.at(a).at("radius") == 6;
    }
    line(5, "milnor-svarc", ok, counts("action.milnor-svarc") + "; Z-line, Z2-grid, F2-tree at radius 6");
  }

  // 6. Pullback agreement: >= 10 rays per pair at two radii, no mismatches.
  {
    bool ok = passed("action.pullbacks");
    std::map<std::string, int> radii;
    for (const auto& row : suite("action.pullbacks").details.at("pairs")) {
      ok = ok && row.at("mismatches") == 0 && row.at("rays").get<int>() >= 10;
      ++radii[row.at("action").get<std::string>()];
    }
    for (const auto* a : {"Z-line", "Z2-grid", "F2-tree"}) ok = ok && radii[a] >= 2;
    line(6, "pullbacks", ok, counts("action.pullbacks") + "; mismatches=0");
  }

  // 7. Z <-> 2Z transfer: analytic conditions both ways, boundary bijection.
  {
    const auto& d = suite("floyd.qi-extension").details;
    const bool ok = passed("floyd.qi-extension") && passed("floyd.induced-map") &&
                    d.at("forward").at("analytic_ok") == true && d.at("reverse").at("analytic_ok") == true;
    line(7, "qi-transfer", ok, counts("floyd.qi-extension") + "; " + counts("floyd.induced-map"));
  }

  // 8. Accessibility, basepoint change, surjective projection.
  {
    bool ok = passed("hyperbolic.accessibility") && passed("hyperbolic.basepoint-change") &&
              passed("hyperbolic.projection");
    std::map<std::string, int> basepoints;
    for (const auto& p : suite("hyperbolic.projection").details.at("projections")) {
      ok = ok && p.at("missed").empty();
      ++basepoints[p.at("chart").get<std::string>()];
    }
    ok = ok && basepoints["line"] >= 2 && basepoints["tree"] >= 2;
    line(8, "accessibility", ok,
         counts("hyperbolic.accessibility") + "; " + counts("hyperbolic.basepoint-change") + "; " +
             counts("hyperbolic.projection"));
  }

  // 9. Coarse axioms, bounded sets, basis closure.
  {
    const bool ok = passed("coarse.axioms") && passed("coarse.bounded-sets") && passed("coarse.basis-closure");
    line(9, "coarse-axioms", ok,
         counts("coarse.axioms") + "; " + counts("coarse.bounded-sets") + "; " + counts("coarse.basis-closure"));
  }

  // 10. Two CLI runs of verify all produce identical reports.
  {
    bool ok = true;
    std::string bodies[2];
    for (int i = 0; i < 2; ++i) {
      const fs::path dir = scratch / ("run" + std::to_string(i));
      fs::remove_all(dir);
      const std::string cmd = "\"" + cli + "\" --seed 7 --out \"" + dir.string() + "\" verify all > /dev/null";
      const int rc = std::system(cmd.c_str());
      ok = ok && rc == 0;
      bodies[i] = slurp(dir / "verify-all.json");
    }
    ok = ok && !bodies[0].empty() && bodies[0] == bodies[1];
    line(10, "determinism", ok, "verify all x2, " + std::to_string(bodies[0].size()) + " bytes");
  }

  std::cout << (failures ? "ACCEPTANCE FAIL" : "ACCEPTANCE PASS") << " (" << 10 - failures << "/10)" << std::endl;
  return failures ? 1 : 0;
}
