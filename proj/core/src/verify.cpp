#include "canardkit/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include "canardkit/blowup.hpp"
#include "canardkit/error.hpp"
#include "canardkit/fixtures.hpp"
#include "canardkit/pipeline.hpp"
#include "json.hpp"

namespace canardkit {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Closed-form motion on the equator for the two built-in examples.
double transcritical_equator(double th) {
  return -(1.0 / 16) * std::sin(th) * (-6 * std::cos(2 * th) + 5 * std::cos(4 * th) + 5);
}

double pitchfork_equator(double th) {
  const double s = std::sin(th), c = std::cos(th);
  return -(-3 * std::pow(std::sin(2 * th), 2) + 8 * s * std::pow(c, 4) + 4 * s * s * c * c) /
         (2 * (std::cos(2 * th) - 3));
}

// Root of sin(t) = cos(t)^2 in [0, pi/2] by bisection.
double pitchfork_interior_root() {
  double lo = 0.0, hi = kPi / 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::sin(mid) - std::cos(mid) * std::cos(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

// Every expected angle has a found equilibrium within tol and the counts agree.
bool angles_match(const std::vector<SphereEquilibrium>& found, const std::vector<double>& expected, double tol,
                  double& worst) {
  worst = 0.0;
  for (double e : expected) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : found) best = std::min(best, angle_gap(f.theta, e));
    worst = std::max(worst, best);
  }
  return found.size() == expected.size() && worst < tol;
}

struct Example {
  const SystemFile* sys;
  std::optional<Analysis> analysis;
  std::optional<BlowupAnalysis> blowup;
  std::string error;

  const Analysis& analyzed() {
    if (!analysis) analysis = run_analysis(*sys);
    return *analysis;
  }
  const BlowupAnalysis& blown_up() {
    if (!blowup) {
      const Analysis& a = analyzed();
      if (!sys->weights) throw AssumptionViolation("system has no weights");
      blowup = run_blowup(a, *sys->weights);
    }
    return *blowup;
  }
};

class Runner {
 public:
  void run(std::string id, std::string description, const std::function<bool(std::string&)>& body) {
    CheckResult r;
    r.id = std::move(id);
    r.description = std::move(description);
    const auto start = std::chrono::steady_clock::now();
    try {
      r.pass = body(r.detail);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  std::vector<CheckResult> results;
};

// The canard branches at the first singular point, as ids.
std::vector<const BranchCanard*> canards_of(const Analysis& a) {
  std::vector<const BranchCanard*> out;
  if (a.canards.empty()) return out;
  for (const auto& bc : a.canards.front().per_branch) {
    if (bc.is_canard) out.push_back(&bc);
  }
  return out;
}

std::string wedge_list(const Analysis& a) {
  std::string s;
  if (a.canards.empty()) return "no singular point";
  for (const auto& bc : a.canards.front().per_branch) {
    if (!s.empty()) s += ", ";
    s += a.critical_set.branch(bc.branch).defining_poly.to_string() + ": " +
         (bc.wedge.exact ? bc.wedge.exact->to_string() : fmt("%.3g", bc.wedge.approx));
  }
  return s;
}

}  // namespace

std::vector<CheckResult> verify_paper(const SystemFile& transcritical, const SystemFile& pitchfork) {
  Example tc{&transcritical, {}, {}, {}};
  Example pf{&pitchfork, {}, {}, {}};
  Runner run;

  run.run("wedge-transcritical", "only the line y = x/2 satisfies the wedge condition", [&](std::string& d) {
    const Analysis& a = tc.analyzed();
    d = wedge_list(a);
    const auto c = canards_of(a);
    if (c.size() != 1 || a.canards.front().per_branch.size() != 4) return false;
    const Branch& br = a.critical_set.branch(c.front()->branch);
    const bool line = br.defining_poly.total_degree() == 1 && br.eval(Rational(2), Rational(1)).sign() == 0;
    bool others_nonzero = true;
    for (const auto& bc : a.canards.front().per_branch) {
      if (bc.branch != c.front()->branch) others_nonzero = others_nonzero && bc.wedge.exact && bc.wedge.exact->sign() != 0;
    }
    return line && c.front()->wedge.exact && c.front()->wedge.exact->sign() == 0 && others_nonzero;
  });

  run.run("wedge-pitchfork", "only the parabola y = x^2 satisfies the wedge condition", [&](std::string& d) {
    const Analysis& a = pf.analyzed();
    d = wedge_list(a);
    const auto c = canards_of(a);
    if (c.size() != 1) return false;
    const Branch& br = a.critical_set.branch(c.front()->branch);
    bool on = br.defining_poly.total_degree() == 2;
    for (int t = 1; t <= 3; ++t) on = on && br.eval(Rational(t), Rational(t * t)).sign() == 0;
    return on && c.front()->wedge.exact && c.front()->wedge.exact->sign() == 0;
  });

  auto equator_check = [&](Example& ex, double (*formula)(double), std::string& d) {
    const BlowupAnalysis& b = ex.blown_up();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double th = -kPi + 2 * kPi * (i + 0.5) / 100;
      const auto f = sphere_field(b.xhat, b.weights, th, kPi / 2);
      worst = std::max({worst, std::abs(f[0] - formula(th)), std::abs(f[1])});
    }
    d = "max error " + fmt("%.2e", worst);
    return worst < 1e-6;
  };
  run.run("equator-field-transcritical", "equator motion matches the closed form (100 points)",
          [&](std::string& d) { return equator_check(tc, transcritical_equator, d); });
  run.run("equator-field-pitchfork", "equator motion matches the closed form (100 points)",
          [&](std::string& d) { return equator_check(pf, pitchfork_equator, d); });

  run.run("equilibria-transcritical", "ten equator equilibria at 0, pi, +-pi/4, +-3pi/4, +-atan(1/2), +-(pi-atan(1/2))",
          [&](std::string& d) {
            const double a = std::atan(0.5);
            const std::vector<double> expected{0, kPi, kPi / 4, -kPi / 4, 3 * kPi / 4, -3 * kPi / 4,
                                               a, -a, kPi - a, -(kPi - a)};
            double worst = 0;
            const bool ok = angles_match(tc.blown_up().equator, expected, 1e-9, worst);
            d = std::to_string(tc.blown_up().equator.size()) + " found, worst angle error " + fmt("%.2e", worst);
            return ok;
          });

  run.run("equilibria-pitchfork", "equator equilibria at 0, pi, +-pi/2 and the roots of sin t = cos^2 t",
          [&](std::string& d) {
            const double r = pitchfork_interior_root();
            const std::vector<double> expected{0, kPi, kPi / 2, -kPi / 2, r, kPi - r};
            double worst = 0;
            const bool ok = angles_match(pf.blown_up().equator, expected, 1e-9, worst);
            const double phi = (1 + std::sqrt(5.0)) / 2;
            d = std::to_string(pf.blown_up().equator.size()) + " found, worst angle error " + fmt("%.2e", worst) +
                "; interior root " + fmt("%.7f", r) + " = asin(1/phi), whereas atan(1/phi) = " +
                fmt("%.7f", std::atan(1 / phi)) + " is not an equilibrium (labeling discrepancy)";
            return ok;
          });

  run.run("meridian-transcritical", "theta = -pi + atan(1/2) is invariant (50 samples)", [&](std::string& d) {
    const BlowupAnalysis& b = tc.blown_up();
    const double th = -kPi + std::atan(0.5);
    double worst = 0;
    for (int j = 1; j <= 50; ++j) {
      const double ph = (kPi / 2) * j / 51.0;
      worst = std::max(worst, std::abs(sphere_field(b.xhat, b.weights, th, ph)[0]));
    }
    d = "max |theta'| " + fmt("%.2e", worst);
    return worst < 1e-6;
  });

  auto connection_check = [&](Example& ex, std::string& d) {
    const BlowupAnalysis& b = ex.blown_up();
    if (b.connections.empty()) {
      d = "no attracting/repelling canard pair";
      return false;
    }
    bool ok = true;
    for (const auto& c : b.connections) {
      const double gap = std::min(c.result.closest_distance, c.result.match_gap);
      ok = ok && c.result.connected && gap < 1e-2;
      if (!d.empty()) d += "; ";
      d += fmt("%.6f", c.from.theta) + " -> " + fmt("%.6f", c.to.theta) + " " +
           (c.result.connected ? "connected" : "not connected") + ", gap " + fmt("%.2e", gap);
    }
    return ok;
  };
  run.run("connection-transcritical", "canard orbit from the attracting to the repelling equilibrium",
          [&](std::string& d) { return connection_check(tc, d); });
  run.run("connection-pitchfork", "canard orbit from the attracting to the repelling equilibrium",
          [&](std::string& d) { return connection_check(pf, d); });

  run.run("symmetry-pitchfork", "reflection about theta = pi/2 reverses phi' (32 x 32 grid)", [&](std::string& d) {
    const SymmetryResult& s = pf.blown_up().symmetry;
    d = "worst deviation " + fmt("%.2e", s.worst_deviation);
    return s.holds;
  });

  for (int k = 1; k <= 4; ++k) {
    run.run("circle-k" + std::to_string(k), "blow-up circle of x' = x^" + std::to_string(2 * k + 1) + " + eps",
            [k](std::string& d) {
              const CircleLemmaSystem s = circle_lemma(k);
              bool ok = s.max_deviation < 1e-12 && s.equilibria.size() == 3;
              int sources = 0;
              double psi_star = 0;
              for (const auto& e : s.equilibria) {
                const bool end = e.psi < 1e-9 || std::abs(e.psi - kPi) < 1e-9;
                if (end) {
                  ok = ok && e.stable && e.hyperbolic;
                } else {
                  ok = ok && !e.stable && e.hyperbolic;
                  psi_star = e.psi;
                  ++sources;
                }
              }
              d = "closed-form deviation " + fmt("%.2e", s.max_deviation) + ", psi* " + fmt("%.7f", psi_star);
              return ok && sources == 1;
            });
  }

  auto chart_check = [&](Example& ex, std::string& d) {
    const BlowupAnalysis& b = ex.blown_up();
    bool ok = b.division_exponent == 3;
    int samples = 0, failures = 0;
    for (const auto& p : b.pushforward) {
      samples += p.samples;
      failures += p.failures;
      ok = ok && p.ok() && p.samples >= 100;
    }
    d = "m = " + std::to_string(b.division_exponent) + ", " + std::to_string(failures) + " failures in " +
        std::to_string(samples) + " samples over " + std::to_string(b.charts.size()) + " charts";
    return ok;
  };
  run.run("charts-transcritical", "chart fields times r^3 reproduce the extended field",
          [&](std::string& d) { return chart_check(tc, d); });
  run.run("charts-pitchfork", "chart fields times r^3 reproduce the extended field",
          [&](std::string& d) { return chart_check(pf, d); });

  return run.results;
}

std::vector<CheckResult> verify_paper() { return verify_paper(transcritical_fixture(), pitchfork_fixture()); }

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

std::string checks_table(const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  std::size_t passed = 0;
  for (const auto& c : checks) {
    char head[96];
    std::snprintf(head, sizeof head, "%-4s %-28s %7.3fs  ", c.pass ? "PASS" : "FAIL", c.id.c_str(), c.seconds);
    os << head << c.description << "\n";
    if (!c.detail.empty()) os << "     " << c.detail << "\n";
    passed += c.pass ? 1 : 0;
  }
  os << passed << "/" << checks.size() << " checks passed\n";
  return os.str();
}

std::string checks_json(const std::vector<CheckResult>& checks) {
  nlohmann::json j;
  j["schema"] = 1;
  j["command"] = "verify-paper";
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"id", c.id}, {"description", c.description}, {"pass", c.pass}, {"detail", c.detail}});
  }
  j["checks"] = arr;
  j["all_passed"] = all_passed(checks);
  return j.dump(2) + "\n";
}

}  // namespace canardkit
