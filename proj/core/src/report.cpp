#include "canardkit/report.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace canardkit {

using nlohmann::json;

const char* to_string(BlowupSection s) {
  switch (s) {
    case BlowupSection::all: return "all";
    case BlowupSection::charts: return "charts";
    case BlowupSection::sphere: return "sphere";
    case BlowupSection::equator: return "equator";
    case BlowupSection::connect: return "connect";
  }
  return "all";
}

std::optional<BlowupSection> parse_blowup_section(const std::string& name) {
  for (auto s : {BlowupSection::all, BlowupSection::charts, BlowupSection::sphere, BlowupSection::equator,
                 BlowupSection::connect}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const Vec2& v) { return json::array({number(v[0]), number(v[1])}); }

json rational_pair(const std::array<Rational, 2>& p) { return json::array({p[0].to_string(), p[1].to_string()}); }

json field_strings(const PolyVectorField& f) {
  json out = json::array();
  for (const auto& c : f.components) out.push_back(c.to_string());
  return out;
}

json complex_json(const std::complex<double>& z) { return json::array({number(z.real()), number(z.imag())}); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json header(const std::string& command) {
  json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  return j;
}

json box_json(const Box& b) {
  return json::array({b.xmin.to_string(), b.xmax.to_string(), b.ymin.to_string(), b.ymax.to_string()});
}

json system_json(const SystemFile& s, const Box& box) {
  json j;
  j["source"] = s.source;
  j["X0"] = field_strings(s.x0);
  j["X1"] = field_strings(s.x1);
  j["box"] = box_json(box);
  j["weights"] = s.weights ? json(s.weights->to_string()) : json(nullptr);
  j["epsilon"] = s.epsilon ? json(s.epsilon->to_string()) : json(nullptr);
  j["delta"] = s.delta ? json(s.delta->to_string()) : json(nullptr);
  return j;
}

json point_json(const SingularPoint& p) {
  json j;
  j["exact"] = p.location.is_exact();
  j["location"] = p.location.is_exact() ? rational_pair(*p.location.exact) : json(nullptr);
  j["approx"] = vec(p.location.approx);
  j["incident_branches"] = p.incident_branches;
  j["pairwise_transversal"] = p.pairwise_transversal;
  json dets = json::array();
  for (double d : p.determinants) dets.push_back(number(d));
  j["determinants"] = dets;
  return j;
}

json stratification_json(const Stratification& s) {
  json j;
  j["kind"] = to_string(s.kind);
  j["points"] = s.count(0);
  j["curves"] = s.count(1);
  json strata = json::array();
  for (const auto& st : s.strata) {
    json e;
    e["id"] = st.id;
    e["dimension"] = st.dimension;
    e["branch"] = st.branch;
    e["side"] = st.side;
    e["contains_point"] = st.contains_point;
    e["closure_links"] = st.closure_links;
    e["rank_maximal"] = st.rank_maximal;
    strata.push_back(e);
  }
  j["strata"] = strata;
  return j;
}

json canard_json(const CanardReport& r, const CriticalSet& cs) {
  json j;
  j["canard_branches"] = r.canard_branches();
  json per = json::array();
  for (const auto& bc : r.per_branch) {
    json e;
    e["branch"] = bc.branch;
    e["poly"] = cs.branch(bc.branch).defining_poly.to_string();
    if (bc.tangent_approx) {
      e["tangent_at_ps"] = vec(*bc.tangent_approx);
    } else {
      e["tangent_at_ps"] = rational_pair(bc.tangent_at_ps);
    }
    e["wedge_value"] = bc.wedge.exact ? json(bc.wedge.exact->to_string()) : json(nullptr);
    e["wedge_approx"] = number(bc.wedge.approx);
    e["wedge_exact"] = bc.wedge.exact.has_value();
    e["is_canard"] = bc.is_canard;
    e["orientation_note"] = bc.orientation_note;
    json eq = json::array();
    for (const auto& q : bc.reduced_flow_equilibria_found) eq.push_back(vec(q));
    e["reduced_flow_equilibria_found"] = eq;
    json halves = json::array();
    for (const auto& h : bc.halves) {
      json hj;
      hj["side"] = h.side;
      hj["stability"] = to_string(h.stability);
      hj["mean_alpha"] = number(h.mean_alpha);
      json ev = json::array();
      for (double l : h.transverse_eigenvalues) ev.push_back(number(l));
      hj["transverse_eigenvalues"] = ev;
      halves.push_back(hj);
    }
    e["halves"] = halves;
    per.push_back(e);
  }
  j["per_branch"] = per;
  return j;
}

json equilibrium_json(const SphereEquilibrium& e) {
  json j;
  j["theta"] = number(e.theta);
  j["phi"] = number(e.phi);
  j["classification"] = e.classification;
  j["origin"] = e.origin.to_string();
  j["eigenvalues"] = json::array({complex_json(e.eigenvalues[0]), complex_json(e.eigenvalues[1])});
  j["tangential"] = e.tangential;
  j["residual"] = number(e.residual);
  j["chart"] = e.chart;
  j["chart_check"] = e.chart_check;
  return j;
}

json trajectory_summary(const Trajectory& t) {
  json j;
  j["steps"] = t.size();
  j["status"] = to_string(t.status);
  j["diagnostic"] = t.diagnostic;
  j["final_state"] = t.empty() ? json(nullptr) : vec(t.states.back());
  j["final_time"] = t.empty() ? json(nullptr) : number(t.times.back());
  json ev = json::array();
  for (const auto& e : t.events) {
    json x;
    x["t"] = number(e.t);
    x["point"] = vec(e.point);
    x["tag"] = e.tag;
    x["value"] = number(e.value);
    ev.push_back(x);
  }
  j["events"] = ev;
  return j;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string analysis_json(const Analysis& a) {
  json j = header("analyze");
  j["system"] = system_json(a.system, a.box);
  const CriticalSet& cs = a.critical_set;
  json c;
  c["common_factor"] = cs.common_poly.to_string();
  c["fast_cofactor"] = json::array({cs.fast_cofactor[0].to_string(), cs.fast_cofactor[1].to_string()});
  c["standard_form"] = cs.standard_form;
  c["singular"] = cs.singular;
  c["rescaled"] = cs.rescaled;
  c["X0_used"] = field_strings(cs.x0);
  json branches = json::array();
  for (const auto& b : cs.branches) {
    json e;
    e["id"] = b.id;
    e["poly"] = b.defining_poly.to_string();
    e["proven_irreducible"] = b.proven_irreducible;
    branches.push_back(e);
  }
  c["branches"] = branches;
  json pts = json::array();
  for (const auto& p : a.points) pts.push_back(point_json(p));
  c["singular_points"] = pts;
  j["critical_set"] = c;

  json strat = json::array();
  for (std::size_t i = 0; i < a.whitney.size(); ++i) {
    json e;
    e["whitney"] = stratification_json(a.whitney[i]);
    json rel = json::array();
    if (i < a.relaxed.size()) {
      for (const auto& r : a.relaxed[i]) rel.push_back(stratification_json(r));
    }
    e["relaxed"] = rel;
    strat.push_back(e);
  }
  j["stratifications"] = strat;
  json can = json::array();
  for (const auto& r : a.canards) can.push_back(canard_json(r, cs));
  j["canards"] = can;
  j["warnings"] = a.warnings;
  j["assumption_violated"] = a.assumption_violated;
  return dump(j);
}

std::string analysis_csv(const Analysis& a) {
  std::ostringstream os;
  os << "point,branch,poly,wedge,is_canard,orientation\n";
  for (std::size_t i = 0; i < a.canards.size(); ++i) {
    for (const auto& bc : a.canards[i].per_branch) {
      os << i << "," << bc.branch << "," << a.critical_set.branch(bc.branch).defining_poly.to_string() << ","
         << (bc.wedge.exact ? bc.wedge.exact->to_string() : fmt(bc.wedge.approx)) << ","
         << (bc.is_canard ? "true" : "false") << "," << bc.orientation_note << "\n";
    }
  }
  return os.str();
}

std::string blowup_json(const Analysis& a, const BlowupAnalysis& b, BlowupSection section) {
  json j = header("blowup");
  j["system"] = system_json(a.system, a.box);
  j["section"] = to_string(section);
  j["weights"] = b.weights.to_string();
  j["center"] = vec(b.center);
  j["division_exponent"] = b.division_exponent;
  j["extended_field"] = field_strings(b.xhat);
  const bool all = section == BlowupSection::all;
  if (all || section == BlowupSection::charts) {
    json charts = json::array();
    for (std::size_t i = 0; i < b.charts.size(); ++i) {
      const auto& c = b.charts[i];
      json e;
      e["chart"] = to_string(c.chart);
      e["map"] = json::array({c.blowup_map[0].to_string(), c.blowup_map[1].to_string(), c.blowup_map[2].to_string()});
      e["field"] = field_strings(c.field);
      e["chart_valuation"] = c.chart_valuation;
      e["pushforward_samples"] = b.pushforward[i].samples;
      e["pushforward_failures"] = b.pushforward[i].failures;
      charts.push_back(e);
    }
    j["charts"] = charts;
  }
  if (all || section == BlowupSection::sphere) {
    json s;
    s["equator_invariance"] = number(b.equator_invariance);
    s["richardson_consistency"] = number(b.richardson_consistency);
    s["reflection_symmetry"] = b.symmetry.holds;
    s["reflection_worst_deviation"] = number(b.symmetry.worst_deviation);
    s["reflection_worst_point"] = vec({b.symmetry.worst_theta, b.symmetry.worst_phi});
    j["sphere"] = s;
  }
  if (all || section == BlowupSection::equator) {
    json eq = json::array();
    for (const auto& e : b.equator) eq.push_back(equilibrium_json(e));
    j["equator"] = eq;
  }
  if (all || section == BlowupSection::connect) {
    json con = json::array();
    for (const auto& c : b.connections) {
      json e;
      e["branch"] = c.branch;
      e["from_theta"] = number(c.from.theta);
      e["to_theta"] = number(c.to.theta);
      e["connected"] = c.result.connected;
      e["arclength"] = number(c.result.arclength);
      e["terminal_distance"] = number(c.result.closest_distance);
      e["match_gap"] = number(c.result.match_gap);
      e["stop_reason"] = c.result.stop_reason;
      e["orbit_points"] = c.result.orbit.size();
      con.push_back(e);
    }
    j["connections"] = con;
  }
  j["warnings"] = a.warnings;
  return dump(j);
}

std::string equator_csv(const BlowupAnalysis& b) {
  std::ostringstream os;
  os << "theta,phi,classification,origin,ev1_re,ev1_im,ev2_re,ev2_im,chart,chart_check\n";
  for (const auto& e : b.equator) {
    os << fmt(e.theta) << "," << fmt(e.phi) << "," << e.classification << ",\"" << e.origin.to_string() << "\","
       << fmt(e.eigenvalues[0].real()) << "," << fmt(e.eigenvalues[0].imag()) << "," << fmt(e.eigenvalues[1].real())
       << "," << fmt(e.eigenvalues[1].imag()) << "," << e.chart << "," << (e.chart_check ? "true" : "false") << "\n";
  }
  return os.str();
}

std::string simulation_json(const Analysis& a, const SimulationResult& s) {
  json j = header("simulate");
  j["system"] = system_json(a.system, a.box);
  j["mode"] = to_string(s.mode);
  j["epsilon"] = number(s.epsilon);
  j["q0"] = vec(s.q0);
  j["t_end"] = number(s.t_end);
  if (s.mode == SimulationMode::sweep) {
    json sw = json::array();
    for (const auto& r : s.shadowing) {
      json e;
      e["delta"] = number(r.delta);
      e["max_deviation"] = number(r.max_deviation);
      sw.push_back(e);
    }
    j["shadowing"] = sw;
    j["shadowing_ratio"] = number(s.shadowing_ratio);
  } else {
    j["trajectory"] = trajectory_summary(s.trajectory);
    json m = json::array();
    for (const auto& e : s.metrics) {
      json x;
      x["branch"] = e.branch;
      x["repelling_side"] = e.repelling_side;
      x["tube_radius"] = number(e.tube);
      x["canard_metric"] = number(e.metric);
      x["rotated_metric"] = number(e.rotated_metric);
      x["separated"] = e.separated;
      m.push_back(x);
    }
    j["canard_metrics"] = m;
    if (s.mode == SimulationMode::euler) {
      j["switched_to_float"] = s.switched_to_float;
      j["switch_index"] = s.switch_index;
    }
  }
  j["warnings"] = s.warnings;
  return dump(j);
}

std::string trajectory_csv(const Trajectory& t, std::size_t max_rows) {
  std::ostringstream os;
  os << "t,x,y,event\n";
  const std::size_t n = t.size();
  std::size_t stride = 1;
  if (max_rows > 0 && n > max_rows) stride = (n + max_rows - 1) / max_rows;
  std::size_t e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (e < t.events.size() && t.events[e].t <= t.times[i]) {
      const auto& ev = t.events[e++];
      os << fmt(ev.t) << "," << fmt(ev.point[0]) << "," << fmt(ev.point[1]) << "," << ev.tag << "\n";
    }
    if (i % stride == 0 || i + 1 == n) {
      os << fmt(t.times[i]) << "," << fmt(t.states[i][0]) << "," << fmt(t.states[i][1]) << ",\n";
    }
  }
  for (; e < t.events.size(); ++e) {
    const auto& ev = t.events[e];
    os << fmt(ev.t) << "," << fmt(ev.point[0]) << "," << fmt(ev.point[1]) << "," << ev.tag << "\n";
  }
  return os.str();
}

std::string circle_json(const std::vector<CircleLemmaSystem>& systems) {
  json j = header("circle-lemma");
  json arr = json::array();
  for (const auto& s : systems) {
    json e;
    e["k"] = s.k;
    e["sign"] = s.sign;
    e["division_exponent"] = s.division_exponent;
    e["max_deviation"] = number(s.max_deviation);
    json eq = json::array();
    for (const auto& q : s.equilibria) {
      json x;
      x["psi"] = number(q.psi);
      x["derivative"] = number(q.derivative);
      x["stable"] = q.stable;
      x["hyperbolic"] = q.hyperbolic;
      eq.push_back(x);
    }
    e["equilibria"] = eq;
    arr.push_back(e);
  }
  j["systems"] = arr;
  return dump(j);
}

std::string circle_csv(const std::vector<CircleLemmaSystem>& systems) {
  std::ostringstream os;
  os << "k,psi,closed_form,derived\n";
  for (const auto& s : systems) {
    for (int i = 0; i < 1000; ++i) {
      const double psi = std::numbers::pi * i / 999.0;
      os << s.k << "," << fmt(psi) << "," << fmt(s.psi_dot(psi)) << "," << fmt(s.psi_dot_derived(psi)) << "\n";
    }
  }
  return os.str();
}

std::string error_json(const std::string& command, const std::string& kind, const std::string& message) {
  json j = header(command);
  j["error"] = {{"kind", kind}, {"message", message}};
  return dump(j);
}

}  // namespace canardkit
