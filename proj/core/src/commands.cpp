#include "canardkit/commands.hpp"

#include <fstream>
#include <functional>

#include "canardkit/error.hpp"
#include "canardkit/pipeline.hpp"
#include "canardkit/report.hpp"
#include "canardkit/svg.hpp"
#include "canardkit/system_file.hpp"
#include "canardkit/verify.hpp"

namespace canardkit {

namespace {

// Flag value that is syntactically wrong.
class FlagError : public Error {
 public:
  using Error::Error;
};

Rational flag_number(const std::string& flag, const std::string& text) {
  try {
    return parse_number(text, 1, 1);
  } catch (const ParseError&) {
    throw FlagError("--" + flag + ": invalid number '" + text + "'");
  }
}

Rational positive_flag(const std::string& flag, const std::string& text) {
  const Rational v = flag_number(flag, text);
  if (v.sign() <= 0) throw FlagError("--" + flag + " must be positive");
  return v;
}

void require_format(const CommandOptions& opt, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (opt.format == f) return;
  }
  std::string list;
  for (const char* f : allowed) list += (list.empty() ? "" : "|") + std::string(f);
  throw FlagError("--format must be one of " + list + " for this command");
}

SystemFile load(const CommandOptions& opt) {
  if (opt.file.empty()) throw FlagError("a system file is required");
  return load_system(opt.file);
}

std::optional<Box> box_flag(const CommandOptions& opt) {
  if (!opt.box) return std::nullopt;
  try {
    return parse_box(*opt.box, 1, 1);
  } catch (const ParseError& e) {
    throw FlagError("--box: " + e.message());
  }
}

// Runs `body`, mapping exceptions to exit codes and writing --out.
CommandResult guarded(const std::string& command, const CommandOptions& opt,
                      const std::function<CommandResult()>& body) {
  CommandResult r;
  std::string kind;
  try {
    r = body();
  } catch (const FlagError& e) {
    r = {kExitParse, "", e.what()};
    kind = "usage";
  } catch (const ParseError& e) {
    r = {kExitParse, "", e.what()};
    kind = "parse";
  } catch (const IoError& e) {
    r = {kExitParse, "", e.what()};
    kind = "io";
  } catch (const AssumptionViolation& e) {
    r = {kExitAssumption, "", e.what()};
    kind = "assumption";
  } catch (const Error& e) {
    r = {kExitAssumption, "", e.what()};
    kind = "analysis";
  }
  if (!kind.empty() && opt.format == "json") r.output = error_json(command, kind, r.diagnostics);
  if (opt.out && !r.output.empty()) {
    std::ofstream out(*opt.out, std::ios::binary);
    out << r.output;
    out.close();
    if (!out) {
      r.diagnostics += (r.diagnostics.empty() ? "" : "\n") + std::string("cannot write '") + *opt.out + "'";
      r.exit_code = kExitParse;
      return r;
    }
    r.output.clear();
  }
  return r;
}

std::string joined(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += "warning: " + l + "\n";
  return s;
}

}  // namespace

CommandResult cmd_analyze(const CommandOptions& opt) {
  return guarded("analyze", opt, [&] {
    require_format(opt, {"json", "csv", "svg"});
    const Analysis a = run_analysis(load(opt), box_flag(opt));
    CommandResult r;
    r.exit_code = a.assumption_violated ? kExitAssumption : kExitOk;
    r.diagnostics = joined(a.warnings);
    if (opt.format == "json") r.output = analysis_json(a);
    if (opt.format == "csv") r.output = analysis_csv(a);
    if (opt.format == "svg") r.output = render_svg(make_scene(a));
    return r;
  });
}

CommandResult cmd_blowup(const CommandOptions& opt) {
  return guarded("blowup", opt, [&] {
    require_format(opt, {"json", "csv", "svg"});
    BlowupSection section = BlowupSection::all;
    if (opt.section) {
      const auto s = parse_blowup_section(*opt.section);
      if (!s) throw FlagError("--section must be one of all|charts|sphere|equator|connect");
      section = *s;
    }
    const SystemFile sys = load(opt);
    std::optional<Weights> w = sys.weights;
    if (opt.weights) {
      try {
        w = parse_weights(*opt.weights, 1, 1);
      } catch (const ParseError& e) {
        throw AssumptionViolation("invalid weights '" + *opt.weights + "': " + e.message());
      }
    }
    if (!w) throw AssumptionViolation("no blow-up weights; add 'weights = a,b,c' or pass --weights");
    const Analysis a = run_analysis(sys, box_flag(opt));
    const BlowupAnalysis b = run_blowup(a, *w);
    CommandResult r;
    r.diagnostics = joined(a.warnings);
    for (const auto& c : b.connections) {
      if (!c.result.connected) {
        r.diagnostics += "warning: no connection found for branch " + std::to_string(c.branch) + " (" +
                         c.result.stop_reason + ")\n";
      }
    }
    if (opt.format == "json") r.output = blowup_json(a, b, section);
    if (opt.format == "csv") r.output = equator_csv(b);
    if (opt.format == "svg") r.output = render_svg(make_scene(a, &b));
    return r;
  });
}

CommandResult cmd_simulate(const CommandOptions& opt) {
  return guarded("simulate", opt, [&] {
    require_format(opt, {"json", "csv", "svg"});
    const SystemFile sys = load(opt);
    SimulationRequest req;
    if (opt.mode) {
      if (*opt.mode == "flow") {
        req.mode = SimulationMode::flow;
      } else if (*opt.mode == "euler") {
        req.mode = SimulationMode::euler;
      } else if (*opt.mode == "sweep") {
        req.mode = SimulationMode::sweep;
      } else {
        throw FlagError("--mode must be one of flow|euler|sweep");
      }
    }
    Rational eps = sys.epsilon.value_or(Rational(1, 1000));
    if (opt.eps) eps = positive_flag("eps", *opt.eps);
    req.epsilon = eps.to_double();
    req.epsilon_exact = eps;
    if (sys.delta) req.delta = *sys.delta;
    if (opt.delta) req.delta = positive_flag("delta", *opt.delta);
    if (opt.q0) {
      const auto comma = opt.q0->find(',');
      if (comma == std::string::npos) throw FlagError("--q0 needs two numbers x,y");
      const Rational x = flag_number("q0", opt.q0->substr(0, comma));
      const Rational y = flag_number("q0", opt.q0->substr(comma + 1));
      req.q0 = Vec2{x.to_double(), y.to_double()};
      req.q0_exact_x = x;
      req.q0_exact_y = y;
    }
    if (opt.t_end) {
      const Rational t = flag_number("t-end", *opt.t_end);
      if (t.sign() < 0) throw FlagError("--t-end must be non-negative");
      req.t_end = t.to_double();
    }
    if (opt.tube) req.tube = positive_flag("tube", *opt.tube).to_double();
    const Analysis a = run_analysis(sys, box_flag(opt));
    const SimulationResult s = run_simulation(a, req);
    CommandResult r;
    r.diagnostics = joined(a.warnings) + joined(s.warnings);
    r.exit_code = s.trajectory.status == OdeStatus::non_finite ? kExitNonFinite : kExitOk;
    if (opt.format == "json") r.output = simulation_json(a, s);
    if (opt.format == "csv") r.output = trajectory_csv(s.trajectory, 50000);
    if (opt.format == "svg") r.output = render_svg(make_scene(a, nullptr, &s));
    return r;
  });
}

CommandResult cmd_circle_lemma(const CommandOptions& opt) {
  return guarded("circle-lemma", opt, [&] {
    require_format(opt, {"json", "csv"});
    std::vector<CircleLemmaSystem> systems;
    if (opt.k) {
      if (*opt.k < 1 || *opt.k > 50) throw FlagError("--k must lie in 1..50");
      systems.push_back(circle_lemma(*opt.k));
    } else {
      for (int k = 1; k <= 4; ++k) systems.push_back(circle_lemma(k));
    }
    CommandResult r;
    r.output = opt.format == "json" ? circle_json(systems) : circle_csv(systems);
    return r;
  });
}

CommandResult cmd_verify_paper(const CommandOptions& opt) {
  return guarded("verify-paper", opt, [&] {
    if (opt.format != "json" && opt.format != "table") throw FlagError("--format must be one of table|json");
    const auto checks = verify_paper();
    CommandResult r;
    r.exit_code = all_passed(checks) ? kExitOk : kExitParse;
    r.output = opt.format == "json" ? checks_json(checks) : checks_table(checks);
    return r;
  });
}

CommandResult run_command(const std::string& name, const CommandOptions& opt) {
  if (name == "analyze") return cmd_analyze(opt);
  if (name == "blowup") return cmd_blowup(opt);
  if (name == "simulate") return cmd_simulate(opt);
  if (name == "circle-lemma") return cmd_circle_lemma(opt);
  if (name == "verify-paper") return cmd_verify_paper(opt);
  return {kExitParse, "", "unknown command '" + name + "'"};
}

}  // namespace canardkit
