// canardkit command-line front end.
#include <iostream>

#include "CLI11.hpp"
#include "canardkit/commands.hpp"

namespace {

void common_flags(CLI::App* cmd, canardkit::CommandOptions& opt, bool with_file) {
  if (with_file) cmd->add_option("file", opt.file, "system file")->required();
  cmd->add_option("--out", opt.out, "write the report here instead of stdout");
  cmd->add_option("--format", opt.format, "json, csv or svg");
  cmd->add_option("--box", opt.box, "xmin,xmax,ymin,ymax");
  cmd->add_option("--weights", opt.weights, "blow-up weights a,b,c");
  cmd->add_option("--eps", opt.eps, "epsilon");
  cmd->add_option("--delta", opt.delta, "Euler step");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular canards of planar slow-fast systems"};
  app.require_subcommand(1);
  canardkit::CommandOptions opt;

  auto* analyze = app.add_subcommand("analyze", "critical set, stratifications and canard verdicts");
  common_flags(analyze, opt, true);

  auto* blowup = app.add_subcommand("blowup", "weighted blow-up of the singular point");
  common_flags(blowup, opt, true);
  blowup->add_option("--section", opt.section, "all, charts, sphere, equator or connect");

  auto* simulate = app.add_subcommand("simulate", "trajectories and canard metrics");
  common_flags(simulate, opt, true);
  simulate->add_option("--q0", opt.q0, "initial point x,y");
  simulate->add_option("--t-end", opt.t_end, "final time");
  simulate->add_option("--mode", opt.mode, "flow, euler or sweep");
  simulate->add_option("--tube", opt.tube, "tube radius for the canard metric");

  auto* circle = app.add_subcommand("circle-lemma", "blow-up circle of x' = x^(2k+1) + eps");
  common_flags(circle, opt, false);
  circle->add_option("--k", opt.k, "exponent parameter (default: 1..4)");

  auto* verify = app.add_subcommand("verify-paper", "reproduce the worked examples");
  common_flags(verify, opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : canardkit::kExitParse;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen == verify && verify->count("--format") == 0) opt.format = "table";
  const auto result = canardkit::run_command(chosen->get_name(), opt);
  if (!result.output.empty()) std::cout << result.output;
  if (!result.diagnostics.empty()) {
    std::cerr << result.diagnostics;
    if (result.diagnostics.back() != '\n') std::cerr << '\n';
  }
  return result.exit_code;
}
