#pragma once

#include <optional>
#include <string>

namespace canardkit {

/// Exit codes shared by all commands.
enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 1,       ///< parse or I/O error, bad flag, failed verify-paper check
  kExitAssumption = 2,  ///< assumption violation, invalid weights
  kExitNonFinite = 3,   ///< simulation produced non-finite states
};

/// Raw flag values as typed on the command line.
struct CommandOptions {
  std::string file;
  std::optional<std::string> out;
  std::string format = "json";
  std::optional<std::string> box;
  std::optional<std::string> weights;
  std::optional<std::string> eps;
  std::optional<std::string> delta;
  std::optional<std::string> q0;
  std::optional<std::string> t_end;
  std::optional<std::string> mode;
  std::optional<std::string> section;
  std::optional<std::string> tube;
  std::optional<int> k;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;       ///< report text for stdout; empty when written to --out
  std::string diagnostics;  ///< messages for stderr
};

CommandResult cmd_analyze(const CommandOptions& opt);
CommandResult cmd_blowup(const CommandOptions& opt);
CommandResult cmd_simulate(const CommandOptions& opt);
CommandResult cmd_circle_lemma(const CommandOptions& opt);
CommandResult cmd_verify_paper(const CommandOptions& opt);

/// Dispatch by name; unknown names give exit code 1.
CommandResult run_command(const std::string& name, const CommandOptions& opt);

}  // namespace canardkit
