#pragma once

#include <string>
#include <vector>

#include "canardkit/system_file.hpp"

namespace canardkit {

struct CheckResult {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Reproduction suite for the two worked examples. `transcritical` and
/// `pitchfork` are normally the built-in fixtures; a perturbed system makes the
/// corresponding checks fail.
std::vector<CheckResult> verify_paper(const SystemFile& transcritical, const SystemFile& pitchfork);
std::vector<CheckResult> verify_paper();

bool all_passed(const std::vector<CheckResult>& checks);
/// Fixed-width table, one row per check and a summary line.
std::string checks_table(const std::vector<CheckResult>& checks);
std::string checks_json(const std::vector<CheckResult>& checks);

}  // namespace canardkit
