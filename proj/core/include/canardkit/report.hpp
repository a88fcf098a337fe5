#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "canardkit/blowup.hpp"
#include "canardkit/dynamics.hpp"
#include "canardkit/pipeline.hpp"

namespace canardkit {

/// JSON reports carry this in their "schema" field.
inline constexpr int kReportSchema = 1;

/// Blow-up report sections.
enum class BlowupSection { all, charts, sphere, equator, connect };
const char* to_string(BlowupSection s);
std::optional<BlowupSection> parse_blowup_section(const std::string& name);

// All JSON output has sorted keys, exact rationals as "p/q" strings and a
// trailing newline, so equal inputs give byte-identical reports.

std::string analysis_json(const Analysis& a);
std::string analysis_csv(const Analysis& a);
std::string blowup_json(const Analysis& a, const BlowupAnalysis& b, BlowupSection section = BlowupSection::all);
std::string equator_csv(const BlowupAnalysis& b);
std::string simulation_json(const Analysis& a, const SimulationResult& s);
/// Columns t, x, y, event; one row per state plus one per event. With max_rows > 0
/// the states are thinned evenly to at most that many rows (events are kept).
std::string trajectory_csv(const Trajectory& t, std::size_t max_rows = 0);
std::string circle_json(const std::vector<CircleLemmaSystem>& systems);
/// Columns k, psi, closed_form, derived over 1000 samples of [0, pi] per system.
std::string circle_csv(const std::vector<CircleLemmaSystem>& systems);
/// Report for a command that failed before producing results.
std::string error_json(const std::string& command, const std::string& kind, const std::string& message);

}  // namespace canardkit
