#pragma once

#include <polygame/extreme.hpp>
#include <polygame/game.hpp>
#include <polygame/simulate.hpp>
#include <polygame/solver.hpp>

#include <string>

// JSON interchange. All rationals render as exact strings ("7/10", "3");
// binary64 values render as shortest-round-trip decimal strings so repeated
// runs emit byte-identical documents. Schemas live in docs/schemas/.

namespace polygame {

/// Explicit PSG schema: top-level keys `states`, `owner`, `theta`, `reward`,
/// `terminals`, `initial`; numerics are decimal or fraction strings.
PSG psg_from_json(const std::string& text);
std::string psg_to_json(const PSG& game);

std::string diagnostics_to_json(const Diagnostics& diags);

/// Per-state polytope vertex dump.
std::string vertices_to_json(const PSG& game);

std::string objective_to_json(const Objective& objective);

std::string extreme_game_to_json(const ExtremeGame& game);
std::string extreme_game_to_dot(const ExtremeGame& game);

std::string solve_result_to_json(const ExtremeGame& game, const Objective& objective,
                                 const SolveResult& result);

std::string sim_report_to_json(const SimConfig& config, const SimReport& report);

std::string oracle_to_json(const ExtremeGame& game, const Objective& objective,
                           const BruteForceResult& result);

/// Structured error envelope used by the CLI on stderr.
std::string error_to_json(const std::string& code, const std::string& message,
                          const std::string& locus);

/// Shortest decimal rendering that round-trips binary64.
std::string format_double(double value);

}  // namespace polygame
