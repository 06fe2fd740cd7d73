#pragma once

#include <polygame/dsl.hpp>
#include <polygame/game.hpp>

#include <set>
#include <string>
#include <vector>

namespace polygame {

struct ExpandOptions {
  std::size_t max_states = 1000000;
};

/// Reachable-state exploration from the initial valuation (BFS, variables in
/// declaration order, so identical sources yield bit-identical games). Each
/// enabled command becomes one DistPolytope over its successor states;
/// branches updating to the same successor have their probability symbols
/// summed, with auxiliary symbols projected out exactly (Fourier-Motzkin).
/// States enabling commands of both players raise Error("MixedOwners");
/// states enabling none become terminal. State names are the canonical
/// `var=value` valuation strings.
PSG expand(const dsl::ModelAst& ast, const ExpandOptions& opts = {});

/// Evaluates a state-predicate expression (e.g. "roby = 4 & !Collision")
/// against every expanded state name and returns the matching states.
std::set<std::string> resolve_goal(const dsl::ModelAst& ast,
                                   const std::vector<std::string>& states,
                                   const std::string& predicate);

}  // namespace polygame
