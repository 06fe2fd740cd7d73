#pragma once

#include <polygame/dsl.hpp>

#include <vector>

namespace polygame {

/// Builds the grid-chase benchmark model: Roborta (box) races to the far edge
/// of a width x length grid while Rigoborto (diamond) tries to intercept her.
/// Terrain matrices are indexed [x][y] over the grid cells: q in [0, 0.5]
/// controls how fuzzy each cell's movement is, l and f in [-1, 1] give the
/// lateral and frontal slopes. Roborta's moves resolve in two steps (decide,
/// then a diamond-owned continuation carrying the uncertainty block), so the
/// terrain is adversarial to her; Rigoborto's moves resolve in one step with
/// the uncertainty on his own side. Collision is set from Rigoborto's updated
/// position; the goal predicate is `roby = L`.
/// Throws Error("BadTerrainValue") when a matrix entry is out of range.
dsl::ModelAst generate_roborta(std::size_t width, std::size_t length,
                               const std::vector<std::vector<Rational>>& q,
                               const std::vector<std::vector<Rational>>& l,
                               const std::vector<std::vector<Rational>>& f);

}  // namespace polygame
