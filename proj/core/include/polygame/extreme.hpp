#pragma once

#include <polygame/game.hpp>

#include <cstddef>
#include <utility>
#include <vector>

namespace polygame {

/// One action of the extreme interpretation: a (polytope, vertex) pair lifted
/// to a sparse distribution over global state indices. Entries are sorted by
/// state index, strictly positive, and sum to 1 exactly; `dist_f` mirrors
/// `dist` in binary64 for the iterative solvers.
struct ExtremeAction {
  std::size_t polytope_index = 0;
  std::size_t vertex_index = 0;
  std::vector<std::pair<std::size_t, Rational>> dist;
  std::vector<std::pair<std::size_t, double>> dist_f;
};

/// The finite stochastic game over polytope vertices. Action lists follow
/// polytope order, then the canonical vertex order within each polytope, so
/// the construction is deterministic.
struct ExtremeGame {
  std::vector<std::string> states;
  std::vector<Player> owner;
  std::vector<Rational> reward;
  std::vector<double> reward_f;
  std::vector<bool> terminal;
  std::size_t initial = 0;
  std::vector<std::vector<ExtremeAction>> actions;

  std::size_t num_states() const { return states.size(); }
  std::size_t state_index(const std::string& name) const;
  std::size_t total_actions() const;
};

/// Discretizes a PSG by enumerating every polytope's vertex set. The input
/// must validate; diagnostics errors are rethrown as Error("InvalidModel").
ExtremeGame build_extreme_game(const PSG& game);

/// True iff every pure memoryless strategy pair reaches a terminal state with
/// probability 1. Computed as a greatest fixpoint: no set of states disjoint
/// from the terminals may be closed under some action choice.
bool check_stopping(const ExtremeGame& game);

/// True iff under every strategy pair, every state reaches every other state
/// with positive probability. Greatest-fixpoint check per target state.
bool check_irreducible(const ExtremeGame& game);

}  // namespace polygame
