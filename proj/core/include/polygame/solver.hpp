#pragma once

#include <polygame/extreme.hpp>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace polygame {

/// Deterministic memoryless strategy: an action index for each state owned
/// by one player. Entries for the opponent's states are not allowed.
struct Strategy {
  std::map<std::size_t, std::size_t> choice;

  std::size_t at(std::size_t state) const;
  bool operator==(const Strategy& other) const { return choice == other.choice; }
};

struct SolveOptions {
  enum class Sweep { Jacobi, GaussSeidel };

  double tolerance = 1e-9;
  std::uint64_t max_iterations = 1000000;
  Sweep sweep = Sweep::Jacobi;
};

struct SolveResult {
  std::vector<double> values;
  Strategy strategy_box;
  Strategy strategy_diamond;
  std::uint64_t iterations = 0;
  double residual = 0.0;
  /// False when max_iterations ran out; the partial result is still returned.
  bool converged = true;
};

/// Solves the extreme game for the given objective.
///
/// Reach / Total / Discounted run value iteration (from 1_G, 0, 0
/// respectively) to the requested Bellman residual, then polish the iterate:
/// the greedy strategy pair is evaluated exactly on its induced chain and
/// adopted when it checks out as a fixpoint. Average runs strategy iteration
/// with unichain gain/bias evaluations until both players best-respond.
///
/// Preconditions: Total requires check_stopping, Average requires
/// check_irreducible; violations throw Error("PreconditionFailed").
SolveResult solve(const ExtremeGame& game, const Objective& objective,
                  const SolveOptions& opts = {});

/// Greedy strategies for a (near-)fixpoint: arg-max of the one-step backup at
/// Box states, arg-min at Diamond states, ties broken by lowest action index.
/// For Reach, ties at Box states are additionally resolved toward actions
/// that make progress to the goal, so the extracted strategy attains the
/// value even on states where waiting forever is value-indifferent.
std::pair<Strategy, Strategy> extract_strategies(const ExtremeGame& game,
                                                 const std::vector<double>& values,
                                                 const Objective& objective);

/// Exact (up to the linear solver) values of the Markov chain induced by a
/// strategy pair. Reach solves the hitting system with trapped states pinned
/// to 0; Discounted solves (I - gamma P) v = r; Total solves (I - P) v = r on
/// the transient states; Average computes the stationary distribution of the
/// single recurrent class and returns the constant gain.
/// Throws Error("SingularSystem") when the chain structure violates the
/// objective's requirements (non-stopping under Total, multichain under
/// Average).
std::vector<double> evaluate_fixed(const ExtremeGame& game, const Strategy& box,
                                   const Strategy& diamond, const Objective& objective);

/// Certificate check: true iff `values` is the objective's Bellman fixpoint
/// within `tol`. Reach additionally pins the boundary (1 on the goal, 0 on
/// the region where Diamond forces avoidance) and cross-checks the greedy
/// pair's exact chain value; Total cross-checks the greedy pair; Average
/// checks gain flatness and the gain/bias optimality residual.
bool verify_fixpoint(const ExtremeGame& game, const std::vector<double>& values,
                     const Objective& objective, double tol);

struct BruteForceResult {
  std::vector<double> supinf;
  std::vector<double> infsup;
};

/// Enumerates every deterministic memoryless strategy pair and evaluates each
/// induced chain exactly. Guarded: throws Error("TooManyStrategies") beyond
/// 10^6 pairs.
BruteForceResult brute_force_value(const ExtremeGame& game, const Objective& objective);

}  // namespace polygame
