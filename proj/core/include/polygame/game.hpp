#pragma once

#include <polygame/polytope.hpp>
#include <polygame/rational.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace polygame {

enum class Player { Box, Diamond };

std::string player_to_string(Player p);
Player player_from_string(const std::string& text);

/// A polytopal stochastic game: two players own a partition of the states and
/// each state offers a finite, nonempty set of distribution polytopes over
/// successor states. Rewards are per-state and nonnegative; terminal states
/// carry reward 0 and a single Dirac self-loop.
struct PSG {
  std::vector<std::string> states;
  std::map<std::string, Player> owner;
  std::map<std::string, std::vector<DistPolytope>> theta;
  std::map<std::string, Rational> reward;
  std::set<std::string> terminals;
  std::string initial;

  bool is_terminal(const std::string& s) const { return terminals.count(s) != 0; }
  Rational reward_of(const std::string& s) const {
    auto it = reward.find(s);
    return it == reward.end() ? Rational(0) : it->second;
  }
};

/// Solving objective. Reach carries a goal set, Discounted a factor strictly
/// inside (0,1); Total and Average carry nothing but demand the stopping and
/// irreducibility preconditions at solve time.
struct Objective {
  enum class Kind { Reach, Total, Discounted, Average };

  Kind kind = Kind::Reach;
  std::set<std::string> goal;        // Reach only
  Rational gamma = Rational(0);      // Discounted only

  static Objective reach(std::set<std::string> goal);
  static Objective total();
  static Objective discounted(const Rational& gamma);
  static Objective average();

  std::string name() const;
};

struct Diagnostic {
  std::string code;
  std::string locus;
  std::string message;
};

/// validate() output; `errors` empty iff the model is solvable.
struct Diagnostics {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;

  bool ok() const { return errors.empty(); }
};

/// Checks every structural PSG invariant; never throws, never mutates.
/// Terminal-like states (single Dirac self-loop) that are not declared
/// terminal are reported as warnings.
Diagnostics validate(const PSG& game);

/// Interval (IMDP-style) polytope: one pair of closed bound rows per
/// successor, l(s') <= mu(s') <= u(s'). States missing from a map default to
/// 0 (lower) and 1 (upper). Throws Error("EmptyPolytope") if infeasible and
/// Error("BadInterval") if a bound is outside [0,1] or crossed.
DistPolytope from_imdp_intervals(const std::vector<std::string>& support,
                                 const std::map<std::string, Rational>& lower,
                                 const std::map<std::string, Rational>& upper);

}  // namespace polygame
