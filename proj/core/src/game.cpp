#include <polygame/game.hpp>

#include <polygame/errors.hpp>

namespace polygame {

std::string player_to_string(Player p) { return p == Player::Box ? "box" : "diamond"; }

Player player_from_string(const std::string& text) {
  if (text == "box") return Player::Box;
  if (text == "diamond") return Player::Diamond;
  throw Error("BadPlayer", "unknown player '" + text + "' (expected box or diamond)");
}

Objective Objective::reach(std::set<std::string> goal) {
  if (goal.empty()) throw Error("BadObjective", "reachability goal set is empty");
  Objective o;
  o.kind = Kind::Reach;
  o.goal = std::move(goal);
  return o;
}

Objective Objective::total() {
  Objective o;
  o.kind = Kind::Total;
  return o;
}

Objective Objective::discounted(const Rational& gamma) {
  if (gamma <= 0 || gamma >= 1) {
    throw Error("BadObjective", "discount factor must lie strictly inside (0,1)");
  }
  Objective o;
  o.kind = Kind::Discounted;
  o.gamma = gamma;
  return o;
}

Objective Objective::average() {
  Objective o;
  o.kind = Kind::Average;
  return o;
}

std::string Objective::name() const {
  switch (kind) {
    case Kind::Reach: return "reach";
    case Kind::Total: return "total";
    case Kind::Discounted: return "discounted";
    case Kind::Average: return "average";
  }
  return "reach";
}

namespace {

bool is_dirac_self_loop(const DistPolytope& poly, const std::string& state) {
  return poly.support().size() == 1 && poly.support()[0] == state && poly.is_point();
}

}  // namespace

Diagnostics validate(const PSG& game) {
  Diagnostics diags;
  auto error = [&](std::string code, std::string locus, std::string message) {
    diags.errors.push_back({std::move(code), std::move(locus), std::move(message)});
  };
  auto warn = [&](std::string code, std::string locus, std::string message) {
    diags.warnings.push_back({std::move(code), std::move(locus), std::move(message)});
  };

  std::set<std::string> state_set(game.states.begin(), game.states.end());
  if (game.states.empty()) error("NoStates", "", "game has no states");
  if (state_set.size() != game.states.size()) {
    error("DuplicateState", "", "state list contains duplicates");
  }

  for (const auto& s : game.states) {
    if (game.owner.find(s) == game.owner.end()) {
      error("MissingOwner", s, "state has no owning player");
    }
  }
  for (const auto& [s, p] : game.owner) {
    (void)p;
    if (!state_set.count(s)) error("UnknownState", s, "owner entry for undeclared state");
  }

  for (const auto& s : game.states) {
    auto it = game.theta.find(s);
    if (it == game.theta.end() || it->second.empty()) {
      error("NoPolytope", s, "state offers no distribution polytope");
      continue;
    }
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      for (const auto& succ : it->second[k].support()) {
        if (!state_set.count(succ)) {
          error("UnknownState", s + ", polytope " + std::to_string(k),
                "support references undeclared state '" + succ + "'");
        }
      }
    }
  }
  for (const auto& [s, polys] : game.theta) {
    (void)polys;
    if (!state_set.count(s)) error("UnknownState", s, "theta entry for undeclared state");
  }

  for (const auto& [s, r] : game.reward) {
    if (!state_set.count(s)) {
      error("UnknownState", s, "reward entry for undeclared state");
    } else if (r < 0) {
      error("NegativeReward", s, "reward must be nonnegative");
    }
  }

  for (const auto& s : game.terminals) {
    if (!state_set.count(s)) {
      error("UnknownState", s, "terminal entry for undeclared state");
      continue;
    }
    if (game.reward_of(s) != 0) {
      error("TerminalRewardNonzero", s, "terminal state must have reward 0");
    }
    auto it = game.theta.find(s);
    if (it != game.theta.end() && !it->second.empty()) {
      if (it->second.size() != 1 || !is_dirac_self_loop(it->second[0], s)) {
        error("TerminalNotDirac", s,
              "terminal state must offer exactly the Dirac self-loop polytope");
      }
    }
  }

  // Terminality is declared, not inferred; point out states that look
  // terminal so modeling slips surface early.
  for (const auto& s : game.states) {
    if (game.terminals.count(s)) continue;
    auto it = game.theta.find(s);
    if (it != game.theta.end() && it->second.size() == 1 &&
        is_dirac_self_loop(it->second[0], s)) {
      warn("UndeclaredTerminal", s,
           "state has only a Dirac self-loop but is not declared terminal");
    }
  }

  if (!game.initial.empty() && !state_set.count(game.initial)) {
    error("BadInitial", game.initial, "initial state is not a declared state");
  }
  if (game.initial.empty()) error("BadInitial", "", "no initial state");

  return diags;
}

DistPolytope from_imdp_intervals(const std::vector<std::string>& support,
                                 const std::map<std::string, Rational>& lower,
                                 const std::map<std::string, Rational>& upper) {
  std::set<std::string> support_set(support.begin(), support.end());
  for (const auto& [s, v] : lower) {
    if (!support_set.count(s)) throw Error("UnknownState", "lower bound for '" + s + "'");
    if (v < 0 || v > 1) throw Error("BadInterval", "lower bound for '" + s + "' outside [0,1]");
  }
  for (const auto& [s, v] : upper) {
    if (!support_set.count(s)) throw Error("UnknownState", "upper bound for '" + s + "'");
    if (v < 0 || v > 1) throw Error("BadInterval", "upper bound for '" + s + "' outside [0,1]");
  }

  std::vector<LinearConstraint> rows;
  for (const auto& s : support) {
    auto lo = lower.find(s);
    auto hi = upper.find(s);
    if (lo != lower.end() && hi != upper.end() && lo->second > hi->second) {
      throw Error("BadInterval", "crossed interval for '" + s + "'");
    }
    if (lo != lower.end() && lo->second > 0) {
      rows.push_back({{{s, Rational(1)}}, Rel::Ge, lo->second});
    }
    if (hi != upper.end() && hi->second < 1) {
      rows.push_back({{{s, Rational(1)}}, Rel::Le, hi->second});
    }
  }
  return DistPolytope(support, std::move(rows));
}

}  // namespace polygame
