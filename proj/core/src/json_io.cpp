#include <polygame/json_io.hpp>

#include <polygame/errors.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace polygame {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[64];
  // %.17g round-trips any binary64; trim to the shortest form that still
  // parses back exactly so output stays byte-stable and readable.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

namespace {

Rational rational_from_json(const nlohmann::json& j, const std::string& what) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw Error("BadModel", what + " must be a decimal string or integer");
}

ordered_json constraint_to_json(const LinearConstraint& c) {
  ordered_json coeffs = ordered_json::object();
  for (const auto& [s, v] : c.coeffs) coeffs[s] = rational_to_string(v);
  return ordered_json{{"coeffs", std::move(coeffs)},
                      {"rel", rel_to_string(c.rel)},
                      {"bound", rational_to_string(c.bound)}};
}

LinearConstraint constraint_from_json(const nlohmann::json& j) {
  LinearConstraint c;
  if (!j.is_object() || !j.contains("coeffs") || !j.contains("rel") || !j.contains("bound")) {
    throw Error("BadModel", "constraint must carry coeffs, rel and bound");
  }
  for (const auto& [s, v] : j.at("coeffs").items()) {
    c.coeffs.emplace(s, rational_from_json(v, "constraint coefficient"));
  }
  c.rel = rel_from_string(j.at("rel").get<std::string>());
  c.bound = rational_from_json(j.at("bound"), "constraint bound");
  return c;
}

}  // namespace

PSG psg_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("BadModel", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("BadModel", "top level must be an object");

  PSG game;
  for (const auto& s : j.value("states", nlohmann::json::array())) {
    game.states.push_back(s.get<std::string>());
  }
  if (j.contains("owner")) {
    for (const auto& [s, p] : j.at("owner").items()) {
      game.owner.emplace(s, player_from_string(p.get<std::string>()));
    }
  }
  if (j.contains("theta")) {
    for (const auto& [s, polys] : j.at("theta").items()) {
      for (const auto& poly : polys) {
        std::vector<std::string> support;
        for (const auto& t : poly.at("support")) support.push_back(t.get<std::string>());
        std::vector<LinearConstraint> constraints;
        for (const auto& c : poly.value("constraints", nlohmann::json::array())) {
          constraints.push_back(constraint_from_json(c));
        }
        game.theta[s].emplace_back(std::move(support), std::move(constraints));
      }
    }
  }
  if (j.contains("reward")) {
    for (const auto& [s, r] : j.at("reward").items()) {
      game.reward.emplace(s, rational_from_json(r, "reward"));
    }
  }
  for (const auto& s : j.value("terminals", nlohmann::json::array())) {
    game.terminals.insert(s.get<std::string>());
  }
  game.initial = j.value("initial", std::string{});
  return game;
}

std::string psg_to_json(const PSG& game) {
  ordered_json j;
  j["states"] = game.states;
  ordered_json owner = ordered_json::object();
  ordered_json theta = ordered_json::object();
  ordered_json reward = ordered_json::object();
  for (const auto& s : game.states) {
    if (auto it = game.owner.find(s); it != game.owner.end()) {
      owner[s] = player_to_string(it->second);
    }
    if (auto it = game.theta.find(s); it != game.theta.end()) {
      ordered_json polys = ordered_json::array();
      for (const auto& poly : it->second) {
        ordered_json p;
        p["support"] = poly.support();
        ordered_json rows = ordered_json::array();
        for (const auto& c : poly.constraints()) rows.push_back(constraint_to_json(c));
        p["constraints"] = std::move(rows);
        polys.push_back(std::move(p));
      }
      theta[s] = std::move(polys);
    }
    if (auto it = game.reward.find(s); it != game.reward.end() && it->second != 0) {
      reward[s] = rational_to_string(it->second);
    }
  }
  j["owner"] = std::move(owner);
  j["theta"] = std::move(theta);
  j["reward"] = std::move(reward);
  j["terminals"] = std::vector<std::string>(game.terminals.begin(), game.terminals.end());
  j["initial"] = game.initial;
  return j.dump(2) + "\n";
}

std::string diagnostics_to_json(const Diagnostics& diags) {
  auto items = [](const std::vector<Diagnostic>& list) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : list) {
      arr.push_back(ordered_json{{"code", d.code}, {"locus", d.locus}, {"message", d.message}});
    }
    return arr;
  };
  ordered_json j;
  j["ok"] = diags.ok();
  j["errors"] = items(diags.errors);
  j["warnings"] = items(diags.warnings);
  return j.dump(2) + "\n";
}

std::string vertices_to_json(const PSG& game) {
  ordered_json states = ordered_json::array();
  for (const auto& s : game.states) {
    ordered_json polys = ordered_json::array();
    if (auto it = game.theta.find(s); it != game.theta.end()) {
      for (const auto& poly : it->second) {
        ordered_json verts = ordered_json::array();
        for (const auto& v : poly.vertices().vertices) {
          ordered_json coords = ordered_json::array();
          for (const auto& x : v) coords.push_back(rational_to_string(x));
          verts.push_back(std::move(coords));
        }
        polys.push_back(ordered_json{{"support", poly.support()}, {"vertices", std::move(verts)}});
      }
    }
    states.push_back(ordered_json{{"state", s}, {"polytopes", std::move(polys)}});
  }
  ordered_json j;
  j["states"] = std::move(states);
  return j.dump(2) + "\n";
}

namespace {

ordered_json objective_json(const Objective& objective) {
  ordered_json j;
  j["kind"] = objective.name();
  if (objective.kind == Objective::Kind::Reach) {
    j["goal"] = std::vector<std::string>(objective.goal.begin(), objective.goal.end());
  }
  if (objective.kind == Objective::Kind::Discounted) {
    j["gamma"] = rational_to_string(objective.gamma);
  }
  return j;
}

ordered_json strategy_json(const ExtremeGame& game, const Strategy& strat) {
  ordered_json j = ordered_json::object();
  for (const auto& [s, a] : strat.choice) j[game.states[s]] = a;
  return j;
}

}  // namespace

std::string objective_to_json(const Objective& objective) {
  return objective_json(objective).dump(2) + "\n";
}

std::string extreme_game_to_json(const ExtremeGame& game) {
  ordered_json j;
  j["states"] = game.states;
  ordered_json owner = ordered_json::object();
  ordered_json reward = ordered_json::object();
  ordered_json actions = ordered_json::object();
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    owner[game.states[s]] = player_to_string(game.owner[s]);
    if (game.reward[s] != 0) reward[game.states[s]] = rational_to_string(game.reward[s]);
    ordered_json list = ordered_json::array();
    for (const auto& a : game.actions[s]) {
      ordered_json dist = ordered_json::object();
      for (const auto& [t, p] : a.dist) dist[game.states[t]] = rational_to_string(p);
      list.push_back(ordered_json{{"polytope", a.polytope_index},
                                  {"vertex", a.vertex_index},
                                  {"dist", std::move(dist)}});
    }
    actions[game.states[s]] = std::move(list);
  }
  j["owner"] = std::move(owner);
  j["reward"] = std::move(reward);
  std::vector<std::string> terminals;
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    if (game.terminal[s]) terminals.push_back(game.states[s]);
  }
  j["terminals"] = std::move(terminals);
  j["initial"] = game.states[game.initial];
  j["actions"] = std::move(actions);
  return j.dump(2) + "\n";
}

std::string extreme_game_to_dot(const ExtremeGame& game) {
  std::string out = "digraph extreme_game {\n";
  out += "  rankdir=LR;\n";
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    const char* shape = game.owner[s] == Player::Box ? "box" : "diamond";
    out += "  s" + std::to_string(s) + " [label=\"" + game.states[s] + "\", shape=" + shape +
           (game.terminal[s] ? ", peripheries=2" : "") + "];\n";
  }
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    for (std::size_t ai = 0; ai < game.actions[s].size(); ++ai) {
      const auto& a = game.actions[s][ai];
      const std::string mid =
          "a" + std::to_string(s) + "_" + std::to_string(ai);
      out += "  " + mid + " [label=\"K" + std::to_string(a.polytope_index) + "v" +
             std::to_string(a.vertex_index) + "\", shape=point];\n";
      out += "  s" + std::to_string(s) + " -> " + mid + ";\n";
      for (const auto& [t, p] : a.dist) {
        out += "  " + mid + " -> s" + std::to_string(t) + " [label=\"" +
               rational_to_string(p) + "\"];\n";
      }
    }
  }
  out += "}\n";
  return out;
}

std::string solve_result_to_json(const ExtremeGame& game, const Objective& objective,
                                 const SolveResult& result) {
  ordered_json j;
  j["objective"] = objective_json(objective);
  ordered_json values = ordered_json::object();
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    values[game.states[s]] = format_double(result.values[s]);
  }
  j["values"] = std::move(values);
  j["strategy_box"] = strategy_json(game, result.strategy_box);
  j["strategy_diamond"] = strategy_json(game, result.strategy_diamond);
  j["iterations"] = result.iterations;
  j["residual"] = format_double(result.residual);
  j["converged"] = result.converged;
  return j.dump(2) + "\n";
}

std::string sim_report_to_json(const SimConfig& config, const SimReport& report) {
  ordered_json j;
  j["objective"] = objective_json(config.objective);
  j["runs"] = config.runs;
  j["seed"] = config.seed;
  j["horizon"] = config.horizon;
  j["mean"] = format_double(report.mean);
  j["std_error"] = format_double(report.std_error);
  j["std_error_defined"] = report.std_error_defined;
  j["runs_completed"] = report.runs_completed;
  if (config.objective.kind == Objective::Kind::Discounted) {
    j["truncation_bound"] = format_double(report.truncation_bound);
  }
  return j.dump(2) + "\n";
}

std::string oracle_to_json(const ExtremeGame& game, const Objective& objective,
                           const BruteForceResult& result) {
  ordered_json j;
  j["objective"] = objective_json(objective);
  ordered_json supinf = ordered_json::object();
  ordered_json infsup = ordered_json::object();
  double gap = 0.0;
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    supinf[game.states[s]] = format_double(result.supinf[s]);
    infsup[game.states[s]] = format_double(result.infsup[s]);
    gap = std::max(gap, std::abs(result.supinf[s] - result.infsup[s]));
  }
  j["supinf"] = std::move(supinf);
  j["infsup"] = std::move(infsup);
  j["determinacy_gap"] = format_double(gap);
  return j.dump(2) + "\n";
}

std::string error_to_json(const std::string& code, const std::string& message,
                          const std::string& locus) {
  ordered_json j;
  j["error"] = ordered_json{{"code", code}, {"message", message}, {"locus", locus}};
  return j.dump(2) + "\n";
}

}  // namespace polygame
