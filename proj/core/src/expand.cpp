#include <polygame/expand.hpp>

#include <polygame/errors.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace polygame {

namespace {

using dsl::Expr;
using dsl::ExprPtr;

struct Compiled {
  std::map<std::string, Rational> constants;
  std::map<std::string, std::vector<std::vector<Rational>>> matrices;
  std::vector<dsl::VarDecl> vars;          // declaration order
  std::map<std::string, std::size_t> var_index;
  std::map<std::string, Player> label_owner;
};

struct Env {
  const Compiled* model = nullptr;
  const std::vector<Rational>* valuation = nullptr;  // aligned with model->vars
};

bool truthy(const Rational& v) { return v != 0; }

Rational eval(const Expr& e, const Env& env);

Rational eval_ident(const Expr& e, const Env& env) {
  if (env.valuation) {
    auto it = env.model->var_index.find(e.name);
    if (it != env.model->var_index.end()) return (*env.valuation)[it->second];
  }
  auto it = env.model->constants.find(e.name);
  if (it != env.model->constants.end()) return it->second;
  throw Error("UnknownIdentifier", "reference to undeclared name '" + e.name + "'",
              e.loc.to_string());
}

Rational eval(const Expr& e, const Env& env) {
  switch (e.kind) {
    case Expr::Kind::Number: return e.number;
    case Expr::Kind::Bool: return Rational(e.bval ? 1 : 0);
    case Expr::Kind::Ident: return eval_ident(e, env);
    case Expr::Kind::Unary: {
      const Rational x = eval(*e.args[0], env);
      return e.un_op == dsl::UnOp::Neg ? -x : Rational(truthy(x) ? 0 : 1);
    }
    case Expr::Kind::Binary: {
      const Rational l = eval(*e.args[0], env);
      const Rational r = eval(*e.args[1], env);
      switch (e.bin_op) {
        case dsl::BinOp::Add: return l + r;
        case dsl::BinOp::Sub: return l - r;
        case dsl::BinOp::Mul: return l * r;
        case dsl::BinOp::Div:
          if (r == 0) throw Error("DivisionByZero", "division by zero", e.loc.to_string());
          return l / r;
        case dsl::BinOp::Eq: return Rational(l == r ? 1 : 0);
        case dsl::BinOp::Ne: return Rational(l != r ? 1 : 0);
        case dsl::BinOp::Lt: return Rational(l < r ? 1 : 0);
        case dsl::BinOp::Le: return Rational(l <= r ? 1 : 0);
        case dsl::BinOp::Gt: return Rational(l > r ? 1 : 0);
        case dsl::BinOp::Ge: return Rational(l >= r ? 1 : 0);
        case dsl::BinOp::And: return Rational(truthy(l) && truthy(r) ? 1 : 0);
        case dsl::BinOp::Or: return Rational(truthy(l) || truthy(r) ? 1 : 0);
      }
      return Rational(0);
    }
    case Expr::Kind::Call: {
      if (e.name == "abs") {
        const Rational x = eval(*e.args[0], env);
        return x < 0 ? -x : x;
      }
      const Rational a = eval(*e.args[0], env);
      const Rational b = eval(*e.args[1], env);
      if (e.name == "max") return std::max(a, b);
      return std::min(a, b);
    }
    case Expr::Kind::MatrixRef: {
      auto it = env.model->matrices.find(e.name);
      if (it == env.model->matrices.end()) {
        throw Error("UnknownIdentifier", "reference to undeclared matrix '" + e.name + "'",
                    e.loc.to_string());
      }
      const Rational ri = eval(*e.args[0], env);
      const Rational ci = eval(*e.args[1], env);
      if (denominator(ri) != 1 || denominator(ci) != 1 || ri < 0 || ci < 0) {
        throw Error("BadIndex", "matrix index must be a nonnegative integer", e.loc.to_string());
      }
      const auto row = static_cast<std::size_t>(numerator(ri));
      const auto col = static_cast<std::size_t>(numerator(ci));
      if (row >= it->second.size() || col >= it->second[row].size()) {
        throw Error("BadIndex",
                    "matrix index " + e.name + "[" + numerator(ri).str() + ", " +
                        numerator(ci).str() + "] out of bounds",
                    e.loc.to_string());
      }
      return it->second[row][col];
    }
  }
  return Rational(0);
}

// Linear form over probability symbols with exact-rational coefficients.
struct LinForm {
  std::map<std::string, Rational> coeffs;
  Rational constant = Rational(0);

  bool is_const() const { return coeffs.empty(); }
};

bool mentions_symbol(const Expr& e, const std::set<std::string>& symbols) {
  if (e.kind == Expr::Kind::Ident) return symbols.count(e.name) != 0;
  for (const auto& a : e.args) {
    if (mentions_symbol(*a, symbols)) return true;
  }
  return false;
}

LinForm eval_linear(const Expr& e, const Env& env, const std::set<std::string>& symbols) {
  switch (e.kind) {
    case Expr::Kind::Ident:
      if (symbols.count(e.name)) {
        LinForm f;
        f.coeffs[e.name] = Rational(1);
        return f;
      }
      break;
    case Expr::Kind::Unary:
      if (e.un_op == dsl::UnOp::Neg) {
        LinForm f = eval_linear(*e.args[0], env, symbols);
        for (auto& [s, c] : f.coeffs) c = -c;
        f.constant = -f.constant;
        return f;
      }
      break;
    case Expr::Kind::Binary: {
      if (e.bin_op == dsl::BinOp::Add || e.bin_op == dsl::BinOp::Sub) {
        LinForm l = eval_linear(*e.args[0], env, symbols);
        LinForm r = eval_linear(*e.args[1], env, symbols);
        const int sign = e.bin_op == dsl::BinOp::Add ? 1 : -1;
        for (const auto& [s, c] : r.coeffs) {
          l.coeffs[s] += sign * c;
          if (l.coeffs[s] == 0) l.coeffs.erase(s);
        }
        l.constant += sign * r.constant;
        return l;
      }
      if (e.bin_op == dsl::BinOp::Mul) {
        LinForm l = eval_linear(*e.args[0], env, symbols);
        LinForm r = eval_linear(*e.args[1], env, symbols);
        if (!l.is_const() && !r.is_const()) {
          throw Error("SemanticError", "uncertainty rows must be linear in probability symbols",
                      e.loc.to_string());
        }
        const LinForm& lin = l.is_const() ? r : l;
        const Rational k = l.is_const() ? l.constant : r.constant;
        LinForm f;
        if (k != 0) {
          for (const auto& [s, c] : lin.coeffs) f.coeffs[s] = k * c;
        }
        f.constant = k * lin.constant;
        return f;
      }
      if (e.bin_op == dsl::BinOp::Div) {
        LinForm l = eval_linear(*e.args[0], env, symbols);
        LinForm r = eval_linear(*e.args[1], env, symbols);
        if (!r.is_const()) {
          throw Error("SemanticError", "cannot divide by a probability symbol",
                      e.loc.to_string());
        }
        if (r.constant == 0) {
          throw Error("DivisionByZero", "division by zero", e.loc.to_string());
        }
        for (auto& [s, c] : l.coeffs) c /= r.constant;
        l.constant /= r.constant;
        return l;
      }
      break;
    }
    default:
      break;
  }
  // Everything else (comparisons, max/min/abs, matrix lookups, plain names)
  // must evaluate to a per-state constant so rows stay linear.
  if (mentions_symbol(e, symbols)) {
    throw Error("SemanticError",
                "probability symbols may not appear under this operator in an uncertainty row",
                e.loc.to_string());
  }
  LinForm f;
  f.constant = eval(e, env);
  return f;
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin projection

// sum coeffs . x <= bound over named variables.
struct FmRow {
  std::map<std::string, Rational> coeffs;
  Rational bound;
};

void fm_normalize(std::vector<FmRow>& rows, const std::string& locus) {
  std::map<std::map<std::string, Rational>, Rational> best;
  for (auto& row : rows) {
    for (auto it = row.coeffs.begin(); it != row.coeffs.end();) {
      it = it->second == 0 ? row.coeffs.erase(it) : std::next(it);
    }
    if (row.coeffs.empty()) {
      if (row.bound < 0) {
        throw Error("EmptyPolytope", "uncertainty rows are contradictory", locus);
      }
      continue;  // trivially true
    }
    const Rational scale = [&] {
      Rational a = row.coeffs.begin()->second;
      return a < 0 ? -a : a;
    }();
    for (auto& [s, c] : row.coeffs) c /= scale;
    row.bound /= scale;
    auto [it, inserted] = best.emplace(row.coeffs, row.bound);
    if (!inserted) it->second = std::min(it->second, row.bound);
  }
  rows.clear();
  for (auto& [coeffs, bound] : best) rows.push_back({coeffs, bound});
}

std::vector<FmRow> fm_eliminate(std::vector<FmRow> rows, const std::string& var,
                                const std::string& locus) {
  std::vector<FmRow> pos, neg, out;
  for (auto& row : rows) {
    auto it = row.coeffs.find(var);
    if (it == row.coeffs.end() || it->second == 0) {
      row.coeffs.erase(var);
      out.push_back(std::move(row));
    } else if (it->second > 0) {
      pos.push_back(std::move(row));
    } else {
      neg.push_back(std::move(row));
    }
  }
  for (const auto& p : pos) {
    const Rational cp = p.coeffs.at(var);
    for (const auto& q : neg) {
      const Rational cq = q.coeffs.at(var);  // negative
      FmRow combined;
      for (const auto& [s, c] : p.coeffs) {
        if (s != var) combined.coeffs[s] += -cq * c;
      }
      for (const auto& [s, c] : q.coeffs) {
        if (s != var) combined.coeffs[s] += cp * c;
      }
      combined.bound = -cq * p.bound + cp * q.bound;
      out.push_back(std::move(combined));
    }
  }
  fm_normalize(out, locus);
  return out;
}

// ---------------------------------------------------------------------------

Compiled compile_decls(const dsl::ModelAst& ast) {
  Compiled model;
  Env cenv{&model, nullptr};

  for (const auto& c : ast.constants) {
    Rational v = eval(*c.value, cenv);
    if (c.type == "int" && denominator(v) != 1) {
      throw Error("SemanticError", "constant '" + c.name + "' declared int but not integral",
                  c.loc.to_string());
    }
    model.constants.emplace(c.name, std::move(v));
  }
  for (const auto& m : ast.matrices) {
    std::vector<std::vector<Rational>> grid;
    for (const auto& row : m.rows) {
      std::vector<Rational> r;
      for (const auto& e : row) r.push_back(eval(*e, cenv));
      grid.push_back(std::move(r));
    }
    model.matrices.emplace(m.name, std::move(grid));
  }
  for (const auto& v : ast.variables) {
    model.var_index.emplace(v.name, model.vars.size());
    model.vars.push_back(v);
  }
  for (const auto& p : ast.players) {
    for (const auto& l : p.labels) model.label_owner.emplace(l, p.player);
  }
  return model;
}

struct VarSpec {
  Rational lo, hi;  // integral; bools use [0,1]
};

std::vector<VarSpec> compile_var_specs(const Compiled& model) {
  Env cenv{&model, nullptr};
  std::vector<VarSpec> specs;
  for (const auto& v : model.vars) {
    VarSpec spec;
    if (v.is_bool) {
      spec.lo = 0;
      spec.hi = 1;
    } else {
      spec.lo = eval(*v.lo, cenv);
      spec.hi = eval(*v.hi, cenv);
      if (denominator(spec.lo) != 1 || denominator(spec.hi) != 1 || spec.lo > spec.hi) {
        throw Error("SemanticError", "variable '" + v.name + "' has a malformed range",
                    v.loc.to_string());
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::string state_name(const Compiled& model, const std::vector<Rational>& valuation) {
  std::ostringstream out;
  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    if (i) out << ",";
    out << model.vars[i].name << "=" << numerator(valuation[i]).str();
  }
  return out.str();
}

std::vector<Rational> valuation_from_name(const Compiled& model, const std::string& name) {
  std::vector<Rational> valuation(model.vars.size(), Rational(0));
  std::stringstream ss(name);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw Error("BadState", "malformed state name '" + name + "'");
    const std::string var = part.substr(0, eq);
    auto it = model.var_index.find(var);
    if (it == model.var_index.end()) {
      throw Error("BadState", "state name references unknown variable '" + var + "'");
    }
    valuation[it->second] = parse_rational(part.substr(eq + 1));
  }
  return valuation;
}

}  // namespace

PSG expand(const dsl::ModelAst& ast, const ExpandOptions& opts) {
  Compiled model = compile_decls(ast);
  const auto specs = compile_var_specs(model);

  for (const auto& cmd : ast.commands) {
    if (!model.label_owner.count(cmd.label)) {
      throw Error("SemanticError", "command label '" + cmd.label + "' is not assigned a player",
                  cmd.loc.to_string());
    }
  }

  // Initial valuation.
  std::vector<Rational> init;
  {
    Env cenv{&model, nullptr};
    for (std::size_t i = 0; i < model.vars.size(); ++i) {
      Rational v = eval(*model.vars[i].init, cenv);
      if (denominator(v) != 1 || v < specs[i].lo || v > specs[i].hi) {
        throw Error("SemanticError",
                    "initial value of '" + model.vars[i].name + "' outside its range",
                    model.vars[i].loc.to_string());
      }
      init.push_back(std::move(v));
    }
  }

  PSG game;
  std::map<std::vector<Rational>, std::size_t> index;
  std::deque<std::vector<Rational>> queue;

  auto discover = [&](std::vector<Rational> valuation) -> std::string {
    auto it = index.find(valuation);
    if (it != index.end()) return game.states[it->second];
    if (game.states.size() >= opts.max_states) {
      throw Error("Unbounded", "state exploration exceeded the cap of " +
                                   std::to_string(opts.max_states) + " states");
    }
    std::string name = state_name(model, valuation);
    index.emplace(valuation, game.states.size());
    game.states.push_back(name);
    queue.push_back(std::move(valuation));
    return name;
  };

  game.initial = discover(init);

  while (!queue.empty()) {
    const std::vector<Rational> valuation = std::move(queue.front());
    queue.pop_front();
    const std::string name = state_name(model, valuation);
    Env env{&model, &valuation};

    std::vector<const dsl::Command*> enabled;
    for (const auto& cmd : ast.commands) {
      if (truthy(eval(*cmd.guard, env))) enabled.push_back(&cmd);
    }

    // Reward: sum of matching reward items.
    Rational reward(0);
    for (const auto& r : ast.rewards) {
      if (truthy(eval(*r.predicate, env))) reward += eval(*r.value, env);
    }
    if (reward != 0) game.reward[name] = reward;

    if (enabled.empty()) {
      game.owner[name] = Player::Box;
      game.terminals.insert(name);
      game.theta[name].push_back(dirac_polytope(name));
      continue;
    }

    Player owner = model.label_owner.at(enabled.front()->label);
    for (const auto* cmd : enabled) {
      if (model.label_owner.at(cmd->label) != owner) {
        throw Error("MixedOwners",
                    "state enables commands of both players ('" + enabled.front()->label +
                        "' vs '" + cmd->label + "')",
                    "state " + name);
      }
    }
    game.owner[name] = owner;

    for (const auto* cmd : enabled) {
      const std::string locus = "state " + name + ", command " + cmd->label;

      // Successor valuation per branch; branches landing on the same state
      // are grouped so their symbols get summed.
      std::vector<std::string> support;                       // first-occurrence order
      std::map<std::string, std::vector<std::size_t>> group;  // state -> branch ids
      std::vector<std::string> branch_target(cmd->branches.size());
      for (std::size_t bi = 0; bi < cmd->branches.size(); ++bi) {
        std::vector<Rational> next = valuation;
        for (const auto& u : cmd->branches[bi].updates) {
          const std::size_t vi = model.var_index.at(u.var);
          Rational v = eval(*u.value, env);  // RHS over the source state
          if (denominator(v) != 1 || v < specs[vi].lo || v > specs[vi].hi) {
            throw Error("VarOutOfRange",
                        "update drives '" + u.var + "' outside its range", locus);
          }
          next[vi] = std::move(v);
        }
        const std::string succ = discover(std::move(next));
        branch_target[bi] = succ;
        auto [it, inserted] = group.emplace(succ, std::vector<std::size_t>{bi});
        if (!inserted) {
          it->second.push_back(bi);
        } else {
          support.push_back(succ);
        }
      }
      // group insertion above appends to support on first occurrence only.

      std::vector<LinearConstraint> constraints;
      if (cmd->uncertainty.empty()) {
        // Certain command: exact literal distribution, pinned by equalities.
        std::map<std::string, Rational> prob;
        Rational sum(0);
        for (std::size_t bi = 0; bi < cmd->branches.size(); ++bi) {
          Rational p = cmd->branches[bi].prob ? eval(*cmd->branches[bi].prob, env) : Rational(1);
          if (p < 0) throw Error("BadProbability", "negative branch probability", locus);
          prob[branch_target[bi]] += p;
          sum += p;
        }
        if (sum != 1) {
          throw Error("ProbSumNotOne", "branch probabilities sum to " + rational_to_string(sum),
                      locus);
        }
        std::vector<std::string> positive;
        for (const auto& s : support) {
          if (prob[s] != 0) positive.push_back(s);
        }
        for (const auto& s : positive) {
          constraints.push_back({{{s, Rational(1)}}, Rel::Eq, prob[s]});
        }
        try {
          game.theta[name].emplace_back(positive, std::move(constraints));
        } catch (const Error& err) {
          throw Error(err.code(), err.what(), locus);
        }
        continue;
      }

      // Uncertain command: rows over the branch symbols, then exact
      // projection onto the per-successor sums.
      std::set<std::string> symbols;
      std::vector<std::string> symbol_of(cmd->branches.size());
      for (std::size_t bi = 0; bi < cmd->branches.size(); ++bi) {
        symbol_of[bi] = cmd->branches[bi].prob->name;
        symbols.insert(symbol_of[bi]);
      }

      std::vector<FmRow> rows;
      auto push_le = [&](const LinForm& lin) {
        FmRow row;
        row.coeffs = lin.coeffs;
        row.bound = -lin.constant;
        rows.push_back(std::move(row));
      };
      for (const auto& r : cmd->uncertainty) {
        LinForm lhs = eval_linear(*r.lhs, env, symbols);
        LinForm rhs = eval_linear(*r.rhs, env, symbols);
        LinForm diff;  // lhs - rhs
        diff = lhs;
        for (const auto& [s, c] : rhs.coeffs) {
          diff.coeffs[s] -= c;
          if (diff.coeffs[s] == 0) diff.coeffs.erase(s);
        }
        diff.constant -= rhs.constant;
        switch (r.rel) {
          case Rel::Le:
            push_le(diff);
            break;
          case Rel::Ge: {
            LinForm neg;
            for (const auto& [s, c] : diff.coeffs) neg.coeffs[s] = -c;
            neg.constant = -diff.constant;
            push_le(neg);
            break;
          }
          case Rel::Eq: {
            push_le(diff);
            LinForm neg;
            for (const auto& [s, c] : diff.coeffs) neg.coeffs[s] = -c;
            neg.constant = -diff.constant;
            push_le(neg);
            break;
          }
        }
      }
      for (const auto& sym : symbols) {  // p >= 0
        FmRow row;
        row.coeffs[sym] = Rational(-1);
        row.bound = Rational(0);
        rows.push_back(std::move(row));
      }

      // Substitute the group representative: rep_j = mu_j - sum(others_j).
      // The sum row Sigma p = 1 turns into the implicit simplex row of the
      // projected polytope and is dropped.
      for (const auto& succ : support) {
        const auto& members = group.at(succ);
        const std::string rep = symbol_of[members.front()];
        for (auto& row : rows) {
          auto it = row.coeffs.find(rep);
          if (it == row.coeffs.end()) continue;
          const Rational c = it->second;
          row.coeffs.erase(it);
          row.coeffs[succ] += c;
          for (std::size_t k = 1; k < members.size(); ++k) {
            row.coeffs[symbol_of[members[k]]] -= c;
          }
        }
      }
      try {
        fm_normalize(rows, locus);
        for (const auto& succ : support) {
          const auto& members = group.at(succ);
          for (std::size_t k = 1; k < members.size(); ++k) {
            rows = fm_eliminate(std::move(rows), symbol_of[members[k]], locus);
          }
        }
        for (const auto& row : rows) {
          LinearConstraint c;
          c.coeffs.insert(row.coeffs.begin(), row.coeffs.end());
          c.rel = Rel::Le;
          c.bound = row.bound;
          constraints.push_back(std::move(c));
        }
        game.theta[name].emplace_back(support, std::move(constraints));
      } catch (const Error& err) {
        if (err.code() == "EmptyPolytope") throw Error(err.code(), err.what(), locus);
        throw;
      }
    }
  }
  return game;
}

std::set<std::string> resolve_goal(const dsl::ModelAst& ast,
                                   const std::vector<std::string>& states,
                                   const std::string& predicate) {
  const ExprPtr expr = dsl::parse_expression(predicate);
  Compiled model = compile_decls(ast);
  std::set<std::string> goal;
  for (const auto& name : states) {
    const std::vector<Rational> valuation = valuation_from_name(model, name);
    Env env{&model, &valuation};
    if (truthy(eval(*expr, env))) goal.insert(name);
  }
  if (goal.empty()) {
    throw Error("BadObjective", "goal predicate '" + predicate + "' matches no state");
  }
  return goal;
}

}  // namespace polygame
