#include <polygame/roborta.hpp>

#include <polygame/errors.hpp>

#include <functional>

namespace polygame {

namespace {

using dsl::BinOp;
using dsl::ExprPtr;
using dsl::UnOp;

ExprPtr num(long v) { return dsl::make_number(Rational(v)); }
ExprPtr id(const std::string& name) { return dsl::make_ident(name); }
ExprPtr bin(BinOp op, ExprPtr a, ExprPtr b) {
  return dsl::make_binary(op, std::move(a), std::move(b));
}
ExprPtr land(ExprPtr a, ExprPtr b) { return bin(BinOp::And, std::move(a), std::move(b)); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return bin(BinOp::Eq, std::move(a), std::move(b)); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return bin(BinOp::Sub, std::move(a), std::move(b)); }
ExprPtr add(ExprPtr a, ExprPtr b) { return bin(BinOp::Add, std::move(a), std::move(b)); }
ExprPtr mul(ExprPtr a, ExprPtr b) { return bin(BinOp::Mul, std::move(a), std::move(b)); }
ExprPtr neg(ExprPtr a) { return dsl::make_unary(UnOp::Neg, std::move(a)); }
ExprPtr lnot(ExprPtr a) { return dsl::make_unary(UnOp::Not, std::move(a)); }
ExprPtr maxe(ExprPtr a, ExprPtr b) { return dsl::make_call("max", {std::move(a), std::move(b)}); }
ExprPtr mine(ExprPtr a, ExprPtr b) { return dsl::make_call("min", {std::move(a), std::move(b)}); }
ExprPtr abse(ExprPtr a) { return dsl::make_call("abs", {std::move(a)}); }
ExprPtr mref(const std::string& m, const std::string& x, const std::string& y) {
  return dsl::make_matrix_ref(m, id(x), id(y));
}

// The five-row slide system of the grid benchmark, with coefficients from the
// terrain matrices at the mover's cell.
std::vector<dsl::IneqRow> slide_rows(const std::string& x, const std::string& y) {
  auto Q = [&] { return mref("Q", x, y); };
  auto L = [&] { return mref("L", x, y); };
  auto F = [&] { return mref("F", x, y); };

  std::vector<dsl::IneqRow> rows;
  // 1 - (Q + (1 - (1-|L|)*(1-|F|)) / 2) >= pc
  rows.push_back({sub(num(1), add(Q(), bin(BinOp::Div,
                                           sub(num(1), mul(sub(num(1), abse(L())),
                                                           sub(num(1), abse(F())))),
                                           num(2)))),
                  Rel::Ge, id("pc")});
  // (1 - max(0,-L))*pl - (1-Q)*(1 - max(0,L))*pr >= 0
  rows.push_back({sub(mul(sub(num(1), maxe(num(0), neg(L()))), id("pl")),
                      mul(mul(sub(num(1), Q()), sub(num(1), maxe(num(0), L()))), id("pr"))),
                  Rel::Ge, num(0)});
  // (1 - max(0,L))*pr - (1-Q)*(1 - max(0,-L))*pl >= 0
  rows.push_back({sub(mul(sub(num(1), maxe(num(0), L())), id("pr")),
                      mul(mul(sub(num(1), Q()), sub(num(1), maxe(num(0), neg(L())))), id("pl"))),
                  Rel::Ge, num(0)});
  // (1 - max(0,F))*pf - (1-Q)*(1 - max(0,-F))*pb >= 0
  rows.push_back({sub(mul(sub(num(1), maxe(num(0), F())), id("pf")),
                      mul(mul(sub(num(1), Q()), sub(num(1), maxe(num(0), neg(F())))), id("pb"))),
                  Rel::Ge, num(0)});
  // (1 - max(0,-F))*pb - (1-Q)*(1 - max(0,F))*pf >= 0
  rows.push_back({sub(mul(sub(num(1), maxe(num(0), neg(F()))), id("pb")),
                      mul(mul(sub(num(1), Q()), sub(num(1), maxe(num(0), F()))), id("pf"))),
                  Rel::Ge, num(0)});
  return rows;
}

void check_matrix(const std::string& name, const std::vector<std::vector<Rational>>& m,
                  std::size_t width, std::size_t length, const Rational& lo,
                  const Rational& hi) {
  if (m.size() != width) {
    throw Error("BadTerrainValue", name + " must have " + std::to_string(width) + " rows");
  }
  for (std::size_t x = 0; x < width; ++x) {
    if (m[x].size() != length) {
      throw Error("BadTerrainValue",
                  name + " row " + std::to_string(x) + " must have " + std::to_string(length) +
                      " entries");
    }
    for (std::size_t y = 0; y < length; ++y) {
      if (m[x][y] < lo || m[x][y] > hi) {
        throw Error("BadTerrainValue",
                    name + " entry out of range",
                    name + "[" + std::to_string(x) + "][" + std::to_string(y) + "]");
      }
    }
  }
}

dsl::MatrixDecl matrix_decl(const std::string& name,
                            const std::vector<std::vector<Rational>>& m) {
  dsl::MatrixDecl decl;
  decl.name = name;
  for (const auto& row : m) {
    std::vector<ExprPtr> r;
    for (const auto& v : row) r.push_back(dsl::make_number(v));
    decl.rows.push_back(std::move(r));
  }
  return decl;
}

}  // namespace

dsl::ModelAst generate_roborta(std::size_t width, std::size_t length,
                               const std::vector<std::vector<Rational>>& q,
                               const std::vector<std::vector<Rational>>& l,
                               const std::vector<std::vector<Rational>>& f) {
  if (width < 1 || length < 1) {
    throw Error("BadTerrainValue", "grid must be at least 1x1");
  }
  check_matrix("Q", q, width, length, Rational(0), Rational(1) / 2);
  check_matrix("L", l, width, length, Rational(-1), Rational(1));
  check_matrix("F", f, width, length, Rational(-1), Rational(1));

  dsl::ModelAst ast;
  ast.constants.push_back({"W", "int", num(static_cast<long>(width)), {}});
  ast.constants.push_back({"L", "int", num(static_cast<long>(length)), {}});
  ast.matrices.push_back(matrix_decl("Q", q));
  ast.matrices.push_back(matrix_decl("L", l));
  ast.matrices.push_back(matrix_decl("F", f));

  auto int_var = [&](const std::string& name, ExprPtr lo, ExprPtr hi, ExprPtr init) {
    dsl::VarDecl v;
    v.name = name;
    v.lo = std::move(lo);
    v.hi = std::move(hi);
    v.init = std::move(init);
    ast.variables.push_back(std::move(v));
  };
  int_var("robx", num(0), sub(id("W"), num(1)), num(0));
  int_var("roby", num(0), id("L"), num(0));
  int_var("rigx", num(0), sub(id("W"), num(1)), sub(id("W"), num(1)));
  int_var("rigy", num(0), id("L"), sub(id("L"), num(1)));
  int_var("turn", num(0), num(1), num(0));
  int_var("rob_mov", num(0), num(3), num(0));
  {
    dsl::VarDecl v;
    v.name = "Collision";
    v.is_bool = true;
    v.init = dsl::make_bool(false);
    ast.variables.push_back(std::move(v));
  }

  // Movement targets, clamped at the walls.
  auto rob_left = [&] { return maxe(num(0), sub(id("robx"), num(1))); };
  auto rob_right = [&] { return mine(sub(id("W"), num(1)), add(id("robx"), num(1))); };
  auto rob_fwd = [&] { return mine(id("L"), add(id("roby"), num(1))); };
  auto rob_back = [&] { return maxe(num(0), sub(id("roby"), num(1))); };
  auto rig_left = [&] { return maxe(num(0), sub(id("rigx"), num(1))); };
  auto rig_right = [&] { return mine(sub(id("W"), num(1)), add(id("rigx"), num(1))); };
  auto rig_fwd = [&] { return mine(id("L"), add(id("rigy"), num(1))); };
  auto rig_back = [&] { return maxe(num(0), sub(id("rigy"), num(1))); };

  struct RobMove {
    std::string name;
    long code;
    const char* var;
    std::function<ExprPtr()> target;
  };
  std::vector<RobMove> rob_moves = {
      {"robl", 1, "robx", rob_left},
      {"robr", 2, "robx", rob_right},
      {"robf", 3, "roby", rob_fwd},
  };

  for (const auto& mv : rob_moves) {
    // Decision step: commit the direction and yield the turn.
    dsl::Command decide;
    decide.label = mv.name;
    decide.guard = land(land(eq(id("turn"), num(0)), bin(BinOp::Lt, id("roby"), id("L"))),
                        lnot(id("Collision")));
    {
      dsl::Branch b;
      b.updates = {{"rob_mov", num(mv.code)}, {"turn", num(1)}};
      decide.branches.push_back(std::move(b));
    }
    ast.commands.push_back(std::move(decide));

    // Continuation: the terrain (owned by diamond) resolves the move.
    dsl::Command cont;
    cont.label = mv.name + "-cont";
    cont.guard = land(eq(id("turn"), num(1)), eq(id("rob_mov"), num(mv.code)));
    auto branch = [&](const char* sym, const char* var, ExprPtr target) {
      dsl::Branch b;
      b.prob = id(sym);
      b.updates = {{var, std::move(target)}, {"rob_mov", num(0)}};
      cont.branches.push_back(std::move(b));
    };
    branch("pl", "robx", rob_left());
    branch("pr", "robx", rob_right());
    branch("pf", "roby", rob_fwd());
    branch("pb", "roby", rob_back());
    branch("pc", mv.var, mv.target());
    cont.uncertainty = slide_rows("robx", "roby");
    ast.commands.push_back(std::move(cont));
  }

  struct RigMove {
    std::string name;
    std::function<ExprPtr()> cx;  // updated x position
    std::function<ExprPtr()> cy;  // updated y position
    const char* var;
    std::function<ExprPtr()> target;
  };
  auto cur_x = [&] { return id("rigx"); };
  auto cur_y = [&] { return id("rigy"); };
  std::vector<RigMove> rig_moves = {
      {"rigl", rig_left, cur_y, "rigx", rig_left},
      {"rigr", rig_right, cur_y, "rigx", rig_right},
      {"rigb", cur_x, rig_back, "rigy", rig_back},
  };

  for (const auto& mv : rig_moves) {
    dsl::Command cmd;
    cmd.label = mv.name;
    cmd.guard = land(land(land(eq(id("turn"), num(1)), eq(id("rob_mov"), num(0))),
                          bin(BinOp::Lt, id("rigy"), id("L"))),
                     lnot(id("Collision")));
    // Collision is checked against Rigoborto's position after the step.
    auto branch = [&](const char* sym, const char* var, ExprPtr target, ExprPtr nx, ExprPtr ny) {
      dsl::Branch b;
      b.prob = id(sym);
      b.updates = {{var, std::move(target)},
                   {"turn", num(0)},
                   {"Collision", land(eq(id("robx"), std::move(nx)),
                                      eq(id("roby"), std::move(ny)))}};
      cmd.branches.push_back(std::move(b));
    };
    branch("pl", "rigx", rig_left(), rig_left(), cur_y());
    branch("pr", "rigx", rig_right(), rig_right(), cur_y());
    branch("pf", "rigy", rig_fwd(), cur_x(), rig_fwd());
    branch("pb", "rigy", rig_back(), cur_x(), rig_back());
    branch("pc", mv.var, mv.target(), mv.cx(), mv.cy());
    cmd.uncertainty = slide_rows("rigx", "rigy");
    ast.commands.push_back(std::move(cmd));
  }

  {
    dsl::PlayerDecl box;
    box.player = Player::Box;
    box.labels = {"robl", "robr", "robf"};
    ast.players.push_back(std::move(box));
    dsl::PlayerDecl diamond;
    diamond.player = Player::Diamond;
    diamond.labels = {"robl-cont", "robr-cont", "robf-cont", "rigl", "rigr", "rigb"};
    ast.players.push_back(std::move(diamond));
  }
  return ast;
}

}  // namespace polygame
