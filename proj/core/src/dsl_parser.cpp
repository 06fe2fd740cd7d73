#include <polygame/errors.hpp>

#include <map>
#include <set>

#include "dsl_internal.hpp"

namespace polygame::dsl {

ExprPtr make_number(Rational value, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Number;
  e->number = std::move(value);
  e->loc = loc;
  return e;
}

ExprPtr make_bool(bool value, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Bool;
  e->bval = value;
  e->loc = loc;
  return e;
}

ExprPtr make_ident(std::string name, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Ident;
  e->name = std::move(name);
  e->loc = loc;
  return e;
}

ExprPtr make_unary(UnOp op, ExprPtr inner, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Unary;
  e->un_op = op;
  e->args = {std::move(inner)};
  e->loc = loc;
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->bin_op = op;
  e->args = {std::move(lhs), std::move(rhs)};
  e->loc = loc;
  return e;
}

ExprPtr make_call(std::string fn, std::vector<ExprPtr> args, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Call;
  e->name = std::move(fn);
  e->args = std::move(args);
  e->loc = loc;
  return e;
}

ExprPtr make_matrix_ref(std::string name, ExprPtr row, ExprPtr col, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::MatrixRef;
  e->name = std::move(name);
  e->args = {std::move(row), std::move(col)};
  e->loc = loc;
  return e;
}

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ExprPtr run_expression() {
    ExprPtr e = parse_expr();
    if (peek().kind != TokKind::End) fail("trailing input after expression");
    return e;
  }

  ModelAst run() {
    ModelAst ast;
    while (peek().kind != TokKind::End) {
      const Token& t = peek();
      if (t.kind == TokKind::LBracket) {
        parse_command(ast);
      } else if (t.kind == TokKind::Ident) {
        if (t.text == "const") {
          parse_const(ast);
        } else if (t.text == "matrix") {
          parse_matrix(ast);
        } else if (t.text == "var") {
          parse_var(ast);
        } else if (t.text == "player") {
          parse_player(ast);
        } else if (t.text == "reward") {
          parse_reward(ast);
        } else {
          fail("expected a declaration or a command, found '" + t.text + "'");
        }
      } else {
        fail("expected a declaration or a command");
      }
    }
    resolve(ast);
    return ast;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& advance() { return toks_[pos_++]; }
  bool accept(TokKind kind) {
    if (peek().kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(TokKind kind, const std::string& what) {
    if (peek().kind != kind) fail("expected " + what + ", found '" + peek().text + "'");
    return advance();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("SyntaxError", msg, peek().loc.to_string());
  }

  // Labels may contain '-' (e.g. robl-cont); the pieces lex as separate
  // tokens and are re-joined here, in label position only.
  std::string parse_label() {
    std::string label = expect(TokKind::Ident, "a label").text;
    while (peek().kind == TokKind::Minus &&
           (peek(1).kind == TokKind::Ident || peek(1).kind == TokKind::Number)) {
      advance();
      label += "-" + advance().text;
    }
    return label;
  }

  void parse_const(ModelAst& ast) {
    ConstDecl decl;
    decl.loc = peek().loc;
    advance();  // const
    if (peek().kind == TokKind::Ident && (peek().text == "int" || peek().text == "double")) {
      decl.type = advance().text;
    }
    decl.name = expect(TokKind::Ident, "a constant name").text;
    expect(TokKind::Eq, "'='");
    decl.value = parse_expr();
    expect(TokKind::Semicolon, "';'");
    ast.constants.push_back(std::move(decl));
  }

  void parse_matrix(ModelAst& ast) {
    MatrixDecl decl;
    decl.loc = peek().loc;
    advance();  // matrix
    decl.name = expect(TokKind::Ident, "a matrix name").text;
    expect(TokKind::Eq, "'='");
    expect(TokKind::LBracket, "'['");
    do {
      expect(TokKind::LBracket, "'[' starting a matrix row");
      std::vector<ExprPtr> row;
      do {
        row.push_back(parse_expr());
      } while (accept(TokKind::Comma));
      expect(TokKind::RBracket, "']' ending a matrix row");
      decl.rows.push_back(std::move(row));
    } while (accept(TokKind::Comma));
    expect(TokKind::RBracket, "']'");
    expect(TokKind::Semicolon, "';'");
    for (const auto& row : decl.rows) {
      if (row.size() != decl.rows[0].size()) {
        throw Error("SemanticError", "matrix '" + decl.name + "' rows differ in length",
                    decl.loc.to_string());
      }
    }
    ast.matrices.push_back(std::move(decl));
  }

  void parse_var(ModelAst& ast) {
    VarDecl decl;
    decl.loc = peek().loc;
    advance();  // var
    decl.name = expect(TokKind::Ident, "a variable name").text;
    expect(TokKind::Colon, "':'");
    if (peek().kind == TokKind::Ident && peek().text == "bool") {
      advance();
      decl.is_bool = true;
    } else {
      expect(TokKind::LBracket, "'[' or 'bool'");
      decl.lo = parse_expr();
      expect(TokKind::DotDot, "'..'");
      decl.hi = parse_expr();
      expect(TokKind::RBracket, "']'");
    }
    if (!(peek().kind == TokKind::Ident && peek().text == "init")) fail("expected 'init'");
    advance();
    decl.init = parse_expr();
    expect(TokKind::Semicolon, "';'");
    ast.variables.push_back(std::move(decl));
  }

  void parse_player(ModelAst& ast) {
    PlayerDecl decl;
    decl.loc = peek().loc;
    advance();  // player
    const Token& who = expect(TokKind::Ident, "'box' or 'diamond'");
    if (who.text == "box") {
      decl.player = Player::Box;
    } else if (who.text == "diamond") {
      decl.player = Player::Diamond;
    } else {
      fail("expected 'box' or 'diamond', found '" + who.text + "'");
    }
    do {
      expect(TokKind::LBracket, "'['");
      decl.labels.push_back(parse_label());
      expect(TokKind::RBracket, "']'");
    } while (accept(TokKind::Comma));
    expect(TokKind::Semicolon, "';'");
    ast.players.push_back(std::move(decl));
  }

  void parse_reward(ModelAst& ast) {
    RewardDecl decl;
    decl.loc = peek().loc;
    advance();  // reward
    decl.predicate = parse_expr();
    expect(TokKind::Colon, "':'");
    decl.value = parse_expr();
    expect(TokKind::Semicolon, "';'");
    ast.rewards.push_back(std::move(decl));
  }

  void parse_command(ModelAst& ast) {
    Command cmd;
    cmd.loc = peek().loc;
    expect(TokKind::LBracket, "'['");
    cmd.label = parse_label();
    expect(TokKind::RBracket, "']'");
    cmd.guard = parse_expr();
    expect(TokKind::Arrow, "'->'");

    if (starts_update()) {
      Branch b;
      b.updates = parse_update();
      cmd.branches.push_back(std::move(b));
    } else {
      do {
        Branch b;
        b.prob = parse_expr();
        expect(TokKind::Colon, "':'");
        b.updates = parse_update();
        cmd.branches.push_back(std::move(b));
      } while (accept(TokKind::Plus));
    }

    if (accept(TokKind::LBrace)) {
      do {
        IneqRow row;
        row.lhs = parse_expr();
        switch (peek().kind) {
          case TokKind::Le: row.rel = Rel::Le; break;
          case TokKind::Ge: row.rel = Rel::Ge; break;
          case TokKind::Eq: row.rel = Rel::Eq; break;
          default: fail("expected '<=', '>=' or '=' in an uncertainty row");
        }
        advance();
        row.rhs = parse_expr();
        cmd.uncertainty.push_back(std::move(row));
      } while (accept(TokKind::Comma));
      expect(TokKind::RBrace, "'}'");
    }
    expect(TokKind::Semicolon, "';'");
    ast.commands.push_back(std::move(cmd));
  }

  bool starts_update() const {
    if (peek().kind == TokKind::Ident && peek().text == "true") return true;
    return peek().kind == TokKind::LParen && peek(1).kind == TokKind::Ident &&
           peek(2).kind == TokKind::Prime;
  }

  std::vector<Assignment> parse_update() {
    std::vector<Assignment> updates;
    if (peek().kind == TokKind::Ident && peek().text == "true") {
      advance();
      return updates;  // identity update
    }
    std::set<std::string> assigned;
    do {
      expect(TokKind::LParen, "'('");
      Assignment a;
      a.var = expect(TokKind::Ident, "a variable name").text;
      expect(TokKind::Prime, "'''");
      expect(TokKind::Eq, "'='");
      a.value = parse_expr();
      expect(TokKind::RParen, "')'");
      if (!assigned.insert(a.var).second) {
        throw Error("SemanticError", "variable '" + a.var + "' assigned twice in one update",
                    peek().loc.to_string());
      }
      updates.push_back(std::move(a));
    } while (accept(TokKind::And));
    return updates;
  }

  // Precedence: | < & < comparisons < +- < */ < unary < primary.
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (peek().kind == TokKind::Or) {
      const SourceLoc loc = advance().loc;
      e = make_binary(BinOp::Or, std::move(e), parse_and(), loc);
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (peek().kind == TokKind::And) {
      const SourceLoc loc = advance().loc;
      e = make_binary(BinOp::And, std::move(e), parse_cmp(), loc);
    }
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    while (true) {
      BinOp op;
      switch (peek().kind) {
        case TokKind::Eq: op = BinOp::Eq; break;
        case TokKind::Ne: op = BinOp::Ne; break;
        case TokKind::Lt: op = BinOp::Lt; break;
        case TokKind::Le: op = BinOp::Le; break;
        case TokKind::Gt: op = BinOp::Gt; break;
        case TokKind::Ge: op = BinOp::Ge; break;
        default: return e;
      }
      const SourceLoc loc = advance().loc;
      e = make_binary(op, std::move(e), parse_add(), loc);
    }
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (peek().kind == TokKind::Plus || peek().kind == TokKind::Minus) {
      const BinOp op = peek().kind == TokKind::Plus ? BinOp::Add : BinOp::Sub;
      const SourceLoc loc = advance().loc;
      e = make_binary(op, std::move(e), parse_mul(), loc);
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary_expr();
    while (peek().kind == TokKind::Star || peek().kind == TokKind::Slash) {
      const BinOp op = peek().kind == TokKind::Star ? BinOp::Mul : BinOp::Div;
      const SourceLoc loc = advance().loc;
      e = make_binary(op, std::move(e), parse_unary_expr(), loc);
    }
    return e;
  }

  ExprPtr parse_unary_expr() {
    if (peek().kind == TokKind::Minus) {
      const SourceLoc loc = advance().loc;
      return make_unary(UnOp::Neg, parse_unary_expr(), loc);
    }
    if (peek().kind == TokKind::Not) {
      const SourceLoc loc = advance().loc;
      return make_unary(UnOp::Not, parse_unary_expr(), loc);
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Number: {
        advance();
        return make_number(parse_rational(t.text), t.loc);
      }
      case TokKind::LParen: {
        advance();
        ExprPtr e = parse_expr();
        expect(TokKind::RParen, "')'");
        return e;
      }
      case TokKind::Ident: {
        if (t.text == "true" || t.text == "false") {
          advance();
          return make_bool(t.text == "true", t.loc);
        }
        advance();
        if (peek().kind == TokKind::LParen) {
          if (t.text != "max" && t.text != "min" && t.text != "abs") {
            throw Error("SyntaxError", "unknown function '" + t.text + "'", t.loc.to_string());
          }
          advance();
          std::vector<ExprPtr> args;
          do {
            args.push_back(parse_expr());
          } while (accept(TokKind::Comma));
          expect(TokKind::RParen, "')'");
          const std::size_t want = t.text == "abs" ? 1 : 2;
          if (args.size() != want) {
            throw Error("SemanticError",
                        t.text + " takes " + std::to_string(want) + " argument(s)",
                        t.loc.to_string());
          }
          return make_call(t.text, std::move(args), t.loc);
        }
        if (peek().kind == TokKind::LBracket) {
          advance();
          ExprPtr row = parse_expr();
          expect(TokKind::Comma, "','");
          ExprPtr col = parse_expr();
          expect(TokKind::RBracket, "']'");
          return make_matrix_ref(t.text, std::move(row), std::move(col), t.loc);
        }
        return make_ident(t.text, t.loc);
      }
      default:
        fail("expected an expression");
    }
  }

  // -- post-parse resolution ------------------------------------------------

  struct Scope {
    std::set<std::string> values;    // constants and variables
    std::set<std::string> matrices;  // separate namespace (Fig. 3 uses L both ways)
  };

  void resolve_expr(const ExprPtr& e, const Scope& scope, const std::set<std::string>& symbols) {
    switch (e->kind) {
      case Expr::Kind::Number:
      case Expr::Kind::Bool:
        return;
      case Expr::Kind::Ident:
        if (!scope.values.count(e->name) && !symbols.count(e->name)) {
          throw Error("UnknownIdentifier", "reference to undeclared name '" + e->name + "'",
                      e->loc.to_string());
        }
        return;
      case Expr::Kind::MatrixRef:
        if (!scope.matrices.count(e->name)) {
          throw Error("UnknownIdentifier", "reference to undeclared matrix '" + e->name + "'",
                      e->loc.to_string());
        }
        [[fallthrough]];
      case Expr::Kind::Unary:
      case Expr::Kind::Binary:
      case Expr::Kind::Call:
        for (const auto& a : e->args) resolve_expr(a, scope, symbols);
        return;
    }
  }

  void resolve(const ModelAst& ast) {
    Scope scope;
    const std::set<std::string> none;

    for (const auto& c : ast.constants) {
      resolve_expr(c.value, scope, none);  // constants see earlier constants only
      if (!scope.values.insert(c.name).second) {
        throw Error("SemanticError", "duplicate constant '" + c.name + "'", c.loc.to_string());
      }
    }
    for (const auto& m : ast.matrices) {
      for (const auto& row : m.rows) {
        for (const auto& e : row) resolve_expr(e, scope, none);
      }
      if (!scope.matrices.insert(m.name).second) {
        throw Error("SemanticError", "duplicate matrix '" + m.name + "'", m.loc.to_string());
      }
    }
    for (const auto& v : ast.variables) {
      if (v.lo) resolve_expr(v.lo, scope, none);
      if (v.hi) resolve_expr(v.hi, scope, none);
      resolve_expr(v.init, scope, none);
      if (!scope.values.insert(v.name).second) {
        throw Error("SemanticError", "duplicate declaration of '" + v.name + "'",
                    v.loc.to_string());
      }
    }

    std::set<std::string> labels;
    for (const auto& cmd : ast.commands) {
      if (!labels.insert(cmd.label).second) {
        throw Error("DuplicateLabel", "command label '" + cmd.label + "' appears twice",
                    cmd.loc.to_string());
      }
    }
    std::set<std::string> assigned;
    for (const auto& p : ast.players) {
      for (const auto& l : p.labels) {
        if (!labels.count(l)) {
          throw Error("UnknownIdentifier", "player declaration names unknown label '" + l + "'",
                      p.loc.to_string());
        }
        if (!assigned.insert(l).second) {
          throw Error("SemanticError", "label '" + l + "' assigned to two players",
                      p.loc.to_string());
        }
      }
    }

    for (const auto& r : ast.rewards) {
      resolve_expr(r.predicate, scope, none);
      resolve_expr(r.value, scope, none);
    }

    for (const auto& cmd : ast.commands) {
      resolve_expr(cmd.guard, scope, none);

      std::set<std::string> symbols;
      if (!cmd.uncertainty.empty()) {
        for (const auto& b : cmd.branches) {
          if (!b.prob || b.prob->kind != Expr::Kind::Ident ||
              scope.values.count(b.prob->name)) {
            throw Error("SemanticError",
                        "with an uncertainty block every branch probability must be a "
                        "distinct symbol",
                        cmd.loc.to_string());
          }
          if (!symbols.insert(b.prob->name).second) {
            throw Error("SemanticError",
                        "probability symbol '" + b.prob->name + "' used twice",
                        cmd.loc.to_string());
          }
        }
      }

      for (const auto& b : cmd.branches) {
        if (b.prob && cmd.uncertainty.empty()) {
          if (b.prob->kind == Expr::Kind::Ident && !scope.values.count(b.prob->name)) {
            throw Error("SemanticError",
                        "symbolic probability '" + b.prob->name +
                            "' requires an uncertainty block",
                        b.prob->loc.to_string());
          }
          resolve_expr(b.prob, scope, none);
        }
        for (const auto& u : b.updates) {
          if (!scope.values.count(u.var)) {
            throw Error("UnknownIdentifier", "update assigns undeclared variable '" + u.var + "'",
                        cmd.loc.to_string());
          }
          resolve_expr(u.value, scope, none);
        }
      }
      for (const auto& row : cmd.uncertainty) {
        resolve_expr(row.lhs, scope, symbols);
        resolve_expr(row.rhs, scope, symbols);
      }
    }
  }
};

}  // namespace

ModelAst parse(const std::string& source) { return Parser(lex(source)).run(); }

ExprPtr parse_expression(const std::string& source) {
  return Parser(lex(source)).run_expression();
}

}  // namespace polygame::dsl
