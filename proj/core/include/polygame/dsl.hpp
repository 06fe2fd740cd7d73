#pragma once

#include <polygame/game.hpp>
#include <polygame/rational.hpp>

#include <memory>
#include <string>
#include <vector>

// PRISM-Games-style modeling language extended with uncertainty blocks of
// linear inequalities over symbolic branch probabilities. See docs/dsl.md for
// the grammar; file extension `.psg`, UTF-8, `//` line comments.

namespace polygame::dsl {

struct SourceLoc {
  std::size_t line = 0;
  std::size_t col = 0;

  std::string to_string() const {
    return "line " + std::to_string(line) + ", col " + std::to_string(col);
  }
};

enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Neg, Not };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Bool, Ident, Unary, Binary, Call, MatrixRef };

  Kind kind = Kind::Number;
  SourceLoc loc;
  Rational number;          // Number
  bool bval = false;        // Bool
  std::string name;         // Ident, Call (max/min/abs), MatrixRef
  UnOp un_op = UnOp::Neg;   // Unary
  BinOp bin_op = BinOp::Add;  // Binary
  std::vector<ExprPtr> args;  // operands / call args / matrix indices
};

ExprPtr make_number(Rational value, SourceLoc loc = {});
ExprPtr make_bool(bool value, SourceLoc loc = {});
ExprPtr make_ident(std::string name, SourceLoc loc = {});
ExprPtr make_unary(UnOp op, ExprPtr inner, SourceLoc loc = {});
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc = {});
ExprPtr make_call(std::string fn, std::vector<ExprPtr> args, SourceLoc loc = {});
ExprPtr make_matrix_ref(std::string name, ExprPtr row, ExprPtr col, SourceLoc loc = {});

struct ConstDecl {
  std::string name;
  std::string type;  // "int", "double", or "" when unannotated
  ExprPtr value;
  SourceLoc loc;
};

struct MatrixDecl {
  std::string name;
  std::vector<std::vector<ExprPtr>> rows;
  SourceLoc loc;
};

struct VarDecl {
  std::string name;
  bool is_bool = false;
  ExprPtr lo, hi;  // int range; null for bool
  ExprPtr init;
  SourceLoc loc;
};

struct PlayerDecl {
  Player player = Player::Box;
  std::vector<std::string> labels;
  SourceLoc loc;
};

struct RewardDecl {
  ExprPtr predicate;
  ExprPtr value;
  SourceLoc loc;
};

struct Assignment {
  std::string var;
  ExprPtr value;
};

/// One probabilistic option of a command. `prob` is null for the Dirac
/// shorthand `[a] guard -> update;`. With an uncertainty block present every
/// prob must be a bare symbol; without one, probs are constant expressions.
struct Branch {
  ExprPtr prob;
  std::vector<Assignment> updates;  // empty encodes the identity update `true`
};

struct IneqRow {
  ExprPtr lhs;
  Rel rel = Rel::Ge;
  ExprPtr rhs;
};

struct Command {
  std::string label;
  ExprPtr guard;
  std::vector<Branch> branches;
  std::vector<IneqRow> uncertainty;  // empty when the command is certain
  SourceLoc loc;
};

struct ModelAst {
  std::vector<ConstDecl> constants;
  std::vector<MatrixDecl> matrices;
  std::vector<VarDecl> variables;
  std::vector<PlayerDecl> players;
  std::vector<RewardDecl> rewards;
  std::vector<Command> commands;
};

/// Parses a model. Errors: Error("SyntaxError") with line/column,
/// Error("DuplicateLabel"), Error("UnknownIdentifier") for references to
/// undeclared names (branch symbols are in scope inside their own command
/// when it carries an uncertainty block), Error("SemanticError") for symbolic
/// probabilities without a block and malformed declarations.
ModelAst parse(const std::string& source);

/// Parses a single expression; used for --reach state predicates.
ExprPtr parse_expression(const std::string& source);

/// Canonical pretty-printer: print(parse(print(ast))) == print(ast).
std::string print(const ModelAst& ast);

/// Decimal rendering of a rational whose reduced denominator divides a power
/// of ten (always the case for parsed literals); falls back to num/den.
std::string literal_to_string(const Rational& value);

}  // namespace polygame::dsl
