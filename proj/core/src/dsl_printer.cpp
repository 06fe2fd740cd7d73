#include <polygame/dsl.hpp>

#include <sstream>

namespace polygame::dsl {

std::string literal_to_string(const Rational& value) {
  using boost::multiprecision::mpz_int;
  if (value < 0) return "-" + literal_to_string(-value);
  mpz_int num = numerator(value);
  mpz_int den = denominator(value);
  if (den == 1) return num.str();
  // Decimal form exists iff the reduced denominator is 2^a * 5^b.
  mpz_int d = den;
  std::size_t twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return num.str() + " / " + den.str();  // reparses as division
  const std::size_t digits = std::max(twos, fives);
  mpz_int scale = 1;
  for (std::size_t i = 0; i < digits; ++i) scale *= 10;
  mpz_int scaled = num * (scale / den);
  std::string s = scaled.str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return s;
}

namespace {

// Precedence levels used both for parsing and for parenthesis elision.
int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary:
      switch (e.bin_op) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 3;
        case BinOp::Add:
        case BinOp::Sub: return 4;
        case BinOp::Mul:
        case BinOp::Div: return 5;
      }
      return 5;
    case Expr::Kind::Unary: return 6;
    default: return 7;
  }
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&";
    case BinOp::Or: return "|";
  }
  return "+";
}

void print_expr(std::ostream& out, const Expr& e, int parent_prec) {
  const int prec = precedence(e);
  const bool parens = prec < parent_prec;
  if (parens) out << "(";
  switch (e.kind) {
    case Expr::Kind::Number:
      out << literal_to_string(e.number);
      break;
    case Expr::Kind::Bool:
      out << (e.bval ? "true" : "false");
      break;
    case Expr::Kind::Ident:
      out << e.name;
      break;
    case Expr::Kind::Unary:
      out << (e.un_op == UnOp::Neg ? "-" : "!");
      print_expr(out, *e.args[0], 6);
      break;
    case Expr::Kind::Binary:
      print_expr(out, *e.args[0], prec);
      out << " " << op_text(e.bin_op) << " ";
      print_expr(out, *e.args[1], prec + 1);
      break;
    case Expr::Kind::Call:
      out << e.name << "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out << ", ";
        print_expr(out, *e.args[i], 0);
      }
      out << ")";
      break;
    case Expr::Kind::MatrixRef:
      out << e.name << "[";
      print_expr(out, *e.args[0], 0);
      out << ", ";
      print_expr(out, *e.args[1], 0);
      out << "]";
      break;
  }
  if (parens) out << ")";
}

std::string expr_str(const ExprPtr& e) {
  std::ostringstream out;
  print_expr(out, *e, 0);
  return out.str();
}

void print_update(std::ostream& out, const std::vector<Assignment>& updates) {
  if (updates.empty()) {
    out << "true";
    return;
  }
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (i) out << " & ";
    out << "(" << updates[i].var << "'=";
    print_expr(out, *updates[i].value, 0);
    out << ")";
  }
}

}  // namespace

std::string print(const ModelAst& ast) {
  std::ostringstream out;
  bool wrote = false;
  auto section_break = [&] {
    if (wrote) out << "\n";
    wrote = true;
  };

  if (!ast.constants.empty()) {
    section_break();
    for (const auto& c : ast.constants) {
      out << "const " << (c.type.empty() ? "" : c.type + " ") << c.name << " = "
          << expr_str(c.value) << ";\n";
    }
  }
  if (!ast.matrices.empty()) {
    section_break();
    for (const auto& m : ast.matrices) {
      out << "matrix " << m.name << " = [\n";
      for (std::size_t r = 0; r < m.rows.size(); ++r) {
        out << "  [";
        for (std::size_t c = 0; c < m.rows[r].size(); ++c) {
          if (c) out << ", ";
          out << expr_str(m.rows[r][c]);
        }
        out << "]" << (r + 1 < m.rows.size() ? "," : "") << "\n";
      }
      out << "];\n";
    }
  }
  if (!ast.variables.empty()) {
    section_break();
    for (const auto& v : ast.variables) {
      out << "var " << v.name << " : ";
      if (v.is_bool) {
        out << "bool";
      } else {
        out << "[" << expr_str(v.lo) << ".." << expr_str(v.hi) << "]";
      }
      out << " init " << expr_str(v.init) << ";\n";
    }
  }
  if (!ast.players.empty()) {
    section_break();
    for (const auto& p : ast.players) {
      out << "player " << player_to_string(p.player) << " ";
      for (std::size_t i = 0; i < p.labels.size(); ++i) {
        if (i) out << ", ";
        out << "[" << p.labels[i] << "]";
      }
      out << ";\n";
    }
  }
  if (!ast.rewards.empty()) {
    section_break();
    for (const auto& r : ast.rewards) {
      out << "reward " << expr_str(r.predicate) << " : " << expr_str(r.value) << ";\n";
    }
  }
  if (!ast.commands.empty()) {
    section_break();
    for (const auto& cmd : ast.commands) {
      out << "[" << cmd.label << "] " << expr_str(cmd.guard) << " ->";
      const bool multiline = cmd.branches.size() > 1 || !cmd.uncertainty.empty();
      if (!multiline) {
        out << " ";
        const auto& b = cmd.branches[0];
        if (b.prob) {
          print_expr(out, *b.prob, 0);
          out << " : ";
        }
        print_update(out, b.updates);
      } else {
        for (std::size_t i = 0; i < cmd.branches.size(); ++i) {
          out << "\n  " << (i ? "+ " : "");
          const auto& b = cmd.branches[i];
          if (b.prob) {
            print_expr(out, *b.prob, 0);
            out << " : ";
          }
          print_update(out, b.updates);
        }
        if (!cmd.uncertainty.empty()) {
          out << "\n  {\n";
          for (std::size_t i = 0; i < cmd.uncertainty.size(); ++i) {
            out << "    " << expr_str(cmd.uncertainty[i].lhs) << " "
                << rel_to_string(cmd.uncertainty[i].rel) << " "
                << expr_str(cmd.uncertainty[i].rhs)
                << (i + 1 < cmd.uncertainty.size() ? "," : "") << "\n";
          }
          out << "  }";
        }
      }
      out << ";\n";
    }
  }
  return out.str();
}

}  // namespace polygame::dsl
