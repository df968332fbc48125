#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relcorr/errors.hpp"
#include "relcorr/lexer.hpp"
#include "relcorr/limits.hpp"
#include "relcorr/space.hpp"

namespace relcorr {

// ---------------------------------------------------------------------------
// Expression / predicate AST shared by the spec and program languages.
//
// Statically typed: Int (integers and character codes), Bool, Seq (sequence
// variables, only valid under len and indexing). Evaluation is total over
// int64 with strict arithmetic; failures raise EvalError, which callers fold
// into "pair excluded" or "error path" and tally.
// ---------------------------------------------------------------------------

enum class Type { Int, Bool, Seq };

enum class ExprKind {
  IntLit,
  Var,       // resolved variable reference
  BoundVar,  // quantifier index, slot = depth
  Unary,
  Binary,
  Quant,
  Len,      // len(seq)
  Index,    // seq[expr]
  Builtin,  // character classes and issq
};

enum class BinOp { Add, Sub, Mul, Div, Mod, Pow, And, Or, Eq, Ne, Lt, Le, Gt, Ge };
enum class UnOp { Neg, Not };
enum class QuantKind { Forall, Exists, Count };
enum class BuiltinKind { IsUpper, IsLower, IsDigit, IsSym, IsSq };

struct ExprNode {
  ExprKind kind{};
  Type type = Type::Int;
  std::int64_t value = 0;  // IntLit (includes character literals, by code)
  int a = -1, b = -1, c = -1;
  BinOp bin{};
  UnOp un{};
  QuantKind quant{};
  BuiltinKind builtin{};
  int slot = -1;       // Var: environment slot; BoundVar: quantifier depth
  int space_var = -1;  // Var: index of the space variable, -1 for locals
  bool primed = false;
  bool char_lit = false;  // IntLit written as a character literal
  std::string name;       // Var / Quant: source-level name
};

struct ExprAst {
  std::vector<ExprNode> nodes;
  int root = -1;
  VarMask unprimed_used = 0;  // space variables read from s
  VarMask primed_used = 0;    // space variables read from s'

  const ExprNode& at(int i) const { return nodes[static_cast<std::size_t>(i)]; }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// How identifiers resolve during expression parsing.
struct VarInfo {
  int slot;           // environment slot holding the value
  int space_var;      // space variable index, or -1 for a local
  bool is_seq;
};

struct ExprParserConfig {
  /// Resolves an identifier (primed or not); returns nullopt when unknown.
  std::function<std::optional<VarInfo>(const std::string&, bool primed)>
      resolve;
  bool allow_primed = false;
};

namespace detail {

class ExprParser {
 public:
  ExprParser(TokenCursor& cur, const ExprParserConfig& cfg, ExprAst& out)
      : cur_(cur), cfg_(cfg), out_(out) {}

  int parse_pred() { return parse_or(); }

  int parse_int_expr() {
    int e = parse_or();
    require(e, Type::Int, "integer expression");
    return e;
  }

  int parse_bool_expr() {
    int e = parse_or();
    require(e, Type::Bool, "boolean expression");
    return e;
  }

 private:
  int add_node(ExprNode n) {
    out_.nodes.push_back(std::move(n));
    return static_cast<int>(out_.nodes.size()) - 1;
  }
  Type type_of(int i) const { return out_.nodes[static_cast<std::size_t>(i)].type; }
  void require(int i, Type t, const char* what) {
    if (type_of(i) != t)
      throw ParseError(cur_.peek().pos,
                       std::string("type mismatch: expected ") + what);
  }

  int parse_or() {
    int lhs = parse_and();
    while (cur_.peek().is_punct("||")) {
      cur_.next();
      require(lhs, Type::Bool, "boolean operand of '||'");
      int rhs = parse_and();
      require(rhs, Type::Bool, "boolean operand of '||'");
      ExprNode n;
      n.kind = ExprKind::Binary;
      n.bin = BinOp::Or;
      n.type = Type::Bool;
      n.a = lhs;
      n.b = rhs;
      lhs = add_node(std::move(n));
    }
    return lhs;
  }

  int parse_and() {
    int lhs = parse_not();
    while (cur_.peek().is_punct("&&")) {
      cur_.next();
      require(lhs, Type::Bool, "boolean operand of '&&'");
      int rhs = parse_not();
      require(rhs, Type::Bool, "boolean operand of '&&'");
      ExprNode n;
      n.kind = ExprKind::Binary;
      n.bin = BinOp::And;
      n.type = Type::Bool;
      n.a = lhs;
      n.b = rhs;
      lhs = add_node(std::move(n));
    }
    return lhs;
  }

  int parse_not() {
    if (cur_.accept_punct("!")) {
      int e = parse_not();
      require(e, Type::Bool, "boolean operand of '!'");
      ExprNode n;
      n.kind = ExprKind::Unary;
      n.un = UnOp::Not;
      n.type = Type::Bool;
      n.a = e;
      return add_node(std::move(n));
    }
    return parse_cmp();
  }

  int parse_cmp() {
    int lhs = parse_add();
    static constexpr std::pair<const char*, BinOp> ops[] = {
        {"==", BinOp::Eq}, {"!=", BinOp::Ne}, {"<=", BinOp::Le},
        {">=", BinOp::Ge}, {"<", BinOp::Lt},  {">", BinOp::Gt}};
    for (auto [text, op] : ops) {
      if (cur_.peek().is_punct(text)) {
        cur_.next();
        require(lhs, Type::Int, "integer operand of comparison");
        int rhs = parse_add();
        require(rhs, Type::Int, "integer operand of comparison");
        ExprNode n;
        n.kind = ExprKind::Binary;
        n.bin = op;
        n.type = Type::Bool;
        n.a = lhs;
        n.b = rhs;
        return add_node(std::move(n));
      }
    }
    return lhs;
  }

  int parse_add() {
    int lhs = parse_mul();
    while (cur_.peek().is_punct("+") || cur_.peek().is_punct("-")) {
      BinOp op = cur_.next().text == "+" ? BinOp::Add : BinOp::Sub;
      require(lhs, Type::Int, "integer operand");
      int rhs = parse_mul();
      require(rhs, Type::Int, "integer operand");
      ExprNode n;
      n.kind = ExprKind::Binary;
      n.bin = op;
      n.type = Type::Int;
      n.a = lhs;
      n.b = rhs;
      lhs = add_node(std::move(n));
    }
    return lhs;
  }

  int parse_mul() {
    int lhs = parse_unary();
    while (cur_.peek().is_punct("*") || cur_.peek().is_punct("/") ||
           cur_.peek().is_punct("%")) {
      std::string t = cur_.next().text;
      BinOp op = t == "*" ? BinOp::Mul : (t == "/" ? BinOp::Div : BinOp::Mod);
      require(lhs, Type::Int, "integer operand");
      int rhs = parse_unary();
      require(rhs, Type::Int, "integer operand");
      ExprNode n;
      n.kind = ExprKind::Binary;
      n.bin = op;
      n.type = Type::Int;
      n.a = lhs;
      n.b = rhs;
      lhs = add_node(std::move(n));
    }
    return lhs;
  }

  int parse_unary() {
    if (cur_.accept_punct("-")) {
      int e = parse_unary();
      require(e, Type::Int, "integer operand of unary '-'");
      ExprNode n;
      n.kind = ExprKind::Unary;
      n.un = UnOp::Neg;
      n.type = Type::Int;
      n.a = e;
      return add_node(std::move(n));
    }
    return parse_pow();
  }

  int parse_pow() {
    int lhs = parse_postfix();
    if (cur_.peek().is_punct("**")) {
      cur_.next();
      require(lhs, Type::Int, "integer base of '**'");
      int rhs = parse_unary();  // right-associative
      require(rhs, Type::Int, "integer exponent of '**'");
      ExprNode n;
      n.kind = ExprKind::Binary;
      n.bin = BinOp::Pow;
      n.type = Type::Int;
      n.a = lhs;
      n.b = rhs;
      return add_node(std::move(n));
    }
    return lhs;
  }

  int parse_postfix() {
    int e = parse_primary();
    while (cur_.peek().is_punct("[")) {
      SourcePos at = cur_.peek().pos;
      cur_.next();
      if (type_of(e) != Type::Seq)
        throw ParseError(at, "type mismatch: indexing a non-sequence");
      int idx = parse_or();
      require(idx, Type::Int, "integer index");
      cur_.expect_punct("]");
      ExprNode n;
      n.kind = ExprKind::Index;
      n.type = Type::Int;
      n.a = e;
      n.b = idx;
      e = add_node(std::move(n));
    }
    return e;
  }

  int parse_quant(QuantKind q) {
    cur_.expect_punct("(");
    SourcePos at = cur_.peek().pos;
    if (bound_.size() >= 16)
      throw ParseError(at, "quantifier nesting too deep");
    std::string idx_name = cur_.expect_ident("quantifier index");
    if (cfg_.resolve(idx_name, false))
      throw ParseError(at, "quantifier index shadows variable '" + idx_name +
                               "'");
    cur_.expect_keyword("in");
    int lo = parse_or();
    require(lo, Type::Int, "integer range bound");
    cur_.expect_punct("..");
    int hi = parse_or();
    require(hi, Type::Int, "integer range bound");
    cur_.expect_punct(":");
    bound_.push_back(idx_name);
    int body = parse_or();
    require(body, Type::Bool, "boolean quantifier body");
    bound_.pop_back();
    cur_.expect_punct(")");
    ExprNode n;
    n.kind = ExprKind::Quant;
    n.quant = q;
    n.type = q == QuantKind::Count ? Type::Int : Type::Bool;
    n.a = lo;
    n.b = hi;
    n.c = body;
    n.name = idx_name;
    return add_node(std::move(n));
  }

  int parse_builtin(BuiltinKind k) {
    cur_.expect_punct("(");
    int arg = parse_or();
    cur_.expect_punct(")");
    ExprNode n;
    if (k == BuiltinKind::IsSq) {
      require(arg, Type::Int, "integer argument of issq");
    } else {
      require(arg, Type::Int, "integer (character code) argument");
    }
    n.kind = ExprKind::Builtin;
    n.builtin = k;
    n.type = Type::Bool;
    n.a = arg;
    return add_node(std::move(n));
  }

  int make_var(const std::string& name, bool primed, SourcePos at) {
    // Quantifier indices shadow nothing and cannot be primed.
    for (int d = static_cast<int>(bound_.size()); d-- > 0;) {
      if (bound_[static_cast<std::size_t>(d)] == name) {
        if (primed)
          throw ParseError(at, "cannot prime quantifier index '" + name + "'");
        ExprNode n;
        n.kind = ExprKind::BoundVar;
        n.type = Type::Int;
        n.slot = d;
        n.name = name;
        return add_node(std::move(n));
      }
    }
    if (primed && !cfg_.allow_primed)
      throw ParseError(at, "primed variables are not allowed here");
    auto info = cfg_.resolve(name, primed);
    if (!info)
      throw ParseError(at, "unknown variable '" + name + (primed ? "'" : "") +
                               "'");
    ExprNode n;
    n.kind = ExprKind::Var;
    n.type = info->is_seq ? Type::Seq : Type::Int;
    n.slot = info->slot;
    n.space_var = info->space_var;
    n.primed = primed;
    n.name = name;
    if (info->space_var >= 0) {
      VarMask bit = VarMask{1} << info->space_var;
      if (primed)
        out_.primed_used |= bit;
      else
        out_.unprimed_used |= bit;
    }
    return add_node(std::move(n));
  }

  int parse_primary() {
    const Token& t = cur_.peek();
    if (t.kind == TokKind::Int) {
      cur_.next();
      ExprNode n;
      n.kind = ExprKind::IntLit;
      n.type = Type::Int;
      n.value = t.value;
      return add_node(std::move(n));
    }
    if (t.kind == TokKind::CharLit) {
      cur_.next();
      ExprNode n;
      n.kind = ExprKind::IntLit;
      n.type = Type::Int;
      n.value = t.value;
      n.char_lit = true;
      n.name = t.text;
      return add_node(std::move(n));
    }
    if (t.is_punct("(")) {
      cur_.next();
      int e = parse_or();
      cur_.expect_punct(")");
      return e;
    }
    if (t.kind == TokKind::Ident) {
      SourcePos at = t.pos;
      if (t.text == "forall" && cur_.peek(1).is_punct("(")) {
        cur_.next();
        return parse_quant(QuantKind::Forall);
      }
      if (t.text == "exists" && cur_.peek(1).is_punct("(")) {
        cur_.next();
        return parse_quant(QuantKind::Exists);
      }
      if (t.text == "count" && cur_.peek(1).is_punct("(")) {
        cur_.next();
        return parse_quant(QuantKind::Count);
      }
      if (t.text == "len" && cur_.peek(1).is_punct("(")) {
        cur_.next();
        cur_.expect_punct("(");
        int arg = parse_or();
        if (type_of(arg) != Type::Seq)
          throw ParseError(at, "type mismatch: len of a non-sequence");
        cur_.expect_punct(")");
        ExprNode n;
        n.kind = ExprKind::Len;
        n.type = Type::Int;
        n.a = arg;
        return add_node(std::move(n));
      }
      static constexpr std::pair<const char*, BuiltinKind> builtins[] = {
          {"isupper", BuiltinKind::IsUpper},
          {"islower", BuiltinKind::IsLower},
          {"isdigit", BuiltinKind::IsDigit},
          {"issym", BuiltinKind::IsSym},
          {"issq", BuiltinKind::IsSq}};
      for (auto [name, kind] : builtins) {
        if (t.text == name && cur_.peek(1).is_punct("(")) {
          cur_.next();
          return parse_builtin(kind);
        }
      }
      cur_.next();
      return make_var(t.text, false, at);
    }
    if (t.kind == TokKind::PrimedIdent) {
      cur_.next();
      return make_var(t.text, true, t.pos);
    }
    throw ParseError(t.pos, "expected expression");
  }

  TokenCursor& cur_;
  const ExprParserConfig& cfg_;
  ExprAst& out_;
  std::vector<std::string> bound_;
};

}  // namespace detail

/// Parses one predicate (boolean) from the cursor into `ast` and returns the
/// root node.
inline int parse_predicate(TokenCursor& cur, const ExprParserConfig& cfg,
                           ExprAst& ast) {
  detail::ExprParser p(cur, cfg, ast);
  ast.root = p.parse_bool_expr();
  return ast.root;
}

/// Parses one integer-valued expression.
inline int parse_int_expression(TokenCursor& cur, const ExprParserConfig& cfg,
                                ExprAst& ast) {
  detail::ExprParser p(cur, cfg, ast);
  ast.root = p.parse_int_expr();
  return ast.root;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

enum class EvalFault {
  Overflow,
  DivisionByZero,
  IndexOutOfBounds,
  NegativeExponent,
  RangeTooWide,
};

/// Strict-arithmetic failure during predicate/expression evaluation.
struct EvalError {
  EvalFault fault;
};

/// Diagnostic tally of evaluation faults folded into "pair excluded".
struct EvalTally {
  std::uint64_t overflow = 0;
  std::uint64_t division_by_zero = 0;
  std::uint64_t index_out_of_bounds = 0;
  std::uint64_t negative_exponent = 0;
  std::uint64_t range_too_wide = 0;

  std::uint64_t total() const {
    return overflow + division_by_zero + index_out_of_bounds +
           negative_exponent + range_too_wide;
  }
  void record(EvalFault f) {
    switch (f) {
      case EvalFault::Overflow: ++overflow; break;
      case EvalFault::DivisionByZero: ++division_by_zero; break;
      case EvalFault::IndexOutOfBounds: ++index_out_of_bounds; break;
      case EvalFault::NegativeExponent: ++negative_exponent; break;
      case EvalFault::RangeTooWide: ++range_too_wide; break;
    }
  }
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw EvalError{EvalFault::Overflow};
  return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw EvalError{EvalFault::Overflow};
  return r;
}
inline std::int64_t checked_mul_ev(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw EvalError{EvalFault::Overflow};
  return r;
}
inline std::int64_t checked_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw EvalError{EvalFault::DivisionByZero};
  if (a == INT64_MIN && b == -1) throw EvalError{EvalFault::Overflow};
  return a / b;  // truncates toward zero
}
inline std::int64_t checked_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) throw EvalError{EvalFault::DivisionByZero};
  if (a == INT64_MIN && b == -1) throw EvalError{EvalFault::Overflow};
  return a % b;  // sign follows the dividend
}
inline std::int64_t checked_pow(std::int64_t base, std::int64_t exp) {
  if (exp < 0) throw EvalError{EvalFault::NegativeExponent};
  if (base == 0) return exp == 0 ? 1 : 0;
  if (base == 1) return 1;
  if (base == -1) return (exp & 1) ? -1 : 1;
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < exp; ++i) r = checked_mul_ev(r, base);
  return r;
}

}  // namespace detail

/// Evaluation environment: variable values by slot, plus the space needed to
/// decode sequence ordinals. Pure and reentrant.
struct EvalEnv {
  const Space* space = nullptr;
  std::span<const std::int64_t> slots;
  /// Sequence decoding may differ per slot; maps a Var node's space_var.
};

namespace detail {

struct QuantStack {
  std::array<std::int64_t, 16> vals{};
  int depth = 0;
};

inline std::int64_t eval_node(const ExprAst& ast, int idx, const EvalEnv& env,
                              QuantStack& q) {
  const ExprNode& n = ast.at(idx);
  switch (n.kind) {
    case ExprKind::IntLit:
      return n.value;
    case ExprKind::Var:
      return env.slots[static_cast<std::size_t>(n.slot)];
    case ExprKind::BoundVar:
      return q.vals[static_cast<std::size_t>(n.slot)];
    case ExprKind::Unary: {
      std::int64_t a = eval_node(ast, n.a, env, q);
      return n.un == UnOp::Neg ? checked_sub(0, a) : static_cast<std::int64_t>(!a);
    }
    case ExprKind::Binary: {
      // Short-circuit the boolean connectives.
      if (n.bin == BinOp::And)
        return eval_node(ast, n.a, env, q) ? eval_node(ast, n.b, env, q) : 0;
      if (n.bin == BinOp::Or)
        return eval_node(ast, n.a, env, q) ? 1 : eval_node(ast, n.b, env, q);
      std::int64_t a = eval_node(ast, n.a, env, q);
      std::int64_t b = eval_node(ast, n.b, env, q);
      switch (n.bin) {
        case BinOp::Add: return checked_add(a, b);
        case BinOp::Sub: return checked_sub(a, b);
        case BinOp::Mul: return checked_mul_ev(a, b);
        case BinOp::Div: return checked_div(a, b);
        case BinOp::Mod: return checked_mod(a, b);
        case BinOp::Pow: return checked_pow(a, b);
        case BinOp::Eq: return a == b;
        case BinOp::Ne: return a != b;
        case BinOp::Lt: return a < b;
        case BinOp::Le: return a <= b;
        case BinOp::Gt: return a > b;
        case BinOp::Ge: return a >= b;
        default: return 0;
      }
    }
    case ExprKind::Quant: {
      std::int64_t lo = eval_node(ast, n.a, env, q);
      std::int64_t hi = eval_node(ast, n.b, env, q);
      if (lo > hi) {
        // Empty range: forall vacuously true, exists false, count 0.
        return n.quant == QuantKind::Forall ? 1 : 0;
      }
      if (hi - lo + 1 > kQuantifierRangeCap)
        throw EvalError{EvalFault::RangeTooWide};
      std::int64_t count = 0;
      for (std::int64_t i = lo; i <= hi; ++i) {
        q.vals[static_cast<std::size_t>(q.depth)] = i;
        ++q.depth;
        std::int64_t v = eval_node(ast, n.c, env, q);
        --q.depth;
        if (v) {
          if (n.quant == QuantKind::Exists) return 1;
          ++count;
        } else if (n.quant == QuantKind::Forall) {
          return 0;
        }
      }
      switch (n.quant) {
        case QuantKind::Forall: return 1;
        case QuantKind::Exists: return 0;
        case QuantKind::Count: return count;
      }
      return 0;
    }
    case ExprKind::Len: {
      const ExprNode& v = ast.at(n.a);
      std::int64_t ord = env.slots[static_cast<std::size_t>(v.slot)];
      return static_cast<std::int64_t>(
          env.space->seq_value(v.space_var, ord).size());
    }
    case ExprKind::Index: {
      const ExprNode& v = ast.at(n.a);
      std::int64_t ord = env.slots[static_cast<std::size_t>(v.slot)];
      const std::string& s = env.space->seq_value(v.space_var, ord);
      std::int64_t i = eval_node(ast, n.b, env, q);
      if (i < 0 || i >= static_cast<std::int64_t>(s.size()))
        throw EvalError{EvalFault::IndexOutOfBounds};
      return static_cast<std::int64_t>(
          static_cast<unsigned char>(s[static_cast<std::size_t>(i)]));
    }
    case ExprKind::Builtin: {
      std::int64_t a = eval_node(ast, n.a, env, q);
      switch (n.builtin) {
        case BuiltinKind::IsUpper: return a >= 'A' && a <= 'Z';
        case BuiltinKind::IsLower: return a >= 'a' && a <= 'z';
        case BuiltinKind::IsDigit: return a >= '0' && a <= '9';
        case BuiltinKind::IsSym:
          return env.space->in_declared_alphabet(a) &&
                 !(a >= 'A' && a <= 'Z') && !(a >= 'a' && a <= 'z') &&
                 !(a >= '0' && a <= '9');
        case BuiltinKind::IsSq: {
          if (a < 0) return 0;
          auto sq = [](std::int64_t v) { return static_cast<__int128>(v) * v; };
          std::int64_t r = static_cast<std::int64_t>(
              std::sqrt(static_cast<double>(a)));
          while (r > 0 && sq(r) > a) --r;
          while (sq(r + 1) <= a) ++r;
          return sq(r) == a;
        }
      }
      return 0;
    }
  }
  return 0;
}

}  // namespace detail

/// Evaluates the expression rooted at `ast.root`; throws EvalError on
/// arithmetic faults.
inline std::int64_t eval_expr(const ExprAst& ast, const EvalEnv& env) {
  detail::QuantStack q;
  return detail::eval_node(ast, ast.root, env, q);
}

// ---------------------------------------------------------------------------
// Pretty-printing (canonical, fully parenthesized; reparses to the same AST)
// ---------------------------------------------------------------------------

namespace detail {

inline void print_node(const ExprAst& ast, int idx, std::string& out) {
  const ExprNode& n = ast.at(idx);
  switch (n.kind) {
    case ExprKind::IntLit:
      if (n.char_lit) {
        out += '\'';
        out += n.name;
        out += '\'';
      } else {
        out += std::to_string(n.value);
      }
      return;
    case ExprKind::Var:
      out += n.name;
      if (n.primed) out += '\'';
      return;
    case ExprKind::BoundVar:
      out += n.name;
      return;
    case ExprKind::Unary:
      out += n.un == UnOp::Neg ? "(-" : "(!";
      print_node(ast, n.a, out);
      out += ')';
      return;
    case ExprKind::Binary: {
      static const char* names[] = {"+",  "-",  "*",  "/", "%",  "**", "&&",
                                    "||", "==", "!=", "<", "<=", ">",  ">="};
      out += '(';
      print_node(ast, n.a, out);
      out += ' ';
      out += names[static_cast<int>(n.bin)];
      out += ' ';
      print_node(ast, n.b, out);
      out += ')';
      return;
    }
    case ExprKind::Quant: {
      static const char* names[] = {"forall", "exists", "count"};
      out += names[static_cast<int>(n.quant)];
      out += " (";
      out += n.name;
      out += " in ";
      print_node(ast, n.a, out);
      out += " .. ";
      print_node(ast, n.b, out);
      out += " : ";
      print_node(ast, n.c, out);
      out += ')';
      return;
    }
    case ExprKind::Len:
      out += "len(";
      print_node(ast, n.a, out);
      out += ')';
      return;
    case ExprKind::Index:
      print_node(ast, n.a, out);
      out += '[';
      print_node(ast, n.b, out);
      out += ']';
      return;
    case ExprKind::Builtin: {
      static const char* names[] = {"isupper", "islower", "isdigit", "issym",
                                    "issq"};
      out += names[static_cast<int>(n.builtin)];
      out += '(';
      print_node(ast, n.a, out);
      out += ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string pretty_print(const ExprAst& ast, int root = -1) {
  std::string out;
  detail::print_node(ast, root < 0 ? ast.root : root, out);
  return out;
}

/// Structural AST equality (names, operators, literal values and shape).
inline bool ast_equal(const ExprAst& x, int xi, const ExprAst& y, int yi) {
  if ((xi < 0) != (yi < 0)) return false;
  if (xi < 0) return true;
  const ExprNode& a = x.at(xi);
  const ExprNode& b = y.at(yi);
  if (a.kind != b.kind || a.type != b.type || a.value != b.value ||
      a.bin != b.bin || a.un != b.un || a.quant != b.quant ||
      a.builtin != b.builtin || a.slot != b.slot ||
      a.space_var != b.space_var || a.primed != b.primed || a.name != b.name)
    return false;
  return ast_equal(x, a.a, y, b.a) && ast_equal(x, a.b, y, b.b) &&
         ast_equal(x, a.c, y, b.c);
}

}  // namespace relcorr
