#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relcorr/expr.hpp"
#include "relcorr/relation.hpp"
#include "relcorr/space.hpp"

namespace relcorr {

// ---------------------------------------------------------------------------
// Program DSL
//
//   prog  := "prog" IDENT "on" IDENT ("local" IDENT ":" INT ".." INT ";")* block
//   block := "{" stmt* "}"
//   stmt  := IDENT "=" expr ";"
//          | "if" "(" pred ")" block ("else" block)?
//          | "while" "(" pred ")" block
//          | "either" block "or" block
//          | "skip" ";" | "abort" ";"
//
// Expressions use the shared operator set, unprimed variables and locals
// only. Sequence variables are read-only. Locals start at the low end of
// their declared range.
// ---------------------------------------------------------------------------

enum class StmtKind { Assign, If, While, Either, Skip, Abort };

struct Stmt {
  StmtKind kind{};
  int target_slot = -1;       // Assign: environment slot
  int target_space_var = -1;  // Assign: space variable index, -1 for locals
  ExprAst expr;               // Assign rhs / If / While condition
  std::vector<int> block_a;   // then / loop body / either-first
  std::vector<int> block_b;   // else / either-second
  bool has_else = false;
};

struct LocalDecl {
  std::string name;
  std::int64_t lo, hi;
};

struct ProgramDef {
  std::string name;
  SpacePtr space;
  std::vector<LocalDecl> locals;
  std::vector<Stmt> stmts;
  std::vector<int> body;
  VarMask live_in = 0;  // space variables possibly read before written
  bool has_either = false;
};

using ProgramDefPtr = std::shared_ptr<const ProgramDef>;

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

class ProgParser {
 public:
  ProgParser(TokenCursor& cur, ProgramDef& prog) : cur_(cur), prog_(prog) {
    const Space& sp = *prog_.space;
    cfg_.allow_primed = false;
    cfg_.resolve = [this, &sp](const std::string& name,
                               bool) -> std::optional<VarInfo> {
      if (auto v = sp.find_var(name))
        return VarInfo{*v, *v, sp.vars()[*v].is_seq()};
      for (std::size_t k = 0; k < prog_.locals.size(); ++k)
        if (prog_.locals[k].name == name)
          return VarInfo{sp.var_count() + static_cast<int>(k), -1, false};
      return std::nullopt;
    };
  }

  std::vector<int> parse_block() {
    cur_.expect_punct("{");
    std::vector<int> ids;
    while (!cur_.accept_punct("}")) ids.push_back(parse_stmt());
    return ids;
  }

 private:
  int add_stmt(Stmt s) {
    prog_.stmts.push_back(std::move(s));
    return static_cast<int>(prog_.stmts.size()) - 1;
  }

  int parse_stmt() {
    const Token& t = cur_.peek();
    if (t.is_ident("skip")) {
      cur_.next();
      cur_.expect_punct(";");
      Stmt s;
      s.kind = StmtKind::Skip;
      return add_stmt(std::move(s));
    }
    if (t.is_ident("abort")) {
      cur_.next();
      cur_.expect_punct(";");
      Stmt s;
      s.kind = StmtKind::Abort;
      return add_stmt(std::move(s));
    }
    if (t.is_ident("if")) {
      cur_.next();
      cur_.expect_punct("(");
      Stmt s;
      s.kind = StmtKind::If;
      parse_predicate(cur_, cfg_, s.expr);
      cur_.expect_punct(")");
      s.block_a = parse_block();
      if (cur_.accept_keyword("else")) {
        s.has_else = true;
        s.block_b = parse_block();
      }
      return add_stmt(std::move(s));
    }
    if (t.is_ident("while")) {
      cur_.next();
      cur_.expect_punct("(");
      Stmt s;
      s.kind = StmtKind::While;
      parse_predicate(cur_, cfg_, s.expr);
      cur_.expect_punct(")");
      s.block_a = parse_block();
      return add_stmt(std::move(s));
    }
    if (t.is_ident("either")) {
      cur_.next();
      Stmt s;
      s.kind = StmtKind::Either;
      s.block_a = parse_block();
      cur_.expect_keyword("or");
      s.block_b = parse_block();
      prog_.has_either = true;
      return add_stmt(std::move(s));
    }
    // assignment
    if (t.kind == TokKind::PrimedIdent)
      throw ParseError(t.pos, "primed variables are not allowed in programs");
    if (t.kind != TokKind::Ident)
      throw ParseError(t.pos, "expected statement");
    SourcePos at = t.pos;
    std::string name = cur_.next().text;
    auto info = cfg_.resolve(name, false);
    if (!info) throw ParseError(at, "unknown variable '" + name + "'");
    if (info->is_seq)
      throw ParseError(at, "sequence variable '" + name + "' is read-only");
    cur_.expect_punct("=");
    Stmt s;
    s.kind = StmtKind::Assign;
    s.target_slot = info->slot;
    s.target_space_var = info->space_var;
    parse_int_expression(cur_, cfg_, s.expr);
    cur_.expect_punct(";");
    return add_stmt(std::move(s));
  }

  TokenCursor& cur_;
  ProgramDef& prog_;
  ExprParserConfig cfg_;
};

/// Space variables possibly read before being written, given the variables
/// live after the block. Conservative in the usual dataflow sense.
inline VarMask live_block(const ProgramDef& prog, const std::vector<int>& ids,
                          VarMask after);

inline VarMask live_stmt(const ProgramDef& prog, const Stmt& s, VarMask after) {
  switch (s.kind) {
    case StmtKind::Skip:
      return after;
    case StmtKind::Abort:
      return 0;  // the path ends; nothing further is observed
    case StmtKind::Assign: {
      VarMask out = after;
      if (s.target_space_var >= 0) out &= ~(VarMask{1} << s.target_space_var);
      return out | s.expr.unprimed_used;
    }
    case StmtKind::If:
      return s.expr.unprimed_used | live_block(prog, s.block_a, after) |
             live_block(prog, s.block_b, after);
    case StmtKind::While: {
      VarMask x = s.expr.unprimed_used | after;
      for (;;) {
        VarMask next = s.expr.unprimed_used | after |
                       live_block(prog, s.block_a, x);
        if (next == x) return x;
        x = next;
      }
    }
    case StmtKind::Either:
      return live_block(prog, s.block_a, after) |
             live_block(prog, s.block_b, after);
  }
  return after;
}

inline VarMask live_block(const ProgramDef& prog, const std::vector<int>& ids,
                          VarMask after) {
  VarMask live = after;
  for (std::size_t k = ids.size(); k-- > 0;)
    live = live_stmt(prog, prog.stmts[static_cast<std::size_t>(ids[k])], live);
  return live;
}

}  // namespace detail

inline ProgramDefPtr parse_prog(std::string_view text, SpacePtr space) {
  TokenCursor cur(tokenize(text));
  cur.expect_keyword("prog");
  auto prog = std::make_shared<ProgramDef>();
  prog->name = cur.expect_ident("program name");
  cur.expect_keyword("on");
  SourcePos at = cur.peek().pos;
  std::string space_name = cur.expect_ident("space name");
  if (space_name != space->name())
    throw ParseError(at, "program is declared on space '" + space_name +
                             "', not '" + space->name() + "'");
  prog->space = space;
  while (cur.accept_keyword("local")) {
    SourcePos lat = cur.peek().pos;
    LocalDecl d;
    d.name = cur.expect_ident("local name");
    if (space->find_var(d.name))
      throw ParseError(lat, "local '" + d.name + "' shadows a space variable");
    for (const auto& other : prog->locals)
      if (other.name == d.name)
        throw ParseError(lat, "duplicate local '" + d.name + "'");
    cur.expect_punct(":");
    d.lo = cur.expect_int("range lower bound");
    cur.expect_punct("..");
    d.hi = cur.expect_int("range upper bound");
    if (d.lo > d.hi) throw ParseError(lat, "empty range for local " + d.name);
    cur.expect_punct(";");
    prog->locals.push_back(std::move(d));
  }
  detail::ProgParser parser(cur, *prog);
  prog->body = parser.parse_block();
  if (!cur.at_end())
    throw ParseError(cur.peek().pos, "trailing input after program");
  prog->live_in = detail::live_block(*prog, prog->body, 0);
  return prog;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Result of running a program from one initial state: the set of reachable
/// final states plus counts of paths that aborted, faulted or ran out of
/// fuel (none of which contribute a final state).
struct ExecOutcome {
  std::vector<StateIndex> finals;  // sorted, unique
  std::int64_t fuel_exhausted_paths = 0;
  std::int64_t runtime_error_paths = 0;
  std::int64_t abort_paths = 0;
};

namespace detail {

/// One terminating path, described relative to the initial state: which
/// space variables were written, and the values they ended with.
struct SharedFinal {
  VarMask written = 0;
  std::vector<std::int64_t> values;  // written variables, ascending var index

  bool operator==(const SharedFinal&) const = default;
};

struct SharedOutcome {
  std::vector<SharedFinal> finals;
  std::int64_t fuel_exhausted_paths = 0;
  std::int64_t runtime_error_paths = 0;
  std::int64_t abort_paths = 0;
};

struct Frame {
  const std::vector<int>* block;
  std::size_t pc;
  int loop_stmt;  // statement id of the governing while, or -1
};

struct Machine {
  std::vector<std::int64_t> env;
  VarMask written = 0;
  std::vector<Frame> control;
  std::int64_t fuel = 0;
};

/// Runs every nondeterministic path of `prog` from the environment seeded in
/// `start`; appends each terminating path's write record to `out`.
inline void run_paths(const ProgramDef& prog, Machine start,
                      SharedOutcome& out) {
  const Space& sp = *prog.space;
  int nvars = sp.var_count();
  std::vector<Machine> pending;
  pending.push_back(std::move(start));
  std::int64_t forks = 0;

  auto eval_in = [&](const Machine& m, const ExprAst& ast) {
    EvalEnv env{&sp, std::span<const std::int64_t>(m.env.data(), m.env.size())};
    return eval_expr(ast, env);
  };

  while (!pending.empty()) {
    Machine m = std::move(pending.back());
    pending.pop_back();
    bool path_done = false;
    while (!path_done) {
      if (m.control.empty()) {
        // Terminated: record written space variables.
        SharedFinal fin;
        fin.written = m.written;
        for (int v = 0; v < nvars; ++v)
          if (m.written & (VarMask{1} << v))
            fin.values.push_back(m.env[static_cast<std::size_t>(v)]);
        if (std::find(out.finals.begin(), out.finals.end(), fin) ==
            out.finals.end())
          out.finals.push_back(std::move(fin));
        break;
      }
      Frame& f = m.control.back();
      if (f.pc >= f.block->size()) {
        if (f.loop_stmt >= 0) {
          const Stmt& loop =
              prog.stmts[static_cast<std::size_t>(f.loop_stmt)];
          if (--m.fuel < 0) {
            ++out.fuel_exhausted_paths;
            break;
          }
          bool again;
          try {
            again = eval_in(m, loop.expr) != 0;
          } catch (const EvalError&) {
            ++out.runtime_error_paths;
            break;
          }
          if (again) {
            f.pc = 0;
            continue;
          }
        }
        m.control.pop_back();
        continue;
      }
      const Stmt& s =
          prog.stmts[static_cast<std::size_t>((*f.block)[f.pc++])];
      if (--m.fuel < 0) {
        ++out.fuel_exhausted_paths;
        break;
      }
      switch (s.kind) {
        case StmtKind::Skip:
          break;
        case StmtKind::Abort:
          ++out.abort_paths;
          path_done = true;
          break;
        case StmtKind::Assign: {
          std::int64_t v;
          try {
            v = eval_in(m, s.expr);
          } catch (const EvalError&) {
            ++out.runtime_error_paths;
            path_done = true;
            break;
          }
          bool ok;
          if (s.target_space_var >= 0) {
            ok = sp.in_domain(s.target_space_var, v);
          } else {
            const LocalDecl& d = prog.locals[static_cast<std::size_t>(
                s.target_slot - sp.var_count())];
            ok = v >= d.lo && v <= d.hi;
          }
          if (!ok) {
            ++out.runtime_error_paths;
            path_done = true;
            break;
          }
          m.env[static_cast<std::size_t>(s.target_slot)] = v;
          if (s.target_space_var >= 0)
            m.written |= VarMask{1} << s.target_space_var;
          break;
        }
        case StmtKind::If: {
          bool cond;
          try {
            cond = eval_in(m, s.expr) != 0;
          } catch (const EvalError&) {
            ++out.runtime_error_paths;
            path_done = true;
            break;
          }
          if (cond)
            m.control.push_back({&s.block_a, 0, -1});
          else if (s.has_else)
            m.control.push_back({&s.block_b, 0, -1});
          break;
        }
        case StmtKind::While: {
          bool cond;
          try {
            cond = eval_in(m, s.expr) != 0;
          } catch (const EvalError&) {
            ++out.runtime_error_paths;
            path_done = true;
            break;
          }
          if (cond) {
            int id = static_cast<int>(&s - prog.stmts.data());
            m.control.push_back({&s.block_a, 0, id});
          }
          break;
        }
        case StmtKind::Either: {
          if (++forks >= kForkCap)
            throw CapExceededError("program '" + prog.name +
                                   "': either/or path explosion");
          Machine other = m;
          other.control.push_back({&s.block_b, 0, -1});
          pending.push_back(std::move(other));
          m.control.push_back({&s.block_a, 0, -1});
          break;
        }
      }
    }
  }
}

inline SharedOutcome run_from(const ProgramDef& prog, StateIndex s,
                              std::int64_t fuel) {
  const Space& sp = *prog.space;
  Machine m;
  m.env.resize(static_cast<std::size_t>(sp.var_count()) + prog.locals.size());
  sp.decode(s, std::span<std::int64_t>(
                   m.env.data(), static_cast<std::size_t>(sp.var_count())));
  for (std::size_t k = 0; k < prog.locals.size(); ++k)
    m.env[static_cast<std::size_t>(sp.var_count()) + k] = prog.locals[k].lo;
  m.fuel = fuel;
  m.control.push_back({&prog.body, 0, -1});
  SharedOutcome out;
  run_paths(prog, std::move(m), out);
  return out;
}

}  // namespace detail

/// Explores every nondeterministic path of `prog` from state `s` with the
/// given per-path fuel.
inline ExecOutcome exec(const ProgramDef& prog, StateIndex s,
                        std::int64_t fuel = kDefaultFuel) {
  if (fuel <= 0) throw std::invalid_argument("fuel must be positive");
  if (s < 0 || s >= prog.space->cardinality())
    throw std::out_of_range("initial state outside program space");
  detail::SharedOutcome shared = detail::run_from(prog, s, fuel);
  ExecOutcome out;
  out.fuel_exhausted_paths = shared.fuel_exhausted_paths;
  out.runtime_error_paths = shared.runtime_error_paths;
  out.abort_paths = shared.abort_paths;
  const Space& sp = *prog.space;
  for (const auto& fin : shared.finals) {
    StateIndex idx = s;
    std::size_t k = 0;
    for (int v = 0; v < sp.var_count(); ++v)
      if (fin.written & (VarMask{1} << v)) {
        // replace variable v's ordinal within the index
        std::int64_t stride = 1;
        for (int w = v + 1; w < sp.var_count(); ++w)
          stride *= sp.var_cardinality(w);
        std::int64_t cur = (idx / stride) % sp.var_cardinality(v);
        std::int64_t neu = sp.ordinal_of(v, fin.values[k]);
        idx += (neu - cur) * stride;
        ++k;
      }
    out.finals.push_back(idx);
  }
  std::sort(out.finals.begin(), out.finals.end());
  out.finals.erase(std::unique(out.finals.begin(), out.finals.end()),
                   out.finals.end());
  return out;
}

inline ExecOutcome exec(const ProgramDef& prog, const State& s,
                        std::int64_t fuel = kDefaultFuel) {
  return exec(prog, prog.space->index_of(s), fuel);
}

/// The program's function: the relation pairing each initial state with the
/// final states of its terminating paths, computed by exhaustive execution.
/// Runs are shared across initial states that agree on the program's
/// live-on-entry variables.
struct ExtractionResult {
  Relation relation;
  std::int64_t fuel_exhausted_paths = 0;
  std::int64_t runtime_error_paths = 0;
  std::int64_t abort_paths = 0;
};

inline ExtractionResult extract_function(const ProgramDef& prog,
                                         std::int64_t fuel = kDefaultFuel) {
  if (fuel <= 0) throw std::invalid_argument("fuel must be positive");
  const Space& sp = *prog.space;
  std::int64_t n = sp.cardinality();
  if (n > kMaterializeStateCap)
    throw CapExceededError("space too large for exhaustive extraction");
  VarMask live = prog.live_in;
  std::int64_t groups = sp.signature_count(live);
  std::vector<std::optional<detail::SharedOutcome>> memo(
      static_cast<std::size_t>(groups));

  // Per-variable strides for fast final-state instantiation.
  std::vector<std::int64_t> stride(static_cast<std::size_t>(sp.var_count()));
  {
    std::int64_t acc = 1;
    for (int v = sp.var_count(); v-- > 0;) {
      stride[static_cast<std::size_t>(v)] = acc;
      acc *= sp.var_cardinality(v);
    }
  }

  detail::Csr csr;
  csr.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  ExtractionResult result{Relation(), 0, 0, 0};
  std::vector<StateIndex> row;
  for (StateIndex s = 0; s < n; ++s) {
    csr.offsets[static_cast<std::size_t>(s)] =
        static_cast<std::int64_t>(csr.images.size());
    std::int64_t sig = sp.signature_of(s, live);
    auto& entry = memo[static_cast<std::size_t>(sig)];
    if (!entry) entry = detail::run_from(prog, s, fuel);
    result.fuel_exhausted_paths += entry->fuel_exhausted_paths;
    result.runtime_error_paths += entry->runtime_error_paths;
    result.abort_paths += entry->abort_paths;
    row.clear();
    for (const auto& fin : entry->finals) {
      StateIndex idx = s;
      std::size_t k = 0;
      for (int v = 0; v < sp.var_count(); ++v)
        if (fin.written & (VarMask{1} << v)) {
          std::int64_t st = stride[static_cast<std::size_t>(v)];
          std::int64_t cur = (idx / st) % sp.var_cardinality(v);
          idx += (sp.ordinal_of(v, fin.values[k]) - cur) * st;
          ++k;
        }
      row.push_back(idx);
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    csr.images.insert(csr.images.end(), row.begin(), row.end());
  }
  csr.offsets[static_cast<std::size_t>(n)] =
      static_cast<std::int64_t>(csr.images.size());
  result.relation = Relation::from_csr(prog.space, std::move(csr));
  return result;
}

/// True iff every initial state has at most one final state.
inline bool is_deterministic_prog(const ProgramDef& prog,
                                  std::int64_t fuel = kDefaultFuel) {
  return is_deterministic(extract_function(prog, fuel).relation);
}

}  // namespace relcorr
