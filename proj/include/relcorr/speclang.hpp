#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relcorr/expr.hpp"
#include "relcorr/relation.hpp"
#include "relcorr/rng.hpp"
#include "relcorr/space.hpp"

namespace relcorr {

// ---------------------------------------------------------------------------
// Spec DSL
//
//   spec := "spec" IDENT "on" IDENT ":=" pred ";" ("domain" ":=" pred ";")?
//
// The pair predicate ranges over unprimed (initial) and primed (final)
// variables; the optional domain claim ranges over unprimed variables only
// and, when verified, denotes exactly dom(R).
// ---------------------------------------------------------------------------

/// A named specification: a pair predicate over (s, s') plus an optional
/// domain claim. Environment slots: [0, V) unprimed values, [V, 2V) primed.
struct SpecDef {
  std::string name;
  SpacePtr space;
  ExprAst pred;
  std::optional<ExprAst> domain_claim;
  std::shared_ptr<EvalTally> tally = std::make_shared<EvalTally>();
};

using SpecDefPtr = std::shared_ptr<const SpecDef>;

inline SpecDefPtr parse_spec(std::string_view text, SpacePtr space) {
  TokenCursor cur(tokenize(text));
  cur.expect_keyword("spec");
  auto def = std::make_shared<SpecDef>();
  def->name = cur.expect_ident("spec name");
  cur.expect_keyword("on");
  SourcePos at = cur.peek().pos;
  std::string space_name = cur.expect_ident("space name");
  if (space_name != space->name())
    throw ParseError(at, "spec is declared on space '" + space_name +
                             "', not '" + space->name() + "'");
  def->space = space;
  cur.expect_punct(":");
  cur.expect_punct("=");

  const Space& sp = *space;
  int nvars = sp.var_count();
  ExprParserConfig cfg;
  cfg.allow_primed = true;
  cfg.resolve = [&sp, nvars](const std::string& name,
                             bool primed) -> std::optional<VarInfo> {
    auto v = sp.find_var(name);
    if (!v) return std::nullopt;
    return VarInfo{primed ? *v + nvars : *v, *v, sp.vars()[*v].is_seq()};
  };
  parse_predicate(cur, cfg, def->pred);
  cur.expect_punct(";");

  if (cur.accept_keyword("domain")) {
    cur.expect_punct(":");
    cur.expect_punct("=");
    ExprParserConfig claim_cfg = cfg;
    claim_cfg.allow_primed = false;  // claims range over unprimed state only
    ExprAst claim;
    parse_predicate(cur, claim_cfg, claim);
    cur.expect_punct(";");
    def->domain_claim = std::move(claim);
  }
  if (!cur.at_end())
    throw ParseError(cur.peek().pos, "trailing input after spec");
  return def;
}

namespace detail {

/// Decodes (s, s') into the 2V-slot environment and evaluates an AST;
/// faults fold to `fault_value` and are tallied.
inline bool eval_pair_ast(const SpecDef& def, const ExprAst& ast, StateIndex s,
                          StateIndex t) {
  const Space& sp = *def.space;
  int n = sp.var_count();
  std::array<std::int64_t, 2 * kMaxVars> slots;
  sp.decode(s, std::span<std::int64_t>(slots.data(), static_cast<std::size_t>(n)));
  sp.decode(t, std::span<std::int64_t>(slots.data() + n,
                                       static_cast<std::size_t>(n)));
  EvalEnv env{&sp, std::span<const std::int64_t>(
                       slots.data(), static_cast<std::size_t>(2 * n))};
  try {
    return eval_expr(ast, env) != 0;
  } catch (const EvalError& e) {
    def.tally->record(e.fault);
    return false;
  }
}

}  // namespace detail

/// Truth of the pair predicate on (s, s'); evaluation faults mean the pair
/// is excluded (and are tallied on the SpecDef).
inline bool eval_pred(const SpecDef& def, StateIndex s, StateIndex t) {
  return detail::eval_pair_ast(def, def.pred, s, t);
}

inline bool eval_pred(const SpecDef& def, const State& s, const State& t) {
  return eval_pred(def, def.space->index_of(s), def.space->index_of(t));
}

/// Truth of the domain claim on s.
inline bool eval_domain_claim(const SpecDef& def, StateIndex s) {
  return detail::eval_pair_ast(def, *def.domain_claim, s, s);
}

/// The lazy relation {(s, s') | pred}. `verified_claim` attaches the claim
/// set as the relation's exact domain; only pass true after
/// check_domain_claim returned Verified.
inline Relation as_relation(SpecDefPtr def, bool verified_claim = false) {
  std::optional<StateSet> hint;
  if (verified_claim && def->domain_claim) {
    StateSet dom(def->space);
    for (StateIndex s = 0; s < def->space->cardinality(); ++s)
      if (eval_domain_claim(*def, s)) dom.insert(s);
    hint = std::move(dom);
  }
  VarMask umask = def->pred.unprimed_used;
  VarMask pmask = def->pred.primed_used;
  return Relation::from_predicate(
      def->space,
      [def](StateIndex s, StateIndex t) { return eval_pred(*def, s, t); },
      umask, pmask, std::move(hint));
}

// ---------------------------------------------------------------------------
// Domain-claim checking
// ---------------------------------------------------------------------------

enum class ClaimStatus { Verified, Refuted, SampledOk };

struct ClaimVerdict {
  ClaimStatus status;
  /// Refuting state: claim and witness-search disagree there.
  std::optional<StateIndex> witness;
  /// True when the claim held at the witness but no image exists.
  bool claim_true_row_empty = false;
  std::int64_t rows_checked = 0;
};

/// Checks claim(s) <=> exists s': pred(s, s') by per-row witness search.
/// Exhaustive over signature classes when that fits in `budget` predicate
/// evaluations; otherwise checks `budget / row-cost` uniformly sampled rows.
inline ClaimVerdict check_domain_claim(const SpecDef& def,
                                       std::int64_t budget = kDefaultWorkBudget,
                                       std::uint64_t seed = 0) {
  if (!def.domain_claim)
    throw std::invalid_argument("spec '" + def.name + "' has no domain claim");
  if (budget <= 0) throw std::invalid_argument("claim check budget is zero");
  const Space& sp = *def.space;
  VarMask umask = def.pred.unprimed_used | def.domain_claim->unprimed_used;
  VarMask pmask = def.pred.primed_used;
  std::int64_t reps = sp.signature_count(pmask);

  auto row_matches_claim = [&](StateIndex s) -> std::pair<bool, bool> {
    bool claimed = eval_domain_claim(def, s);
    bool found = false;
    for (std::int64_t h = 0; h < reps; ++h) {
      if (eval_pred(def, s, sp.representative_of(h, pmask))) {
        found = true;
        break;
      }
    }
    return {claimed == found, claimed};
  };

  std::int64_t groups = sp.signature_count(umask);
  bool exhaustive = groups <= budget / std::max<std::int64_t>(reps, 1);
  if (exhaustive) {
    for (std::int64_t g = 0; g < groups; ++g) {
      StateIndex s = sp.representative_of(g, umask);
      auto [ok, claimed] = row_matches_claim(s);
      if (!ok) return {ClaimStatus::Refuted, s, claimed, g + 1};
    }
    return {ClaimStatus::Verified, std::nullopt, false, groups};
  }
  std::int64_t rows = std::max<std::int64_t>(
      1, budget / std::max<std::int64_t>(reps, 1));
  for (std::int64_t i = 0; i < rows; ++i) {
    StateIndex s = static_cast<StateIndex>(
        sample_range(seed, static_cast<std::uint64_t>(i),
                     static_cast<std::uint64_t>(sp.cardinality())));
    auto [ok, claimed] = row_matches_claim(s);
    if (!ok) return {ClaimStatus::Refuted, s, claimed, i + 1};
  }
  return {ClaimStatus::SampledOk, std::nullopt, false, rows};
}

}  // namespace relcorr
