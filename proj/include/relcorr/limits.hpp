#pragma once

#include <cstdint>

namespace relcorr {

/// Spaces above this state count may not be materialized as extensional
/// relations; only row-streaming operations are allowed on them.
inline constexpr std::int64_t kMaterializeStateCap = std::int64_t{1} << 24;

/// Default budget for pair-predicate evaluations in domain searches,
/// materializations and claim checks. Counted after signature reduction,
/// i.e. in effective predicate evaluations.
inline constexpr std::int64_t kDefaultWorkBudget = std::int64_t{1} << 26;

/// Per-path statement-step budget for program execution. Exhaustion models
/// nontermination: the path contributes no final state.
inline constexpr std::int64_t kDefaultFuel = 100000;

/// Maximum either/or forks explored per initial state.
inline constexpr std::int64_t kForkCap = std::int64_t{1} << 16;

/// Bounded quantifiers refuse ranges wider than this.
inline constexpr std::int64_t kQuantifierRangeCap = std::int64_t{1} << 20;

}  // namespace relcorr
