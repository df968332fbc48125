#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "relcorr/errors.hpp"
#include "relcorr/lexer.hpp"

namespace relcorr {

using StateIndex = std::int64_t;

/// Bit mask over a space's variables (bit k = k-th declared variable).
using VarMask = std::uint32_t;

inline constexpr int kMaxVars = 32;

// ---------------------------------------------------------------------------
// Variable domains
// ---------------------------------------------------------------------------

/// Integer interval [lo, hi].
struct IntRangeDomain {
  std::int64_t lo, hi;
};

/// Single character from a declared alphabet; state values are character
/// codes, enumeration follows alphabet order.
struct CharDomain {
  std::string alphabet;
};

/// Sequence over a declared alphabet with length <= max_len; state values
/// are sequence ordinals (length-major, then lexicographic in alphabet
/// order), so "" = 0.
struct SeqDomain {
  std::string alphabet;
  std::int64_t max_len;
};

struct VarDecl {
  std::string name;
  std::variant<IntRangeDomain, CharDomain, SeqDomain> domain;

  bool is_seq() const { return std::holds_alternative<SeqDomain>(domain); }
  bool is_char() const { return std::holds_alternative<CharDomain>(domain); }
  bool is_int() const { return std::holds_alternative<IntRangeDomain>(domain); }
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b,
                                const char* what) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error(std::string(what) + ": cardinality overflow");
  return r;
}

/// Cardinality of one variable domain.
inline std::int64_t domain_cardinality(const VarDecl& v) {
  if (auto* r = std::get_if<IntRangeDomain>(&v.domain)) return r->hi - r->lo + 1;
  if (auto* c = std::get_if<CharDomain>(&v.domain))
    return static_cast<std::int64_t>(c->alphabet.size());
  const auto& s = std::get<SeqDomain>(v.domain);
  // sum over k = 0..max_len of |alphabet|^k
  std::int64_t base = static_cast<std::int64_t>(s.alphabet.size());
  std::int64_t total = 0, pw = 1;
  for (std::int64_t k = 0; k <= s.max_len; ++k) {
    std::int64_t t;
    if (__builtin_add_overflow(total, pw, &t))
      throw std::overflow_error("sequence domain cardinality overflow");
    total = t;
    if (k < s.max_len) pw = checked_mul(pw, base, "sequence domain");
  }
  return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// One value per declared variable: the integer itself for int variables,
/// the character code for char variables, and the sequence ordinal for
/// sequence variables.
struct State {
  std::vector<std::int64_t> values;

  bool operator==(const State&) const = default;
};

// ---------------------------------------------------------------------------
// Space
// ---------------------------------------------------------------------------

/// An enumerable, indexable finite state space: an ordered list of typed
/// finite-domain variables. States are indexed row-major with the first
/// declared variable most significant.
class Space {
 public:
  Space(std::string name, std::vector<VarDecl> vars)
      : name_(std::move(name)), vars_(std::move(vars)) {
    if (vars_.empty()) throw std::invalid_argument("space has no variables");
    if (vars_.size() > kMaxVars)
      throw std::invalid_argument("space exceeds variable limit");
    for (std::size_t i = 0; i < vars_.size(); ++i)
      for (std::size_t j = i + 1; j < vars_.size(); ++j)
        if (vars_[i].name == vars_[j].name)
          throw std::invalid_argument("duplicate variable name: " +
                                      vars_[i].name);
    card_.resize(vars_.size());
    stride_.resize(vars_.size());
    seq_tables_.resize(vars_.size());
    alpha_union_.assign(256, false);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      card_[i] = detail::domain_cardinality(vars_[i]);
      if (const auto* sd = std::get_if<SeqDomain>(&vars_[i].domain))
        seq_tables_[i] = build_seq_table(*sd);
      const std::string* alpha = nullptr;
      if (const auto* cd = std::get_if<CharDomain>(&vars_[i].domain))
        alpha = &cd->alphabet;
      else if (const auto* sd = std::get_if<SeqDomain>(&vars_[i].domain))
        alpha = &sd->alphabet;
      if (alpha)
        for (char c : *alpha) alpha_union_[static_cast<unsigned char>(c)] = true;
    }
    cardinality_ = 1;
    for (std::size_t i = vars_.size(); i-- > 0;) {
      stride_[i] = cardinality_;
      cardinality_ = detail::checked_mul(cardinality_, card_[i], "space");
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<VarDecl>& vars() const { return vars_; }
  int var_count() const { return static_cast<int>(vars_.size()); }
  std::int64_t cardinality() const { return cardinality_; }
  std::int64_t var_cardinality(int v) const { return card_[v]; }

  std::optional<int> find_var(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name == name) return static_cast<int>(i);
    return std::nullopt;
  }

  /// Ordinal of a variable value within its domain enumeration.
  std::int64_t ordinal_of(int v, std::int64_t value) const {
    const VarDecl& d = vars_[v];
    if (const auto* r = std::get_if<IntRangeDomain>(&d.domain)) {
      if (value < r->lo || value > r->hi)
        throw std::out_of_range("value out of range for " + d.name);
      return value - r->lo;
    }
    if (const auto* c = std::get_if<CharDomain>(&d.domain)) {
      auto p = c->alphabet.find(static_cast<char>(value));
      if (value < 0 || value > 255 || p == std::string::npos)
        throw std::out_of_range("character not in alphabet of " + d.name);
      return static_cast<std::int64_t>(p);
    }
    if (value < 0 || value >= card_[v])
      throw std::out_of_range("sequence ordinal out of range for " + d.name);
    return value;
  }

  /// Inverse of ordinal_of.
  std::int64_t value_of(int v, std::int64_t ordinal) const {
    const VarDecl& d = vars_[v];
    if (const auto* r = std::get_if<IntRangeDomain>(&d.domain))
      return r->lo + ordinal;
    if (const auto* c = std::get_if<CharDomain>(&d.domain))
      return static_cast<std::int64_t>(
          static_cast<unsigned char>(c->alphabet[ordinal]));
    return ordinal;
  }

  /// True iff `value` lies in variable v's domain.
  bool in_domain(int v, std::int64_t value) const {
    const VarDecl& d = vars_[v];
    if (const auto* r = std::get_if<IntRangeDomain>(&d.domain))
      return value >= r->lo && value <= r->hi;
    if (const auto* c = std::get_if<CharDomain>(&d.domain))
      return value >= 0 && value <= 255 &&
             c->alphabet.find(static_cast<char>(value)) != std::string::npos;
    return value >= 0 && value < card_[v];
  }

  StateIndex index_of(const State& s) const {
    if (static_cast<int>(s.values.size()) != var_count())
      throw std::out_of_range("state arity mismatch");
    StateIndex idx = 0;
    for (int v = 0; v < var_count(); ++v)
      idx += ordinal_of(v, s.values[v]) * stride_[v];
    return idx;
  }

  State state_at(StateIndex idx) const {
    if (idx < 0 || idx >= cardinality_)
      throw std::out_of_range("state index out of range");
    State s;
    s.values.resize(vars_.size());
    for (int v = 0; v < var_count(); ++v)
      s.values[v] = value_of(v, (idx / stride_[v]) % card_[v]);
    return s;
  }

  /// Decodes a state index into a caller-provided value buffer without
  /// allocation; `out` must have var_count() slots.
  void decode(StateIndex idx, std::span<std::int64_t> out) const {
    for (int v = 0; v < var_count(); ++v)
      out[v] = value_of(v, (idx / stride_[v]) % card_[v]);
  }

  /// Decoded string for a sequence variable's ordinal.
  const std::string& seq_value(int v, std::int64_t ordinal) const {
    return seq_tables_[v][static_cast<std::size_t>(ordinal)];
  }

  /// Sequence ordinal for a string (length-major, then lexicographic).
  std::int64_t seq_ordinal(int v, std::string_view str) const {
    const auto& sd = std::get<SeqDomain>(vars_[v].domain);
    if (static_cast<std::int64_t>(str.size()) > sd.max_len)
      throw std::out_of_range("sequence too long for " + vars_[v].name);
    std::int64_t base = static_cast<std::int64_t>(sd.alphabet.size());
    std::int64_t ord = 0, pw = 1;
    for (std::size_t k = 0; k < str.size(); ++k) {
      ord += pw;
      pw *= base;
    }
    // ord now = index of first string of this length; add lexicographic rank
    std::int64_t rank = 0;
    for (char ch : str) {
      auto p = sd.alphabet.find(ch);
      if (p == std::string::npos)
        throw std::out_of_range("character not in alphabet of " +
                                vars_[v].name);
      rank = rank * base + static_cast<std::int64_t>(p);
    }
    return ord + rank;
  }

  bool contains(const State& s) const {
    if (static_cast<int>(s.values.size()) != var_count()) return false;
    for (int v = 0; v < var_count(); ++v)
      if (!in_domain(v, s.values[v])) return false;
    return true;
  }

  // --- signature sub-spaces -------------------------------------------------
  //
  // A signature is the projection of a state onto a subset of variables
  // (given as a VarMask). States agreeing on the masked variables are
  // interchangeable for any computation that reads only those variables.

  /// Number of distinct projections onto the masked variables.
  std::int64_t signature_count(VarMask mask) const {
    std::int64_t n = 1;
    for (int v = 0; v < var_count(); ++v)
      if (mask & (VarMask{1} << v))
        n = detail::checked_mul(n, card_[v], "signature");
    return n;
  }

  /// Signature index of a state (mixed radix over masked variables in
  /// declaration order).
  std::int64_t signature_of(StateIndex idx, VarMask mask) const {
    std::int64_t sig = 0;
    for (int v = 0; v < var_count(); ++v)
      if (mask & (VarMask{1} << v))
        sig = sig * card_[v] + (idx / stride_[v]) % card_[v];
    return sig;
  }

  /// Representative state index for a signature: masked variables take the
  /// signature's ordinals, all others ordinal 0.
  StateIndex representative_of(std::int64_t sig, VarMask mask) const {
    StateIndex idx = 0;
    for (int v = var_count(); v-- > 0;) {
      if (mask & (VarMask{1} << v)) {
        std::int64_t ord = sig % card_[v];
        sig /= card_[v];
        idx += ord * stride_[v];
      }
    }
    return idx;
  }

  VarMask full_mask() const {
    return var_count() == kMaxVars
               ? ~VarMask{0}
               : ((VarMask{1} << var_count()) - 1);
  }

  /// True iff `code` belongs to some declared char/sequence alphabet.
  bool in_declared_alphabet(std::int64_t code) const {
    return code >= 0 && code < 256 &&
           alpha_union_[static_cast<std::size_t>(code)];
  }

  bool operator==(const Space& other) const {
    if (this == &other) return true;
    if (name_ != other.name_ || vars_.size() != other.vars_.size())
      return false;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].name != other.vars_[i].name) return false;
      if (vars_[i].domain.index() != other.vars_[i].domain.index())
        return false;
      if (card_[i] != other.card_[i]) return false;
    }
    return true;
  }

 private:
  static std::vector<std::string> build_seq_table(const SeqDomain& sd) {
    if (sd.alphabet.empty())
      throw std::invalid_argument("sequence alphabet is empty");
    std::vector<std::string> table;
    table.emplace_back("");
    std::size_t level_begin = 0;
    for (std::int64_t len = 1; len <= sd.max_len; ++len) {
      std::size_t level_end = table.size();
      for (std::size_t i = level_begin; i < level_end; ++i)
        for (char c : sd.alphabet) table.push_back(table[i] + c);
      level_begin = level_end;
    }
    return table;
  }

  std::string name_;
  std::vector<VarDecl> vars_;
  std::vector<std::int64_t> card_;
  std::vector<std::int64_t> stride_;
  std::vector<std::vector<std::string>> seq_tables_;
  std::vector<bool> alpha_union_;
  std::int64_t cardinality_ = 0;
};

using SpacePtr = std::shared_ptr<const Space>;

/// Applies `fn(index)` to every state of the space, in ascending index
/// order. Partitioned variant below must produce the same visit set.
template <typename Fn>
void enumerate(const Space& space, Fn&& fn) {
  for (StateIndex i = 0; i < space.cardinality(); ++i) fn(i);
}

template <typename Fn>
void enumerate_range(const Space& space, StateIndex begin, StateIndex end,
                     Fn&& fn) {
  begin = std::max<StateIndex>(begin, 0);
  end = std::min(end, space.cardinality());
  for (StateIndex i = begin; i < end; ++i) fn(i);
}

// ---------------------------------------------------------------------------
// StateSet
// ---------------------------------------------------------------------------

/// A subset of a space's states, dense bit-per-state.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(SpacePtr space)
      : space_(std::move(space)),
        bits_((static_cast<std::size_t>(space_->cardinality()) + 63) / 64, 0) {}

  static StateSet full(SpacePtr space) {
    StateSet s(space);
    std::fill(s.bits_.begin(), s.bits_.end(), ~std::uint64_t{0});
    s.trim();
    return s;
  }

  const SpacePtr& space() const { return space_; }

  bool contains(StateIndex i) const {
    return (bits_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1;
  }
  void insert(StateIndex i) {
    bits_[static_cast<std::size_t>(i) >> 6] |= std::uint64_t{1} << (i & 63);
  }
  void erase(StateIndex i) {
    bits_[static_cast<std::size_t>(i) >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  std::int64_t cardinality() const {
    std::int64_t n = 0;
    for (auto w : bits_) n += __builtin_popcountll(w);
    return n;
  }
  bool empty() const {
    for (auto w : bits_)
      if (w) return false;
    return true;
  }

  bool operator==(const StateSet& o) const { return bits_ == o.bits_; }

  bool subset_of(const StateSet& o) const {
    check_space(o);
    for (std::size_t k = 0; k < bits_.size(); ++k)
      if (bits_[k] & ~o.bits_[k]) return false;
    return true;
  }

  StateSet unite(const StateSet& o) const {
    check_space(o);
    StateSet r = *this;
    for (std::size_t k = 0; k < bits_.size(); ++k) r.bits_[k] |= o.bits_[k];
    return r;
  }
  StateSet intersect(const StateSet& o) const {
    check_space(o);
    StateSet r = *this;
    for (std::size_t k = 0; k < bits_.size(); ++k) r.bits_[k] &= o.bits_[k];
    return r;
  }
  StateSet difference(const StateSet& o) const {
    check_space(o);
    StateSet r = *this;
    for (std::size_t k = 0; k < bits_.size(); ++k) r.bits_[k] &= ~o.bits_[k];
    return r;
  }
  StateSet complement() const {
    StateSet r = *this;
    for (auto& w : r.bits_) w = ~w;
    r.trim();
    return r;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t k = 0; k < bits_.size(); ++k) {
      std::uint64_t w = bits_[k];
      while (w) {
        int b = __builtin_ctzll(w);
        fn(static_cast<StateIndex>(k * 64 + static_cast<std::size_t>(b)));
        w &= w - 1;
      }
    }
  }

  std::vector<StateIndex> members() const {
    std::vector<StateIndex> out;
    out.reserve(static_cast<std::size_t>(cardinality()));
    for_each([&](StateIndex i) { out.push_back(i); });
    return out;
  }

 private:
  void check_space(const StateSet& o) const {
    if (!space_ || !o.space_ || !(*space_ == *o.space_))
      throw SpaceMismatchError("state sets live on different spaces");
  }
  void trim() {
    std::int64_t n = space_->cardinality();
    if (n % 64 != 0 && !bits_.empty())
      bits_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  }

  SpacePtr space_;
  std::vector<std::uint64_t> bits_;
};

// ---------------------------------------------------------------------------
// Space DSL
// ---------------------------------------------------------------------------
//
//   space := "space" IDENT "{" vardecl+ "}"
//   vardecl := IDENT ":" ("int" INT ".." INT
//                        | "char" "over" STRING
//                        | "seq" "over" STRING "maxlen" INT) ";"

inline void check_alphabet(SourcePos at, const std::string& alpha) {
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (std::size_t j = i + 1; j < alpha.size(); ++j)
      if (alpha[i] == alpha[j])
        throw ParseError(at, std::string("duplicate alphabet character '") +
                                 alpha[i] + "'");
}

inline SpacePtr parse_space(std::string_view text) {
  TokenCursor cur(tokenize(text));
  cur.expect_keyword("space");
  std::string name = cur.expect_ident("space name");
  cur.expect_punct("{");
  std::vector<VarDecl> vars;
  while (!cur.accept_punct("}")) {
    SourcePos at = cur.peek().pos;
    std::string vname = cur.expect_ident("variable name");
    cur.expect_punct(":");
    VarDecl decl;
    decl.name = vname;
    if (cur.accept_keyword("int")) {
      std::int64_t lo = cur.expect_int("range lower bound");
      cur.expect_punct("..");
      std::int64_t hi = cur.expect_int("range upper bound");
      if (lo > hi) throw ParseError(at, "empty range for " + vname);
      decl.domain = IntRangeDomain{lo, hi};
    } else if (cur.accept_keyword("char")) {
      cur.expect_keyword("over");
      if (cur.peek().kind != TokKind::StringLit)
        throw ParseError(cur.peek().pos, "expected alphabet string");
      std::string alpha = cur.next().text;
      if (alpha.empty()) throw ParseError(at, "empty alphabet for " + vname);
      check_alphabet(at, alpha);
      decl.domain = CharDomain{std::move(alpha)};
    } else if (cur.accept_keyword("seq")) {
      cur.expect_keyword("over");
      if (cur.peek().kind != TokKind::StringLit)
        throw ParseError(cur.peek().pos, "expected alphabet string");
      std::string alpha = cur.next().text;
      if (alpha.empty()) throw ParseError(at, "empty alphabet for " + vname);
      check_alphabet(at, alpha);
      cur.expect_keyword("maxlen");
      std::int64_t ml = cur.expect_int("maximum length");
      if (ml < 0) throw ParseError(at, "negative maximum length");
      decl.domain = SeqDomain{std::move(alpha), ml};
    } else {
      throw ParseError(cur.peek().pos, "expected 'int', 'char' or 'seq'");
    }
    cur.expect_punct(";");
    for (const auto& v : vars)
      if (v.name == vname)
        throw ParseError(at, "duplicate variable name: " + vname);
    vars.push_back(std::move(decl));
  }
  if (vars.empty())
    throw ParseError(cur.peek().pos, "space declares no variables");
  if (!cur.at_end())
    throw ParseError(cur.peek().pos, "trailing input after space declaration");
  return std::make_shared<Space>(std::move(name), std::move(vars));
}

}  // namespace relcorr
