#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relcorr/errors.hpp"
#include "relcorr/limits.hpp"
#include "relcorr/space.hpp"

namespace relcorr {

class Relation;

namespace detail {

/// Compressed sparse rows: per source state, a sorted run of image states.
struct Csr {
  std::vector<std::int64_t> offsets;  // size = cardinality + 1
  std::vector<StateIndex> images;

  std::span<const StateIndex> row(StateIndex s) const {
    return {images.data() + offsets[static_cast<std::size_t>(s)],
            images.data() + offsets[static_cast<std::size_t>(s) + 1]};
  }
  bool contains(StateIndex s, StateIndex t) const {
    auto r = row(s);
    return std::binary_search(r.begin(), r.end(), t);
  }
};

struct RelBody {
  virtual ~RelBody() = default;
  virtual bool contains(StateIndex s, StateIndex t) const = 0;
  /// Variables of the source (resp. target) state the membership test may
  /// read. States agreeing on these are interchangeable.
  virtual VarMask unprimed_mask(const Space& sp) const = 0;
  virtual VarMask primed_mask(const Space& sp) const = 0;
  virtual const Csr* csr() const { return nullptr; }
};

struct ExtBody final : RelBody {
  Csr data;
  bool contains(StateIndex s, StateIndex t) const override {
    return data.contains(s, t);
  }
  VarMask unprimed_mask(const Space& sp) const override {
    return sp.full_mask();
  }
  VarMask primed_mask(const Space& sp) const override { return sp.full_mask(); }
  const Csr* csr() const override { return &data; }
};

struct PredBody final : RelBody {
  std::function<bool(StateIndex, StateIndex)> pred;
  VarMask umask, pmask;
  std::optional<StateSet> dom_hint;  // exact domain, when known

  // Per-signature row memo, filled on first touch by materializing paths.
  mutable std::mutex memo_mu;
  mutable std::unordered_map<std::int64_t,
                             std::shared_ptr<const std::vector<StateIndex>>>
      row_memo;

  bool contains(StateIndex s, StateIndex t) const override {
    return pred(s, t);
  }
  VarMask unprimed_mask(const Space&) const override { return umask; }
  VarMask primed_mask(const Space&) const override { return pmask; }
};

struct VectorBody final : RelBody {
  StateSet set;  // relation = set x S
  bool contains(StateIndex s, StateIndex) const override {
    return set.contains(s);
  }
  VarMask unprimed_mask(const Space& sp) const override {
    return sp.full_mask();
  }
  VarMask primed_mask(const Space&) const override { return 0; }
};

struct NotBody final : RelBody {
  std::shared_ptr<const RelBody> child;
  bool contains(StateIndex s, StateIndex t) const override {
    return !child->contains(s, t);
  }
  VarMask unprimed_mask(const Space& sp) const override {
    return child->unprimed_mask(sp);
  }
  VarMask primed_mask(const Space& sp) const override {
    return child->primed_mask(sp);
  }
};

struct ConverseBody final : RelBody {
  std::shared_ptr<const RelBody> child;
  bool contains(StateIndex s, StateIndex t) const override {
    return child->contains(t, s);
  }
  VarMask unprimed_mask(const Space& sp) const override {
    return child->primed_mask(sp);
  }
  VarMask primed_mask(const Space& sp) const override {
    return child->unprimed_mask(sp);
  }
};

enum class SetOp { And, Or, Diff };

struct SetOpBody final : RelBody {
  SetOp op;
  std::shared_ptr<const RelBody> a, b;
  bool contains(StateIndex s, StateIndex t) const override {
    switch (op) {
      case SetOp::And:
        return a->contains(s, t) && b->contains(s, t);
      case SetOp::Or:
        return a->contains(s, t) || b->contains(s, t);
      case SetOp::Diff:
        return a->contains(s, t) && !b->contains(s, t);
    }
    return false;
  }
  VarMask unprimed_mask(const Space& sp) const override {
    return a->unprimed_mask(sp) | b->unprimed_mask(sp);
  }
  VarMask primed_mask(const Space& sp) const override {
    return a->primed_mask(sp) | b->primed_mask(sp);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Relation
// ---------------------------------------------------------------------------

/// A binary relation over a Space, either extensional (per-row image sets)
/// or lazy (a pair predicate evaluated on demand). Semantic equality is
/// representation-independent. Immutable after construction.
class Relation {
 public:
  Relation() = default;

  static Relation empty(SpacePtr space) {
    auto body = std::make_shared<detail::PredBody>();
    body->pred = [](StateIndex, StateIndex) { return false; };
    body->umask = 0;
    body->pmask = 0;
    body->dom_hint = StateSet(space);
    return Relation(std::move(space), std::move(body));
  }

  static Relation universal(SpacePtr space) {
    auto body = std::make_shared<detail::PredBody>();
    body->pred = [](StateIndex, StateIndex) { return true; };
    body->umask = 0;
    body->pmask = 0;
    body->dom_hint = StateSet::full(space);
    return Relation(std::move(space), std::move(body));
  }

  static Relation identity(SpacePtr space) {
    auto body = std::make_shared<detail::PredBody>();
    body->pred = [](StateIndex s, StateIndex t) { return s == t; };
    const Space& sp = *space;
    body->umask = sp.full_mask();
    body->pmask = sp.full_mask();
    body->dom_hint = StateSet::full(space);
    return Relation(std::move(space), std::move(body));
  }

  static Relation from_pairs(SpacePtr space,
                             std::vector<std::pair<StateIndex, StateIndex>> ps) {
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    auto body = std::make_shared<detail::ExtBody>();
    std::int64_t n = space->cardinality();
    body->data.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    body->data.images.reserve(ps.size());
    std::size_t k = 0;
    for (StateIndex s = 0; s < n; ++s) {
      body->data.offsets[static_cast<std::size_t>(s)] =
          static_cast<std::int64_t>(body->data.images.size());
      while (k < ps.size() && ps[k].first == s) {
        if (ps[k].second < 0 || ps[k].second >= n)
          throw std::out_of_range("pair image outside space");
        body->data.images.push_back(ps[k].second);
        ++k;
      }
    }
    if (k < ps.size()) throw std::out_of_range("pair source outside space");
    body->data.offsets[static_cast<std::size_t>(n)] =
        static_cast<std::int64_t>(body->data.images.size());
    return Relation(std::move(space), std::move(body));
  }

  static Relation from_csr(SpacePtr space, detail::Csr csr) {
    auto body = std::make_shared<detail::ExtBody>();
    body->data = std::move(csr);
    return Relation(std::move(space), std::move(body));
  }

  /// Lazy relation from a pair predicate over state indices. `umask` /
  /// `pmask` declare which variables of s / s' the predicate may read;
  /// passing the full mask is always sound.
  static Relation from_predicate(SpacePtr space,
                                 std::function<bool(StateIndex, StateIndex)> fn,
                                 VarMask umask, VarMask pmask,
                                 std::optional<StateSet> dom_hint = {}) {
    auto body = std::make_shared<detail::PredBody>();
    body->pred = std::move(fn);
    body->umask = umask;
    body->pmask = pmask;
    body->dom_hint = std::move(dom_hint);
    return Relation(std::move(space), std::move(body));
  }

  /// The vector A x S: (s, s') is a member iff s is in A.
  static Relation vector_of(const StateSet& a) {
    auto body = std::make_shared<detail::VectorBody>();
    body->set = a;
    return Relation(a.space(), std::move(body));
  }

  const SpacePtr& space() const { return space_; }
  bool valid() const { return body_ != nullptr; }
  bool is_extensional() const { return body_->csr() != nullptr; }

  bool contains(StateIndex s, StateIndex t) const {
    return body_->contains(s, t);
  }
  VarMask unprimed_mask() const { return body_->unprimed_mask(*space_); }
  VarMask primed_mask() const { return body_->primed_mask(*space_); }

  /// Number of pairs; extensional relations only.
  std::int64_t pair_count() const {
    const auto* c = body_->csr();
    if (!c) throw std::logic_error("pair_count on lazy relation");
    return static_cast<std::int64_t>(c->images.size());
  }

  /// Sorted image row; extensional relations only.
  std::span<const StateIndex> row(StateIndex s) const {
    const auto* c = body_->csr();
    if (!c) throw std::logic_error("row on lazy relation");
    return c->row(s);
  }

  const detail::RelBody& body() const { return *body_; }
  const std::shared_ptr<const detail::RelBody>& body_ptr() const {
    return body_;
  }

  /// Wraps an existing body; used by the algebra below.
  static Relation with_body(SpacePtr space,
                            std::shared_ptr<const detail::RelBody> body) {
    return Relation(std::move(space), std::move(body));
  }

 private:
  Relation(SpacePtr space, std::shared_ptr<const detail::RelBody> body)
      : space_(std::move(space)), body_(std::move(body)) {}

  SpacePtr space_;
  std::shared_ptr<const detail::RelBody> body_;
};

namespace detail {

inline void check_same_space(const Relation& a, const Relation& b) {
  if (!(*a.space() == *b.space()))
    throw SpaceMismatchError("relations live on different spaces");
}

/// Row-wise merge of two extensional relations.
template <typename Merge>
Relation merge_ext(const Relation& a, const Relation& b, Merge&& merge) {
  const Csr& ca = *a.body().csr();
  const Csr& cb = *b.body().csr();
  Csr out;
  std::int64_t n = a.space()->cardinality();
  out.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (StateIndex s = 0; s < n; ++s) {
    out.offsets[static_cast<std::size_t>(s)] =
        static_cast<std::int64_t>(out.images.size());
    merge(ca.row(s), cb.row(s), out.images);
  }
  out.offsets[static_cast<std::size_t>(n)] =
      static_cast<std::int64_t>(out.images.size());
  return Relation::from_csr(a.space(), std::move(out));
}

}  // namespace detail

// --- set algebra -----------------------------------------------------------

inline Relation unite(const Relation& a, const Relation& b) {
  detail::check_same_space(a, b);
  if (a.is_extensional() && b.is_extensional())
    return detail::merge_ext(
        a, b,
        [](std::span<const StateIndex> x, std::span<const StateIndex> y,
           std::vector<StateIndex>& out) {
          std::set_union(x.begin(), x.end(), y.begin(), y.end(),
                         std::back_inserter(out));
        });
  auto body = std::make_shared<detail::SetOpBody>();
  body->op = detail::SetOp::Or;
  body->a = a.body_ptr();
  body->b = b.body_ptr();
  return Relation::with_body(a.space(), std::move(body));
}

inline Relation intersect(const Relation& a, const Relation& b) {
  detail::check_same_space(a, b);
  if (a.is_extensional() && b.is_extensional())
    return detail::merge_ext(
        a, b,
        [](std::span<const StateIndex> x, std::span<const StateIndex> y,
           std::vector<StateIndex>& out) {
          std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                                std::back_inserter(out));
        });
  auto body = std::make_shared<detail::SetOpBody>();
  body->op = detail::SetOp::And;
  body->a = a.body_ptr();
  body->b = b.body_ptr();
  return Relation::with_body(a.space(), std::move(body));
}

inline Relation difference(const Relation& a, const Relation& b) {
  detail::check_same_space(a, b);
  if (a.is_extensional() && b.is_extensional())
    return detail::merge_ext(
        a, b,
        [](std::span<const StateIndex> x, std::span<const StateIndex> y,
           std::vector<StateIndex>& out) {
          std::set_difference(x.begin(), x.end(), y.begin(), y.end(),
                              std::back_inserter(out));
        });
  auto body = std::make_shared<detail::SetOpBody>();
  body->op = detail::SetOp::Diff;
  body->a = a.body_ptr();
  body->b = b.body_ptr();
  return Relation::with_body(a.space(), std::move(body));
}

/// Complements stay lazy: materializing would be quadratic in the space.
inline Relation complement(const Relation& r) {
  auto body = std::make_shared<detail::NotBody>();
  body->child = r.body_ptr();
  return Relation::with_body(r.space(), std::move(body));
}

inline Relation converse(const Relation& r) {
  if (r.is_extensional()) {
    const detail::Csr& c = *r.body().csr();
    detail::Csr out;
    std::int64_t n = r.space()->cardinality();
    out.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (StateIndex t : c.images) ++out.offsets[static_cast<std::size_t>(t) + 1];
    for (std::size_t k = 1; k < out.offsets.size(); ++k)
      out.offsets[k] += out.offsets[k - 1];
    out.images.resize(c.images.size());
    std::vector<std::int64_t> cursor(out.offsets.begin(),
                                     out.offsets.end() - 1);
    for (StateIndex s = 0; s < n; ++s)
      for (StateIndex t : c.row(s))
        out.images[static_cast<std::size_t>(
            cursor[static_cast<std::size_t>(t)]++)] = s;
    return Relation::from_csr(r.space(), std::move(out));
  }
  auto body = std::make_shared<detail::ConverseBody>();
  body->child = r.body_ptr();
  return Relation::with_body(r.space(), std::move(body));
}

// --- materialization and traversal ------------------------------------------

namespace detail {

inline std::int64_t charge(std::int64_t& budget, std::int64_t cost,
                           const char* what) {
  if (cost > budget)
    throw CapExceededError(std::string(what) +
                           ": work budget exceeded (needs " +
                           std::to_string(cost) + " evaluations)");
  budget -= cost;
  return cost;
}

/// Image row of a lazy relation for one unprimed-signature class, memoized
/// on the PredBody when the body is a plain predicate.
inline std::shared_ptr<const std::vector<StateIndex>> lazy_row(
    const Relation& r, std::int64_t sig, VarMask umask) {
  const Space& sp = *r.space();
  const auto* pb = dynamic_cast<const PredBody*>(&r.body());
  if (pb) {
    std::lock_guard<std::mutex> lock(pb->memo_mu);
    auto it = pb->row_memo.find(sig);
    if (it != pb->row_memo.end()) return it->second;
  }
  StateIndex s = sp.representative_of(sig, umask);
  auto row = std::make_shared<std::vector<StateIndex>>();
  for (StateIndex t = 0; t < sp.cardinality(); ++t)
    if (r.contains(s, t)) row->push_back(t);
  if (pb) {
    std::lock_guard<std::mutex> lock(pb->memo_mu);
    pb->row_memo.emplace(sig, row);
  }
  return row;
}

}  // namespace detail

/// Extensional form of a relation. Throws CapExceededError when the space
/// exceeds the materialization cap or the scan would exceed `budget`
/// predicate evaluations.
inline Relation materialize(const Relation& r,
                            std::int64_t budget = kDefaultWorkBudget) {
  if (r.is_extensional()) return r;
  const Space& sp = *r.space();
  std::int64_t n = sp.cardinality();
  if (n > kMaterializeStateCap)
    throw CapExceededError("space too large to materialize a relation");
  VarMask umask = r.unprimed_mask();
  std::int64_t groups = sp.signature_count(umask);
  detail::charge(budget, detail::checked_mul(groups, n, "materialize"),
                 "materialize");
  std::vector<std::shared_ptr<const std::vector<StateIndex>>> rows(
      static_cast<std::size_t>(groups));
  detail::Csr out;
  out.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (StateIndex s = 0; s < n; ++s) {
    out.offsets[static_cast<std::size_t>(s)] =
        static_cast<std::int64_t>(out.images.size());
    std::int64_t sig = sp.signature_of(s, umask);
    auto& row = rows[static_cast<std::size_t>(sig)];
    if (!row) row = detail::lazy_row(r, sig, umask);
    if (static_cast<std::int64_t>(out.images.size() + row->size()) > budget + n)
      throw CapExceededError("materialize: pair count exceeds budget");
    out.images.insert(out.images.end(), row->begin(), row->end());
  }
  out.offsets[static_cast<std::size_t>(n)] =
      static_cast<std::int64_t>(out.images.size());
  return Relation::from_csr(r.space(), std::move(out));
}

// --- domain ------------------------------------------------------------------

namespace detail {

inline std::optional<StateSet> exact_dom_shortcut(const Relation& r,
                                                  std::int64_t budget);

/// Witness search for dom(r) over signature classes: a state s is in the
/// domain iff some target-signature representative satisfies the predicate.
inline StateSet dom_by_witness_search(const Relation& r, std::int64_t budget) {
  const Space& sp = *r.space();
  std::int64_t n = sp.cardinality();
  VarMask umask = r.unprimed_mask();
  VarMask pmask = r.primed_mask();
  std::int64_t groups = sp.signature_count(umask);
  std::int64_t reps = sp.signature_count(pmask);
  charge(budget, checked_mul(groups, reps, "domain search"), "domain search");
  std::vector<char> in_dom(static_cast<std::size_t>(groups), 0);
  for (std::int64_t g = 0; g < groups; ++g) {
    StateIndex s = sp.representative_of(g, umask);
    for (std::int64_t h = 0; h < reps; ++h) {
      StateIndex t = sp.representative_of(h, pmask);
      if (r.contains(s, t)) {
        in_dom[static_cast<std::size_t>(g)] = 1;
        break;
      }
    }
  }
  StateSet out(r.space());
  for (StateIndex s = 0; s < n; ++s)
    if (in_dom[static_cast<std::size_t>(sp.signature_of(s, umask))])
      out.insert(s);
  return out;
}

}  // namespace detail

/// dom(r) = { s | exists s' with (s, s') in r }.
inline StateSet domain(const Relation& r,
                       std::int64_t budget = kDefaultWorkBudget) {
  if (auto hit = detail::exact_dom_shortcut(r, budget)) return *hit;
  return detail::dom_by_witness_search(r, budget);
}

namespace detail {

inline std::optional<StateSet> exact_dom_shortcut(const Relation& r,
                                                  std::int64_t budget) {
  const RelBody& b = r.body();
  if (const auto* ext = b.csr()) {
    StateSet out(r.space());
    std::int64_t n = r.space()->cardinality();
    for (StateIndex s = 0; s < n; ++s)
      if (ext->offsets[static_cast<std::size_t>(s) + 1] >
          ext->offsets[static_cast<std::size_t>(s)])
        out.insert(s);
    return out;
  }
  if (const auto* vec = dynamic_cast<const VectorBody*>(&b)) return vec->set;
  if (const auto* pred = dynamic_cast<const PredBody*>(&b))
    if (pred->dom_hint) return *pred->dom_hint;
  if (const auto* so = dynamic_cast<const SetOpBody*>(&b)) {
    Relation ra = Relation::with_body(r.space(), so->a);
    Relation rb = Relation::with_body(r.space(), so->b);
    if (so->op == SetOp::Or)
      return domain(ra, budget).unite(domain(rb, budget));
    if (so->op == SetOp::And) {
      // dom(x inter (A x S)) = dom(x) inter A
      if (const auto* va = dynamic_cast<const VectorBody*>(so->a.get()))
        return domain(rb, budget).intersect(va->set);
      if (const auto* vb = dynamic_cast<const VectorBody*>(so->b.get()))
        return domain(ra, budget).intersect(vb->set);
      // One extensional side: stream its pairs through the other.
      const Relation* ext = nullptr;
      const Relation* other = nullptr;
      if (so->a->csr()) {
        ext = &ra;
        other = &rb;
      } else if (so->b->csr()) {
        ext = &rb;
        other = &ra;
      }
      if (ext) {
        charge(budget, ext->pair_count(), "domain search");
        StateSet out(r.space());
        std::int64_t n = r.space()->cardinality();
        for (StateIndex s = 0; s < n; ++s)
          for (StateIndex t : ext->row(s))
            if (other->contains(s, t)) {
              out.insert(s);
              break;
            }
        return out;
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// The domain vector dom(r) x S, the relational representation of dom(r).
inline Relation dom_vector(const Relation& r,
                           std::int64_t budget = kDefaultWorkBudget) {
  return Relation::vector_of(domain(r, budget));
}

// --- composition --------------------------------------------------------------

inline Relation compose(const Relation& a, const Relation& b,
                        std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(a, b);
  Relation ma = materialize(a, budget);
  Relation mb = materialize(b, budget);
  const Space& sp = *a.space();
  std::int64_t n = sp.cardinality();
  detail::Csr out;
  out.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  std::vector<char> mark(static_cast<std::size_t>(n), 0);
  std::vector<StateIndex> touched;
  std::int64_t work = 0;
  for (StateIndex s = 0; s < n; ++s) {
    out.offsets[static_cast<std::size_t>(s)] =
        static_cast<std::int64_t>(out.images.size());
    touched.clear();
    for (StateIndex m : ma.row(s)) {
      auto rb = mb.row(m);
      work += static_cast<std::int64_t>(rb.size()) + 1;
      if (work > budget)
        throw CapExceededError("compose: work budget exceeded");
      for (StateIndex t : rb)
        if (!mark[static_cast<std::size_t>(t)]) {
          mark[static_cast<std::size_t>(t)] = 1;
          touched.push_back(t);
        }
    }
    std::sort(touched.begin(), touched.end());
    out.images.insert(out.images.end(), touched.begin(), touched.end());
    for (StateIndex t : touched) mark[static_cast<std::size_t>(t)] = 0;
  }
  out.offsets[static_cast<std::size_t>(n)] =
      static_cast<std::int64_t>(out.images.size());
  return Relation::from_csr(a.space(), std::move(out));
}

// --- comparison ----------------------------------------------------------------

/// r1 subset of r2, i.e. every pair of r1 is a pair of r2.
inline bool subset_of(const Relation& r1, const Relation& r2,
                      std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(r1, r2);
  const Space& sp = *r1.space();
  std::int64_t n = sp.cardinality();
  if (r1.is_extensional()) {
    detail::charge(budget, r1.pair_count(), "subset");
    for (StateIndex s = 0; s < n; ++s)
      for (StateIndex t : r1.row(s))
        if (!r2.contains(s, t)) return false;
    return true;
  }
  VarMask u = r1.unprimed_mask() | r2.unprimed_mask();
  VarMask p = r1.primed_mask() | r2.primed_mask();
  std::int64_t su = sp.signature_count(u);
  std::int64_t tp = sp.signature_count(p);
  detail::charge(budget, detail::checked_mul(su, tp, "subset"), "subset");
  for (std::int64_t g = 0; g < su; ++g) {
    StateIndex s = sp.representative_of(g, u);
    for (std::int64_t h = 0; h < tp; ++h) {
      StateIndex t = sp.representative_of(h, p);
      if (r1.contains(s, t) && !r2.contains(s, t)) return false;
    }
  }
  return true;
}

/// Semantic pair-set equality, representation-independent.
inline bool equals(const Relation& r1, const Relation& r2,
                   std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(r1, r2);
  const Space& sp = *r1.space();
  std::int64_t n = sp.cardinality();
  if (r1.is_extensional() && r2.is_extensional()) {
    const detail::Csr& a = *r1.body().csr();
    const detail::Csr& b = *r2.body().csr();
    return a.offsets == b.offsets && a.images == b.images;
  }
  if (r1.is_extensional() || r2.is_extensional()) {
    const Relation& E = r1.is_extensional() ? r1 : r2;
    const Relation& Z = r1.is_extensional() ? r2 : r1;
    VarMask u = Z.unprimed_mask();
    std::int64_t groups = sp.signature_count(u);
    detail::charge(budget, detail::checked_mul(groups, n, "equals"), "equals");
    std::vector<std::shared_ptr<const std::vector<StateIndex>>> rows(
        static_cast<std::size_t>(groups));
    for (StateIndex s = 0; s < n; ++s) {
      std::int64_t sig = sp.signature_of(s, u);
      auto& row = rows[static_cast<std::size_t>(sig)];
      if (!row) row = detail::lazy_row(Z, sig, u);
      auto er = E.row(s);
      if (er.size() != row->size() ||
          !std::equal(er.begin(), er.end(), row->begin()))
        return false;
    }
    return true;
  }
  VarMask u = r1.unprimed_mask() | r2.unprimed_mask();
  VarMask p = r1.primed_mask() | r2.primed_mask();
  std::int64_t su = sp.signature_count(u);
  std::int64_t tp = sp.signature_count(p);
  detail::charge(budget, detail::checked_mul(su, tp, "equals"), "equals");
  for (std::int64_t g = 0; g < su; ++g) {
    StateIndex s = sp.representative_of(g, u);
    for (std::int64_t h = 0; h < tp; ++h) {
      StateIndex t = sp.representative_of(h, p);
      if (r1.contains(s, t) != r2.contains(s, t)) return false;
    }
  }
  return true;
}

/// { (s, s') in r | s in a }.
inline Relation restrict_pre(const Relation& r, const StateSet& a) {
  if (!(*r.space() == *a.space()))
    throw SpaceMismatchError("restrict_pre: set on a different space");
  if (r.is_extensional()) {
    const detail::Csr& c = *r.body().csr();
    detail::Csr out;
    std::int64_t n = r.space()->cardinality();
    out.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (StateIndex s = 0; s < n; ++s) {
      out.offsets[static_cast<std::size_t>(s)] =
          static_cast<std::int64_t>(out.images.size());
      if (a.contains(s)) {
        auto row = c.row(s);
        out.images.insert(out.images.end(), row.begin(), row.end());
      }
    }
    out.offsets[static_cast<std::size_t>(n)] =
        static_cast<std::int64_t>(out.images.size());
    return Relation::from_csr(r.space(), std::move(out));
  }
  return intersect(r, Relation::vector_of(a));
}

// --- property predicates -----------------------------------------------------
//
// Each predicate decides its defining relational property; the definitional
// formulas (I subset RR^, R^R subset I, RL = R, ...) are cross-checked by the
// differential tests.

inline bool is_reflexive(const Relation& r,
                         std::int64_t budget = kDefaultWorkBudget) {
  const Space& sp = *r.space();
  VarMask m = r.unprimed_mask() | r.primed_mask();
  std::int64_t groups = sp.signature_count(m);
  detail::charge(budget, groups, "is_reflexive");
  for (std::int64_t g = 0; g < groups; ++g) {
    StateIndex s = sp.representative_of(g, m);
    if (!r.contains(s, s)) return false;
  }
  return true;
}

inline bool is_symmetric(const Relation& r,
                         std::int64_t budget = kDefaultWorkBudget) {
  return equals(r, converse(r), budget);
}

inline bool is_antisymmetric(const Relation& r,
                             std::int64_t budget = kDefaultWorkBudget) {
  return subset_of(intersect(r, converse(r)), Relation::identity(r.space()),
                   budget);
}

inline bool is_asymmetric(const Relation& r,
                          std::int64_t budget = kDefaultWorkBudget) {
  return subset_of(intersect(r, converse(r)), Relation::empty(r.space()),
                   budget);
}

inline bool is_transitive(const Relation& r,
                          std::int64_t budget = kDefaultWorkBudget) {
  return subset_of(compose(r, r, budget), r, budget);
}

inline bool is_total(const Relation& r,
                     std::int64_t budget = kDefaultWorkBudget) {
  return domain(r, budget).cardinality() == r.space()->cardinality();
}

inline bool is_deterministic(const Relation& r,
                             std::int64_t budget = kDefaultWorkBudget) {
  const Space& sp = *r.space();
  std::int64_t n = sp.cardinality();
  if (r.is_extensional()) {
    const detail::Csr& c = *r.body().csr();
    for (StateIndex s = 0; s < n; ++s)
      if (c.offsets[static_cast<std::size_t>(s) + 1] -
              c.offsets[static_cast<std::size_t>(s)] >
          1)
        return false;
    return true;
  }
  StateSet d = domain(r, budget);
  if (d.empty()) return true;
  // A primed variable the predicate never reads is unconstrained, so any
  // nonempty row contains a whole fiber over it.
  VarMask unread = sp.full_mask() & ~r.primed_mask();
  if (sp.signature_count(unread) > 1) return false;
  VarMask u = r.unprimed_mask();
  std::int64_t groups = sp.signature_count(u);
  detail::charge(budget, detail::checked_mul(groups, n, "is_deterministic"),
                 "is_deterministic");
  for (std::int64_t g = 0; g < groups; ++g) {
    StateIndex s = sp.representative_of(g, u);
    int count = 0;
    for (StateIndex t = 0; t < n && count < 2; ++t)
      if (r.contains(s, t)) ++count;
    if (count > 1) return false;
  }
  return true;
}

inline bool is_vector(const Relation& r,
                      std::int64_t budget = kDefaultWorkBudget) {
  const Space& sp = *r.space();
  std::int64_t n = sp.cardinality();
  if (r.is_extensional()) {
    const detail::Csr& c = *r.body().csr();
    for (StateIndex s = 0; s < n; ++s) {
      std::int64_t len = c.offsets[static_cast<std::size_t>(s) + 1] -
                         c.offsets[static_cast<std::size_t>(s)];
      if (len != 0 && len != n) return false;
    }
    return true;
  }
  if (dynamic_cast<const detail::VectorBody*>(&r.body())) return true;
  VarMask u = r.unprimed_mask();
  VarMask p = r.primed_mask();
  std::int64_t su = sp.signature_count(u);
  std::int64_t tp = sp.signature_count(p);
  detail::charge(budget, detail::checked_mul(su, tp, "is_vector"),
                 "is_vector");
  for (std::int64_t g = 0; g < su; ++g) {
    StateIndex s = sp.representative_of(g, u);
    bool first = r.contains(s, sp.representative_of(0, p));
    for (std::int64_t h = 1; h < tp; ++h)
      if (r.contains(s, sp.representative_of(h, p)) != first) return false;
  }
  return true;
}

}  // namespace relcorr
