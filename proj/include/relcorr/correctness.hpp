#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relcorr/relation.hpp"
#include "relcorr/space.hpp"

namespace relcorr {

// ---------------------------------------------------------------------------
// Refinement and absolute correctness
// ---------------------------------------------------------------------------

/// r2 refines r1 iff r1 L subset r2 L, and r1 L inter r2 subset r1: r2 has
/// at least r1's domain and, on it, only images r1 allows.
inline bool refines(const Relation& r2, const Relation& r1,
                    std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(r1, r2);
  StateSet d1 = domain(r1, budget);
  if (!d1.subset_of(domain(r2, budget))) return false;
  const Space& sp = *r1.space();
  if (r2.is_extensional()) {
    std::int64_t n = sp.cardinality();
    for (StateIndex s = 0; s < n; ++s) {
      if (!d1.contains(s)) continue;
      for (StateIndex t : r2.row(s))
        if (!r1.contains(s, t)) return false;
    }
    return true;
  }
  VarMask u = r1.unprimed_mask() | r2.unprimed_mask();
  VarMask p = r1.primed_mask() | r2.primed_mask();
  std::int64_t su = sp.signature_count(u);
  std::int64_t tp = sp.signature_count(p);
  detail::charge(budget, detail::checked_mul(su, tp, "refines"), "refines");
  for (std::int64_t g = 0; g < su; ++g) {
    StateIndex s = sp.representative_of(g, u);
    if (!d1.contains(s)) continue;  // d1 is constant on these classes
    for (std::int64_t h = 0; h < tp; ++h) {
      StateIndex t = sp.representative_of(h, p);
      if (r2.contains(s, t) && !r1.contains(s, t)) return false;
    }
  }
  return true;
}

/// A program is correct with respect to r iff its function refines r.
inline bool is_correct(const Relation& p, const Relation& r,
                       std::int64_t budget = kDefaultWorkBudget) {
  return refines(p, r, budget);
}

/// dom(r inter p): the inputs on which p satisfies r.
inline StateSet competence_domain(const Relation& p, const Relation& r,
                                  std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(p, r);
  return domain(intersect(r, p), budget);
}

// ---------------------------------------------------------------------------
// Relative correctness
// ---------------------------------------------------------------------------

/// Deterministic-program form: p2 is more-correct than p1 w.r.t. r iff
/// (r inter p2) L superset (r inter p1) L.
inline bool more_correct_det(const Relation& p2, const Relation& p1,
                             const Relation& r,
                             std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(p1, p2);
  detail::check_same_space(p1, r);
  if (!is_deterministic(p1, budget) || !is_deterministic(p2, budget))
    throw NondeterministicArgumentError(
        "more_correct_det requires deterministic programs");
  return competence_domain(p1, r, budget)
      .subset_of(competence_domain(p2, r, budget));
}

inline bool strictly_more_correct_det(const Relation& p2, const Relation& p1,
                                      const Relation& r,
                                      std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(p1, p2);
  detail::check_same_space(p1, r);
  if (!is_deterministic(p1, budget) || !is_deterministic(p2, budget))
    throw NondeterministicArgumentError(
        "strictly_more_correct_det requires deterministic programs");
  StateSet c1 = competence_domain(p1, r, budget);
  StateSet c2 = competence_domain(p2, r, budget);
  return c1.subset_of(c2) && !(c1 == c2);
}

/// General form: additionally, on p1's competence domain, p2 may not add
/// wrong outcomes p1 does not already have:
/// (r inter p1) L inter complement(r) inter p2 subset p1.
inline bool more_correct(const Relation& p2, const Relation& p1,
                         const Relation& r,
                         std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(p1, p2);
  detail::check_same_space(p1, r);
  StateSet cd1 = competence_domain(p1, r, budget);
  if (!cd1.subset_of(competence_domain(p2, r, budget))) return false;
  const Space& sp = *r.space();
  if (p2.is_extensional()) {
    std::int64_t n = sp.cardinality();
    for (StateIndex s = 0; s < n; ++s) {
      if (!cd1.contains(s)) continue;
      for (StateIndex t : p2.row(s))
        if (!r.contains(s, t) && !p1.contains(s, t)) return false;
    }
    return true;
  }
  VarMask u = p2.unprimed_mask() | r.unprimed_mask() | p1.unprimed_mask();
  VarMask p = p2.primed_mask() | r.primed_mask() | p1.primed_mask();
  std::int64_t su = sp.signature_count(u);
  std::int64_t tp = sp.signature_count(p);
  detail::charge(budget, detail::checked_mul(su, tp, "more_correct"),
                 "more_correct");
  for (std::int64_t g = 0; g < su; ++g) {
    StateIndex s = sp.representative_of(g, u);
    if (!cd1.contains(s)) continue;
    for (std::int64_t h = 0; h < tp; ++h) {
      StateIndex t = sp.representative_of(h, p);
      if (p2.contains(s, t) && !r.contains(s, t) && !p1.contains(s, t))
        return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Projection
// ---------------------------------------------------------------------------

/// The projection of p over r: (r inter p) L inter (r union p) — the part
/// of p's behavior mandated by r.
inline Relation projection(const Relation& r, const Relation& p,
                           std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(r, p);
  StateSet cd = competence_domain(p, r, budget);
  return intersect(Relation::vector_of(cd), unite(r, p));
}

// ---------------------------------------------------------------------------
// Derivation chains
// ---------------------------------------------------------------------------

enum class PairVerdict {
  MoreCorrect,          // mutually more-correct (equally correct included)
  StrictlyMoreCorrect,  // later program strictly improves on the earlier
  Incomparable,
  LessCorrect,
};

inline const char* to_string(PairVerdict v) {
  switch (v) {
    case PairVerdict::MoreCorrect: return "more_correct";
    case PairVerdict::StrictlyMoreCorrect: return "strictly_more_correct";
    case PairVerdict::Incomparable: return "incomparable";
    case PairVerdict::LessCorrect: return "less_correct";
  }
  return "?";
}

struct NamedRelation {
  std::string name;
  Relation relation;
};

struct ChainVerdict {
  std::vector<std::string> names;
  /// adjacent[i] classifies programs[i+1] against programs[i].
  std::vector<PairVerdict> adjacent;
  std::vector<StateSet> competence_domains;
  bool final_correct = false;
};

/// Classifies each adjacent pair of the chain under the general
/// relative-correctness order and flags the last program's absolute
/// correctness.
inline ChainVerdict order_chain(const Relation& r,
                                const std::vector<NamedRelation>& progs,
                                std::int64_t budget = kDefaultWorkBudget) {
  if (progs.size() < 2)
    throw std::invalid_argument("order_chain needs at least two programs");
  ChainVerdict out;
  for (const auto& np : progs) {
    out.names.push_back(np.name);
    out.competence_domains.push_back(
        competence_domain(np.relation, r, budget));
  }
  for (std::size_t i = 0; i + 1 < progs.size(); ++i) {
    bool up = more_correct(progs[i + 1].relation, progs[i].relation, r, budget);
    bool down =
        more_correct(progs[i].relation, progs[i + 1].relation, r, budget);
    PairVerdict v = up ? (down ? PairVerdict::MoreCorrect
                               : PairVerdict::StrictlyMoreCorrect)
                       : (down ? PairVerdict::LessCorrect
                               : PairVerdict::Incomparable);
    out.adjacent.push_back(v);
  }
  out.final_correct = is_correct(progs.back().relation, r, budget);
  return out;
}

// ---------------------------------------------------------------------------
// Hasse diagram of candidate programs
// ---------------------------------------------------------------------------

struct HasseNode {
  std::vector<std::string> names;  // sorted; equally-correct programs merged
  StateSet competence;
  bool correct = false;
};

struct HasseDiagram {
  std::vector<HasseNode> nodes;  // sorted by first name
  /// (a, b) means nodes[b] is strictly more-correct than nodes[a]; edges
  /// form the transitive reduction of the strict order.
  std::vector<std::pair<int, int>> edges;
};

inline HasseDiagram hasse(const Relation& r,
                          const std::vector<NamedRelation>& progs,
                          std::int64_t budget = kDefaultWorkBudget) {
  if (progs.empty()) throw std::invalid_argument("hasse needs programs");
  std::size_t n = progs.size();
  std::vector<StateSet> cds;
  cds.reserve(n);
  bool all_det = true;
  for (const auto& np : progs) {
    cds.push_back(competence_domain(np.relation, r, budget));
    all_det = all_det && is_deterministic(np.relation, budget);
  }
  // mc[i][j]: program i is more-correct than program j.
  std::vector<std::vector<char>> mc(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      mc[i][j] = all_det ? cds[j].subset_of(cds[i])
                         : more_correct(progs[i].relation, progs[j].relation,
                                        r, budget);
  // Merge equally-correct programs.
  std::vector<int> cls(n, -1);
  std::vector<std::vector<int>> classes;
  for (std::size_t i = 0; i < n; ++i) {
    if (cls[i] >= 0) continue;
    int id = static_cast<int>(classes.size());
    classes.push_back({static_cast<int>(i)});
    cls[i] = id;
    for (std::size_t j = i + 1; j < n; ++j)
      if (cls[j] < 0 && mc[i][j] && mc[j][i]) {
        cls[j] = id;
        classes.back().push_back(static_cast<int>(j));
      }
  }
  HasseDiagram out;
  std::vector<int> order(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c)
    order[c] = static_cast<int>(c);
  auto min_name = [&](int c) -> const std::string& {
    const std::string* best =
        &progs[static_cast<std::size_t>(classes[static_cast<std::size_t>(c)][0])]
             .name;
    for (int i : classes[static_cast<std::size_t>(c)])
      if (progs[static_cast<std::size_t>(i)].name < *best)
        best = &progs[static_cast<std::size_t>(i)].name;
    return *best;
  };
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return min_name(a) < min_name(b); });
  std::vector<int> pos(classes.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    pos[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
  for (int c : order) {
    HasseNode node;
    for (int i : classes[static_cast<std::size_t>(c)])
      node.names.push_back(progs[static_cast<std::size_t>(i)].name);
    std::sort(node.names.begin(), node.names.end());
    node.competence = cds[static_cast<std::size_t>(
        classes[static_cast<std::size_t>(c)][0])];
    node.correct = is_correct(
        progs[static_cast<std::size_t>(classes[static_cast<std::size_t>(c)][0])]
            .relation,
        r, budget);
    out.nodes.push_back(std::move(node));
  }
  // Strict order between classes, then transitive reduction.
  std::size_t m = classes.size();
  std::vector<std::vector<char>> lt(m, std::vector<char>(m, 0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      int ia = classes[a][0], ib = classes[b][0];
      lt[pos[a]][pos[b]] =
          mc[static_cast<std::size_t>(ib)][static_cast<std::size_t>(ia)] &&
          !mc[static_cast<std::size_t>(ia)][static_cast<std::size_t>(ib)];
    }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      if (!lt[a][b]) continue;
      bool direct = true;
      for (std::size_t c = 0; c < m && direct; ++c)
        if (c != a && c != b && lt[a][c] && lt[c][b]) direct = false;
      if (direct)
        out.edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

/// DOT rendering: one node per equivalence class, label = sorted program
/// names, edges pointing toward the more-correct class (drawn upward).
/// Correct classes are doubly circled.
inline std::string to_dot(const HasseDiagram& d,
                          const std::string& graph_name = "relative_correctness") {
  std::string out = "digraph " + graph_name + " {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    out += "  n" + std::to_string(i) + " [label=\"";
    for (std::size_t k = 0; k < d.nodes[i].names.size(); ++k) {
      if (k) out += ", ";
      out += d.nodes[i].names[k];
    }
    out += "\"";
    if (d.nodes[i].correct) out += ", peripheries=2";
    out += "];\n";
  }
  for (auto [a, b] : d.edges)
    out += "  n" + std::to_string(a) + " -> n" + std::to_string(b) + ";\n";
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force check: refinement coincides with universal relative
// correctness
// ---------------------------------------------------------------------------

enum class BruteforceMode { Deterministic, AllRelations };

/// Small relations encoded as bit masks: pair (i, j) occupies bit i*n + j.
struct BruteforceCounterexample {
  std::uint32_t p1, p2, spec;
  bool refines;
  bool universally_more_correct;
};

struct BruteforceReport {
  int n_states = 0;
  BruteforceMode mode{};
  std::int64_t program_pairs = 0;
  std::int64_t counterexamples = 0;
  std::optional<BruteforceCounterexample> first;
  bool equivalence_holds = false;
};

namespace detail {

inline std::uint32_t bf_row(std::uint32_t rel, int i, int n) {
  return (rel >> (i * n)) & ((std::uint32_t{1} << n) - 1);
}

inline bool bf_refines(std::uint32_t r2, std::uint32_t r1, int n) {
  for (int i = 0; i < n; ++i) {
    std::uint32_t row1 = bf_row(r1, i, n);
    std::uint32_t row2 = bf_row(r2, i, n);
    if (!row1) continue;
    if (!row2) return false;          // dom(r1) not within dom(r2)
    if (row2 & ~row1) return false;   // extra images on r1's domain
  }
  return true;
}

inline bool bf_more_correct(std::uint32_t p2, std::uint32_t p1,
                            std::uint32_t r, int n) {
  for (int i = 0; i < n; ++i) {
    std::uint32_t rr = bf_row(r, i, n);
    std::uint32_t c1 = rr & bf_row(p1, i, n);
    if (!c1) continue;  // i outside (r inter p1) L
    std::uint32_t row2 = bf_row(p2, i, n);
    if (!(rr & row2)) return false;              // competence lost
    if (row2 & ~rr & ~bf_row(p1, i, n)) return false;  // new wrong outcome
  }
  return true;
}

}  // namespace detail

/// Exhaustively checks refines(P', P) <=> (for all specs R: P' more-correct
/// than P w.r.t. R). Deterministic mode quantifies P, P' over all partial
/// functions (spaces up to 4 states); AllRelations mode over all relations
/// (up to 3 states) and is reported descriptively.
inline BruteforceReport refinement_equiv_bruteforce(int n_states,
                                                    BruteforceMode mode) {
  if (n_states < 1 ||
      (mode == BruteforceMode::Deterministic && n_states > 4) ||
      (mode == BruteforceMode::AllRelations && n_states > 3))
    throw std::invalid_argument("space too large for brute force");
  int n = n_states;
  std::vector<std::uint32_t> programs;
  if (mode == BruteforceMode::Deterministic) {
    // Every partial function: image of each state in {none, 0, .., n-1}.
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) total *= n + 1;
    for (std::int64_t code = 0; code < total; ++code) {
      std::int64_t c = code;
      std::uint32_t rel = 0;
      for (int i = 0; i < n; ++i) {
        int img = static_cast<int>(c % (n + 1)) - 1;
        c /= n + 1;
        if (img >= 0) rel |= std::uint32_t{1} << (i * n + img);
      }
      programs.push_back(rel);
    }
  } else {
    std::uint32_t total = std::uint32_t{1} << (n * n);
    for (std::uint32_t rel = 0; rel < total; ++rel) programs.push_back(rel);
  }
  std::uint32_t spec_total = std::uint32_t{1} << (n * n);
  BruteforceReport report;
  report.n_states = n;
  report.mode = mode;
  for (std::uint32_t p1 : programs) {
    for (std::uint32_t p2 : programs) {
      ++report.program_pairs;
      bool ref = detail::bf_refines(p2, p1, n);
      bool all_mc = true;
      std::uint32_t bad_spec = 0;
      for (std::uint32_t r = 0; r < spec_total; ++r)
        if (!detail::bf_more_correct(p2, p1, r, n)) {
          all_mc = false;
          bad_spec = r;
          break;
        }
      if (ref != all_mc) {
        ++report.counterexamples;
        if (!report.first)
          report.first =
              BruteforceCounterexample{p1, p2, bad_spec, ref, all_mc};
      }
    }
  }
  report.equivalence_holds = report.counterexamples == 0;
  return report;
}

}  // namespace relcorr
