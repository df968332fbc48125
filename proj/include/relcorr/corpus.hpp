#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "relcorr/correctness.hpp"
#include "relcorr/minilang.hpp"
#include "relcorr/oracles.hpp"
#include "relcorr/relation.hpp"
#include "relcorr/reliability.hpp"
#include "relcorr/speclang.hpp"

namespace relcorr {

// ---------------------------------------------------------------------------
// Bundled case studies: cube, fermat, sqrt, strings.
//
// Each case bundles a space, a specification with a domain claim, a program
// chain (or candidate set), and expected competence domains stated as
// native predicates backed by the brute-force oracles. Replaying a case
// recomputes everything from the DSL sources and checks each claim;
// value-bound truncations are spelled out in the check descriptions rather
// than silently absorbed.
// ---------------------------------------------------------------------------

struct CorpusOptions {
  std::int64_t fuel = kDefaultFuel;
  std::int64_t budget = kDefaultWorkBudget;
  std::uint64_t seed = 1234;
  std::int64_t mc_samples = 4000;
  bool with_mc = true;
};

struct CorpusCheck {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
};

struct ReliabilityRow {
  std::string program;
  double exact = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

struct CorpusCaseResult {
  std::string case_name;
  std::vector<CorpusCheck> checks;
  std::vector<ReliabilityRow> reliability;
  std::uint64_t eval_faults = 0;
  std::int64_t fuel_exhausted_paths = 0;
  std::int64_t runtime_error_paths = 0;
  std::int64_t abort_paths = 0;
  std::string dot;  // candidate-set cases render their Hasse diagram
  bool all_pass = true;
};

/// State predicate over decoded variable values.
using StatePred = std::function<bool(const Space&, std::span<const std::int64_t>)>;

/// A bundled case study definition.
struct CorpusCase {
  std::string name;
  std::string space_text;
  std::string spec_text;
  std::vector<std::pair<std::string, std::string>> programs;
  bool derivation_chain = true;  // false: unordered candidate set
  std::vector<StatePred> expected_cds;
  bool expect_final_correct = true;
};

// ---------------------------------------------------------------------------
// Case sources
// ---------------------------------------------------------------------------

namespace corpus_text {

inline constexpr const char* kCubeSpace = R"(space Cube { s: int 0..125; }
)";

inline constexpr const char* kCubeSpec =
    R"(spec R on Cube := s*s <= s' && s' <= s*s*s;
domain := s <= 11;
)";

// Ten candidate assignments for the cube spec; out-of-range results are
// runtime faults and leave the state outside the program's function.
inline const std::vector<std::pair<std::string, std::string>>& cube_programs() {
  static const std::vector<std::pair<std::string, std::string>> progs = {
      {"p0", "prog p0 on Cube { abort; }\n"},
      {"p1", "prog p1 on Cube { s = 0; }\n"},
      {"p2", "prog p2 on Cube { s = 1; }\n"},
      {"p3", "prog p3 on Cube { s = 2*s**3 - 8; }\n"},
      {"p4", "prog p4 on Cube { skip; }\n"},
      {"p5", "prog p5 on Cube { s = 2*s**3 - 3*s**2 + 2; }\n"},
      {"p6", "prog p6 on Cube { s = s**4 - 5*s; }\n"},
      {"p7", "prog p7 on Cube { s = s**2; }\n"},
      {"p8", "prog p8 on Cube { s = s**3; }\n"},
      {"p9", "prog p9 on Cube { s = (s**2 + s**3) / 2; }\n"},
  };
  return progs;
}

inline std::string fermat_space(const std::string& name, int max_n,
                                int max_xy) {
  return "space " + name + " { n: int 0.." + std::to_string(max_n) +
         "; x: int 0.." + std::to_string(max_xy) + "; y: int 0.." +
         std::to_string(max_xy) + "; }\n";
}

inline std::string fermat_spec(const std::string& space_name) {
  return "spec R on " + space_name +
         " := n == x'*x' - y'*y' && 0 <= y' && y' <= x';\n"
         "domain := n % 2 == 1 || n % 4 == 0;\n";
}

/// The decomposition chain. The running sum r tracks squares of x (up to
/// x_max^2), so the locals need headroom well past the space's n bound.
inline std::vector<std::pair<std::string, std::string>> fermat_programs(
    const std::string& space_name) {
  const std::string locals = " local r: -1000..20000;";
  return {
      {"p0", "prog p0 on " + space_name + " { abort; }\n"},
      {"p1", "prog p1 on " + space_name + locals +
                 " { x = 0; y = 0; r = 0;"
                 " while (r < n) { r = r + 2*x + 1; x = x + 1; } }\n"},
      {"p2", "prog p2 on " + space_name + locals +
                 " { x = 0; y = 0; r = 0;"
                 " while (r < n) { r = r + 2*x + 1; x = x + 1; }"
                 " if (r > n) { while (r > n) { r = r - 2*y - 1; y = y + 1; } } }\n"},
      {"p3", "prog p3 on " + space_name + locals +
                 " local rsave: -1000..20000;"
                 " { x = 0; y = 0; r = 0;"
                 " while (r < n) { r = r + 2*x + 1; x = x + 1; }"
                 " while (r > n) { y = 0; rsave = r;"
                 "   while (r > n) { r = r - 2*y - 1; y = y + 1; }"
                 "   if (r < n) { r = rsave + 2*x + 1; x = x + 1; } } }\n"},
  };
}

inline constexpr const char* kSqrtSpace =
    R"(space Sqrt { n: int 0..400; x: int 0..21; }
)";

inline constexpr const char* kSqrtSpec =
    R"(spec R on Sqrt := x'*x' <= n && n < (x'+1)*(x'+1) && x' >= 0;
domain := n >= 0;
)";

inline const std::vector<std::pair<std::string, std::string>>& sqrt_programs() {
  static const std::vector<std::pair<std::string, std::string>> progs = {
      {"p0", "prog p0 on Sqrt { abort; }\n"},
      {"p1", "prog p1 on Sqrt { x = 0; }\n"},
      {"p2",
       "prog p2 on Sqrt local x2: -1000..20000;\n"
       "{ x = 0; x2 = 0; while (x2 < n) { x2 = x2 + 2*x + 1; x = x + 1; } }\n"},
      {"p3",
       "prog p3 on Sqrt local x2: -1000..20000;\n"
       "{ x = 0; x2 = 0; while (x2 < n) { x2 = x2 + 2*x + 1; x = x + 1; }\n"
       "  if (x2 > n) { x = x - 1; } }\n"},
  };
  return progs;
}

/// Function of p3's trailing if-then, as a relation: step x back when it
/// overshot, keep the state when it landed exactly.
inline constexpr const char* kSqrtStepBack =
    R"(spec F on Sqrt := (x*x > n && x' == x - 1 && n' == n)
                 || (x*x == n && x' == x && n' == n);
)";

/// Extracted p2, in closed form (matches the program for every n >= 0).
inline constexpr const char* kSqrtP2Quoted =
    R"(spec P2F on Sqrt := (x'-1)*(x'-1) < n && n <= x'*x' && x' >= 0 && n' == n;
)";

inline constexpr const char* kSqrtP3Closed =
    R"(spec P3F on Sqrt := x'*x' <= n && n < (x'+1)*(x'+1) && x' >= 0 && n' == n;
)";

inline constexpr const char* kStringsSpace =
    R"(space Strings { q: seq over "ABab01#$" maxlen 3;
                 let: int 0..3; dig: int 0..3; other: int 0..3; }
)";

inline constexpr const char* kStringsSpec =
    R"(spec R on Strings :=
  forall (i in 0 .. len(q)-1 :
          isupper(q[i]) || islower(q[i]) || isdigit(q[i]) || issym(q[i]))
  && let' == count (i in 0 .. len(q)-1 : isupper(q[i]))
             + count (i in 0 .. len(q)-1 : islower(q[i]))
  && dig' == count (i in 0 .. len(q)-1 : isdigit(q[i]))
  && other' == count (i in 0 .. len(q)-1 : issym(q[i]));
domain := 0 == 0;
)";

inline const std::vector<std::pair<std::string, std::string>>&
strings_programs() {
  auto scan = [](const std::string& name, const std::string& body) {
    return "prog " + name +
           " on Strings local i: 0..4; local c: 0..255; local l: 0..3;\n"
           "{ i = 0; let = 0; dig = 0; other = 0; l = len(q);\n"
           "  while (i < l) { c = q[i]; i = i + 1;\n" +
           body + "  }\n}\n";
  };
  static const std::vector<std::pair<std::string, std::string>> progs = {
      {"p0", "prog p0 on Strings { abort; }\n"},
      {"p1", scan("p1",
                  "    if ('A' <= c && 'Z' >= c) { let = let + 1; }\n")},
      {"p2", scan("p2",
                  "    if ('A' <= c && 'Z' >= c) { let = let + 1; }\n"
                  "    else { if ('a' <= c && 'z' >= c) { let = let + 1; } }\n")},
      {"p3",
       scan("p3",
            "    if ('A' <= c && 'Z' >= c) { let = let + 1; }\n"
            "    else { if ('a' <= c && 'z' >= c) { let = let + 1; }\n"
            "    else { if ('0' <= c && '9' >= c) { dig = dig + 1; } } }\n")},
      {"p4",
       scan("p4",
            "    if ('A' <= c && 'Z' >= c) { let = let + 1; }\n"
            "    else { if ('a' <= c && 'z' >= c) { let = let + 1; }\n"
            "    else { if ('0' <= c && '9' >= c) { dig = dig + 1; }\n"
            "    else { other = other + 1; } } }\n")},
  };
  return progs;
}

/// Summation loop for the projection example: specification wants x' = x+y,
/// the loop also zeroes y and only terminates for y >= 0.
inline constexpr const char* kSumSpace =
    R"(space Sum { x: int -8..8; y: int -8..8; }
)";

inline constexpr const char* kSumSpec = R"(spec R on Sum := x' == x + y;
)";

inline constexpr const char* kSumProg =
    R"(prog loop on Sum { while (y != 0) { x = x + 1; y = y - 1; } }
)";

}  // namespace corpus_text

// ---------------------------------------------------------------------------
// Case definitions
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& corpus_case_names() {
  static const std::vector<std::string> names = {"cube", "fermat", "sqrt",
                                                 "strings"};
  return names;
}

inline CorpusCase corpus_case(const std::string& name) {
  CorpusCase c;
  c.name = name;
  if (name == "cube") {
    c.space_text = corpus_text::kCubeSpace;
    c.spec_text = corpus_text::kCubeSpec;
    c.programs = corpus_text::cube_programs();
    c.derivation_chain = false;  // candidate set ordered by the Hasse diagram
    auto in = [](std::initializer_list<std::int64_t> xs) {
      std::vector<std::int64_t> v(xs);
      return [v](const Space&, std::span<const std::int64_t> st) {
        for (auto x : v)
          if (st[0] == x) return true;
        return false;
      };
    };
    c.expected_cds = {
        [](const Space&, std::span<const std::int64_t>) { return false; },
        in({0}),
        in({1}),
        in({2}),
        in({0, 1}),
        in({1, 2}),
        in({0, 2}),
        // value bound 125: images s*s fit the space exactly for s <= 11
        [](const Space&, std::span<const std::int64_t> st) {
          return st[0] <= 11;
        },
        // value bound 125 truncates s**3 beyond s = 5 (unbounded: all of S)
        [](const Space&, std::span<const std::int64_t> st) {
          return st[0] <= 5;
        },
        [](const Space&, std::span<const std::int64_t> st) {
          return st[0] <= 5;
        },
    };
    c.expect_final_correct = false;  // p9 alone is not correct; p7 is
    return c;
  }
  if (name == "fermat") {
    c.space_text = corpus_text::fermat_space("Fermat", 200, 101);
    c.spec_text = corpus_text::fermat_spec("Fermat");
    c.programs = corpus_text::fermat_programs("Fermat");
    c.expected_cds = {
        [](const Space&, std::span<const std::int64_t>) { return false; },
        [](const Space&, std::span<const std::int64_t> st) {
          return oracle_perfect_square(st[0]);
        },
        [](const Space&, std::span<const std::int64_t> st) {
          std::int64_t r = oracle_isqrt_ceil(st[0]);
          return oracle_perfect_square(r * r - st[0]);
        },
        [](const Space&, std::span<const std::int64_t> st) {
          return st[0] % 2 == 1 || st[0] % 4 == 0;
        },
    };
    return c;
  }
  if (name == "sqrt") {
    c.space_text = corpus_text::kSqrtSpace;
    c.spec_text = corpus_text::kSqrtSpec;
    c.programs = corpus_text::sqrt_programs();
    c.expected_cds = {
        [](const Space&, std::span<const std::int64_t>) { return false; },
        [](const Space&, std::span<const std::int64_t> st) {
          return st[0] == 0;
        },
        [](const Space&, std::span<const std::int64_t> st) {
          return oracle_perfect_square(st[0]);
        },
        [](const Space&, std::span<const std::int64_t>) { return true; },
    };
    return c;
  }
  if (name == "strings") {
    c.space_text = corpus_text::kStringsSpace;
    c.spec_text = corpus_text::kStringsSpec;
    c.programs = corpus_text::strings_programs();
    auto closure = [](bool up, bool low, bool dig, bool sym) {
      return [=](const Space& sp, std::span<const std::int64_t> st) {
        const std::string& q = sp.seq_value(0, st[0]);
        for (char ch : q) {
          bool ok = (up && ch >= 'A' && ch <= 'Z') ||
                    (low && ch >= 'a' && ch <= 'z') ||
                    (dig && ch >= '0' && ch <= '9') ||
                    (sym && !(ch >= 'A' && ch <= 'Z') &&
                     !(ch >= 'a' && ch <= 'z') && !(ch >= '0' && ch <= '9'));
          if (!ok) return false;
        }
        return true;
      };
    };
    c.expected_cds = {
        [](const Space&, std::span<const std::int64_t>) { return false; },
        closure(true, false, false, false),
        closure(true, true, false, false),
        closure(true, true, true, false),
        closure(true, true, true, true),
    };
    return c;
  }
  throw std::invalid_argument("unknown corpus case: " + name);
}

// ---------------------------------------------------------------------------
// Shared fixtures
// ---------------------------------------------------------------------------

/// The four-state fixture relating a specification R with two candidate
/// functions P and P': P' is strictly more-correct than P yet does not
/// refine it.
struct FourStateFixture {
  SpacePtr space;
  Relation r, p, p_prime;
};

inline FourStateFixture four_state_fixture() {
  FourStateFixture f;
  f.space = parse_space("space Four { v: int 0..3; }");
  f.r = Relation::from_pairs(
      f.space, {{0, 0}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 3}});
  f.p = Relation::from_pairs(f.space, {{0, 1}, {1, 2}, {2, 3}});
  f.p_prime = Relation::from_pairs(f.space, {{1, 0}, {2, 1}, {3, 2}});
  return f;
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

namespace detail {

class CheckSink {
 public:
  explicit CheckSink(CorpusCaseResult& r) : r_(r) {}
  void add(std::string id, std::string desc, bool pass, std::string detail = "") {
    r_.all_pass = r_.all_pass && pass;
    r_.checks.push_back(
        {std::move(id), std::move(desc), pass, std::move(detail)});
  }

 private:
  CorpusCaseResult& r_;
};

inline StateSet expected_set(const SpacePtr& sp, const StatePred& pred) {
  StateSet out(sp);
  std::vector<std::int64_t> buf(static_cast<std::size_t>(sp->var_count()));
  for (StateIndex i = 0; i < sp->cardinality(); ++i) {
    sp->decode(i, buf);
    if (pred(*sp, buf)) out.insert(i);
  }
  return out;
}

inline std::string set_summary(const StateSet& s) {
  return "|.| = " + std::to_string(s.cardinality());
}

struct LoadedCase {
  CorpusCase def;
  SpacePtr space;
  SpecDefPtr spec;
  Relation r;
  std::vector<ProgramDefPtr> progs;
  std::vector<NamedRelation> rels;
};

inline LoadedCase load_case(const std::string& name, const CorpusOptions& opt,
                            CorpusCaseResult& result) {
  LoadedCase lc;
  lc.def = corpus_case(name);
  lc.space = parse_space(lc.def.space_text);
  lc.spec = parse_spec(lc.def.spec_text, lc.space);
  lc.r = as_relation(lc.spec);
  for (const auto& [pname, text] : lc.def.programs) {
    lc.progs.push_back(parse_prog(text, lc.space));
    ExtractionResult ext = extract_function(*lc.progs.back(), opt.fuel);
    result.fuel_exhausted_paths += ext.fuel_exhausted_paths;
    result.runtime_error_paths += ext.runtime_error_paths;
    result.abort_paths += ext.abort_paths;
    lc.rels.push_back({pname, std::move(ext.relation)});
  }
  return lc;
}

inline void check_cds(CheckSink& sink, const LoadedCase& lc,
                      const CorpusOptions& opt,
                      std::vector<StateSet>* out_cds) {
  for (std::size_t i = 0; i < lc.rels.size(); ++i) {
    StateSet cd = competence_domain(lc.rels[i].relation, lc.r, opt.budget);
    StateSet want = expected_set(lc.space, lc.def.expected_cds[i]);
    sink.add(lc.def.name + ".cd." + lc.rels[i].name,
             "competence domain of " + lc.rels[i].name +
                 " matches its expected predicate",
             cd == want, set_summary(cd));
    if (out_cds) out_cds->push_back(std::move(cd));
  }
}

inline void check_claim(CheckSink& sink, const LoadedCase& lc,
                        const CorpusOptions& opt, const std::string& id,
                        const std::string& what) {
  ClaimVerdict v = check_domain_claim(*lc.spec, opt.budget, opt.seed);
  std::string detail =
      v.status == ClaimStatus::Verified
          ? "verified exhaustively, " + std::to_string(v.rows_checked) +
                " row classes"
          : (v.status == ClaimStatus::SampledOk
                 ? "sampled " + std::to_string(v.rows_checked) + " rows"
                 : "refuted");
  sink.add(id, what, v.status != ClaimStatus::Refuted, detail);
}

inline void reliability_rows(const LoadedCase& lc, const CorpusOptions& opt,
                             CorpusCaseResult& result) {
  StateSet dom_r = domain(lc.r, opt.budget);
  Distribution d = Distribution::uniform_over(dom_r);
  for (std::size_t i = 0; i < lc.rels.size(); ++i) {
    ReliabilityRow row;
    row.program = lc.rels[i].name;
    row.exact = exact_reliability(lc.rels[i].relation, lc.r, d, opt.budget);
    if (opt.with_mc) {
      McEstimate mc = mc_reliability(*lc.progs[i], *lc.spec, d,
                                     opt.mc_samples, opt.seed, opt.fuel);
      row.estimate = mc.estimate;
      row.std_error = mc.std_error;
      row.samples = mc.samples;
    }
    result.reliability.push_back(row);
  }
}

inline void check_chain(CheckSink& sink, const LoadedCase& lc,
                        const CorpusOptions& opt) {
  ChainVerdict cv = order_chain(lc.r, lc.rels, opt.budget);
  bool all_strict = true;
  std::string detail;
  for (std::size_t i = 0; i < cv.adjacent.size(); ++i) {
    if (i) detail += ", ";
    detail += to_string(cv.adjacent[i]);
    all_strict =
        all_strict && cv.adjacent[i] == PairVerdict::StrictlyMoreCorrect;
  }
  sink.add(lc.def.name + ".chain.verdicts",
           "every derivation step is strictly more-correct", all_strict,
           detail);
  sink.add(lc.def.name + ".chain.final_correct",
           "the final program is correct",
           cv.final_correct == lc.def.expect_final_correct,
           cv.final_correct ? "correct" : "not correct");
}

inline void check_reliability_monotone(CheckSink& sink, const LoadedCase& lc,
                                       const CorpusCaseResult& result,
                                       bool expect_strict_interior) {
  bool monotone = true, strict = true;
  for (std::size_t i = 0; i + 1 < result.reliability.size(); ++i) {
    if (result.reliability[i + 1].exact < result.reliability[i].exact)
      monotone = false;
    if (result.reliability[i + 1].exact <= result.reliability[i].exact)
      strict = false;
  }
  bool endpoints = !result.reliability.empty() &&
                   result.reliability.front().exact == 0.0 &&
                   result.reliability.back().exact == 1.0;
  sink.add(lc.def.name + ".reliability.monotone",
           "exact reliability is nondecreasing along the chain with "
           "endpoints 0 and 1",
           monotone && endpoints && (!expect_strict_interior || strict), "");
  if (lc.def.name == "sqrt") {
    double want = 21.0 / 401.0;
    double got = result.reliability[2].exact;
    sink.add("sqrt.reliability.p2_exact",
             "exact reliability of p2 equals 21/401 under the uniform "
             "distribution",
             got == want, std::to_string(got));
  }
}

inline void check_mc_within_sigma(CheckSink& sink, const LoadedCase& lc,
                                  const CorpusCaseResult& result,
                                  double sigmas) {
  if (result.reliability.empty() || result.reliability[0].samples == 0) return;
  bool ok = true;
  std::string detail;
  for (const auto& row : result.reliability) {
    double se = std::sqrt(row.exact * (1.0 - row.exact) /
                          static_cast<double>(row.samples));
    double dev = std::abs(row.estimate - row.exact);
    if (dev > sigmas * se + 1e-15) {
      ok = false;
      detail += row.program + " off by " + std::to_string(dev) + "; ";
    }
  }
  sink.add(lc.def.name + ".reliability.mc_consistent",
           "sampled estimates fall within " + std::to_string(static_cast<int>(sigmas)) +
               " sigma of the exact values",
           ok, detail);
}

}  // namespace detail

// --- cube -------------------------------------------------------------------

inline CorpusCaseResult run_cube(const CorpusOptions& opt = {}) {
  CorpusCaseResult result;
  result.case_name = "cube";
  detail::CheckSink sink(result);
  detail::LoadedCase lc = detail::load_case("cube", opt, result);

  detail::check_cds(sink, lc, opt, nullptr);
  StateSet dom_r = domain(lc.r, opt.budget);
  StateSet want_dom =
      detail::expected_set(lc.space, [](const Space&, auto st) {
        return st[0] <= 11;
      });
  sink.add("cube.dom", "dom(R) is exactly {0..11} on the bounded space",
           dom_r == want_dom, detail::set_summary(dom_r));
  detail::check_claim(sink, lc, opt, "cube.claim",
                      "the domain claim matches the witness search");

  HasseDiagram h = hasse(lc.r, lc.rels, opt.budget);
  result.dot = to_dot(h, "cube_candidates");
  std::vector<std::vector<std::string>> want_nodes = {
      {"p0"}, {"p1"}, {"p2"}, {"p3"}, {"p4"},
      {"p5"}, {"p6"}, {"p7"}, {"p8", "p9"}};
  bool nodes_ok = h.nodes.size() == want_nodes.size();
  for (std::size_t i = 0; nodes_ok && i < h.nodes.size(); ++i)
    nodes_ok = h.nodes[i].names == want_nodes[i];
  sink.add("cube.hasse.nodes",
           "candidates form nine classes; p8 and p9 are equally correct",
           nodes_ok, std::to_string(h.nodes.size()) + " classes");
  std::vector<std::pair<int, int>> want_edges = {
      {0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 6}, {2, 4}, {2, 5},
      {3, 5}, {3, 6}, {4, 8}, {5, 8}, {6, 8}, {8, 7}};
  std::sort(want_edges.begin(), want_edges.end());
  sink.add("cube.hasse.edges",
           "the strict-order transitive reduction matches the expected "
           "diagram (value bound 125 separates {p8, p9} below p7)",
           h.edges == want_edges, std::to_string(h.edges.size()) + " edges");
  bool p7_correct = false, others_not = true;
  for (const auto& node : h.nodes) {
    bool is_p7 = node.names == std::vector<std::string>{"p7"};
    if (is_p7)
      p7_correct = node.correct;
    else
      others_not = others_not && !node.correct;
  }
  sink.add("cube.hasse.correct",
           "p7 is the only correct candidate on the bounded space",
           p7_correct && others_not, "");
  bool equal_distinct =
      !equals(lc.rels[8].relation, lc.rels[9].relation, opt.budget) &&
      competence_domain(lc.rels[8].relation, lc.r, opt.budget) ==
          competence_domain(lc.rels[9].relation, lc.r, opt.budget);
  sink.add("cube.nonantisymmetry",
           "p8 and p9 are equally correct yet distinct programs",
           equal_distinct, "");

  detail::reliability_rows(lc, opt, result);
  double best = 0.0;
  for (const auto& row : result.reliability) best = std::max(best, row.exact);
  sink.add("cube.reliability.max",
           "the correct candidate reaches exact reliability 1.0", best == 1.0,
           "");
  result.eval_faults = lc.spec->tally->total();
  return result;
}

// --- fermat -----------------------------------------------------------------

inline CorpusCaseResult run_fermat(const CorpusOptions& opt = {}) {
  CorpusCaseResult result;
  result.case_name = "fermat";
  detail::CheckSink sink(result);
  detail::LoadedCase lc = detail::load_case("fermat", opt, result);

  std::vector<StateSet> cds;
  detail::check_cds(sink, lc, opt, &cds);
  StateSet dom_r = domain(lc.r, opt.budget);
  sink.add("fermat.dom",
           "dom(R) is exactly the odd-or-multiple-of-4 states",
           dom_r == detail::expected_set(lc.space,
                                         [](const Space&, auto st) {
                                           return st[0] % 2 == 1 ||
                                                  st[0] % 4 == 0;
                                         }),
           detail::set_summary(dom_r));
  sink.add("fermat.cd3_is_dom", "the final competence domain is dom(R)",
           cds[3] == dom_r, "");
  detail::check_claim(sink, lc, opt, "fermat.claim",
                      "the domain claim matches the witness search on the "
                      "full bounded space");

  {
    // Small-bound replica: claim checked exhaustively, and each program's
    // closed form matched pointwise against the extracted relation.
    auto sp60 = parse_space(corpus_text::fermat_space("Fermat60", 60, 31));
    auto spec60 = parse_spec(corpus_text::fermat_spec("Fermat60"), sp60);
    ClaimVerdict v60 = check_domain_claim(*spec60, opt.budget, opt.seed);
    sink.add("fermat.claim60",
             "the domain claim verifies exhaustively for n <= 60, x,y <= 31",
             v60.status == ClaimStatus::Verified,
             std::to_string(v60.rows_checked) + " row classes");
    auto progs60 = corpus_text::fermat_programs("Fermat60");
    std::vector<Relation> ext60;
    for (const auto& [pname, text] : progs60)
      ext60.push_back(
          extract_function(*parse_prog(text, sp60), opt.fuel).relation);
    auto closed = [&](int which) {
      // n passes through; x and y land on the running-sum values.
      return Relation::from_predicate(
          sp60,
          [sp60, which](StateIndex si, StateIndex ti) {
            std::array<std::int64_t, 3> s, t;
            sp60->decode(si, s);
            sp60->decode(ti, t);
            std::int64_t n = s[0];
            if (t[0] != n) return false;
            std::int64_t c = oracle_isqrt_ceil(n);
            if (which == 1) return t[1] == c && t[2] == 0;
            if (which == 2)
              return t[1] == c && t[2] == oracle_isqrt_ceil(c * c - n);
            auto mu = oracle_mu(n, 31);
            if (!mu) return false;
            return t[1] == *mu && t[2] == oracle_isqrt_ceil(*mu * *mu - n);
          },
          VarMask{1} << 0, sp60->full_mask());
    };
    const char* what[] = {
        "p1 computes the square-root ceiling with y = 0",
        "p2 additionally drops y until the square deficit is covered",
        "p3 lands on the smallest decomposition witness, exactly on dom(R)"};
    for (int i = 1; i <= 3; ++i)
      sink.add("fermat.closed_form.p" + std::to_string(i),
               std::string(what[i - 1]) + " (pointwise, small bounds)",
               equals(ext60[static_cast<std::size_t>(i)], closed(i),
                      opt.budget),
               "");
    // On its competence domain, p2's final y satisfies y^2 = x^2 - n.
    StateSet cd2 = competence_domain(ext60[2], as_relation(spec60), opt.budget);
    bool exact_landing = true;
    std::vector<std::int64_t> buf(3);
    cd2.for_each([&](StateIndex si) {
      auto row = ext60[2].row(si);
      for (StateIndex ti : row) {
        sp60->decode(ti, buf);
        if (buf[2] * buf[2] != buf[1] * buf[1] - buf[0]) exact_landing = false;
      }
    });
    sink.add("fermat.closed_form.p2_landing",
             "on its competence domain p2 lands exactly: y'^2 = x'^2 - n",
             exact_landing, "");
  }

  detail::check_chain(sink, lc, opt);
  detail::reliability_rows(lc, opt, result);
  detail::check_reliability_monotone(sink, lc, result,
                                     /*expect_strict_interior=*/true);
  detail::check_mc_within_sigma(sink, lc, result, 4.0);
  result.eval_faults = lc.spec->tally->total();
  return result;
}

// --- sqrt --------------------------------------------------------------------

inline CorpusCaseResult run_sqrt(const CorpusOptions& opt = {}) {
  CorpusCaseResult result;
  result.case_name = "sqrt";
  detail::CheckSink sink(result);
  detail::LoadedCase lc = detail::load_case("sqrt", opt, result);

  std::vector<StateSet> cds;
  detail::check_cds(sink, lc, opt, &cds);
  sink.add("sqrt.cd2_count",
           "p2 is competent on exactly the 21 perfect squares",
           cds[2].cardinality() == 21 * 22, detail::set_summary(cds[2]));
  StateSet dom_r = domain(lc.r, opt.budget);
  sink.add("sqrt.dom", "dom(R) covers the whole bounded space",
           dom_r.cardinality() == lc.space->cardinality(),
           detail::set_summary(dom_r));
  detail::check_claim(sink, lc, opt, "sqrt.claim",
                      "the domain claim matches the witness search");

  // Pointwise function checks for the extracted programs.
  auto closed_p2 = Relation::from_predicate(
      lc.space,
      [sp = lc.space](StateIndex si, StateIndex ti) {
        std::array<std::int64_t, 2> s, t;
        sp->decode(si, s);
        sp->decode(ti, t);
        return t[0] == s[0] && t[1] == oracle_isqrt_ceil(s[0]);
      },
      VarMask{1} << 0, lc.space->full_mask());
  sink.add("sqrt.closed_form.p2",
           "extracted p2 equals the square-root-ceiling function pointwise",
           equals(lc.rels[2].relation, closed_p2, opt.budget), "");
  {
    auto quoted = parse_spec(corpus_text::kSqrtP2Quoted, lc.space);
    Relation quoted_rel = materialize(as_relation(quoted), opt.budget);
    StateSet n_pos = detail::expected_set(
        lc.space, [](const Space&, auto st) { return st[0] >= 1; });
    bool agrees = equals(restrict_pre(lc.rels[2].relation, n_pos),
                         restrict_pre(quoted_rel, n_pos), opt.budget);
    // The strict lower bound (x'-1)^2 < n has no solution at n = 0, where
    // the program itself stops immediately at x = 0.
    StateIndex zero_state = lc.space->index_of(State{{0, 0}});
    bool zero_rows_ok = true;
    for (StateIndex si = 0; si < lc.space->cardinality(); ++si) {
      std::array<std::int64_t, 2> s;
      lc.space->decode(si, s);
      if (s[0] != 0) continue;
      auto row = lc.rels[2].relation.row(si);
      zero_rows_ok = zero_rows_ok && row.size() == 1 && row[0] == zero_state;
      zero_rows_ok = zero_rows_ok && quoted_rel.row(si).empty();
    }
    sink.add("sqrt.closed_form.p2_quoted",
             "the interval form (x'-1)^2 < n <= x'^2 agrees with p2 for "
             "n >= 1; at n = 0 the program stops at x = 0 while the strict "
             "interval is empty",
             agrees && zero_rows_ok, "");
  }
  {
    auto p3f = parse_spec(corpus_text::kSqrtP3Closed, lc.space);
    sink.add("sqrt.closed_form.p3",
             "extracted p3 equals the integer-square-root function pointwise",
             equals(lc.rels[3].relation, as_relation(p3f), opt.budget), "");
    auto step = parse_spec(corpus_text::kSqrtStepBack, lc.space);
    Relation composed =
        compose(lc.rels[2].relation, as_relation(step), opt.budget);
    sink.add("sqrt.compose",
             "composing p2 with the step-back function yields p3",
             equals(composed, lc.rels[3].relation, opt.budget), "");
  }

  detail::check_chain(sink, lc, opt);
  detail::reliability_rows(lc, opt, result);
  detail::check_reliability_monotone(sink, lc, result,
                                     /*expect_strict_interior=*/true);
  detail::check_mc_within_sigma(sink, lc, result, 4.0);
  result.eval_faults = lc.spec->tally->total();
  return result;
}

// --- strings -------------------------------------------------------------------

inline CorpusCaseResult run_strings(const CorpusOptions& opt = {}) {
  CorpusCaseResult result;
  result.case_name = "strings";
  detail::CheckSink sink(result);
  detail::LoadedCase lc = detail::load_case("strings", opt, result);

  std::vector<StateSet> cds;
  detail::check_cds(sink, lc, opt, &cds);
  bool proper = true;
  for (std::size_t i = 1; i + 1 < cds.size(); ++i)
    proper = proper && cds[i].subset_of(cds[i + 1]) && !(cds[i] == cds[i + 1]);
  sink.add("strings.cd_strictly_grow",
           "each alphabet-class extension strictly grows the competence "
           "domain",
           proper, "");
  StateSet dom_r = domain(lc.r, opt.budget);
  sink.add("strings.cd4_is_dom", "the final competence domain is dom(R)",
           cds[4] == dom_r, detail::set_summary(dom_r));
  detail::check_claim(sink, lc, opt, "strings.claim",
                      "the domain claim matches the witness search");

  detail::check_chain(sink, lc, opt);
  detail::reliability_rows(lc, opt, result);
  detail::check_reliability_monotone(sink, lc, result,
                                     /*expect_strict_interior=*/true);
  detail::check_mc_within_sigma(sink, lc, result, 4.0);
  result.eval_faults = lc.spec->tally->total();
  return result;
}

inline CorpusCaseResult run_corpus_case(const std::string& name,
                                        const CorpusOptions& opt = {}) {
  if (name == "cube") return run_cube(opt);
  if (name == "fermat") return run_fermat(opt);
  if (name == "sqrt") return run_sqrt(opt);
  if (name == "strings") return run_strings(opt);
  throw std::invalid_argument("unknown corpus case: " + name);
}

}  // namespace relcorr
