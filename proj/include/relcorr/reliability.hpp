#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "relcorr/correctness.hpp"
#include "relcorr/minilang.hpp"
#include "relcorr/relation.hpp"
#include "relcorr/rng.hpp"
#include "relcorr/speclang.hpp"

namespace relcorr {

// ---------------------------------------------------------------------------
// Usage distributions over dom(R)
// ---------------------------------------------------------------------------

/// A discrete probability distribution on a specification's domain,
/// uniform by default. Weights sum to 1 within 1e-12; states outside the
/// support have weight zero.
class Distribution {
 public:
  static Distribution uniform_over(StateSet support) {
    if (support.empty())
      throw std::invalid_argument("distribution support is empty");
    Distribution d;
    d.support_ = std::move(support);
    d.members_ = d.support_.members();
    return d;
  }

  /// Builds from (state index, weight) entries; weights for states outside
  /// the support are rejected, missing states get zero. Unnormalized
  /// weights are normalized, with a note appended to `warning`.
  static Distribution from_weights(
      StateSet support,
      const std::vector<std::pair<StateIndex, double>>& entries,
      std::string* warning = nullptr) {
    if (support.empty())
      throw std::invalid_argument("distribution support is empty");
    Distribution d;
    d.support_ = std::move(support);
    d.members_ = d.support_.members();
    std::vector<double> dense(
        static_cast<std::size_t>(d.support_.space()->cardinality()), 0.0);
    for (auto [s, w] : entries) {
      if (s < 0 || s >= d.support_.space()->cardinality())
        throw std::out_of_range("weight entry for state outside the space");
      if (!d.support_.contains(s))
        throw SpaceMismatchError(
            "weight entry for state outside the distribution support");
      if (w < 0.0) throw std::invalid_argument("negative weight");
      dense[static_cast<std::size_t>(s)] += w;
    }
    double total = 0.0;
    for (StateIndex s : d.members_) total += dense[static_cast<std::size_t>(s)];
    if (total <= 0.0) throw std::invalid_argument("weights sum to zero");
    if (std::abs(total - 1.0) > 1e-12 && warning)
      *warning += "weights sum to " + std::to_string(total) +
                  "; normalizing\n";
    d.weights_.reserve(d.members_.size());
    d.cumulative_.reserve(d.members_.size());
    double acc = 0.0;
    for (StateIndex s : d.members_) {
      double w = dense[static_cast<std::size_t>(s)] / total;
      d.weights_.push_back(w);
      acc += w;
      d.cumulative_.push_back(acc);
    }
    d.cumulative_.back() = 1.0;
    return d;
  }

  /// Weights file: lines of "state-index whitespace weight"; '#' comments.
  static Distribution parse_weights_file(StateSet support, std::istream& in,
                                         std::string* warning = nullptr) {
    std::vector<std::pair<StateIndex, double>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      StateIndex s;
      double w;
      if (ls >> s >> w)
        entries.emplace_back(s, w);
      else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("weights file: malformed line " +
                                    std::to_string(lineno));
    }
    return from_weights(std::move(support), entries, warning);
  }

  const StateSet& support() const { return support_; }
  bool uniform() const { return weights_.empty(); }

  /// Probability mass of a set of states.
  double mass_of(const StateSet& states) const {
    if (uniform()) {
      return static_cast<double>(states.intersect(support_).cardinality()) /
             static_cast<double>(members_.size());
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < members_.size(); ++k)
      if (states.contains(members_[k])) acc += weights_[k];
    return acc;
  }

  /// Draw `i` of the stream keyed by `seed`; deterministic and independent
  /// of how draws are partitioned across shards.
  StateIndex sample(std::uint64_t seed, std::uint64_t i) const {
    if (uniform()) {
      return members_[sample_range(
          seed, i, static_cast<std::uint64_t>(members_.size()))];
    }
    double u = sample_unit(seed, i);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
    if (k >= members_.size()) k = members_.size() - 1;
    return members_[k];
  }

 private:
  StateSet support_;
  std::vector<StateIndex> members_;
  std::vector<double> weights_;     // empty = uniform
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------
// Reliability
// ---------------------------------------------------------------------------

/// Probability that executing p on a random state of dom(r) drawn from d
/// yields a final state allowed by r: the d-mass of p's competence domain.
inline double exact_reliability(const Relation& p, const Relation& r,
                                const Distribution& d,
                                std::int64_t budget = kDefaultWorkBudget) {
  detail::check_same_space(p, r);
  if (!(d.support() == domain(r, budget)))
    throw SpaceMismatchError(
        "distribution support differs from the specification domain");
  return d.mass_of(competence_domain(p, r, budget));
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::int64_t successes = 0;
};

/// Monte-Carlo reliability: draws n states from d, executes the program,
/// and scores a draw as a success iff some terminating path lands in r
/// (matching the competence-domain semantics). Reproducible under a fixed
/// seed; draw i is independent of sharding.
inline McEstimate mc_reliability(const ProgramDef& prog, const SpecDef& spec,
                                 const Distribution& d, std::int64_t n,
                                 std::uint64_t seed,
                                 std::int64_t fuel = kDefaultFuel) {
  if (n <= 0) throw std::invalid_argument("sample count must be positive");
  std::int64_t successes = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    StateIndex s = d.sample(seed, static_cast<std::uint64_t>(i));
    ExecOutcome out = exec(prog, s, fuel);
    for (StateIndex t : out.finals)
      if (eval_pred(spec, s, t)) {
        ++successes;
        break;
      }
  }
  McEstimate est;
  est.samples = n;
  est.successes = successes;
  est.estimate = static_cast<double>(successes) / static_cast<double>(n);
  est.std_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(n));
  return est;
}

/// Shard [0, n) into `shards` contiguous draw ranges and merge; the result
/// is identical to the unsharded estimate by construction.
inline McEstimate mc_reliability_sharded(const ProgramDef& prog,
                                         const SpecDef& spec,
                                         const Distribution& d, std::int64_t n,
                                         std::uint64_t seed, int shards,
                                         std::int64_t fuel = kDefaultFuel) {
  if (n <= 0) throw std::invalid_argument("sample count must be positive");
  if (shards <= 0) throw std::invalid_argument("shard count must be positive");
  std::int64_t successes = 0;
  for (int k = 0; k < shards; ++k) {
    std::int64_t lo = n * k / shards;
    std::int64_t hi = n * (k + 1) / shards;
    for (std::int64_t i = lo; i < hi; ++i) {
      StateIndex s = d.sample(seed, static_cast<std::uint64_t>(i));
      ExecOutcome out = exec(prog, s, fuel);
      for (StateIndex t : out.finals)
        if (eval_pred(spec, s, t)) {
          ++successes;
          break;
        }
    }
  }
  McEstimate est;
  est.samples = n;
  est.successes = successes;
  est.estimate = static_cast<double>(successes) / static_cast<double>(n);
  est.std_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(n));
  return est;
}

// ---------------------------------------------------------------------------
// Chain reports
// ---------------------------------------------------------------------------

struct ProgramReliability {
  std::string name;
  double exact = 0.0;
  McEstimate mc;
};

struct ReliabilityReport {
  std::vector<ProgramReliability> programs;
  /// True when every adjacent chain verdict is (strictly) more-correct.
  bool chain_more_correct = false;
  /// Exact reliabilities are nondecreasing along the chain.
  bool exact_monotone = false;
  bool final_correct = false;
};

/// Exact and sampled reliability for every program of a derivation chain.
inline ReliabilityReport chain_report(
    const SpecDefPtr& spec, const std::vector<ProgramDefPtr>& progs,
    const Distribution& d, std::int64_t n, std::uint64_t seed,
    std::int64_t fuel = kDefaultFuel,
    std::int64_t budget = kDefaultWorkBudget) {
  if (progs.empty()) throw std::invalid_argument("chain_report needs programs");
  Relation r = as_relation(spec);
  std::vector<NamedRelation> rels;
  rels.reserve(progs.size());
  for (const auto& p : progs)
    rels.push_back({p->name, extract_function(*p, fuel).relation});
  ReliabilityReport out;
  for (std::size_t i = 0; i < progs.size(); ++i) {
    ProgramReliability pr;
    pr.name = progs[i]->name;
    pr.exact = exact_reliability(rels[i].relation, r, d, budget);
    pr.mc = mc_reliability(*progs[i], *spec, d, n, seed, fuel);
    out.programs.push_back(std::move(pr));
  }
  out.chain_more_correct = true;
  if (rels.size() >= 2) {
    ChainVerdict cv = order_chain(r, rels, budget);
    for (PairVerdict v : cv.adjacent)
      if (v != PairVerdict::MoreCorrect &&
          v != PairVerdict::StrictlyMoreCorrect)
        out.chain_more_correct = false;
  }
  out.exact_monotone = true;
  for (std::size_t i = 0; i + 1 < out.programs.size(); ++i)
    if (out.programs[i + 1].exact < out.programs[i].exact)
      out.exact_monotone = false;
  out.final_correct = is_correct(rels.back().relation, r, budget);
  return out;
}

}  // namespace relcorr
