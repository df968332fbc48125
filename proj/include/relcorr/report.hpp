#pragma once

#include <string>

#include <json.hpp>

#include "relcorr/corpus.hpp"
#include "relcorr/correctness.hpp"
#include "relcorr/reliability.hpp"

namespace relcorr {

// Machine-readable run reports. Key order is fixed (insertion order) so a
// rerun with the same seed produces byte-identical documents.

using Json = nlohmann::ordered_json;

inline Json to_json(const StateSet& s) {
  Json j;
  j["cardinality"] = s.cardinality();
  if (s.cardinality() <= 64) {
    Json members = Json::array();
    s.for_each([&](StateIndex i) { members.push_back(i); });
    j["members"] = std::move(members);
  }
  return j;
}

inline Json to_json(const ChainVerdict& cv) {
  Json j;
  j["programs"] = cv.names;
  Json verdicts = Json::array();
  for (PairVerdict v : cv.adjacent) verdicts.push_back(to_string(v));
  j["adjacent_verdicts"] = std::move(verdicts);
  Json cds = Json::array();
  for (const auto& cd : cv.competence_domains) cds.push_back(to_json(cd));
  j["competence_domains"] = std::move(cds);
  j["final_correct"] = cv.final_correct;
  return j;
}

inline Json to_json(const HasseDiagram& h) {
  Json j;
  Json nodes = Json::array();
  for (const auto& node : h.nodes) {
    Json n;
    n["programs"] = node.names;
    n["competence_cardinality"] = node.competence.cardinality();
    n["correct"] = node.correct;
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (auto [a, b] : h.edges) edges.push_back(Json::array({a, b}));
  j["edges"] = std::move(edges);
  return j;
}

inline Json to_json(const McEstimate& mc) {
  Json j;
  j["estimate"] = mc.estimate;
  j["std_error"] = mc.std_error;
  j["samples"] = mc.samples;
  j["successes"] = mc.successes;
  return j;
}

inline Json to_json(const ReliabilityReport& r) {
  Json j;
  Json programs = Json::array();
  for (const auto& pr : r.programs) {
    Json p;
    p["program"] = pr.name;
    p["exact"] = pr.exact;
    p["mc"] = to_json(pr.mc);
    programs.push_back(std::move(p));
  }
  j["programs"] = std::move(programs);
  j["chain_more_correct"] = r.chain_more_correct;
  j["exact_monotone"] = r.exact_monotone;
  j["final_correct"] = r.final_correct;
  return j;
}

inline Json to_json(const CorpusCaseResult& r) {
  Json j;
  j["case"] = r.case_name;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json cj;
    cj["id"] = c.id;
    cj["description"] = c.description;
    cj["pass"] = c.pass;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  Json rel = Json::array();
  for (const auto& row : r.reliability) {
    Json rj;
    rj["program"] = row.program;
    rj["exact"] = row.exact;
    if (row.samples > 0) {
      rj["estimate"] = row.estimate;
      rj["std_error"] = row.std_error;
      rj["samples"] = row.samples;
    }
    rel.push_back(std::move(rj));
  }
  j["reliability"] = std::move(rel);
  Json diag;
  diag["eval_faults"] = r.eval_faults;
  diag["fuel_exhausted_paths"] = r.fuel_exhausted_paths;
  diag["runtime_error_paths"] = r.runtime_error_paths;
  diag["abort_paths"] = r.abort_paths;
  j["diagnostics"] = std::move(diag);
  if (!r.dot.empty()) j["dot"] = r.dot;
  j["all_pass"] = r.all_pass;
  return j;
}

}  // namespace relcorr
