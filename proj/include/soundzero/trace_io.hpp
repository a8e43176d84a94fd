#ifndef SOUNDZERO_TRACE_IO_HPP
#define SOUNDZERO_TRACE_IO_HPP

#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "soundzero/core.hpp"
#include "soundzero/learner.hpp"
#include "soundzero/semantics.hpp"

namespace soundzero {

// Wire format: an atom is the triple [layer, n, m]; a state is the sorted
// list of triples; a trace is JSONL with one step object per line and a
// final summary object.

inline nlohmann::json atom_to_json(const LayeredStructure& s, const Atom& x) {
  auto t = s.atom_triple(x);
  return nlohmann::json::array({t[0], t[1], t[2]});
}

inline Atom atom_from_json(const LayeredStructure& s,
                           const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number_unsigned() ||
      !j[1].is_number_unsigned() || !j[2].is_number_unsigned()) {
    throw std::invalid_argument("atom must be a [layer,n,m] triple");
  }
  std::optional<Atom> a = s.atom_from_triple(j[0], j[1], j[2]);
  if (!a) {
    throw std::invalid_argument("no such atom in this structure: " + j.dump());
  }
  return *a;
}

inline nlohmann::json state_to_json(const LayeredStructure& s,
                                    const KnowledgeState& x) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Atom& a : x.atoms()) arr.push_back(atom_to_json(s, a));
  return arr;
}

inline KnowledgeState state_from_json(const LayeredStructure& s,
                                      const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("state must be an array");
  std::vector<Atom> atoms;
  for (const nlohmann::json& item : j) atoms.push_back(atom_from_json(s, item));
  return KnowledgeState::from_atoms(std::move(atoms));
}

inline nlohmann::json trace_step_to_json(const LayeredStructure& s,
                                         const TraceStep& t) {
  nlohmann::json removed = nlohmann::json::array();
  for (const LedgerEntry& e : t.removed) {
    removed.push_back(
        nlohmann::json::array({atom_to_json(s, e.atom), e.step}));
  }
  nlohmann::json output = nlohmann::json::array();
  for (const Atom& a : t.realizer_output) output.push_back(atom_to_json(s, a));
  return nlohmann::json{{"type", "step"},
                        {"step", t.step},
                        {"chosen", atom_to_json(s, t.chosen)},
                        {"removed", removed},
                        {"state_after", state_to_json(s, t.state_after)},
                        {"realizer_output", output}};
}

inline TraceStep trace_step_from_json(const LayeredStructure& s,
                                      const nlohmann::json& j) {
  TraceStep t;
  t.step = j.at("step").get<std::uint64_t>();
  t.chosen = atom_from_json(s, j.at("chosen"));
  for (const nlohmann::json& pair : j.at("removed")) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("removed entry must be [[l,n,m],step]");
    }
    t.removed.push_back(
        {atom_from_json(s, pair[0]), pair[1].get<std::uint64_t>()});
  }
  t.state_after = state_from_json(s, j.at("state_after"));
  for (const nlohmann::json& a : j.at("realizer_output")) {
    t.realizer_output.push_back(atom_from_json(s, a));
  }
  return t;
}

struct RunSummary {
  LearnOutcome outcome = LearnOutcome::converged;
  std::uint64_t steps = 0;
  KnowledgeState final_state;
  std::optional<Witness> witness;
  std::optional<bool> in_p;
};

inline nlohmann::json summary_to_json(const LayeredStructure& s,
                                      const RunSummary& sum) {
  nlohmann::json j{{"type", "summary"},
                   {"outcome", sum.outcome == LearnOutcome::converged
                                   ? "converged"
                                   : "step_cap_exceeded"},
                   {"steps", sum.steps},
                   {"final_state", state_to_json(s, sum.final_state)}};
  if (sum.witness) j["witness"] = *sum.witness;
  if (sum.in_p) j["in_p"] = *sum.in_p;
  return j;
}

inline RunSummary summary_from_json(const LayeredStructure& s,
                                    const nlohmann::json& j) {
  RunSummary sum;
  std::string outcome = j.at("outcome").get<std::string>();
  if (outcome == "converged") {
    sum.outcome = LearnOutcome::converged;
  } else if (outcome == "step_cap_exceeded") {
    sum.outcome = LearnOutcome::step_cap_exceeded;
  } else {
    throw std::invalid_argument("unknown outcome: " + outcome);
  }
  sum.steps = j.at("steps").get<std::uint64_t>();
  sum.final_state = state_from_json(s, j.at("final_state"));
  if (j.contains("witness")) sum.witness = j["witness"].get<Witness>();
  if (j.contains("in_p")) sum.in_p = j["in_p"].get<bool>();
  return sum;
}

inline void write_trace_jsonl(std::ostream& out, const LayeredStructure& s,
                              const LearnResult& res, const RunSummary& sum) {
  for (const TraceStep& t : res.trace) {
    out << trace_step_to_json(s, t).dump() << "\n";
  }
  out << summary_to_json(s, sum).dump() << "\n";
}

struct ParsedTrace {
  std::vector<TraceStep> steps;
  RunSummary summary;
};

inline ParsedTrace parse_trace_jsonl(const LayeredStructure& s,
                                     std::istream& in) {
  ParsedTrace parsed;
  bool saw_summary = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    std::string type = j.at("type").get<std::string>();
    if (type == "step") {
      parsed.steps.push_back(trace_step_from_json(s, j));
    } else if (type == "summary") {
      parsed.summary = summary_from_json(s, j);
      saw_summary = true;
    } else {
      throw std::invalid_argument("unknown record type: " + type);
    }
  }
  if (!saw_summary) throw std::invalid_argument("trace has no summary line");
  return parsed;
}

// Re-applies a trace from the given start: each step removes its retracted
// atoms and adds the chosen one, and must land exactly on its recorded
// state_after. Returns the final state.
inline KnowledgeState replay_trace(const KnowledgeState& start,
                                   const std::vector<TraceStep>& steps) {
  KnowledgeState x = start;
  for (const TraceStep& t : steps) {
    std::vector<Atom> atoms;
    for (const Atom& a : x.atoms()) {
      bool removed = false;
      for (const LedgerEntry& e : t.removed) {
        if (e.atom == a) removed = true;
      }
      if (!removed) atoms.push_back(a);
    }
    atoms.push_back(t.chosen);
    x = KnowledgeState::from_atoms(std::move(atoms));
    if (!(x == t.state_after)) {
      throw std::invalid_argument("replay diverged at step " +
                                  std::to_string(t.step));
    }
  }
  return x;
}

}  // namespace soundzero

#endif  // SOUNDZERO_TRACE_IO_HPP
