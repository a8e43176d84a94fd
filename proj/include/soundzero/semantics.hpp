#ifndef SOUNDZERO_SEMANTICS_HPP
#define SOUNDZERO_SEMANTICS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "soundzero/core.hpp"
#include "soundzero/operators.hpp"

namespace soundzero {

// A finite slice of a (possibly infinite) structure: the questions under
// consideration plus an inclusive cutoff bounding candidate answers.
// Completeness and model-hood are only ever decided relative to a window.
struct QuestionWindow {
  std::vector<QuestionId> questions;
  std::uint64_t answer_cutoff = 0;
};

// Window spanning everything the structure enumerates up to the cutoff.
inline QuestionWindow full_window(const LayeredStructure& s,
                                  std::uint64_t cutoff) {
  return QuestionWindow{s.questions(cutoff), cutoff};
}

using Witness = std::vector<std::uint64_t>;

// A problem paired with its solution map: `contains` is the predicate P,
// `solution` the continuous guess-reader alpha.
struct Problem {
  std::function<bool(const Witness&)> contains;
  std::function<Witness(const KnowledgeState&)> solution;
};

// Every atom in X is true w.r.t. X itself.
inline bool is_sound(const LayeredStructure& s, const KnowledgeState& x) {
  for (const Atom& a : x.atoms()) {
    if (!eval_truth(s, a, x)) return false;
  }
  return true;
}

// No open question of the window has a true candidate answer left.
inline bool is_complete_on(const LayeredStructure& s, const KnowledgeState& x,
                           const QuestionWindow& w) {
  for (QuestionId q : w.questions) {
    if (x.answer(q)) continue;
    for (const Atom& cand : s.candidates(q, w.answer_cutoff)) {
      if (eval_truth(s, cand, x)) return false;
    }
  }
  return true;
}

inline bool is_model_on(const LayeredStructure& s, const KnowledgeState& x,
                        const QuestionWindow& w) {
  return is_sound(s, x) && is_complete_on(s, x, w);
}

// Stagewise model construction: walk the levels bottom-up and give every
// open question its first true candidate, if any. Truth at level g only
// sees levels below g, so later same-level picks never invalidate earlier
// ones, and the result is a model on the window by construction.
inline KnowledgeState build_model(const LayeredStructure& s,
                                  const QuestionWindow& w) {
  KnowledgeState x;
  for (std::uint32_t level = 0; level <= s.max_level(); ++level) {
    for (QuestionId q : w.questions) {
      if (q.level != level || x.answer(q)) continue;
      for (const Atom& cand : s.candidates(q, w.answer_cutoff)) {
        if (eval_truth(s, cand, x)) {
          x = x.with(cand);
          break;
        }
      }
    }
  }
  return x;
}

// Exhaustive oracle: every consistent subset of the window's atoms up to
// size_bound, in size-then-lexicographic order, kept when sound and a zero
// of r. Intended for desk-scale windows only; the consistent-subset count
// is checked against enumeration_cap up front.
inline std::vector<KnowledgeState> brute_force_sound_zeros(
    const LayeredStructure& s, const QuestionWindow& w, const Realizer& r,
    std::size_t size_bound, std::uint64_t enumeration_cap = 1u << 20) {
  std::vector<std::vector<Atom>> per_question;
  std::uint64_t space = 1;
  for (QuestionId q : w.questions) {
    per_question.push_back(s.candidates(q, w.answer_cutoff));
    std::uint64_t options = per_question.back().size() + 1;
    if (space > enumeration_cap / options) {
      throw BudgetExceeded("consistent-subset space exceeds cap");
    }
    space *= options;
  }

  std::vector<std::vector<Atom>> subsets;
  std::vector<Atom> current;
  auto walk = [&](auto&& self, std::size_t qi) -> void {
    if (qi == per_question.size()) {
      subsets.push_back(current);
      return;
    }
    self(self, qi + 1);
    if (current.size() < size_bound) {
      for (const Atom& cand : per_question[qi]) {
        current.push_back(cand);
        self(self, qi + 1);
        current.pop_back();
      }
    }
  };
  walk(walk, 0);

  std::vector<KnowledgeState> found;
  for (std::vector<Atom>& subset : subsets) {
    KnowledgeState x = KnowledgeState::from_atoms(std::move(subset));
    if (is_sound(s, x) && is_zero(r, x)) found.push_back(std::move(x));
  }
  std::sort(found.begin(), found.end(),
            [](const KnowledgeState& a, const KnowledgeState& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a.atoms() < b.atoms();
            });
  return found;
}

// Effective realizer for a problem that alpha solves: when the current
// guess is not yet in P, emit the first atom (in enumeration order) at
// which the state visibly fails to be a model, i.e. a contained atom that
// is false or an open question's true candidate. At any sound state only
// the second kind survives the wrap filter, so a sound zero of the result
// always has its guess in P.
inline Realizer derive_realizer(std::shared_ptr<const LayeredStructure> s,
                                Problem p, std::uint64_t search_budget) {
  auto raw = [s, p, search_budget](const KnowledgeState& x) {
    if (p.contains(p.solution(x))) return std::vector<Atom>{};
    for (const Atom& a : s->atoms(search_budget)) {
      bool truth = eval_truth(*s, a, x);
      bool held = x.contains(a);
      bool answered = x.answer(a.question).has_value();
      if ((held && !truth) || (!answered && truth)) {
        return std::vector<Atom>{a};
      }
    }
    throw SearchBudgetExceeded("no failing atom within budget " +
                               std::to_string(search_budget));
  };
  return wrap(Operator(s, raw));
}

}  // namespace soundzero

#endif  // SOUNDZERO_SEMANTICS_HPP
