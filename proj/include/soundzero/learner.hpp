#ifndef SOUNDZERO_LEARNER_HPP
#define SOUNDZERO_LEARNER_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "soundzero/core.hpp"
#include "soundzero/operators.hpp"
#include "soundzero/semantics.hpp"

namespace soundzero {

struct LedgerEntry {
  Atom atom;
  std::uint64_t step = 0;

  friend bool operator==(const LedgerEntry& a, const LedgerEntry& b) {
    return a.atom == b.atom && a.step == b.step;
  }
};

// The learner's memory: every currently held atom together with the clock
// value at which it entered. The clock advances once per loop iteration;
// initial atoms and the first iteration's pick both carry stamp 0.
class LearnerLedger {
 public:
  explicit LearnerLedger(const KnowledgeState& initial) {
    for (const Atom& a : initial.atoms()) entries_.push_back({a, 0});
  }

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  std::uint64_t clock() const { return clock_; }

  KnowledgeState state() const {
    std::vector<Atom> atoms;
    atoms.reserve(entries_.size());
    for (const LedgerEntry& e : entries_) atoms.push_back(e.atom);
    return KnowledgeState::from_atoms(std::move(atoms));
  }

  // One iteration's bookkeeping. An entry (y,m) is retracted when some held
  // (z,k) with level(z) <= level(y) and k <= m has become false in the
  // prospective state; a falsified entry therefore removes itself and every
  // equal-or-later entry of equal-or-higher level. Returns the retracted
  // entries; the chosen atom is stamped with the pre-advance clock.
  std::vector<LedgerEntry> advance(
      Atom chosen, const std::function<bool(const Atom&)>& falsified) {
    std::vector<bool> gone(entries_.size(), false);
    for (const LedgerEntry& z : entries_) {
      if (!falsified(z.atom)) continue;
      for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (z.atom.level() <= entries_[i].atom.level() &&
            z.step <= entries_[i].step) {
          gone[i] = true;
        }
      }
    }
    std::vector<LedgerEntry> removed, kept;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      (gone[i] ? removed : kept).push_back(entries_[i]);
    }
    kept.push_back({chosen, clock_});
    entries_ = std::move(kept);
    ++clock_;
    return removed;
  }

 private:
  std::vector<LedgerEntry> entries_;
  std::uint64_t clock_ = 0;
};

struct TraceStep {
  std::uint64_t step = 0;
  Atom chosen;
  std::vector<LedgerEntry> removed;
  KnowledgeState state_after;
  std::vector<Atom> realizer_output;
};

enum class LearnOutcome { converged, step_cap_exceeded };

struct LearnResult {
  LearnOutcome outcome = LearnOutcome::converged;
  KnowledgeState final_state;
  std::vector<TraceStep> trace;

  bool converged() const { return outcome == LearnOutcome::converged; }
};

// Picks one atom from a non-empty realizer output (always sorted by key).
using SelectionPolicy = std::function<Atom(const std::vector<Atom>&)>;

inline SelectionPolicy min_index_policy() {
  return [](const std::vector<Atom>& out) { return out.front(); };
}

inline SelectionPolicy seeded_random_policy(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](const std::vector<Atom>& out) {
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    return out[pick(*rng)];
  };
}

inline constexpr std::uint64_t kDefaultStepCap = 100000;

// The timestamped search loop: repeatedly add one atom the realizer offers,
// retracting falsified entries and everything that leaned on them (by the
// ledger's level/stamp rule) first. Terminates with a sound zero for
// structures of at most two levels; the cap is a safety net beyond that.
inline LearnResult find_sound_zero(const Realizer& r,
                                   const KnowledgeState& start,
                                   const SelectionPolicy& policy,
                                   std::uint64_t step_cap = kDefaultStepCap) {
  const LayeredStructure& s = r.structure();
  if (!is_sound(s, start)) {
    throw std::invalid_argument("initial state is not sound");
  }
  LearnerLedger ledger(start);
  LearnResult res;
  res.final_state = start;
  while (true) {
    std::vector<Atom> out = r.apply(res.final_state);
    if (out.empty()) {
      res.outcome = LearnOutcome::converged;
      return res;
    }
    if (res.trace.size() >= step_cap) {
      res.outcome = LearnOutcome::step_cap_exceeded;
      return res;
    }
    Atom x = policy(out);
    KnowledgeState probe = res.final_state.with(x);
    TraceStep step;
    step.step = ledger.clock();
    step.chosen = x;
    step.realizer_output = std::move(out);
    step.removed = ledger.advance(
        x, [&](const Atom& z) { return !eval_truth(s, z, probe); });
    res.final_state = ledger.state();
    step.state_after = res.final_state;
    res.trace.push_back(std::move(step));
  }
}

// The tentative variant the timestamp ledger exists to fix: it drops only
// the atoms falsified right now and keeps everything that was added on
// their strength, so a regenerating hypothesis chain can cycle forever.
inline LearnResult naive_learn(const Realizer& r, const KnowledgeState& start,
                               const SelectionPolicy& policy,
                               std::uint64_t step_cap = kDefaultStepCap) {
  const LayeredStructure& s = r.structure();
  if (!is_sound(s, start)) {
    throw std::invalid_argument("initial state is not sound");
  }
  std::unordered_map<std::uint64_t, std::uint64_t> added_at;
  for (const Atom& a : start.atoms()) added_at[a.key] = 0;
  LearnResult res;
  res.final_state = start;
  std::uint64_t clock = 0;
  while (true) {
    std::vector<Atom> out = r.apply(res.final_state);
    if (out.empty()) {
      res.outcome = LearnOutcome::converged;
      return res;
    }
    if (res.trace.size() >= step_cap) {
      res.outcome = LearnOutcome::step_cap_exceeded;
      return res;
    }
    Atom x = policy(out);
    KnowledgeState probe = res.final_state.with(x);
    TraceStep step;
    step.step = clock;
    step.chosen = x;
    step.realizer_output = std::move(out);
    std::vector<Atom> kept;
    for (const Atom& z : res.final_state.atoms()) {
      if (eval_truth(s, z, probe)) {
        kept.push_back(z);
      } else {
        step.removed.push_back({z, added_at[z.key]});
      }
    }
    kept.push_back(x);
    added_at[x.key] = clock;
    ++clock;
    res.final_state = KnowledgeState::from_atoms(std::move(kept));
    step.state_after = res.final_state;
    res.trace.push_back(std::move(step));
  }
}

}  // namespace soundzero

#endif  // SOUNDZERO_LEARNER_HPP
