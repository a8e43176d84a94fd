#ifndef SOUNDZERO_OPERATORS_HPP
#define SOUNDZERO_OPERATORS_HPP

#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "soundzero/core.hpp"

namespace soundzero {

// A state operator: any finite-output map from states to atom lists, bound
// to the structure whose atoms it emits. Output is canonicalized (sorted by
// key, duplicates dropped) so downstream choices are deterministic.
class Operator {
 public:
  using Fn = std::function<std::vector<Atom>(const KnowledgeState&)>;

  Operator(std::shared_ptr<const LayeredStructure> structure, Fn fn)
      : structure_(std::move(structure)), fn_(std::move(fn)) {}

  std::vector<Atom> apply(const KnowledgeState& x) const {
    std::vector<Atom> out = fn_(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const LayeredStructure& structure() const { return *structure_; }
  std::shared_ptr<const LayeredStructure> structure_ptr() const {
    return structure_;
  }

 private:
  std::shared_ptr<const LayeredStructure> structure_;
  Fn fn_;
};

// Keeps exactly those atoms of u that are informative and correct at x:
// their question is still open in x and they are true w.r.t. x.
inline std::vector<Atom> new_filter(const LayeredStructure& s,
                                    const KnowledgeState& x,
                                    std::span<const Atom> u,
                                    QueryLog* log = nullptr) {
  std::vector<Atom> kept;
  for (const Atom& a : u) {
    if (x.answer(a.question)) continue;
    if (!eval_truth(s, a, x, log)) continue;
    kept.push_back(a);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

// An operator whose every output atom is fresh (question open at the input)
// and true at the input. Instances only come from wrap(), so holding a
// Realizer is proof the output laws hold by construction.
class Realizer {
 public:
  std::vector<Atom> apply(const KnowledgeState& x,
                          QueryLog* log = nullptr) const {
    return new_filter(raw_.structure(), x, raw_.apply(x), log);
  }

  const LayeredStructure& structure() const { return raw_.structure(); }
  std::shared_ptr<const LayeredStructure> structure_ptr() const {
    return raw_.structure_ptr();
  }

  // The wrapped behaviour as a plain operator, for law checks and re-wrapping.
  Operator as_operator() const {
    Realizer self = *this;
    return Operator(raw_.structure_ptr(),
                    [self](const KnowledgeState& x) { return self.apply(x); });
  }

 private:
  friend Realizer wrap(Operator op);
  explicit Realizer(Operator op) : raw_(std::move(op)) {}

  Operator raw_;
};

// Force the output laws onto an arbitrary operator by filtering its output.
// Idempotent: wrapping an already-wrapped operator changes nothing.
inline Realizer wrap(Operator op) { return Realizer(std::move(op)); }

// x is a zero of r when r has nothing left to say at x.
inline bool is_zero(const Realizer& r, const KnowledgeState& x) {
  return r.apply(x).empty();
}

// Per-atom audit of the output laws at one state.
struct LawReport {
  struct Entry {
    Atom atom;
    bool fresh;
    bool true_at_state;

    bool pass() const { return fresh && true_at_state; }
  };

  std::vector<Entry> entries;

  bool all_pass() const {
    for (const Entry& e : entries) {
      if (!e.pass()) return false;
    }
    return true;
  }
};

inline LawReport check_realizer_laws(const Operator& op,
                                     const KnowledgeState& x) {
  LawReport report;
  for (const Atom& a : op.apply(x)) {
    LawReport::Entry e;
    e.atom = a;
    e.fresh = !x.answer(a.question).has_value();
    e.true_at_state = eval_truth(op.structure(), a, x);
    report.entries.push_back(e);
  }
  return report;
}

inline LawReport check_realizer_laws(const Realizer& r,
                                     const KnowledgeState& x) {
  return check_realizer_laws(r.as_operator(), x);
}

}  // namespace soundzero

#endif  // SOUNDZERO_OPERATORS_HPP
