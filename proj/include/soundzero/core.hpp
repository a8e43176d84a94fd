#ifndef SOUNDZERO_CORE_HPP
#define SOUNDZERO_CORE_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace soundzero {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two answers to one question, or an atom re-added onto an answered question.
struct ConsistencyError : Error {
  using Error::Error;
};

// A truth function asked about a question at or above its own level.
struct LayerViolation : Error {
  using Error::Error;
};

// Exhaustive enumeration would exceed the configured cap.
struct BudgetExceeded : Error {
  using Error::Error;
};

// Minimum-index search ran out of budget before finding a failing atom.
struct SearchBudgetExceeded : Error {
  using Error::Error;
};

// A question: an equivalence class of mutually incompatible answers.
// All answers to one question share its level, so the level rides along
// with the key. Identity and ordering are by key alone.
struct QuestionId {
  std::uint64_t key = 0;
  std::uint32_t level = 0;

  friend bool operator==(QuestionId a, QuestionId b) { return a.key == b.key; }
  friend std::strong_ordering operator<=>(QuestionId a, QuestionId b) {
    return a.key <=> b.key;
  }
};

// One answer. The key is unique within its structure and doubles as the
// canonical enumeration order (structures pack their payload so that key
// order is the documented order). Identity is by key.
struct Atom {
  std::uint64_t key = 0;
  QuestionId question;

  std::uint32_t level() const { return question.level; }

  friend bool operator==(Atom a, Atom b) { return a.key == b.key; }
  friend std::strong_ordering operator<=>(Atom a, Atom b) {
    return a.key <=> b.key;
  }
};

// A finite consistent set of answers: at most one answer per question.
// Immutable value; every update returns a new state. Atoms are kept
// sorted by key, so equality and iteration order are canonical.
class KnowledgeState {
 public:
  KnowledgeState() = default;

  // Throws ConsistencyError if two atoms answer the same question.
  static KnowledgeState from_atoms(std::vector<Atom> atoms) {
    auto st = try_from_atoms(std::move(atoms));
    if (!st) throw ConsistencyError("two answers to one question");
    return *std::move(st);
  }

  // Consistency-checked variant for enumeration loops.
  static std::optional<KnowledgeState> try_from_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end());
    for (std::size_t i = 1; i < atoms.size(); ++i) {
      if (atoms[i - 1].question == atoms[i].question) return std::nullopt;
    }
    KnowledgeState st;
    st.atoms_ = std::move(atoms);
    return st;
  }

  // The query map: the unique answer to q in this state, if any.
  std::optional<Atom> answer(QuestionId q) const {
    for (const Atom& a : atoms_) {
      if (a.question == q) return a;
    }
    return std::nullopt;
  }

  bool contains(Atom x) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), x);
  }

  // This state plus one more answer. Throws ConsistencyError if the
  // question is already answered (including by x itself).
  KnowledgeState with(Atom x) const {
    if (answer(x.question)) throw ConsistencyError("question already answered");
    KnowledgeState st;
    st.atoms_.reserve(atoms_.size() + 1);
    auto pos = std::upper_bound(atoms_.begin(), atoms_.end(), x);
    st.atoms_.insert(st.atoms_.end(), atoms_.begin(), pos);
    st.atoms_.push_back(x);
    st.atoms_.insert(st.atoms_.end(), pos, atoms_.end());
    return st;
  }

  // All and only the atoms of level < level_bound.
  KnowledgeState restricted_below(std::uint32_t level_bound) const {
    KnowledgeState st;
    for (const Atom& a : atoms_) {
      if (a.level() < level_bound) st.atoms_.push_back(a);
    }
    return st;
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  bool operator==(const KnowledgeState&) const = default;

 private:
  std::vector<Atom> atoms_;
};

struct QueryLog {
  std::vector<QuestionId> queries;
};

// Read-only facade handed to truth functions. Every read is logged (when a
// log is attached) and reads at or above the level bound raise
// LayerViolation, so a valuation can only be layered.
class StateView {
 public:
  StateView(const KnowledgeState& base, std::uint32_t level_bound,
            QueryLog* log = nullptr)
      : base_(&base), bound_(level_bound), log_(log) {}

  std::optional<Atom> query(QuestionId q) const {
    if (q.level >= bound_) {
      throw LayerViolation("query at level " + std::to_string(q.level) +
                           " under bound " + std::to_string(bound_));
    }
    if (log_) log_->queries.push_back(q);
    return base_->answer(q);
  }

  std::uint32_t level_bound() const { return bound_; }

 private:
  const KnowledgeState* base_;
  std::uint32_t bound_;
  QueryLog* log_;
};

// A layered knowledge structure: an atom enumeration with levels and a
// layered truth valuation. Enumerations may be unbounded, so every listing
// takes an explicit cutoff; listings come back sorted by atom key, which is
// the canonical order used for every minimum-index choice.
class LayeredStructure {
 public:
  virtual ~LayeredStructure() = default;

  // Largest level actually used by the structure's atoms.
  virtual std::uint32_t max_level() const = 0;

  // Truth of x relative to a view already restricted below level(x).
  // Must terminate on every finite view and consult only the view.
  virtual bool truth(const Atom& x, const StateView& view) const = 0;

  // All atoms within the enumeration cutoff, ascending by key.
  virtual std::vector<Atom> atoms(std::uint64_t cutoff) const = 0;

  // All questions within the cutoff, ascending by key.
  virtual std::vector<QuestionId> questions(std::uint64_t cutoff) const = 0;

  // All answers to q within the cutoff, ascending by key.
  virtual std::vector<Atom> candidates(QuestionId q,
                                       std::uint64_t cutoff) const = 0;

  // Wire encoding of an atom as a [layer, n, m] triple, and back.
  virtual std::array<std::uint64_t, 3> atom_triple(const Atom& x) const = 0;
  virtual std::optional<Atom> atom_from_triple(std::uint64_t layer,
                                               std::uint64_t n,
                                               std::uint64_t m) const = 0;

  virtual std::string atom_label(const Atom& x) const {
    auto t = atom_triple(x);
    return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
           std::to_string(t[2]) + ")";
  }
};

// Layered truth of x w.r.t. X: the valuation sees X only through a view
// bounded below level(x), so the result depends on restricted content only.
inline bool eval_truth(const LayeredStructure& s, const Atom& x,
                       const KnowledgeState& state, QueryLog* log = nullptr) {
  StateView view(state, x.level(), log);
  return s.truth(x, view);
}

}  // namespace soundzero

#endif  // SOUNDZERO_CORE_HPP
