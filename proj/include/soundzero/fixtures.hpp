#ifndef SOUNDZERO_FIXTURES_HPP
#define SOUNDZERO_FIXTURES_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "soundzero/core.hpp"
#include "soundzero/operators.hpp"
#include "soundzero/semantics.hpp"

namespace soundzero {

// Two-level structure on which single-retraction learning cycles forever.
//
// Level 0 holds unconditionally true facts, one per question (0,j). Level 1
// holds two chains of hypotheses: answer i to question (1,0) stays true
// while fact question (0,2i) is open, answer i to question (1,1) while
// (0,2i+1) is open. The companion operator proposes hypotheses alternating
// between the two questions with rising indices, and once both questions
// are answered it emits exactly the fact that falsifies the older one.
//
// A learner that retracts falsified atoms together with everything added
// after them ends in three steps: the fact removes both hypotheses at once
// and the operator's first proposal is then false, so nothing survives the
// freshness/truth filter. A learner that retracts only the falsified
// hypothesis keeps the younger one, which regenerates the other side with a
// higher index, forever.
class HypothesisChainStructure final : public LayeredStructure {
 public:
  static QuestionId fact_question(std::uint64_t j) {
    return QuestionId{pack(0, j, 0), 0};
  }
  static QuestionId guess_question(std::uint64_t side) {
    return QuestionId{pack(1, side, 0), 1};
  }
  static Atom fact(std::uint64_t j) {
    return Atom{pack(0, j, 1), fact_question(j)};
  }
  static Atom guess(std::uint64_t side, std::uint64_t index) {
    return Atom{pack(1, side, index + 1), guess_question(side)};
  }

  std::uint32_t max_level() const override { return 1; }

  bool truth(const Atom& x, const StateView& view) const override {
    auto [level, n, slot] = unpack(x);
    if (level == 0) return true;
    std::uint64_t watched = 2 * (slot - 1) + n;
    return !view.query(fact_question(watched)).has_value();
  }

  std::vector<Atom> atoms(std::uint64_t cutoff) const override {
    std::vector<Atom> out;
    for (std::uint64_t j = 0; j <= cutoff; ++j) out.push_back(fact(j));
    for (std::uint64_t side = 0; side <= 1; ++side) {
      for (std::uint64_t i = 0; i <= cutoff; ++i) {
        out.push_back(guess(side, i));
      }
    }
    return out;
  }

  std::vector<QuestionId> questions(std::uint64_t cutoff) const override {
    std::vector<QuestionId> out;
    for (std::uint64_t j = 0; j <= cutoff; ++j) {
      out.push_back(fact_question(j));
    }
    out.push_back(guess_question(0));
    out.push_back(guess_question(1));
    return out;
  }

  std::vector<Atom> candidates(QuestionId q,
                               std::uint64_t cutoff) const override {
    std::uint64_t level = q.key >> (2 * kField);
    std::uint64_t n = (q.key >> kField) & kMask;
    if (level == 0) return {fact(n)};
    std::vector<Atom> out;
    for (std::uint64_t i = 0; i <= cutoff; ++i) out.push_back(guess(n, i));
    return out;
  }

  std::array<std::uint64_t, 3> atom_triple(const Atom& x) const override {
    auto [level, n, slot] = unpack(x);
    return {level, n, slot - 1};
  }

  std::optional<Atom> atom_from_triple(std::uint64_t level, std::uint64_t n,
                                       std::uint64_t m) const override {
    if (level == 0) return m == 0 ? std::optional<Atom>(fact(n)) : std::nullopt;
    if (level == 1 && n <= 1) return guess(n, m);
    return std::nullopt;
  }

 private:
  static constexpr std::uint64_t kField = 31;
  static constexpr std::uint64_t kMask = (std::uint64_t{1} << kField) - 1;

  static std::uint64_t pack(std::uint64_t level, std::uint64_t n,
                            std::uint64_t slot) {
    return (level << (2 * kField)) | (n << kField) | slot;
  }

  static std::tuple<std::uint64_t, std::uint64_t, std::uint64_t> unpack(
      const Atom& x) {
    return {x.key >> (2 * kField), (x.key >> kField) & kMask, x.key & kMask};
  }
};

struct ChainFixture {
  std::shared_ptr<const HypothesisChainStructure> structure;
  Problem problem;
  Realizer realizer;
};

inline ChainFixture chain_fixture() {
  auto s = std::make_shared<const HypothesisChainStructure>();
  using Chain = HypothesisChainStructure;

  auto raw = [s](const KnowledgeState& x) -> std::vector<Atom> {
    std::optional<Atom> a = x.answer(Chain::guess_question(0));
    std::optional<Atom> b = x.answer(Chain::guess_question(1));
    auto index = [&](const Atom& g) { return s->atom_triple(g)[2]; };
    if (!a && !b) return {Chain::guess(0, 0)};
    if (a && !b) return {Chain::guess(1, index(*a) + 1)};
    if (!a && b) return {Chain::guess(0, index(*b) + 1)};
    std::uint64_t i = index(*a), j = index(*b);
    return {i <= j ? Chain::fact(2 * i) : Chain::fact(2 * j + 1)};
  };

  Problem p;
  p.contains = [](const Witness&) { return true; };
  p.solution = [s](const KnowledgeState& x) {
    Witness held_facts;
    for (const Atom& at : x.atoms()) {
      auto t = s->atom_triple(at);
      if (t[0] == 0) held_facts.push_back(t[1]);
    }
    return held_facts;
  };

  Realizer r = wrap(Operator(s, raw));
  return ChainFixture{std::move(s), std::move(p), std::move(r)};
}

}  // namespace soundzero

#endif  // SOUNDZERO_FIXTURES_HPP
