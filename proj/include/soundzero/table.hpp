#ifndef SOUNDZERO_TABLE_HPP
#define SOUNDZERO_TABLE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "soundzero/core.hpp"
#include "soundzero/semantics.hpp"

namespace soundzero {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
  z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
  return z ^ (z >> 31);
}

// A finite structure given entirely by tables: level-0 atoms carry explicit
// truth bits; the truth of a level-1 atom is a seeded hash of the atom key
// and the complete level-0 answer assignment, read through the view so it
// stays layered while still reacting to every lower answer.
class TableStructure final : public LayeredStructure {
 public:
  struct QuestionSpec {
    std::uint32_t level = 0;
    // One entry per candidate answer; used only at level 0.
    std::vector<bool> truth_bits;
    std::uint32_t candidate_count() const {
      return static_cast<std::uint32_t>(truth_bits.size());
    }
  };

  TableStructure(std::vector<QuestionSpec> questions, std::uint64_t seed)
      : questions_(std::move(questions)), seed_(seed) {
    for (const QuestionSpec& q : questions_) {
      max_level_ = std::max(max_level_, q.level);
      if (q.level > 1) throw std::invalid_argument("levels above 1 unsupported");
    }
  }

  QuestionId question(std::size_t qi) const {
    return QuestionId{pack(questions_[qi].level, qi, 0), questions_[qi].level};
  }

  Atom atom(std::size_t qi, std::size_t ai) const {
    return Atom{pack(questions_[qi].level, qi, ai + 1), question(qi)};
  }

  std::uint32_t max_level() const override { return max_level_; }

  bool truth(const Atom& x, const StateView& view) const override {
    auto [level, qi, ai] = unpack(x);
    if (level == 0) return questions_[qi].truth_bits[ai];
    std::uint64_t h = seed_ ^ x.key;
    for (std::size_t j = 0; j < questions_.size(); ++j) {
      if (questions_[j].level != 0) continue;
      std::optional<Atom> ans = view.query(question(j));
      h = splitmix64(h ^ (ans ? ans->key : 0x5151));
    }
    return (h & 1) != 0;
  }

  std::vector<Atom> atoms(std::uint64_t cutoff) const override {
    std::vector<Atom> out;
    for (std::uint32_t level = 0; level <= max_level_; ++level) {
      for (std::size_t qi = 0; qi < questions_.size(); ++qi) {
        if (questions_[qi].level != level) continue;
        for (std::size_t ai = 0;
             ai < questions_[qi].candidate_count() && ai <= cutoff; ++ai) {
          out.push_back(atom(qi, ai));
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<QuestionId> questions(std::uint64_t cutoff) const override {
    std::vector<QuestionId> out;
    for (std::size_t qi = 0; qi < questions_.size() && qi <= cutoff; ++qi) {
      out.push_back(question(qi));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Atom> candidates(QuestionId q,
                               std::uint64_t cutoff) const override {
    std::size_t qi = (q.key >> kField) & kMask;
    std::vector<Atom> out;
    for (std::size_t ai = 0;
         ai < questions_[qi].candidate_count() && ai <= cutoff; ++ai) {
      out.push_back(atom(qi, ai));
    }
    return out;
  }

  std::array<std::uint64_t, 3> atom_triple(const Atom& x) const override {
    auto [level, qi, ai] = unpack(x);
    return {level, qi, ai};
  }

  std::optional<Atom> atom_from_triple(std::uint64_t level, std::uint64_t n,
                                       std::uint64_t m) const override {
    if (n >= questions_.size() || questions_[n].level != level ||
        m >= questions_[n].candidate_count()) {
      return std::nullopt;
    }
    return atom(n, m);
  }

  std::size_t question_count() const { return questions_.size(); }
  std::size_t total_atoms() const {
    std::size_t total = 0;
    for (const QuestionSpec& q : questions_) total += q.candidate_count();
    return total;
  }

 private:
  static constexpr std::uint64_t kField = 31;
  static constexpr std::uint64_t kMask = (std::uint64_t{1} << kField) - 1;

  static std::uint64_t pack(std::uint64_t level, std::uint64_t qi,
                            std::uint64_t slot) {
    return (level << (2 * kField)) | (qi << kField) | slot;
  }

  std::tuple<std::uint64_t, std::uint64_t, std::uint64_t> unpack(
      const Atom& x) const {
    return {x.key >> (2 * kField), (x.key >> kField) & kMask,
            (x.key & kMask) - 1};
  }

  std::vector<QuestionSpec> questions_;
  std::uint64_t seed_;
  std::uint32_t max_level_ = 0;
};

// Reads the whole answer assignment as a tuple: candidate index + 1 per
// question, 0 where open. Injective on states over the structure, hence a
// convenient continuous solution map for table toys.
inline Witness answer_profile(const TableStructure& s,
                              const KnowledgeState& x) {
  Witness w;
  for (std::size_t qi = 0; qi < s.question_count(); ++qi) {
    std::optional<Atom> ans = x.answer(s.question(qi));
    w.push_back(ans ? s.atom_triple(*ans)[2] + 1 : 0);
  }
  return w;
}

}  // namespace soundzero

#endif  // SOUNDZERO_TABLE_HPP
