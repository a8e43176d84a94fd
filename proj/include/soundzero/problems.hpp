#ifndef SOUNDZERO_PROBLEMS_HPP
#define SOUNDZERO_PROBLEMS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "soundzero/core.hpp"
#include "soundzero/operators.hpp"
#include "soundzero/semantics.hpp"

namespace soundzero {

// Total function on the naturals: explicit prefix, then the last `period`
// prefix entries repeat forever. A constant tail is stored as period 1 with
// the constant appended to the prefix.
class FnTable {
 public:
  static FnTable eventually_constant(std::vector<std::uint64_t> prefix,
                                     std::uint64_t c) {
    prefix.push_back(c);
    return FnTable(std::move(prefix), 1);
  }

  static FnTable eventually_periodic(std::vector<std::uint64_t> prefix,
                                     std::size_t period) {
    return FnTable(std::move(prefix), period);
  }

  std::uint64_t operator()(std::uint64_t n) const {
    if (n < values_.size()) return values_[n];
    std::uint64_t tail_start = values_.size() - period_;
    return values_[tail_start + (n - tail_start) % period_];
  }

  // Indices beyond this bound only repeat values visible below it.
  std::uint64_t stable_bound() const { return values_.size() + period_; }

  const std::vector<std::uint64_t>& prefix() const { return values_; }
  std::size_t period() const { return period_; }

 private:
  FnTable(std::vector<std::uint64_t> values, std::size_t period)
      : values_(std::move(values)), period_(period) {
    if (period_ == 0 || period_ > values_.size()) {
      throw std::invalid_argument("period must be in [1, prefix length]");
    }
  }

  std::vector<std::uint64_t> values_;
  std::size_t period_;
};

// True local-minimality from the table itself: no later point has a
// strictly smaller value. Decidable because the tail repeats.
inline bool true_local_min(const FnTable& f, std::uint64_t n) {
  for (std::uint64_t m = n + 1; m <= std::max(n, f.stable_bound()) + f.period();
       ++m) {
    if (f(m) < f(n)) return false;
  }
  return true;
}

namespace detail {

// Key layout shared by the minima structures: layer in the top bits, then
// n, then m, so key order is lexicographic (layer, n, m).
inline constexpr std::uint64_t kFieldBits = 31;
inline constexpr std::uint64_t kFieldMax = (std::uint64_t{1} << kFieldBits) - 1;

inline std::uint64_t pack_key(std::uint64_t layer, std::uint64_t n,
                              std::uint64_t m) {
  return (layer << (2 * kFieldBits)) | (n << kFieldBits) | m;
}

}  // namespace detail

inline QuestionId minima_question(std::uint32_t layer, std::uint64_t n) {
  return QuestionId{detail::pack_key(layer, n, 0), layer};
}

// The counterexample atom (layer, n, m), n < m: at layer 0 it asserts
// f1(n) > f1(m); at layer 1 it asserts f2(n) > f2(m) with both points still
// believed f1-minimal. Its question is (layer, n).
inline Atom minima_atom(std::uint32_t layer, std::uint64_t n,
                        std::uint64_t m) {
  if (n >= m) throw std::invalid_argument("minima atom requires n < m");
  if (m > detail::kFieldMax || layer > 1) {
    throw std::invalid_argument("minima atom out of key range");
  }
  return Atom{detail::pack_key(layer, n, m), minima_question(layer, n)};
}

// n is believed minimal at a layer when no counterexample atom for it (at
// that layer or below) is held.
inline bool believed_minima(const KnowledgeState& x, std::uint32_t layer,
                            std::uint64_t n) {
  for (std::uint32_t l = 0; l <= layer; ++l) {
    if (x.answer(minima_question(l, n))) return false;
  }
  return true;
}

// The k smallest believed-minimal points, ascending. Total: a finite state
// excludes only finitely many points.
inline Witness alpha(const KnowledgeState& x, std::uint32_t layer,
                     std::uint64_t k) {
  Witness w;
  for (std::uint64_t n = 0; w.size() < k; ++n) {
    if (believed_minima(x, layer, n)) w.push_back(n);
  }
  return w;
}

// First counterexample within the witness, as an atom. Layer 0 checks f1
// over adjacent pairs. Layer 1 checks both functions on the minimal
// violating pair: an f1 violation yields the level-0 fact, an f2-only
// violation the level-1 hypothesis.
inline std::vector<Atom> counterexample(const FnTable& f1,
                                        const FnTable* f2, std::uint32_t layer,
                                        const Witness& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    std::uint64_t a = w[i], b = w[i + 1];
    if (f1(a) > f1(b)) return {minima_atom(0, a, b)};
    if (layer == 1 && (*f2)(a) > (*f2)(b)) return {minima_atom(1, a, b)};
  }
  return {};
}

// The layered valuation over counterexample atoms for one function (layer 0
// only) or two (layers 0 and 1).
class MinimaStructure final : public LayeredStructure {
 public:
  explicit MinimaStructure(FnTable f1) : f1_(std::move(f1)) {}
  MinimaStructure(FnTable f1, FnTable f2)
      : f1_(std::move(f1)), f2_(std::move(f2)) {}

  std::uint32_t max_level() const override { return f2_ ? 1 : 0; }

  bool truth(const Atom& x, const StateView& view) const override {
    auto [layer, n, m] = unpack(x);
    if (layer == 0) return f1_(n) > f1_(m);
    bool n_believed = !view.query(minima_question(0, n)).has_value();
    bool m_believed = !view.query(minima_question(0, m)).has_value();
    return n_believed && m_believed && (*f2_)(n) > (*f2_)(m);
  }

  std::vector<Atom> atoms(std::uint64_t cutoff) const override {
    std::vector<Atom> out;
    for (std::uint32_t layer = 0; layer <= max_level(); ++layer) {
      for (std::uint64_t n = 0; n < cutoff; ++n) {
        for (std::uint64_t m = n + 1; m <= cutoff; ++m) {
          out.push_back(minima_atom(layer, n, m));
        }
      }
    }
    return out;
  }

  std::vector<QuestionId> questions(std::uint64_t cutoff) const override {
    std::vector<QuestionId> out;
    for (std::uint32_t layer = 0; layer <= max_level(); ++layer) {
      for (std::uint64_t n = 0; n <= cutoff; ++n) {
        out.push_back(minima_question(layer, n));
      }
    }
    return out;
  }

  std::vector<Atom> candidates(QuestionId q,
                               std::uint64_t cutoff) const override {
    std::uint64_t layer = q.key >> (2 * detail::kFieldBits);
    std::uint64_t n = (q.key >> detail::kFieldBits) & detail::kFieldMax;
    std::vector<Atom> out;
    for (std::uint64_t m = n + 1; m <= cutoff; ++m) {
      out.push_back(minima_atom(static_cast<std::uint32_t>(layer), n, m));
    }
    return out;
  }

  std::array<std::uint64_t, 3> atom_triple(const Atom& x) const override {
    auto [layer, n, m] = unpack(x);
    return {layer, n, m};
  }

  std::optional<Atom> atom_from_triple(std::uint64_t layer, std::uint64_t n,
                                       std::uint64_t m) const override {
    if (layer > max_level() || n >= m || m > detail::kFieldMax) {
      return std::nullopt;
    }
    return minima_atom(static_cast<std::uint32_t>(layer), n, m);
  }

  const FnTable& f1() const { return f1_; }
  const FnTable* f2() const { return f2_ ? &*f2_ : nullptr; }

 private:
  std::tuple<std::uint64_t, std::uint64_t, std::uint64_t> unpack(
      const Atom& x) const {
    return {x.key >> (2 * detail::kFieldBits),
            (x.key >> detail::kFieldBits) & detail::kFieldMax,
            x.key & detail::kFieldMax};
  }

  FnTable f1_;
  std::optional<FnTable> f2_;
};

inline std::shared_ptr<const MinimaStructure> minima_structure(
    FnTable f1, std::optional<FnTable> f2 = std::nullopt) {
  if (f2) {
    return std::make_shared<const MinimaStructure>(std::move(f1),
                                                   std::move(*f2));
  }
  return std::make_shared<const MinimaStructure>(std::move(f1));
}

struct ExampleProblem {
  std::shared_ptr<const MinimaStructure> structure;
  Problem problem;
  Realizer realizer;
};

// The monotone-subsequence problem for one table (layer 0) or two
// (layer 1): find k increasing points on which every configured function is
// weakly increasing. The solution map reads the k first believed-minimal
// points; the realizer feeds back the first counterexample in that guess.
inline ExampleProblem example_problem(FnTable f1, std::optional<FnTable> f2,
                                      std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("witness length must be >= 1");
  auto s = minima_structure(std::move(f1), std::move(f2));
  std::uint32_t layer = s->max_level();

  Problem p;
  p.contains = [s, layer](const Witness& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] >= w[i + 1]) return false;
      if (s->f1()(w[i]) > s->f1()(w[i + 1])) return false;
      if (layer == 1 && (*s->f2())(w[i]) > (*s->f2())(w[i + 1])) return false;
    }
    return true;
  };
  p.solution = [layer, k](const KnowledgeState& x) {
    return alpha(x, layer, k);
  };

  Realizer r = wrap(Operator(s, [s, layer, k](const KnowledgeState& x) {
    return counterexample(s->f1(), s->f2(), layer, alpha(x, layer, k));
  }));
  return ExampleProblem{std::move(s), std::move(p), std::move(r)};
}

}  // namespace soundzero

#endif  // SOUNDZERO_PROBLEMS_HPP
