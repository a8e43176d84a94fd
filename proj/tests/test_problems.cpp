#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>

#include "soundzero/soundzero.hpp"
#include "support/generators.hpp"

using namespace soundzero;

namespace {

const FnTable kDescending = FnTable::eventually_constant({2, 1, 0}, 2);
const FnTable kFlip1 = FnTable::eventually_constant({10, 30, 20}, 20);
const FnTable kFlip2 = FnTable::eventually_constant({20, 10, 20}, 20);

}  // namespace

TEST_CASE("function tables extend their prefix as declared") {
  SECTION("eventually constant") {
    FnTable f = kDescending;
    CHECK(f(0) == 2);
    CHECK(f(1) == 1);
    CHECK(f(2) == 0);
    CHECK(f(3) == 2);
    CHECK(f(100) == 2);
    CHECK(f.period() == 1);
    CHECK(f.stable_bound() == 5);
  }

  SECTION("eventually periodic") {
    FnTable g = FnTable::eventually_periodic({10, 30, 20}, 3);
    CHECK(g(0) == 10);
    CHECK(g(1) == 30);
    CHECK(g(2) == 20);
    CHECK(g(3) == 10);
    CHECK(g(4) == 30);
    CHECK(g(300) == 10);
  }

  SECTION("period within a longer prefix") {
    FnTable h = FnTable::eventually_periodic({9, 5, 1, 2}, 2);
    CHECK(h(3) == 2);
    CHECK(h(4) == 1);
    CHECK(h(5) == 2);
    CHECK(h(6) == 1);
  }

  SECTION("invalid periods are rejected") {
    CHECK_THROWS_AS(FnTable::eventually_periodic({1, 2}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(FnTable::eventually_periodic({1, 2}, 3),
                    std::invalid_argument);
  }
}

TEST_CASE("true local minimality is decided from the table") {
  CHECK(!true_local_min(kDescending, 0));
  CHECK(!true_local_min(kDescending, 1));
  CHECK(true_local_min(kDescending, 2));
  CHECK(true_local_min(kDescending, 3));

  CHECK(true_local_min(kFlip1, 0));
  CHECK(!true_local_min(kFlip1, 1));
  CHECK(true_local_min(kFlip1, 2));

  FnTable g = FnTable::eventually_periodic({10, 30, 20}, 3);
  CHECK(true_local_min(g, 0));
  CHECK(!true_local_min(g, 1));
  CHECK(!true_local_min(g, 2));
  CHECK(true_local_min(g, 3));
}

TEST_CASE("counterexample atoms validate their shape") {
  CHECK_THROWS_AS(minima_atom(0, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(minima_atom(0, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(minima_atom(2, 0, 1), std::invalid_argument);
  CHECK(minima_atom(1, 0, 1).level() == 1);
  CHECK(minima_atom(0, 0, 1).question == minima_question(0, 0));
}

TEST_CASE("the minima valuation compares through the layers") {
  auto s1 = minima_structure(kDescending);
  CHECK(eval_truth(*s1, minima_atom(0, 0, 1), KnowledgeState()));
  CHECK(!eval_truth(*s1, minima_atom(0, 2, 3), KnowledgeState()));

  auto s2 = minima_structure(kFlip1, kFlip2);
  CHECK(!eval_truth(*s2, minima_atom(0, 0, 1), KnowledgeState()));

  SECTION("a level-1 atom reads exactly the two level-0 questions") {
    QueryLog log;
    CHECK(eval_truth(*s2, minima_atom(1, 0, 1), KnowledgeState(), &log));
    CHECK(log.queries == std::vector<QuestionId>{minima_question(0, 0),
                                                 minima_question(0, 1)});
  }

  SECTION("answering a watched question flips the level-1 atom") {
    KnowledgeState x = KnowledgeState().with(minima_atom(1, 0, 1));
    CHECK(eval_truth(*s2, minima_atom(1, 0, 1), x));
    CHECK(!eval_truth(*s2, minima_atom(1, 0, 1),
                      x.with(minima_atom(0, 1, 2))));
  }
}

TEST_CASE("belief in minimality checks all layers up to the asked one") {
  KnowledgeState x = KnowledgeState().with(minima_atom(1, 0, 1));
  CHECK(believed_minima(x, 0, 0));
  CHECK(!believed_minima(x, 1, 0));
  CHECK(believed_minima(x, 1, 1));

  KnowledgeState y = KnowledgeState().with(minima_atom(0, 0, 2));
  CHECK(!believed_minima(y, 0, 0));
  CHECK(!believed_minima(y, 1, 0));
  CHECK(believed_minima(y, 1, 2));
}

TEST_CASE("the guess reads the first believed-minimal points") {
  CHECK(alpha(KnowledgeState(), 0, 3) == Witness{0, 1, 2});
  KnowledgeState x = KnowledgeState().with(minima_atom(0, 0, 1));
  CHECK(alpha(x, 0, 2) == Witness{1, 2});
  CHECK(alpha(x.with(minima_atom(0, 1, 2)), 0, 2) == Witness{2, 3});
  KnowledgeState h = KnowledgeState().with(minima_atom(1, 0, 1));
  CHECK(alpha(h, 1, 2) == Witness{1, 2});
  CHECK(alpha(h, 0, 2) == Witness{0, 1});
}

TEST_CASE("the counterexample feedback picks the first violation") {
  CHECK(counterexample(kDescending, nullptr, 0, Witness{2, 3, 4}).empty());
  CHECK(counterexample(kDescending, nullptr, 0, Witness{0, 1}) ==
        std::vector<Atom>{minima_atom(0, 0, 1)});
  CHECK(counterexample(kFlip1, &kFlip2, 1, Witness{0, 1}) ==
        std::vector<Atom>{minima_atom(1, 0, 1)});
  CHECK(counterexample(kFlip1, &kFlip2, 1, Witness{1, 2}) ==
        std::vector<Atom>{minima_atom(0, 1, 2)});

  SECTION("a first-function violation outranks a second-function one") {
    CHECK(counterexample(kDescending, &kDescending, 1, Witness{0, 1}) ==
          std::vector<Atom>{minima_atom(0, 0, 1)});
  }
}

TEST_CASE("minima structures enumerate in key order") {
  auto s1 = minima_structure(kDescending);
  CHECK(s1->max_level() == 0);
  CHECK(s1->atoms(2) == std::vector<Atom>{minima_atom(0, 0, 1),
                                          minima_atom(0, 0, 2),
                                          minima_atom(0, 1, 2)});
  CHECK(s1->questions(1) ==
        std::vector<QuestionId>{minima_question(0, 0), minima_question(0, 1)});
  CHECK(s1->candidates(minima_question(0, 1), 3) ==
        std::vector<Atom>{minima_atom(0, 1, 2), minima_atom(0, 1, 3)});

  auto s2 = minima_structure(kFlip1, kFlip2);
  CHECK(s2->max_level() == 1);
  CHECK(s2->atoms(1) ==
        std::vector<Atom>{minima_atom(0, 0, 1), minima_atom(1, 0, 1)});

  SECTION("triple encoding round-trips") {
    Atom a = minima_atom(1, 3, 7);
    auto t = s2->atom_triple(a);
    CHECK(t == std::array<std::uint64_t, 3>{1, 3, 7});
    CHECK(s2->atom_from_triple(1, 3, 7) == a);
    CHECK(!s2->atom_from_triple(0, 2, 2).has_value());
    CHECK(!s1->atom_from_triple(1, 0, 1).has_value());
    CHECK(s2->atom_label(a) == "(1,3,7)");
  }
}

TEST_CASE("witness problems validate their length") {
  CHECK_THROWS_AS(example_problem(kDescending, std::nullopt, 0),
                  std::invalid_argument);
}

TEST_CASE("a length-one problem is solved at the empty state") {
  ExampleProblem ex = example_problem(kDescending, std::nullopt, 1);
  CHECK(is_zero(ex.realizer, KnowledgeState()));
  CHECK(ex.problem.contains(ex.problem.solution(KnowledgeState())));
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    KnowledgeState x = testgen::random_state(*ex.structure, 5, rng);
    CHECK(is_zero(ex.realizer, x));
  }
}

TEST_CASE("the subsequence membership test matches its tables") {
  ExampleProblem ex = example_problem(kFlip1, kFlip2, 2);
  CHECK(ex.problem.contains(Witness{0, 2}));
  CHECK(ex.problem.contains(Witness{0}));
  CHECK(!ex.problem.contains(Witness{1, 0}));
  CHECK(!ex.problem.contains(Witness{2, 2}));
  CHECK(!ex.problem.contains(Witness{1, 2}));
  CHECK(!ex.problem.contains(Witness{0, 1}));

  ExampleProblem one = example_problem(kFlip1, std::nullopt, 2);
  CHECK(one.problem.contains(Witness{0, 1}));
}

TEST_CASE("finitely many exclusions always leave a believed point nearby") {
  SECTION("the bound is tight") {
    KnowledgeState x = KnowledgeState::from_atoms({minima_atom(0, 9, 10),
                                                   minima_atom(0, 10, 11),
                                                   minima_atom(1, 11, 12)});
    CHECK(!believed_minima(x, 1, 9));
    CHECK(!believed_minima(x, 1, 10));
    CHECK(!believed_minima(x, 1, 11));
    CHECK(believed_minima(x, 1, 12));
    CHECK(alpha(x, 1, 1) == Witness{0});
  }

  auto s2 = minima_structure(kFlip1, kFlip2);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    KnowledgeState x = testgen::random_state(*s2, 8, rng, 0.7);
    std::uint64_t bound = 8;
    bool found = false;
    for (std::uint64_t n = bound + 1; n <= bound + x.size() + 1; ++n) {
      if (believed_minima(x, 1, n)) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("window models recover true local minimality") {
  for (const FnTable& f : testgen::fn_corpus()) {
    auto s = minima_structure(f);
    std::uint64_t cutoff = f.stable_bound() + f.period();
    KnowledgeState model = build_model(*s, full_window(*s, cutoff));
    for (std::uint64_t n = 0; n <= f.stable_bound(); ++n) {
      CHECK(believed_minima(model, 0, n) == true_local_min(f, n));
    }
  }
}
