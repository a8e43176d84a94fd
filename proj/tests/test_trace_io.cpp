#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "soundzero/soundzero.hpp"

using namespace soundzero;
using nlohmann::json;

namespace {

const FnTable kDescending = FnTable::eventually_constant({2, 1, 0}, 2);
const FnTable kFlip1 = FnTable::eventually_constant({10, 30, 20}, 20);
const FnTable kFlip2 = FnTable::eventually_constant({20, 10, 20}, 20);

bool same_step(const TraceStep& a, const TraceStep& b) {
  return a.step == b.step && a.chosen == b.chosen && a.removed == b.removed &&
         a.state_after == b.state_after &&
         a.realizer_output == b.realizer_output;
}

RunSummary summarize(const ExampleProblem& ex, const LearnResult& res) {
  RunSummary sum;
  sum.outcome = res.outcome;
  sum.steps = res.trace.size();
  sum.final_state = res.final_state;
  sum.witness = ex.problem.solution(res.final_state);
  sum.in_p = ex.problem.contains(*sum.witness);
  return sum;
}

}  // namespace

TEST_CASE("atoms and states round-trip through the wire format") {
  auto s2 = minima_structure(kFlip1, kFlip2);
  Atom a = minima_atom(1, 0, 1);
  json j = atom_to_json(*s2, a);
  CHECK(j.dump() == "[1,0,1]");
  CHECK(atom_from_json(*s2, j) == a);

  KnowledgeState x = KnowledgeState::from_atoms(
      {minima_atom(0, 1, 2), minima_atom(1, 0, 1)});
  json js = state_to_json(*s2, x);
  CHECK(js.dump() == "[[0,1,2],[1,0,1]]");
  CHECK(state_from_json(*s2, js) == x);

  ChainFixture fx = chain_fixture();
  Atom g = HypothesisChainStructure::guess(1, 3);
  CHECK(atom_from_json(*fx.structure, atom_to_json(*fx.structure, g)) == g);
}

TEST_CASE("malformed wire atoms are rejected") {
  auto s1 = minima_structure(kDescending);
  CHECK_THROWS_AS(atom_from_json(*s1, json::parse("[0,1]")),
                  std::invalid_argument);
  CHECK_THROWS_AS(atom_from_json(*s1, json::parse("[0,1,2,3]")),
                  std::invalid_argument);
  CHECK_THROWS_AS(atom_from_json(*s1, json::parse("[0,-1,2]")),
                  std::invalid_argument);
  CHECK_THROWS_AS(atom_from_json(*s1, json::parse("[0,5,2]")),
                  std::invalid_argument);
  CHECK_THROWS_AS(atom_from_json(*s1, json::parse("[1,0,1]")),
                  std::invalid_argument);
  CHECK_THROWS_AS(atom_from_json(*s1, json::parse("{\"n\":1}")),
                  std::invalid_argument);
  CHECK_THROWS_AS(state_from_json(*s1, json::parse("{}")),
                  std::invalid_argument);
  CHECK_THROWS_AS(state_from_json(*s1, json::parse("[[0,0,1],[0,0,2]]")),
                  ConsistencyError);
}

TEST_CASE("trace steps round-trip field by field") {
  ExampleProblem ex = example_problem(kFlip1, kFlip2, 2);
  LearnResult res =
      find_sound_zero(ex.realizer, KnowledgeState(), min_index_policy());
  REQUIRE(res.trace.size() == 2);
  REQUIRE(!res.trace[1].removed.empty());
  for (const TraceStep& t : res.trace) {
    json j = trace_step_to_json(*ex.structure, t);
    CHECK(j.at("type") == "step");
    CHECK(same_step(trace_step_from_json(*ex.structure, j), t));
  }
}

TEST_CASE("a written trace parses and replays to the same end state") {
  SECTION("retracting run") {
    ExampleProblem ex = example_problem(kFlip1, kFlip2, 2);
    LearnResult res =
        find_sound_zero(ex.realizer, KnowledgeState(), min_index_policy());
    std::stringstream buf;
    write_trace_jsonl(buf, *ex.structure, res, summarize(ex, res));

    ParsedTrace parsed = parse_trace_jsonl(*ex.structure, buf);
    CHECK(parsed.steps.size() == res.trace.size());
    CHECK(parsed.summary.outcome == LearnOutcome::converged);
    CHECK(parsed.summary.steps == 2);
    CHECK(parsed.summary.final_state == res.final_state);
    CHECK(parsed.summary.witness == Witness{0, 2});
    CHECK(parsed.summary.in_p == true);
    CHECK(replay_trace(KnowledgeState(), parsed.steps) == res.final_state);
  }

  SECTION("chain run with a double retraction") {
    ChainFixture fx = chain_fixture();
    LearnResult res =
        find_sound_zero(fx.realizer, KnowledgeState(), min_index_policy());
    RunSummary sum;
    sum.outcome = res.outcome;
    sum.steps = res.trace.size();
    sum.final_state = res.final_state;
    std::stringstream buf;
    write_trace_jsonl(buf, *fx.structure, res, sum);

    ParsedTrace parsed = parse_trace_jsonl(*fx.structure, buf);
    CHECK(!parsed.summary.witness.has_value());
    CHECK(!parsed.summary.in_p.has_value());
    CHECK(replay_trace(KnowledgeState(), parsed.steps) == res.final_state);
  }
}

TEST_CASE("replay detects a tampered trace") {
  ExampleProblem ex = example_problem(kDescending, std::nullopt, 2);
  LearnResult res =
      find_sound_zero(ex.realizer, KnowledgeState(), min_index_policy());
  std::vector<TraceStep> steps = res.trace;
  steps[0].state_after = KnowledgeState().with(minima_atom(0, 0, 3));
  CHECK_THROWS_AS(replay_trace(KnowledgeState(), steps),
                  std::invalid_argument);
}

TEST_CASE("summaries round-trip and validate their outcome") {
  auto s1 = minima_structure(kDescending);
  RunSummary sum;
  sum.outcome = LearnOutcome::step_cap_exceeded;
  sum.steps = 7;
  sum.final_state = KnowledgeState().with(minima_atom(0, 0, 1));
  json j = summary_to_json(*s1, sum);
  CHECK(j.at("outcome") == "step_cap_exceeded");
  CHECK(!j.contains("witness"));
  RunSummary back = summary_from_json(*s1, j);
  CHECK(back.outcome == LearnOutcome::step_cap_exceeded);
  CHECK(back.steps == 7);
  CHECK(back.final_state == sum.final_state);
  CHECK(!back.witness.has_value());

  j["outcome"] = "wandered_off";
  CHECK_THROWS_AS(summary_from_json(*s1, j), std::invalid_argument);
}

TEST_CASE("a trace without a summary line is rejected") {
  auto s1 = minima_structure(kDescending);
  std::stringstream empty;
  CHECK_THROWS_AS(parse_trace_jsonl(*s1, empty), std::invalid_argument);

  ExampleProblem ex = example_problem(kDescending, std::nullopt, 2);
  LearnResult res =
      find_sound_zero(ex.realizer, KnowledgeState(), min_index_policy());
  std::stringstream steps_only;
  for (const TraceStep& t : res.trace) {
    steps_only << trace_step_to_json(*ex.structure, t).dump() << "\n";
  }
  CHECK_THROWS_AS(parse_trace_jsonl(*ex.structure, steps_only),
                  std::invalid_argument);

  std::stringstream unknown;
  unknown << R"({"type":"banner","steps":0})" << "\n";
  CHECK_THROWS_AS(parse_trace_jsonl(*s1, unknown), std::invalid_argument);
}
