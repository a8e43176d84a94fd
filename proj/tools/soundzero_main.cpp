#include <charconv>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "soundzero/soundzero.hpp"

namespace {

using namespace soundzero;

struct SessionConfig {
  std::string problem;
  std::uint64_t k = 2;
  std::optional<std::string> f1;
  std::optional<std::string> f2;
  std::string policy = "min-index";
  std::uint64_t seed = 0;
  std::uint64_t step_cap = kDefaultStepCap;
  bool naive = false;
  std::optional<std::string> trace_out;
  std::uint64_t window = 10;
};

// Options as given on the command line; unset ones defer to the config file.
struct RawOpts {
  std::optional<std::string> config_path;
  std::optional<std::string> problem;
  std::optional<std::uint64_t> k;
  std::optional<std::string> f1;
  std::optional<std::string> f2;
  std::optional<std::string> policy;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> step_cap;
  bool naive = false;
  std::optional<std::string> trace_out;
  std::optional<std::uint64_t> window;
  std::optional<std::string> state;
  std::optional<std::string> state_file;
  std::optional<std::string> batch;
};

std::uint64_t parse_nat(const std::string& text) {
  std::uint64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::invalid_argument("not a natural number: '" + text + "'");
  }
  return value;
}

// Table spec: comma-separated prefix values followed by a tail rule,
// either "const=c" or "period=p". Example: "2,1,0,const=2".
FnTable parse_fn_table(const std::string& spec) {
  std::vector<std::string> tokens;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) tokens.push_back(token);
  if (tokens.empty()) throw std::invalid_argument("empty table spec");

  const std::string& tail = tokens.back();
  std::size_t eq = tail.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("table spec must end in const=c or period=p");
  }
  std::string rule = tail.substr(0, eq);
  std::uint64_t value = parse_nat(tail.substr(eq + 1));

  std::vector<std::uint64_t> prefix;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    prefix.push_back(parse_nat(tokens[i]));
  }
  if (rule == "const") return FnTable::eventually_constant(prefix, value);
  if (rule == "period") {
    return FnTable::eventually_periodic(prefix,
                                        static_cast<std::size_t>(value));
  }
  throw std::invalid_argument("unknown tail rule: '" + rule + "'");
}

template <typename T>
T field_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("config field '" + key +
                                "' has the wrong type");
  }
}

SessionConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  SessionConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "problem") {
      cfg.problem = field_as<std::string>(j, key);
    } else if (key == "k") {
      cfg.k = field_as<std::uint64_t>(j, key);
    } else if (key == "f1") {
      cfg.f1 = field_as<std::string>(j, key);
    } else if (key == "f2") {
      cfg.f2 = field_as<std::string>(j, key);
    } else if (key == "policy") {
      cfg.policy = field_as<std::string>(j, key);
    } else if (key == "seed") {
      cfg.seed = field_as<std::uint64_t>(j, key);
    } else if (key == "step_cap") {
      cfg.step_cap = field_as<std::uint64_t>(j, key);
    } else if (key == "naive") {
      cfg.naive = field_as<bool>(j, key);
    } else if (key == "trace_out") {
      cfg.trace_out = field_as<std::string>(j, key);
    } else if (key == "window") {
      cfg.window = field_as<std::uint64_t>(j, key);
    } else {
      throw std::invalid_argument("unknown config field '" + key + "'");
    }
  }
  return cfg;
}

SessionConfig merge_config(const RawOpts& o) {
  SessionConfig cfg;
  if (o.config_path) {
    std::ifstream in(*o.config_path);
    if (!in) {
      throw std::invalid_argument("cannot read config file " + *o.config_path);
    }
    cfg = config_from_json(nlohmann::json::parse(in));
  }
  if (o.problem) cfg.problem = *o.problem;
  if (o.k) cfg.k = *o.k;
  if (o.f1) cfg.f1 = *o.f1;
  if (o.f2) cfg.f2 = *o.f2;
  if (o.policy) cfg.policy = *o.policy;
  if (o.seed) cfg.seed = *o.seed;
  if (o.step_cap) cfg.step_cap = *o.step_cap;
  if (o.naive) cfg.naive = true;
  if (o.trace_out) cfg.trace_out = *o.trace_out;
  if (o.window) cfg.window = *o.window;
  return cfg;
}

struct Session {
  std::shared_ptr<const LayeredStructure> structure;
  Problem problem;
  Realizer realizer;
};

Session build_session(const SessionConfig& cfg) {
  if (cfg.problem == "chain") {
    if (cfg.f1 || cfg.f2) {
      throw std::invalid_argument("the chain fixture takes no tables");
    }
    ChainFixture fx = chain_fixture();
    return {std::move(fx.structure), std::move(fx.problem),
            std::move(fx.realizer)};
  }
  if (cfg.problem == "p1" || cfg.problem == "p2") {
    bool two = cfg.problem == "p2";
    if (!cfg.f1) throw std::invalid_argument(cfg.problem + " requires --f1");
    if (two && !cfg.f2) throw std::invalid_argument("p2 requires --f2");
    if (!two && cfg.f2) throw std::invalid_argument("p1 takes no --f2");
    std::optional<FnTable> f2;
    if (two) f2 = parse_fn_table(*cfg.f2);
    ExampleProblem ex =
        example_problem(parse_fn_table(*cfg.f1), std::move(f2), cfg.k);
    return {std::move(ex.structure), std::move(ex.problem),
            std::move(ex.realizer)};
  }
  throw std::invalid_argument("unknown problem '" + cfg.problem +
                              "' (expected p1, p2, or chain)");
}

SelectionPolicy make_policy(const SessionConfig& cfg) {
  if (cfg.policy == "min-index" || cfg.policy == "min") {
    return min_index_policy();
  }
  if (cfg.policy == "random") return seeded_random_policy(cfg.seed);
  throw std::invalid_argument("unknown policy '" + cfg.policy +
                              "' (expected min-index or random)");
}

int run_session(const SessionConfig& cfg, std::ostream& diag) {
  Session ses = build_session(cfg);
  SelectionPolicy policy = make_policy(cfg);
  LearnResult res =
      cfg.naive
          ? naive_learn(ses.realizer, KnowledgeState(), policy, cfg.step_cap)
          : find_sound_zero(ses.realizer, KnowledgeState(), policy,
                            cfg.step_cap);

  RunSummary sum;
  sum.outcome = res.outcome;
  sum.steps = res.trace.size();
  sum.final_state = res.final_state;
  sum.witness = ses.problem.solution(res.final_state);
  sum.in_p = ses.problem.contains(*sum.witness);

  if (cfg.trace_out) {
    std::ofstream out(*cfg.trace_out);
    if (!out) {
      throw std::invalid_argument("cannot write trace to " + *cfg.trace_out);
    }
    write_trace_jsonl(out, *ses.structure, res, sum);
  } else {
    write_trace_jsonl(std::cout, *ses.structure, res, sum);
  }

  for (const TraceStep& t : res.trace) {
    if (!is_sound(*ses.structure, t.state_after)) {
      diag << "invariant violation: unsound state after step " << t.step
           << "\n";
      return 4;
    }
  }
  if (res.outcome == LearnOutcome::step_cap_exceeded) {
    diag << "step cap of " << cfg.step_cap << " exceeded\n";
    return 2;
  }
  if (!*sum.in_p) {
    diag << "invariant violation: converged with a witness outside P\n";
    return 4;
  }
  return 0;
}

int verify_session(const SessionConfig& cfg, const RawOpts& o,
                   std::ostream& out) {
  if (o.state && o.state_file) {
    throw std::invalid_argument("give either --state or --state-file");
  }
  std::string text;
  if (o.state) {
    text = *o.state;
  } else if (o.state_file) {
    std::ifstream in(*o.state_file);
    if (!in) {
      throw std::invalid_argument("cannot read state file " + *o.state_file);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  } else {
    throw std::invalid_argument("verify needs --state or --state-file");
  }

  Session ses = build_session(cfg);
  KnowledgeState x =
      state_from_json(*ses.structure, nlohmann::json::parse(text));
  QuestionWindow w = full_window(*ses.structure, cfg.window);
  nlohmann::json report{{"state", state_to_json(*ses.structure, x)},
                        {"window", cfg.window},
                        {"sound", is_sound(*ses.structure, x)},
                        {"complete", is_complete_on(*ses.structure, x, w)},
                        {"model", is_model_on(*ses.structure, x, w)},
                        {"zero", is_zero(ses.realizer, x)}};
  out << report.dump() << "\n";
  return 0;
}

// Independent sessions from a JSON array of configs, run concurrently.
// Every entry must name its own trace_out file. The worst status wins.
int run_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read batch file " + path);
  nlohmann::json entries = nlohmann::json::parse(in);
  if (!entries.is_array()) {
    throw std::invalid_argument("batch file must hold an array of configs");
  }

  std::vector<SessionConfig> configs;
  for (const nlohmann::json& entry : entries) {
    SessionConfig cfg = config_from_json(entry);
    if (!cfg.trace_out) {
      throw std::invalid_argument("batch sessions must set trace_out");
    }
    configs.push_back(std::move(cfg));
  }

  std::vector<std::future<std::pair<int, std::string>>> futures;
  for (const SessionConfig& cfg : configs) {
    futures.push_back(std::async(std::launch::async, [cfg]() {
      std::ostringstream diag;
      int code;
      try {
        code = run_session(cfg, diag);
      } catch (const std::invalid_argument& e) {
        diag << e.what() << "\n";
        code = 3;
      } catch (const std::exception& e) {
        diag << e.what() << "\n";
        code = 4;
      }
      return std::make_pair(code, diag.str());
    }));
  }

  int worst = 0;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    auto [code, diag] = futures[i].get();
    if (!diag.empty()) std::cerr << "session " << i << ": " << diag;
    std::cout << nlohmann::json{{"session", i},
                                {"trace_out", *configs[i].trace_out},
                                {"exit", code}}
                     .dump()
              << "\n";
    worst = std::max(worst, code);
  }
  return worst;
}

void add_common_options(CLI::App* cmd, RawOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON config file; flags override its fields");
  cmd->add_option("--problem", o.problem, "Problem: p1, p2, or chain");
  cmd->add_option("--k", o.k, "Witness length (default 2)");
  cmd->add_option("--f1", o.f1,
                  "First table, e.g. 2,1,0,const=2 or 10,30,20,period=3");
  cmd->add_option("--f2", o.f2, "Second table (p2 only)");
  cmd->add_option("--policy", o.policy,
                  "Choice among realizer outputs: min-index or random");
  cmd->add_option("--seed", o.seed, "Seed for the random policy");
  cmd->add_option("--window", o.window,
                  "Inclusive question/answer bound for verification");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning sessions over layered knowledge structures"};
  app.require_subcommand(1);
  RawOpts o;

  CLI::App* run = app.add_subcommand(
      "run", "Learn a sound zero and emit a JSONL trace");
  add_common_options(run, o);
  run->add_option("--step-cap", o.step_cap, "Iteration budget");
  run->add_flag("--naive", o.naive,
                "Use single-step retraction instead of the timestamp ledger");
  run->add_option("--trace-out", o.trace_out,
                  "Trace file (default: stdout)");
  run->add_option("--batch", o.batch,
                  "JSON array of configs to run concurrently");

  CLI::App* verify = app.add_subcommand(
      "verify", "Check a state against the configured structure and window");
  add_common_options(verify, o);
  verify->add_option("--state", o.state, "State as a JSON atom list");
  verify->add_option("--state-file", o.state_file,
                     "File holding the state JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (run->parsed()) {
      if (o.batch) {
        if (o.config_path || o.problem) {
          throw std::invalid_argument("--batch runs standalone configs only");
        }
        return run_batch(*o.batch);
      }
      return run_session(merge_config(o), std::cerr);
    }
    return verify_session(merge_config(o), o, std::cout);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const ConsistencyError& e) {
    std::cerr << "inconsistent state: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
