// Copyright 2026 The matloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "httplib.h"
#include "matloop/api_server.hpp"
#include "matloop/benchmark.hpp"
#include "matloop/compute.hpp"
#include "matloop/error.hpp"
#include "matloop/grammar.hpp"
#include "matloop/orchestrator.hpp"
#include "matloop/report.hpp"
#include "matloop/run_store.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace matloop;
using namespace matloop::orchestrator;
using RunRecord = matloop::orchestrator::Run;
using discussion::ReportDecision;
using namespace std::chrono_literals;

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("matloop-test-" + hex16((std::uint64_t(rd()) << 32) | rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

RunConfig in_process(int workers = 2) {
  RunConfig c;
  c.compute_mode = "in_process";
  c.workers = workers;
  return c;
}

Hypothesis hyp(const std::string& text) { return {"", text, ""}; }

std::vector<std::string> state_path(RunStore& store, const std::string& id) {
  std::vector<std::string> states;
  for (const auto& e : store.events(id))
    if (e.kind == EventKind::kStateChanged) states.push_back(e.payload.at("to"));
  return states;
}

Json comparable(const Json& report) {
  return strip_keys(report, {"run_id", "timestamp", "wall_time_ms", "total_wall_time_ms", "started_at_ms"});
}

const char* kClear = "The bulk modulus of Xe-fcc is greater than that of Ar-fcc";
const char* kRefine = "The lattice constant of Ar-fcc is within 0.0002 Å of 5.2577 Å";

TEST(StateMachine, TransitionTable) {
  using S = RunState;
  const std::set<std::pair<S, S>> edges{{S::kCreated, S::kPreExperiment},    {S::kPreExperiment, S::kExperimenting},
                                        {S::kExperimenting, S::kDiscussing},  {S::kDiscussing, S::kReporting},
                                        {S::kDiscussing, S::kRevising},       {S::kRevising, S::kPreExperiment},
                                        {S::kReporting, S::kFinished}};
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const auto from = static_cast<S>(a), to = static_cast<S>(b);
      const bool expected = edges.count({from, to}) || (to == S::kAborted && from != S::kFinished && from != S::kAborted);
      EXPECT_EQ(legal_transition(from, to), expected) << to_string(from) << "->" << to_string(to);
    }
}

TEST(StateMachine, FuzzedEventStreams) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord done = execute_run(hyp(kClear), in_process(), store);
  const auto events = store.events(done.run_id);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pick(0, events.size() - 1);
  std::uniform_int_distribution<int> state(0, 7);
  for (int k = 0; k < 300; ++k) {
    auto mutated = events;
    const std::size_t i = pick(rng);
    switch (k % 3) {
      case 0:  // drop an event: seq gap
        mutated.erase(mutated.begin() + static_cast<long>(i));
        break;
      case 1:  // duplicate an event
        mutated.insert(mutated.begin() + static_cast<long>(i), mutated[i]);
        break;
      default:  // retarget a state change
        if (mutated[i].kind != EventKind::kStateChanged || i == 0) continue;
        {
          const auto to = static_cast<RunState>(state(rng));
          const auto from = run_state_from_string(mutated[i].payload.at("from"));
          if (to == run_state_from_string(mutated[i].payload.at("to"))) continue;
          mutated[i].payload["to"] = to_string(to);
          if (!legal_transition(from, to)) {
            EXPECT_THROW(replay(mutated), Error);
            continue;
          }
        }
        break;
    }
    if (k % 3 != 2) {
      if (i + 1 == events.size() && k % 3 == 0) continue;  // dropping the tail is a valid prefix
      EXPECT_THROW(replay(mutated), Error) << "case " << k;
    }
  }
}

TEST(StateMachine, ReplayMatchesEverySnapshot) {
  TempDir dir;
  RunStore store(dir.path());
  std::vector<RunEvent> seen;
  int mismatches = 0, checked = 0;
  RunHooks hooks;
  hooks.on_event = [&](const RunRecord& run, const RunEvent& e) {
    seen.push_back(e);
    ++checked;
    if (canonical_dump(to_json(replay(seen))) != canonical_dump(to_json(run))) ++mismatches;
  };
  const RunRecord r = execute_run(hyp(kRefine), in_process(), store, hooks);
  EXPECT_GT(checked, 10);
  EXPECT_EQ(mismatches, 0);
  EXPECT_EQ(canonical_dump(to_json(store.rebuild(r.run_id))), canonical_dump(to_json(store.snapshot(r.run_id))));
  EXPECT_EQ(canonical_dump(to_json(run_from_json(to_json(r)))), canonical_dump(to_json(r)));
}

TEST(StateMachine, ApplyRejections) {
  RunRecord r;
  RunEvent bad{2, now_iso8601(), EventKind::kStateChanged, {{"to", "created"}}};
  try {
    apply(r, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "EventOutOfOrder");
  }
  RunEvent first{1, now_iso8601(), EventKind::kVerdict, Json::object()};
  EXPECT_THROW(apply(r, first), Error);
}

TEST(Orchestrator, ClearMarginRun) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord r = execute_run(hyp(kClear), in_process(), store);
  EXPECT_EQ(r.state, RunState::kFinished);
  EXPECT_EQ(state_path(store, r.run_id),
            (std::vector<std::string>{"created", "pre_experiment", "experimenting", "discussing", "reporting",
                                      "finished"}));
  ASSERT_TRUE(r.report.has_value());
  EXPECT_EQ(r.report->at("final_decision"), "supported");
  EXPECT_EQ(r.report->at("total_iterations"), 1);
  EXPECT_EQ(r.iterations.at(0).outcomes.size(), 6u);
  EXPECT_EQ(final_decision(r), ReportDecision::kSupported);
  // seq is gapless from 1
  std::int64_t seq = 0;
  for (const auto& e : store.events(r.run_id)) EXPECT_EQ(e.seq, ++seq);
}

TEST(Orchestrator, VotingStrategy) {
  TempDir dir;
  RunStore store(dir.path());
  RunConfig c = in_process();
  c.strategy = discussion::Strategy::kVoting;
  const RunRecord r = execute_run(hyp("The cohesive energy per atom of Ar-fcc is less than that of Kr-fcc"), c, store);
  EXPECT_EQ(r.report->at("final_decision"), "refuted");
  EXPECT_EQ(r.iterations.at(0).turns.size(), 5u);
}

TEST(Orchestrator, RefinementLoop) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord r = execute_run(hyp(kRefine), in_process(), store);
  EXPECT_EQ(r.state, RunState::kFinished);
  ASSERT_GE(r.iterations.size(), 2u);
  EXPECT_LE(r.iterations.size(), 3u);
  const Json& rep = *r.report;
  EXPECT_EQ(rep.at("iterations").size(), r.iterations.size());
  EXPECT_EQ(rep.at("total_iterations"), r.iterations.size());
  for (std::size_t k = 0; k + 1 < r.iterations.size(); ++k) {
    ASSERT_TRUE(r.iterations[k].revision.has_value());
    EXPECT_EQ(r.iterations[k + 1].plan, r.iterations[k].revision->next);
    EXPECT_EQ(r.iterations[k + 1].plan.n_trials, 2 * r.iterations[k].plan.n_trials);
    EXPECT_EQ(rep.at("iterations").at(k).at("next_action").at("action"), "revise");
  }
  const auto path = state_path(store, r.run_id);
  EXPECT_NE(std::find(path.begin(), path.end(), "revising"), path.end());
}

TEST(Orchestrator, Deterministic) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord a = execute_run(hyp(kRefine), in_process(1), store);
  const RunRecord b = execute_run(hyp(kRefine), in_process(4), store);
  EXPECT_EQ(canonical_dump(comparable(*a.report)), canonical_dump(comparable(*b.report)));
}

TEST(Orchestrator, CrashAndResume) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord reference = execute_run(hyp(kRefine), in_process(1), store);

  for (int kill_after : {1, 4, 7}) {
    const std::string id = "run-crash-" + std::to_string(kill_after);
    const pid_t pid = fork();
    ASSERT_GE(pid, 0);
    if (pid == 0) {
      int units = 0;
      RunHooks hooks;
      hooks.on_event = [&](const RunRecord&, const RunEvent& e) {
        if (e.kind == EventKind::kUnitCompleted && ++units == kill_after) _exit(0);
      };
      execute_run(hyp(kRefine), in_process(1), store, hooks, id);
      _exit(3);  // the crash point was never reached
    }
    int status = 0;
    waitpid(pid, &status, 0);
    ASSERT_TRUE(WIFEXITED(status));
    ASSERT_EQ(WEXITSTATUS(status), 0);
    EXPECT_EQ(store.rebuild(id).state, RunState::kExperimenting);

    int reexecuted = 0;
    const RunRecord before = store.rebuild(id);
    std::set<std::string> done;
    for (const auto& o : before.iterations.back().outcomes) done.insert(calc::unit_id_of(o));
    RunHooks hooks;
    hooks.on_event = [&](const RunRecord&, const RunEvent& e) {
      if (e.kind == EventKind::kUnitCompleted && done.count(e.payload.at("result").at("unit_id")) &&
          e.payload.at("iteration") == before.iteration)
        ++reexecuted;
    };
    const RunRecord resumed = resume_run(id, store, hooks);
    EXPECT_EQ(reexecuted, 0);
    ASSERT_TRUE(resumed.report.has_value());
    EXPECT_EQ(canonical_dump(comparable(*resumed.report)), canonical_dump(comparable(*reference.report)))
        << "killed after " << kill_after << " units";
  }
}

TEST(Orchestrator, UserAbort) {
  TempDir dir;
  RunStore store(dir.path());
  std::atomic<bool> stop{false};
  RunHooks hooks;
  hooks.abort = &stop;
  hooks.on_event = [&](const RunRecord&, const RunEvent& e) {
    if (e.kind == EventKind::kUnitCompleted) stop = true;
  };
  const RunRecord r = execute_run(hyp(kClear), in_process(1), store, hooks);
  EXPECT_EQ(r.state, RunState::kAborted);
  EXPECT_EQ(r.abort_code, "AbortedByUser");
  ASSERT_TRUE(r.report.has_value());
  EXPECT_EQ(r.report->at("final_decision"), "inconclusive");
  EXPECT_EQ(r.report->at("aborted"), true);
  EXPECT_EQ(final_decision(r), ReportDecision::kInconclusive);
}

TEST(Orchestrator, UnusableHypothesisAborts) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord r = execute_run(hyp("Xenon is pretty stiff"), in_process(), store);
  EXPECT_EQ(r.state, RunState::kAborted);
  EXPECT_EQ(r.abort_code, "GrammarMismatch");
  EXPECT_TRUE(is_validation_abort(*r.abort_code));
  EXPECT_FALSE(is_validation_abort("BackendUnreachable"));
}

TEST(Orchestrator, UnreachableBackendRetriesThenAborts) {
  TempDir dir;
  RunStore store(dir.path());
  RunConfig c;
  c.compute_mode = "remote";
  c.compute_url = "http://127.0.0.1:" + std::to_string(test_support::free_port());
  c.retry_attempts = 3;
  c.retry_base_delay = 5ms;
  const RunRecord r = execute_run(hyp(kClear), c, store);
  EXPECT_EQ(r.state, RunState::kAborted);
  EXPECT_EQ(r.abort_code, "BackendUnreachable");
  int errors = 0;
  for (const auto& e : store.events(r.run_id)) errors += e.kind == EventKind::kError;
  EXPECT_GE(errors, 3);
  EXPECT_EQ(r.report->at("final_decision"), "inconclusive");
}

TEST(Orchestrator, RemoteBackendMatchesInProcess) {
  TempDir dir;
  RunStore store(dir.path());
  compute::JobServer server(2);
  server.start();
  RunConfig remote;
  remote.compute_mode = "remote";
  remote.compute_url = server.url();
  const RunRecord a = execute_run(hyp(kClear), remote, store);
  const RunRecord b = execute_run(hyp(kClear), in_process(), store);
  server.stop();
  EXPECT_EQ(canonical_dump(comparable(*a.report)), canonical_dump(comparable(*b.report)));
}

TEST(Config, ParsingAndErrors) {
  const RunConfig c = run_config_from_json(
      {{"discussion", {{"strategy", "voting"}, {"n_experts", 7}, {"max_iterations", 4}}}, {"trials", 5},
       {"defaults", {{"fmax", 0.01}}}, {"retry", {{"attempts", 2}, {"base_delay_ms", 10}}}});
  EXPECT_EQ(c.strategy, discussion::Strategy::kVoting);
  EXPECT_EQ(c.n_experts, 7);
  EXPECT_EQ(c.sufficiency.max_iterations, 4);
  EXPECT_EQ(c.n_trials, 5);
  EXPECT_EQ(c.defaults.fmax, 0.01);
  EXPECT_EQ(c.retry_base_delay, 10ms);
  EXPECT_EQ(canonical_dump(to_json(run_config_from_json(to_json(c)))), canonical_dump(to_json(c)));
  for (const Json& bad : {Json{{"discussion", {{"strategy", "coin"}}}}, Json{{"trials", 0}},
                          Json{{"discussion", {{"n_experts", 4}}}}, Json{{"compute", {{"mode", "cloud"}}}}}) {
    try {
      run_config_from_json(bad);
      FAIL() << bad.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), "InvalidConfig") << bad.dump();
    }
  }
}

TEST(Report, StructureAndMarkdown) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord r = execute_run(hyp(kRefine), in_process(), store);
  const Json rep = generate_report(r, now_epoch_ms());
  for (const char* key : {"run_id", "hypothesis_text", "claim", "claim_text", "category", "research_questions",
                          "target_materials", "revision_policy", "iterations", "final_decision", "total_iterations",
                          "total_wall_time_ms", "aborted"})
    EXPECT_TRUE(rep.contains(key)) << key;
  for (const auto& it : rep.at("iterations")) {
    for (const char* key : {"iteration", "plan", "spec_summary", "results", "evidence", "transcript", "verdict",
                            "next_action"})
      EXPECT_TRUE(it.contains(key)) << key;
    EXPECT_EQ(it.at("results").size(), it.at("plan").at("n_trials").get<std::size_t>());
  }
  const std::string md = render_report(rep);
  std::size_t pos = 0;
  for (const std::string heading : {"# Validation report", "## Hypothesis", "## Claim", "## Iteration 0",
                                    "### Evidence", "### Transcript", "### Verdict", "## Iteration 1",
                                    "## Final decision"}) {
    const auto at = md.find(heading, pos);
    ASSERT_NE(at, std::string::npos) << heading;
    pos = at;
  }
}

TEST(Report, IncompleteRun) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord r = create_run(hyp(kClear), in_process(), store);
  try {
    generate_report(r, now_epoch_ms());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "IncompleteRun");
  }
  EXPECT_THROW(create_run(hyp(kClear), in_process(), store, {}, r.run_id), Error);
  const RunRecord finished = resume_run(r.run_id, store);
  EXPECT_EQ(finished.state, RunState::kFinished);
  EXPECT_THROW(resume_run("run-does-not-exist", store), Error);
}

TEST(Benchmark, ScoringMatchesRecount) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> n(1, 30), cat(0, 2), dec(0, 2), coin(0, 1);
  for (int k = 0; k < 300; ++k) {
    std::vector<CaseOutcome> cases;
    std::map<std::string, std::pair<int, int>> per;  // correct, total
    int correct = 0, refined = 0;
    const int count = n(rng);
    for (int i = 0; i < count; ++i) {
      CaseOutcome o;
      o.case_id = "c" + std::to_string(i);
      o.category = static_cast<Category>(cat(rng));
      o.ground_truth = coin(rng);
      o.decision = static_cast<ReportDecision>(dec(rng));
      o.n_revisions = coin(rng) ? 0 : 1 + coin(rng);
      const bool ok = (o.decision == ReportDecision::kSupported && o.ground_truth) ||
                      (o.decision == ReportDecision::kRefuted && !o.ground_truth);
      correct += ok;
      refined += o.n_revisions > 0;
      auto& slot = per[calc::to_string(o.category)];
      slot.first += ok;
      ++slot.second;
      cases.push_back(o);
    }
    const auto res = score(cases);
    EXPECT_DOUBLE_EQ(res.overall_accuracy, static_cast<double>(correct) / count);
    EXPECT_EQ(res.n_refined, refined);
    for (const char* c : {"energetic", "mechanical", "structural"}) {
      ASSERT_TRUE(res.per_category_accuracy.count(c));
      if (!per.count(c)) {
        EXPECT_FALSE(res.per_category_accuracy.at(c).has_value());
      } else {
        EXPECT_DOUBLE_EQ(*res.per_category_accuracy.at(c), static_cast<double>(per[c].first) / per[c].second);
      }
    }
  }
  try {
    score({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "EmptyBenchmark");
  }
}

TEST(Benchmark, LoaderRejectsBadCases) {
  const Json good = {{"case_id", "x"}, {"hypothesis", kClear}, {"category", "mechanical"}, {"ground_truth", "yes"},
                     {"ground_truth_provenance", "p"}};
  EXPECT_EQ(benchmark_from_json(Json::array({good})).size(), 1u);
  Json j = good;
  j["ground_truth_provenance"] = "";
  EXPECT_THROW(benchmark_from_json(Json::array({j})), Error);
  j = good;
  j["category"] = "energetic";
  EXPECT_THROW(benchmark_from_json(Json::array({j})), Error);
  j = good;
  j["hypothesis"] = "Xenon is stiff";
  EXPECT_THROW(benchmark_from_json(Json::array({j})), Error);
}

// Property values of the bundled materials from the reference fcc sums.
double reference_value(const std::string& material, Property p) {
  const std::string el = material.substr(0, 2);
  auto coarse = oracle::fcc_scan(el, 4.5, 7.5, 3001);
  auto fine = oracle::fcc_scan(el, coarse.a_min - 0.002, coarse.a_min + 0.002, 4001);
  switch (p) {
    case Property::kCohesiveEnergyPerAtom: return fine.e_min;
    case Property::kLatticeConstant: return fine.a_min;
    case Property::kBulkModulus: return oracle::fcc_bulk_modulus(el, fine.a_min) * 160.21766208;
  }
  return 0;
}

TEST(Benchmark, BundledTruthsAgreeWithReferenceSums) {
  const auto cases = load_benchmark(std::string(MATLOOP_DATA_DIR) + "/benchmark.json");
  ASSERT_EQ(cases.size(), 12u);
  for (const auto& c : cases) {
    const Claim claim = frontend::parse_claim(c.hypothesis);
    const double s = reference_value(claim.subject, claim.property);
    const double r = claim.reference_value() ? claim.reference_value()->value
                                             : reference_value(*claim.reference_material(), claim.property);
    bool truth = false;
    switch (claim.comparator) {
      case Comparator::kGreaterThan: truth = s > r; break;
      case Comparator::kLessThan: truth = s < r; break;
      case Comparator::kWithin: truth = std::abs(s - r) <= *claim.tolerance; break;
    }
    EXPECT_EQ(truth, c.ground_truth) << c.case_id;
  }
}

TEST(Benchmark, BundledSuiteScoresPerfectly) {
  TempDir dir;
  RunStore store(dir.path());
  const auto res = run_benchmark(load_benchmark(std::string(MATLOOP_DATA_DIR) + "/benchmark.json"), in_process(), store);
  EXPECT_DOUBLE_EQ(res.overall_accuracy, 1.0);
  for (const char* c : {"energetic", "mechanical", "structural"}) EXPECT_EQ(res.per_category_accuracy.at(c), 1.0);
  EXPECT_GE(res.n_refined, 1);
  const Json j = to_json(res);
  EXPECT_TRUE(j.at("per_category_accuracy").contains("structural"));
}

class ApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_ = std::make_unique<ApiServer>(store_, in_process(), hooks_);
    port_ = server_->start();
  }
  void TearDown() override { server_->stop(); }
  httplib::Client client() {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60s);
    return c;
  }
  std::string post_run(const std::string& text) {
    auto r = client().Post("/api/runs", Json{{"hypothesis_text", text}}.dump(), "application/json");
    EXPECT_EQ(r->status, 201) << r->body;
    return Json::parse(r->body).at("run_id");
  }

  TempDir dir_;
  RunStore store_{dir_.path()};
  RunHooks hooks_;
  std::unique_ptr<ApiServer> server_;
  int port_ = 0;
};

TEST_F(ApiTest, SubmitInspectAndStream) {
  const std::string id = post_run(kClear);
  server_->wait_idle();
  auto c = client();
  auto r = c.Get("/api/runs/" + id);
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(Json::parse(r->body).at("state"), "finished");

  r = c.Get("/api/runs");
  ASSERT_EQ(r->status, 200);
  const Json runs = Json::parse(r->body).at("runs");
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].at("final_decision"), "supported");

  r = c.Get("/api/runs/" + id + "/events");
  ASSERT_EQ(r->status, 200);
  EXPECT_NE(r->get_header_value("Content-Type").find("text/event-stream"), std::string::npos);
  std::string expected;
  for (const auto& e : store_.events(id)) expected += sse_frame(e);
  EXPECT_EQ(r->body, expected);
  EXPECT_NE(r->body.find("event: verdict\n"), std::string::npos);

  r = c.Post("/api/runs/" + id + "/abort");
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(Json::parse(r->body).at("error").at("code"), "already_terminal");
  EXPECT_EQ(c.Get("/api/runs/run-missing")->status, 404);
  EXPECT_EQ(c.Get("/api/runs/run-missing/events")->status, 404);
  EXPECT_EQ(c.Post("/api/runs/run-missing/abort")->status, 404);
}

TEST_F(ApiTest, RejectsBadSubmissions) {
  auto c = client();
  auto r = c.Post("/api/runs", Json{{"hypothesis_text", "The bulk modulus of Kr-fcc is huge"}}.dump(),
                  "application/json");
  EXPECT_EQ(r->status, 400);
  const Json body = Json::parse(r->body);
  EXPECT_EQ(body.at("error").at("code"), "GrammarMismatch");
  EXPECT_EQ(body.at("error").at("matched_prefix"), "The bulk modulus of Kr-fcc");
  EXPECT_EQ(c.Post("/api/runs", Json{{"hypothesis_text", "  "}}.dump(), "application/json")->status, 400);
  EXPECT_EQ(c.Post("/api/runs", "{", "application/json")->status, 400);
  r = c.Post("/api/runs", Json{{"hypothesis_text", kClear}, {"config", {{"trials", 0}}}}.dump(), "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_TRUE(store_.list().empty());
}

class SlowApiTest : public ApiTest {
 protected:
  void SetUp() override {
    hooks_.on_event = [](const RunRecord&, const RunEvent&) { std::this_thread::sleep_for(20ms); };
    ApiTest::SetUp();
  }
};

TEST_F(SlowApiTest, AbortRunningRun) {
  const std::string id = post_run(kRefine);
  auto r = client().Post("/api/runs/" + id + "/abort");
  EXPECT_EQ(r->status, 202);
  server_->wait_idle();
  const RunRecord snap = store_.snapshot(id);
  EXPECT_EQ(snap.state, RunState::kAborted);
  EXPECT_EQ(snap.abort_code, "AbortedByUser");
  ASSERT_TRUE(snap.report.has_value());
  EXPECT_EQ(snap.report->at("final_decision"), "inconclusive");
}

TEST_F(SlowApiTest, LiveStreamEndsWithTheRun) {
  const std::string id = post_run(kClear);
  auto r = client().Get("/api/runs/" + id + "/events");
  ASSERT_EQ(r->status, 200);
  EXPECT_NE(r->body.find("\"to\":\"finished\""), std::string::npos);
  std::int64_t seq = 0;
  std::size_t pos = 0;
  while ((pos = r->body.find("\nid: ", pos)) != std::string::npos) {
    pos += 5;
    EXPECT_EQ(std::stoll(r->body.substr(pos)), ++seq);
  }
  EXPECT_EQ(seq, store_.snapshot(id).last_seq);
}

TEST(RunStore, TruncatedTailIsIgnored) {
  TempDir dir;
  RunStore store(dir.path());
  const RunRecord r = execute_run(hyp(kClear), in_process(), store);
  const auto n = store.events(r.run_id).size();
  {
    std::ofstream out(store.dir(r.run_id) / "events.jsonl", std::ios::app);
    out << "{\"seq\": 99999, \"kind\": \"err";
  }
  EXPECT_EQ(store.events(r.run_id).size(), n);
  EXPECT_EQ(store.rebuild(r.run_id).state, RunState::kFinished);
  EXPECT_FALSE(store.exists("../etc"));
  EXPECT_EQ(new_run_id().size(), 20u);
}

}  // namespace
