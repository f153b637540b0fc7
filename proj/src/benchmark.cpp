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

#include "matloop/benchmark.hpp"

#include <chrono>

#include "matloop/error.hpp"
#include "matloop/grammar.hpp"
#include "matloop/report.hpp"

namespace matloop::orchestrator {

std::vector<BenchmarkCase> benchmark_from_json(const Json& j) {
  if (!j.is_array()) throw Error("InvalidBenchmark", "benchmark file must hold a JSON list of cases");
  std::vector<BenchmarkCase> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& c = j[i];
    const std::string where = "case " + std::to_string(i);
    BenchmarkCase b;
    try {
      b.case_id = c.at("case_id").get<std::string>();
      b.hypothesis = c.at("hypothesis").get<std::string>();
      b.category = calc::category_from_string(c.at("category").get<std::string>());
      const auto truth = c.at("ground_truth").get<std::string>();
      if (truth != "yes" && truth != "no") throw Error("InvalidBenchmark", where + ": ground_truth must be yes or no");
      b.ground_truth = truth == "yes";
      b.ground_truth_provenance = c.at("ground_truth_provenance").get<std::string>();
    } catch (const Json::exception& e) {
      throw Error("InvalidBenchmark", where + ": " + e.what());
    }
    if (b.ground_truth_provenance.empty()) throw Error("InvalidBenchmark", where + ": empty ground_truth_provenance");
    Claim claim;
    try {
      claim = frontend::parse_claim(b.hypothesis);
    } catch (const Error& e) {
      throw Error("InvalidBenchmark", where + ": " + e.what());
    }
    if (category_of(claim.property) != b.category)
      throw Error("InvalidBenchmark", where + ": category does not match the claimed property");
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<BenchmarkCase> load_benchmark(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error("InvalidBenchmark", path + ": " + e.what());
  }
  return benchmark_from_json(j);
}

Json to_json(const BenchmarkCase& c) {
  return {{"case_id", c.case_id},
          {"hypothesis", c.hypothesis},
          {"category", calc::to_string(c.category)},
          {"ground_truth", c.ground_truth ? "yes" : "no"},
          {"ground_truth_provenance", c.ground_truth_provenance}};
}

bool is_correct(const CaseOutcome& o) {
  using discussion::ReportDecision;
  if (o.decision == ReportDecision::kSupported) return o.ground_truth;
  if (o.decision == ReportDecision::kRefuted) return !o.ground_truth;
  return false;
}

BenchmarkResult score(std::vector<CaseOutcome> outcomes) {
  if (outcomes.empty()) throw Error("EmptyBenchmark", "no benchmark cases");
  BenchmarkResult r;
  std::map<std::string, std::pair<int, int>> per;  // correct, total
  for (auto c : {Category::kEnergetic, Category::kMechanical, Category::kStructural}) per[calc::to_string(c)] = {0, 0};
  int correct = 0;
  double wall = 0.0;
  for (const auto& o : outcomes) {
    const bool ok = is_correct(o);
    correct += ok;
    auto& p = per[calc::to_string(o.category)];
    p.first += ok;
    ++p.second;
    if (o.n_revisions > 0) ++r.n_refined;
    wall += o.wall_time_ms;
  }
  const double n = static_cast<double>(outcomes.size());
  r.overall_accuracy = correct / n;
  r.mean_wall_time_ms = wall / n;
  for (const auto& [key, p] : per)
    r.per_category_accuracy[key] = p.second ? std::optional<double>(static_cast<double>(p.first) / p.second) : std::nullopt;
  r.cases = std::move(outcomes);
  return r;
}

Json to_json(const BenchmarkResult& r) {
  Json per = Json::object();
  for (const auto& [k, v] : r.per_category_accuracy) per[k] = v ? Json(*v) : Json();
  Json cases = Json::array();
  for (const auto& c : r.cases)
    cases.push_back({{"case_id", c.case_id},
                     {"category", calc::to_string(c.category)},
                     {"ground_truth", c.ground_truth ? "yes" : "no"},
                     {"decision", to_string(c.decision)},
                     {"correct", is_correct(c)},
                     {"n_revisions", c.n_revisions},
                     {"wall_time_ms", c.wall_time_ms},
                     {"run_id", c.run_id}});
  return {{"overall_accuracy", r.overall_accuracy},
          {"per_category_accuracy", per},
          {"n_refined", r.n_refined},
          {"mean_wall_time_ms", r.mean_wall_time_ms},
          {"cases", cases}};
}

BenchmarkResult run_benchmark(const std::vector<BenchmarkCase>& cases, const RunConfig& config, RunStore& store,
                              const RunHooks& hooks) {
  if (cases.empty()) throw Error("EmptyBenchmark", "no benchmark cases");
  std::vector<CaseOutcome> outcomes;
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    Hypothesis h;
    h.text = c.hypothesis;
    const Run run = execute_run(h, config, store, hooks);
    CaseOutcome o;
    o.case_id = c.case_id;
    o.category = c.category;
    o.ground_truth = c.ground_truth;
    o.decision = final_decision(run);
    for (const auto& it : run.iterations) o.n_revisions += it.revision ? 1 : 0;
    o.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    o.run_id = run.run_id;
    outcomes.push_back(std::move(o));
  }
  return score(std::move(outcomes));
}

}  // namespace matloop::orchestrator
