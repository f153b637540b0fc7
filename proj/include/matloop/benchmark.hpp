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

#ifndef MATLOOP_BENCHMARK_HPP_
#define MATLOOP_BENCHMARK_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "matloop/orchestrator.hpp"

namespace matloop::orchestrator {

struct BenchmarkCase {
  std::string case_id;
  std::string hypothesis;
  Category category = Category::kEnergetic;
  bool ground_truth = false;  // yes
  std::string ground_truth_provenance;
};

// errors: InvalidBenchmark (missing fields, empty provenance, a hypothesis
// the grammar rejects, or a category that disagrees with the claim)
std::vector<BenchmarkCase> benchmark_from_json(const Json& j);
std::vector<BenchmarkCase> load_benchmark(const std::string& path);
Json to_json(const BenchmarkCase& c);

struct CaseOutcome {
  std::string case_id;
  Category category = Category::kEnergetic;
  bool ground_truth = false;
  discussion::ReportDecision decision = discussion::ReportDecision::kInconclusive;
  int n_revisions = 0;
  double wall_time_ms = 0.0;
  std::string run_id;
};

// supported ↔ yes, refuted ↔ no; inconclusive is never correct.
bool is_correct(const CaseOutcome& o);

struct BenchmarkResult {
  double overall_accuracy = 0.0;
  // Always the three keys energetic, mechanical, structural; null when a
  // category has no cases.
  std::map<std::string, std::optional<double>> per_category_accuracy;
  int n_refined = 0;
  double mean_wall_time_ms = 0.0;
  std::vector<CaseOutcome> cases;
};

// errors: EmptyBenchmark
BenchmarkResult score(std::vector<CaseOutcome> outcomes);
Json to_json(const BenchmarkResult& r);

// Runs every case through execute_run with `config`, one run directory per
// case under `store`. errors: EmptyBenchmark
BenchmarkResult run_benchmark(const std::vector<BenchmarkCase>& cases, const RunConfig& config, RunStore& store,
                              const RunHooks& hooks = {});

}  // namespace matloop::orchestrator

#endif  // MATLOOP_BENCHMARK_HPP_
