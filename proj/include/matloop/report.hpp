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

#ifndef MATLOOP_REPORT_HPP_
#define MATLOOP_REPORT_HPP_

#include <cstdint>
#include <string>

#include "matloop/run.hpp"

namespace matloop::orchestrator {

// Final decision implied by the run: decide_next on the last verdict, or
// inconclusive for an aborted run.
discussion::ReportDecision final_decision(const Run& run);

// Report document:
//   {run_id, hypothesis_text, claim, claim_text, category, research_questions,
//    target_materials, revision_policy, iterations: [{iteration, plan,
//    spec_summary, results, evidence, transcript, verdict, next_action}],
//    final_decision, total_iterations, total_wall_time_ms, aborted,
//    abort_code}
// errors: IncompleteRun (state is neither reporting, finished nor aborted)
Json generate_report(const Run& run, std::int64_t now_ms);

// Markdown with sections in fixed order: hypothesis, claim, then per
// iteration evidence, transcript and verdict, then the final decision.
std::string render_report(const Json& report);

}  // namespace matloop::orchestrator

#endif  // MATLOOP_REPORT_HPP_
