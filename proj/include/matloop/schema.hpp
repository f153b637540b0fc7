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

#ifndef MATLOOP_SCHEMA_HPP_
#define MATLOOP_SCHEMA_HPP_

#include <string>
#include <vector>

#include "matloop/json_util.hpp"

namespace matloop {

struct Diagnostic {
  std::string path;  // JSON pointer, e.g. "/units/0/resolved/task/fmax"
  std::string rule;  // required | type | range | enum | format | uniqueness | coverage | unknown_key | consistency
  std::string message;
};

Json to_json(const Diagnostic& d);

// Checks a document against the ExperimentSpec schema: required keys and
// types, value ranges, enumerations, the unit_id format, unit_id
// uniqueness, and that units plus failures cover the material × trial grid
// exactly once. An empty result means the document is valid.
std::vector<Diagnostic> validate_spec(const Json& document);

// JSON Schema (draft 2020-12) rendition of the same contract, for external
// tooling. Grid coverage and uniqueness are beyond JSON Schema and only
// enforced by validate_spec.
const Json& experiment_spec_schema();

}  // namespace matloop

#endif  // MATLOOP_SCHEMA_HPP_
