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

#ifndef MATLOOP_GRAMMAR_HPP_
#define MATLOOP_GRAMMAR_HPP_

#include <string>
#include <string_view>

#include "matloop/error.hpp"
#include "matloop/spec_types.hpp"

namespace matloop::frontend {

// Text did not match the claim grammar. `matched_prefix()` is the longest
// prefix of the input that the grammar accepted before failing.
class GrammarMismatch : public Error {
 public:
  GrammarMismatch(std::string matched_prefix, const std::string& expected)
      : Error("GrammarMismatch", "expected " + expected + " after '" + matched_prefix + "'"),
        matched_prefix_(std::move(matched_prefix)) {}
  const std::string& matched_prefix() const noexcept { return matched_prefix_; }

 private:
  std::string matched_prefix_;
};

// claim    := "The" property "of" MATERIAL ("is greater than" | "is less than") ref
//           | "The" property "of" MATERIAL "is within" NUMBER UNIT "of" ref
// ref      := "that of" MATERIAL | NUMBER UNIT
// property := "bulk modulus" | "cohesive energy per atom" | "lattice constant"
//
// Keywords are case-insensitive; a single trailing period is allowed.
// Units must be the property's unit (eV/atom, GPa, Å; "A" and "angstrom"
// are accepted spellings of Å).
Claim parse_claim(std::string_view text);

// Canonical template; parse_claim(render_claim(c)) == c.
std::string render_claim(const Claim& c);

// "Is the bulk modulus of Kr-fcc greater than that of Ar-fcc?"
std::string research_question(const Claim& c);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace matloop::frontend

#endif  // MATLOOP_GRAMMAR_HPP_
