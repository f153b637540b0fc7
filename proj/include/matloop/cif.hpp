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

#ifndef MATLOOP_CIF_HPP_
#define MATLOOP_CIF_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "matloop/error.hpp"
#include "matloop/structure.hpp"

namespace matloop::structure {

// Raised by parse_cif; `line()` is 1-based, 0 when the problem is global
// (e.g. a missing tag).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("ParseError", (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + message),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Parses the P1 CIF subset: _cell_length_{a,b,c}, _cell_angle_{alpha,beta,gamma}
// and one atom-site loop carrying _atom_site_type_symbol and
// _atom_site_fract_{x,y,z}. Unrecognised tags are skipped and reported in
// `warnings` when provided.
Structure parse_cif(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Emits exactly the subset parse_cif reads.
std::string write_cif(const Structure& s, std::string_view data_name = "matloop");

// Lattice with a along x and b in the xy plane; angles in degrees.
Mat3 lattice_from_parameters(double a, double b, double c, double alpha, double beta, double gamma);

bool is_element_symbol(std::string_view symbol);

}  // namespace matloop::structure

#endif  // MATLOOP_CIF_HPP_
