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

#include "matloop/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace matloop::frontend {
namespace {

struct Token {
  std::string text;
  std::size_t end;  // offset one past the token in the source
};

std::vector<Token> split(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back({std::string(s.substr(start, i - start)), i});
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::string> canonical_unit(const std::string& tok) {
  const std::string t = lower(tok);
  if (t == "ev/atom") return "eV/atom";
  if (t == "gpa") return "GPa";
  // U+00C5 and U+212B are both written Å.
  if (t == "a" || t == "angstrom" || t == "\xc3\x85" || t == "\xe2\x84\xab") return "Å";
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view source, std::vector<Token> toks) : src_(source), toks_(std::move(toks)) {}

  Claim parse() {
    Claim c;
    keywords({"the"}, "\"The\"");
    c.property = property();
    keywords({"of"}, "\"of\"");
    c.subject = material();
    if (try_keywords({"is", "greater", "than"})) {
      c.comparator = Comparator::kGreaterThan;
      c.reference = reference(c.property);
    } else if (try_keywords({"is", "less", "than"})) {
      c.comparator = Comparator::kLessThan;
      c.reference = reference(c.property);
    } else if (try_keywords({"is", "within"})) {
      c.comparator = Comparator::kWithin;
      const double tol = number();
      unit(c.property);
      c.tolerance = tol;
      keywords({"of"}, "\"of\"");
      c.reference = reference(c.property);
    } else {
      fail("\"is greater than\", \"is less than\" or \"is within\"");
    }
    if (pos_ != toks_.size()) fail("end of claim");
    if (c.comparator == Comparator::kWithin && !(*c.tolerance >= 0.0)) fail("a non-negative tolerance");
    if (const auto* m = c.reference_material(); m && *m == c.subject) fail("a material distinct from the subject");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    const std::size_t end = pos_ == 0 ? 0 : toks_[pos_ - 1].end;
    throw GrammarMismatch(std::string(src_.substr(0, end)), expected);
  }

  bool try_keywords(std::initializer_list<std::string_view> words) {
    std::size_t p = pos_;
    for (auto w : words) {
      if (p >= toks_.size() || lower(toks_[p].text) != w) return false;
      ++p;
    }
    pos_ = p;
    return true;
  }

  void keywords(std::initializer_list<std::string_view> words, const std::string& expected) {
    if (!try_keywords(words)) fail(expected);
  }

  Property property() {
    if (try_keywords({"bulk", "modulus"})) return Property::kBulkModulus;
    if (try_keywords({"cohesive", "energy", "per", "atom"})) return Property::kCohesiveEnergyPerAtom;
    if (try_keywords({"lattice", "constant"})) return Property::kLatticeConstant;
    fail("a property (bulk modulus, cohesive energy per atom, lattice constant)");
  }

  std::string material() {
    if (pos_ >= toks_.size()) fail("a material key");
    const std::string& t = toks_[pos_].text;
    const bool ok = std::isalnum(static_cast<unsigned char>(t.front())) &&
                    std::all_of(t.begin(), t.end(), [](unsigned char ch) {
                      return std::isalnum(ch) || ch == '-' || ch == '_' || ch == '.' || ch == '+';
                    });
    if (!ok) fail("a material key");
    ++pos_;
    return t;
  }

  double number() {
    if (pos_ >= toks_.size()) fail("a number");
    std::string_view t = toks_[pos_].text;
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) fail("a number");
    ++pos_;
    return v;
  }

  std::string unit(Property p) {
    if (pos_ >= toks_.size()) fail("a unit (" + unit_of(p) + ")");
    auto u = canonical_unit(toks_[pos_].text);
    if (!u || *u != unit_of(p)) fail("the unit " + unit_of(p));
    ++pos_;
    return *u;
  }

  std::variant<Quantity, std::string> reference(Property p) {
    if (try_keywords({"that", "of"})) return material();
    const double v = number();
    return Quantity{v, unit(p)};
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Claim parse_claim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.back() == '.') text.remove_suffix(1);
  return Parser(text, split(text)).parse();
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string render_claim(const Claim& c) {
  std::string out = "The " + phrase_of(c.property) + " of " + c.subject + " is ";
  switch (c.comparator) {
    case Comparator::kGreaterThan: out += "greater than "; break;
    case Comparator::kLessThan: out += "less than "; break;
    case Comparator::kWithin:
      out += "within " + format_number(c.tolerance.value_or(0.0)) + " " + unit_of(c.property) + " of ";
      break;
  }
  if (const auto* m = c.reference_material())
    out += "that of " + *m;
  else
    out += format_number(c.reference_value()->value) + " " + c.reference_value()->unit;
  return out;
}

std::string research_question(const Claim& c) {
  std::string text = render_claim(c);
  // "The X of S is ..." -> "Is the X of S ...?"
  const auto is_pos = text.find(" is ");
  return "Is the" + text.substr(3, is_pos - 3) + text.substr(is_pos + 3) + "?";
}

}  // namespace matloop::frontend
