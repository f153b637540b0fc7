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

#include "matloop/cif.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace matloop::structure {
namespace {

constexpr std::array<std::string_view, 118> kElements = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",
    "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh",
    "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re",
    "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db",
    "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

constexpr std::array<std::string_view, 6> kCellTags = {
    "_cell_length_a", "_cell_length_b", "_cell_length_c",
    "_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma"};

struct Line {
  int number;
  std::string text;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Whitespace tokenizer honouring '...' and "..." quoting.
std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    if (s[i] == '#') break;
    if (s[i] == '\'' || s[i] == '"') {
      const char q = s[i++];
      const std::size_t start = i;
      while (i < s.size() && s[i] != q) ++i;
      out.emplace_back(s.substr(start, i - start));
      if (i < s.size()) ++i;
    } else {
      const std::size_t start = i;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      out.emplace_back(s.substr(start, i - start));
    }
  }
  return out;
}

// CIF numbers may carry a standard uncertainty, e.g. "5.4031(2)".
std::optional<double> parse_number(std::string_view tok) {
  if (auto p = tok.find('('); p != std::string_view::npos) tok = tok.substr(0, p);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// "Fe2+" or "Fe1" in a type-symbol column reduce to the element "Fe".
std::string element_of(std::string_view tok) {
  std::size_t n = 0;
  while (n < tok.size() && std::isalpha(static_cast<unsigned char>(tok[n]))) ++n;
  std::string sym(tok.substr(0, n));
  if (!sym.empty()) {
    sym[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sym[0])));
    for (std::size_t k = 1; k < sym.size(); ++k)
      sym[k] = static_cast<char>(std::tolower(static_cast<unsigned char>(sym[k])));
  }
  return sym;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

bool is_element_symbol(std::string_view symbol) {
  return std::find(kElements.begin(), kElements.end(), symbol) != kElements.end();
}

Mat3 lattice_from_parameters(double a, double b, double c, double alpha, double beta,
                             double gamma) {
  const double deg = std::numbers::pi / 180.0;
  const double ca = std::cos(alpha * deg), cb = std::cos(beta * deg), cg = std::cos(gamma * deg);
  const double sg = std::sin(gamma * deg);
  const double cx = c * cb;
  const double cy = c * (ca - cb * cg) / sg;
  const double cz2 = c * c - cx * cx - cy * cy;
  if (!(cz2 > 0.0)) throw ParseError(0, "cell angles do not describe a valid cell");
  return {{{a, 0.0, 0.0}, {b * cg, b * sg, 0.0}, {cx, cy, std::sqrt(cz2)}}};
}

Structure parse_cif(std::string_view text, std::vector<std::string>* warnings) {
  std::vector<Line> lines;
  {
    std::istringstream in{std::string(text)};
    std::string l;
    int n = 0;
    while (std::getline(in, l)) {
      ++n;
      if (!l.empty() && l.back() == '\r') l.pop_back();
      const auto t = trim(l);
      if (t.empty() || t.front() == '#') continue;
      lines.push_back({n, std::string(t)});
    }
  }
  auto warn = [&](int line, const std::string& msg) {
    if (warnings) warnings->push_back("line " + std::to_string(line) + ": " + msg);
  };

  std::map<std::string, double> cell;
  bool have_sites = false;
  Structure s;
  s.periodic = true;

  std::size_t i = 0;
  while (i < lines.size()) {
    const Line& ln = lines[i];
    const auto toks = tokenize(ln.text);
    if (toks.empty()) {
      ++i;
      continue;
    }
    const std::string head = lower(toks[0]);
    if (head.rfind("data_", 0) == 0) {
      ++i;
      continue;
    }
    if (head == "loop_") {
      ++i;
      std::vector<std::string> columns;
      while (i < lines.size() && lines[i].text.front() == '_') {
        const auto ct = tokenize(lines[i].text);
        if (ct.size() != 1) throw ParseError(lines[i].number, "malformed loop header");
        columns.push_back(lower(ct[0]));
        ++i;
      }
      if (columns.empty()) throw ParseError(ln.number, "loop_ without column tags");
      std::vector<std::pair<int, std::vector<std::string>>> rows;
      while (i < lines.size()) {
        const auto& t = lines[i].text;
        if (t.front() == '_' || lower(t).rfind("loop_", 0) == 0 || lower(t).rfind("data_", 0) == 0)
          break;
        rows.emplace_back(lines[i].number, tokenize(t));
        ++i;
      }
      auto col = [&](std::string_view name) -> int {
        auto it = std::find(columns.begin(), columns.end(), name);
        return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
      };
      const bool is_site_loop = std::any_of(columns.begin(), columns.end(), [](const std::string& c) {
        return c.rfind("_atom_site_", 0) == 0;
      });
      if (!is_site_loop) {
        warn(ln.number, "ignoring loop starting with " + columns.front());
        continue;
      }
      // A site loop that only carries aniso/label data is not the position loop.
      const int cx = col("_atom_site_fract_x"), cy = col("_atom_site_fract_y"),
                cz = col("_atom_site_fract_z");
      if (cx < 0 && cy < 0 && cz < 0) {
        warn(ln.number, "ignoring atom-site loop without fractional coordinates");
        continue;
      }
      if (cx < 0 || cy < 0 || cz < 0)
        throw ParseError(ln.number, "atom-site loop lacks one of _atom_site_fract_x/y/z");
      int csym = col("_atom_site_type_symbol");
      if (csym < 0) throw ParseError(ln.number, "atom-site loop lacks _atom_site_type_symbol");
      if (have_sites) throw ParseError(ln.number, "more than one atom-site loop");
      have_sites = true;
      for (const auto& c : columns)
        if (c != "_atom_site_type_symbol" && c.rfind("_atom_site_fract_", 0) != 0)
          warn(ln.number, "ignoring column " + c);
      for (const auto& [number, row] : rows) {
        if (row.size() != columns.size())
          throw ParseError(number, "malformed loop row: expected " + std::to_string(columns.size()) +
                                       " values, found " + std::to_string(row.size()));
        const std::string sym = element_of(row[csym]);
        if (!is_element_symbol(sym))
          throw ParseError(number, "unknown element symbol '" + row[csym] + "'");
        Vec3 f{};
        const int idx[3] = {cx, cy, cz};
        for (int k = 0; k < 3; ++k) {
          auto v = parse_number(row[idx[k]]);
          if (!v) throw ParseError(number, "invalid fractional coordinate '" + row[idx[k]] + "'");
          f[k] = wrap_unit(*v);
        }
        s.species.push_back(sym);
        s.frac_coords.push_back(f);
      }
      continue;
    }
    if (toks[0].front() == '_') {
      const std::string tag = lower(toks[0]);
      const bool is_cell = std::find(kCellTags.begin(), kCellTags.end(), tag) != kCellTags.end();
      if (is_cell) {
        if (toks.size() != 2) throw ParseError(ln.number, "tag " + tag + " expects one value");
        auto v = parse_number(toks[1]);
        if (!v) throw ParseError(ln.number, "invalid numeric value for " + tag);
        if (!(*v > 0.0)) throw ParseError(ln.number, tag + " must be positive");
        cell[tag] = *v;
      } else {
        warn(ln.number, "ignoring tag " + toks[0]);
        // Multi-line values delimited by ';' are skipped whole.
        if (toks.size() == 1 && i + 1 < lines.size() && lines[i + 1].text.front() == ';') {
          ++i;
          while (++i < lines.size() && lines[i].text.front() != ';') {
          }
        }
      }
      ++i;
      continue;
    }
    throw ParseError(ln.number, "unexpected content '" + toks[0] + "'");
  }

  for (auto tag : kCellTags)
    if (!cell.count(std::string(tag))) throw ParseError(0, "missing " + std::string(tag));
  if (!have_sites || s.species.empty()) throw ParseError(0, "no atoms in structure");

  s.lattice = lattice_from_parameters(cell["_cell_length_a"], cell["_cell_length_b"],
                                      cell["_cell_length_c"], cell["_cell_angle_alpha"],
                                      cell["_cell_angle_beta"], cell["_cell_angle_gamma"]);
  return s;
}

std::string write_cif(const Structure& s, std::string_view data_name) {
  const auto& l = s.lattice;
  const double a = norm(l[0]), b = norm(l[1]), c = norm(l[2]);
  const double rad = 180.0 / std::numbers::pi;
  const double alpha = std::acos(dot(l[1], l[2]) / (b * c)) * rad;
  const double beta = std::acos(dot(l[0], l[2]) / (a * c)) * rad;
  const double gamma = std::acos(dot(l[0], l[1]) / (a * b)) * rad;

  std::ostringstream out;
  out << "data_" << data_name << "\n";
  out << "_cell_length_a " << format_double(a) << "\n";
  out << "_cell_length_b " << format_double(b) << "\n";
  out << "_cell_length_c " << format_double(c) << "\n";
  out << "_cell_angle_alpha " << format_double(alpha) << "\n";
  out << "_cell_angle_beta " << format_double(beta) << "\n";
  out << "_cell_angle_gamma " << format_double(gamma) << "\n";
  out << "loop_\n_atom_site_type_symbol\n_atom_site_fract_x\n_atom_site_fract_y\n_atom_site_fract_z\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& f = s.frac_coords[i];
    out << s.species[i] << " " << format_double(f[0]) << " " << format_double(f[1]) << " "
        << format_double(f[2]) << "\n";
  }
  return out.str();
}

}  // namespace matloop::structure
