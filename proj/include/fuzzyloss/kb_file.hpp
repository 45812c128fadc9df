#ifndef FUZZYLOSS_KB_FILE_HPP
#define FUZZYLOSS_KB_FILE_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyloss/compiler.hpp"
#include "fuzzyloss/formula.hpp"

namespace fuzzyloss {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Parses knowledge-base text: one `weight :: formula` per line, `#` starts a
/// comment, blank lines are skipped and the weight defaults to 1.0. Arities
/// must agree across all formulas of the file.
inline std::vector<WeightedFormula> parse_kb(std::string_view text) {
  std::vector<WeightedFormula> out;
  ArityTable arities;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (detail::trim(line).empty()) continue;

    double weight = 1.0;
    std::string_view body = line;
    int column_offset = 0;
    if (const auto sep = line.find("::"); sep != std::string_view::npos) {
      const std::string_view w = detail::trim(line.substr(0, sep));
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), weight);
      if (ec != std::errc() || ptr != w.data() + w.size() || !std::isfinite(weight) || weight < 0.0) {
        throw FormulaError(FormulaError::Kind::Syntax, line_no, 1,
                           "weight must be a finite non-negative number, got '" + std::string(w) + "'");
      }
      body = line.substr(sep + 2);
      column_offset = static_cast<int>(sep + 2);
    }
    try {
      out.push_back({parse_formula(body, arities, line_no), weight});
    } catch (const FormulaError& e) {
      if (column_offset == 0) throw;
      // Report columns relative to the full line.
      const std::string what = e.what();
      const auto colon = what.find(": ");
      throw FormulaError(e.kind(), e.line(), e.column() + column_offset,
                         colon == std::string::npos ? what : what.substr(colon + 2));
    }
  }
  return out;
}

inline std::vector<WeightedFormula> load_kb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open knowledge base '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kb(ss.str());
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_KB_FILE_HPP
