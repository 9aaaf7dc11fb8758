#include "irtols/patterns.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string_view>

namespace irtols {

IngestionError::IngestionError(const std::string& what, std::size_t row, std::size_t column)
    : std::runtime_error(what), row_(row), column_(column) {}

namespace {

std::string location(std::size_t row, std::size_t column) {
  return "row " + std::to_string(row) + ", column " + std::to_string(column);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

PatternData tabulate(const ResponseMatrix& matrix) {
  if (matrix.empty()) throw IngestionError("response matrix is empty", 0, 0);
  const std::size_t n_items = matrix.front().size();
  if (n_items == 0) throw IngestionError("response matrix has no items", 1, 0);

  std::map<ResponseRow, long> counts;
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    const auto& row = matrix[r];
    if (row.size() != n_items) {
      throw IngestionError("ragged row: expected " + std::to_string(n_items) + " values, got " +
                               std::to_string(row.size()) + " at " +
                               location(r + 1, row.size()),
                           r + 1, row.size());
    }
    for (std::size_t c = 0; c < n_items; ++c) {
      if (row[c] > 1) {
        throw IngestionError("response value " + std::to_string(row[c]) + " is not 0/1 at " +
                                 location(r + 1, c + 1),
                             r + 1, c + 1);
      }
    }
    ++counts[row];
  }

  PatternData data;
  data.n_items = static_cast<int>(n_items);
  data.n_persons = static_cast<long>(matrix.size());
  data.patterns.reserve(counts.size());
  data.freqs.reserve(counts.size());
  for (auto& [pattern, freq] : counts) {
    data.patterns.push_back(pattern);
    data.freqs.push_back(freq);
  }
  return data;
}

std::vector<long> item_totals(const PatternData& data) {
  std::vector<long> totals(data.n_items, 0);
  for (int x = 0; x < data.n_patterns(); ++x)
    for (int j = 0; j < data.n_items; ++j)
      if (data.patterns[x][j]) totals[j] += data.freqs[x];
  return totals;
}

std::vector<int> extreme_items(const PatternData& data) {
  std::vector<int> out;
  const auto totals = item_totals(data);
  for (int j = 0; j < data.n_items; ++j)
    if (totals[j] == 0 || totals[j] == data.n_persons) out.push_back(j);
  return out;
}

ResponseMatrix expand(const PatternData& data) {
  ResponseMatrix rows;
  rows.reserve(data.n_persons);
  for (int x = 0; x < data.n_patterns(); ++x)
    for (long k = 0; k < data.freqs[x]; ++k) rows.push_back(data.patterns[x]);
  return rows;
}

ResponseMatrix read_response_csv(std::istream& in) {
  ResponseMatrix rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") {
      view.remove_prefix(3);
    }
    if (view.empty()) continue;
    const auto tokens = split(view);

    if (line_no == 1) {
      bool header = false;
      for (auto tok : tokens)
        if (tok != "0" && tok != "1") header = true;
      if (header) {
        width = tokens.size();
        continue;
      }
    }
    if (width == 0) width = tokens.size();
    if (tokens.size() != width) {
      throw IngestionError("ragged row: expected " + std::to_string(width) + " values, got " +
                               std::to_string(tokens.size()) + " at line " +
                               std::to_string(line_no),
                           line_no, tokens.size());
    }
    ResponseRow row(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (tokens[c] == "0") {
        row[c] = 0;
      } else if (tokens[c] == "1") {
        row[c] = 1;
      } else {
        throw IngestionError("invalid response '" + std::string(tokens[c]) + "' at line " +
                                 std::to_string(line_no) + ", column " + std::to_string(c + 1),
                             line_no, c + 1);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IngestionError("no response rows found", 0, 0);
  return rows;
}

ResponseMatrix read_response_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open '" + path + "'", 0, 0);
  return read_response_csv(in);
}

}  // namespace irtols
