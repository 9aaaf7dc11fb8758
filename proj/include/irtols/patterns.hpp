#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace irtols {

using ResponseRow = std::vector<std::uint8_t>;
using ResponseMatrix = std::vector<ResponseRow>;  // persons x items

// Raised for malformed response data. row/column are 1-based when known, 0
// otherwise.
class IngestionError : public std::runtime_error {
 public:
  IngestionError(const std::string& what, std::size_t row, std::size_t column);
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

// Distinct response patterns with their frequencies, in lexicographic order.
struct PatternData {
  int n_items = 0;
  long n_persons = 0;
  std::vector<ResponseRow> patterns;
  std::vector<long> freqs;

  int n_patterns() const { return static_cast<int>(patterns.size()); }
};

PatternData tabulate(const ResponseMatrix& matrix);

// Number of persons answering each item correctly.
std::vector<long> item_totals(const PatternData& data);

// Items answered correctly by nobody or by everybody.
std::vector<int> extreme_items(const PatternData& data);

// Expands patterns back into rows (pattern order, each repeated freq times).
ResponseMatrix expand(const PatternData& data);

// Comma-separated 0/1 values, one person per line. A first line holding any
// token other than 0/1 is treated as a header. Accepts LF and CRLF.
ResponseMatrix read_response_csv(std::istream& in);
ResponseMatrix read_response_csv_file(const std::string& path);

}  // namespace irtols
