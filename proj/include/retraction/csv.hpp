#pragma once

// Minimal RFC 4180 reader/writer plus the number formatting shared by every
// file the library emits.

#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retraction {

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record into `fields`. Returns false at end of input.
  // Quoted fields may contain separators, doubled quotes and newlines.
  bool next(std::vector<std::string>& fields);

  // 1-based physical line on which the last record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

void write_csv_row(std::ostream& out, std::span<const std::string> fields);
void write_csv_row(std::ostream& out, std::initializer_list<std::string_view> fields);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);

// Throw FileNotFound / Io with the offending path in the message.
std::ifstream open_input(const std::string& path);
std::ofstream open_output(const std::string& path);

// Maps header names to column positions; throws SchemaViolation when a
// required column is absent.
class CsvHeader {
 public:
  CsvHeader(std::span<const std::string> names, std::span<const std::string_view> required,
            const std::string& source);

  std::size_t index(std::string_view name) const;
  bool has(std::string_view name) const;

 private:
  std::vector<std::string> names_;
};

}  // namespace retraction
