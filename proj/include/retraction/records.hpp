#pragma once

// Bibliographic records and attention events: loading, validation, filtering
// and serialization.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace retraction {

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  // Months since year 0; differences give calendar-month offsets.
  long month_index() const { return static_cast<long>(year) * 12 + (month - 1); }

  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

struct PaperRecord {
  std::string paper_id;
  std::optional<std::string> doi;  // normalized
  std::string title;
  int pub_year = 0;
  std::string venue;
  std::string discipline;
  std::optional<YearMonth> retraction_date;
  std::optional<std::string> retraction_reason;
  std::optional<int> n_authors;
  std::optional<double> journal_rank;
  std::optional<std::string> subject_area;
  std::map<int, long long> citations_by_year;

  bool is_retracted() const { return retraction_date.has_value(); }

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

enum class SourceType { News, Blog, Social, Repository, Other };

const char* source_type_name(SourceType type);
std::optional<SourceType> parse_source_type(std::string_view text);

struct MentionEvent {
  std::string paper_id;
  YearMonth timestamp;
  SourceType source_type = SourceType::Other;
  double weight = 0.0;

  friend bool operator==(const MentionEvent&, const MentionEvent&) = default;
};

enum class FileFormat { Csv, JsonLines };

// Picks JsonLines for .jsonl/.ndjson/.json extensions, Csv otherwise.
FileFormat format_from_path(const std::string& path);

struct SchemaViolation {
  std::size_t row = 0;  // 1-based data row (header excluded)
  std::string field;
  std::string reason;

  std::string describe(const std::string& source) const;
};

template <class Record>
struct LoadResult {
  std::vector<Record> records;
  std::vector<SchemaViolation> violations;
};

// "https://doi.org/10.1/ABC" -> "10.1/abc"; empty input -> nullopt.
std::optional<std::string> normalize_doi(std::string_view raw);

// Parses "year:count;year:count". Returns nullopt and fills `reason` on error.
std::optional<std::map<int, long long>> parse_citation_series(std::string_view text,
                                                              std::string& reason);
std::string format_citation_series(const std::map<int, long long>& series);

// Checks PaperRecord invariants; returns the first violation, if any.
std::optional<SchemaViolation> check_record(const PaperRecord& record);

// Malformed rows are reported in `violations`, never silently dropped.
// Throws FileNotFound when `path` does not exist, SchemaViolation when the
// CSV header lacks a required column.
LoadResult<PaperRecord> load_corpus(const std::string& path, FileFormat format);
LoadResult<PaperRecord> load_corpus(const std::string& path);
LoadResult<MentionEvent> load_mentions(const std::string& path, FileFormat format);
LoadResult<MentionEvent> load_mentions(const std::string& path);

void write_corpus_csv(const std::vector<PaperRecord>& records, const std::string& path);
void write_mentions_csv(const std::vector<MentionEvent>& mentions, const std::string& path);

// Lowercased and trimmed; venue and discipline comparisons go through this.
std::string casefold_key(std::string_view text);

struct Partition {
  std::vector<PaperRecord> kept;
  std::vector<PaperRecord> removed;
};

// Removes every (venue, retraction year-month) cluster larger than
// `cluster_threshold`. Non-retracted records are always kept.
Partition filter_bulk_retractions(const std::vector<PaperRecord>& records,
                                  std::size_t cluster_threshold = 50);

// Keeps retracted records whose retraction year lies in [first_year, last_year].
std::vector<PaperRecord> filter_retraction_window(const std::vector<PaperRecord>& records,
                                                  int first_year = 1990, int last_year = 2015);

}  // namespace retraction
