#include "retraction/records.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include "json.hpp"
#include <set>
#include <span>
#include <sstream>
#include <tuple>

#include "retraction/csv.hpp"
#include "retraction/error.hpp"

namespace retraction {

namespace {

constexpr std::string_view kCorpusColumns[] = {
    "paper_id",         "doi",          "title",        "pub_year",
    "venue",            "discipline",   "retraction_year", "retraction_month",
    "retraction_reason", "n_authors",   "journal_rank", "subject_area",
    "citations_by_year"};

constexpr std::string_view kMentionColumns[] = {"paper_id", "year", "month", "source_type",
                                                "weight"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::string> optional_text(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  return std::string(s);
}

// Field access shared by the CSV and JSON-lines readers. Every accessor
// returns the raw text ("" = missing) so both formats go through one parser.
struct RawRow {
  std::vector<std::pair<std::string_view, std::string>> values;

  std::string_view get(std::string_view name) const {
    for (const auto& [k, v] : values)
      if (k == name) return v;
    return {};
  }
};

class RowParser {
 public:
  explicit RowParser(std::size_t row) : row_(row) {}

  std::optional<SchemaViolation> error;

  void fail(std::string_view field, std::string reason) {
    if (!error) error = SchemaViolation{row_, std::string(field), std::move(reason)};
  }

  std::string required_text(const RawRow& raw, std::string_view field) {
    auto v = trim(raw.get(field));
    if (v.empty()) fail(field, "required field is empty");
    return std::string(v);
  }

  std::optional<long long> optional_int(const RawRow& raw, std::string_view field) {
    auto text = trim(raw.get(field));
    if (text.empty()) return std::nullopt;
    auto v = parse_int(text);
    if (!v) fail(field, "not an integer: '" + std::string(text) + "'");
    return v;
  }

  std::optional<double> optional_real(const RawRow& raw, std::string_view field) {
    auto text = trim(raw.get(field));
    if (text.empty()) return std::nullopt;
    auto v = parse_double(text);
    if (!v || !std::isfinite(*v)) {
      fail(field, "not a finite number: '" + std::string(text) + "'");
      return std::nullopt;
    }
    return v;
  }

 private:
  std::size_t row_;
};

std::optional<PaperRecord> parse_paper(const RawRow& raw, std::size_t row,
                                       std::vector<SchemaViolation>& violations) {
  RowParser p(row);
  PaperRecord rec;
  rec.paper_id = p.required_text(raw, "paper_id");
  rec.doi = normalize_doi(raw.get("doi"));
  rec.title = std::string(trim(raw.get("title")));
  if (auto y = p.optional_int(raw, "pub_year"))
    rec.pub_year = static_cast<int>(*y);
  else
    p.fail("pub_year", "required field is empty");
  rec.venue = p.required_text(raw, "venue");
  rec.discipline = p.required_text(raw, "discipline");

  auto ry = p.optional_int(raw, "retraction_year");
  auto rm = p.optional_int(raw, "retraction_month");
  if (ry && rm) {
    rec.retraction_date = YearMonth{static_cast<int>(*ry), static_cast<int>(*rm)};
  } else if (ry || rm) {
    p.fail(ry ? "retraction_month" : "retraction_year",
           "retraction_year and retraction_month must both be present or both empty");
  }
  rec.retraction_reason = optional_text(raw.get("retraction_reason"));
  if (auto n = p.optional_int(raw, "n_authors")) rec.n_authors = static_cast<int>(*n);
  rec.journal_rank = p.optional_real(raw, "journal_rank");
  rec.subject_area = optional_text(raw.get("subject_area"));

  std::string reason;
  if (auto series = parse_citation_series(raw.get("citations_by_year"), reason))
    rec.citations_by_year = std::move(*series);
  else
    p.fail("citations_by_year", reason);

  if (!p.error) {
    if (auto v = check_record(rec)) {
      v->row = row;
      p.error = v;
    }
  }
  if (p.error) {
    violations.push_back(*p.error);
    return std::nullopt;
  }
  return rec;
}

std::optional<MentionEvent> parse_mention(const RawRow& raw, std::size_t row,
                                          std::vector<SchemaViolation>& violations) {
  RowParser p(row);
  MentionEvent ev;
  ev.paper_id = p.required_text(raw, "paper_id");
  auto y = p.optional_int(raw, "year");
  auto m = p.optional_int(raw, "month");
  if (!y) p.fail("year", "required field is empty");
  if (!m) p.fail("month", "required field is empty");
  if (y && m) {
    if (*m < 1 || *m > 12) p.fail("month", "month must be in 1..12");
    ev.timestamp = YearMonth{static_cast<int>(*y), static_cast<int>(*m)};
  }
  auto src_text = trim(raw.get("source_type"));
  if (auto src = parse_source_type(src_text))
    ev.source_type = *src;
  else
    p.fail("source_type", "unknown source type '" + std::string(src_text) + "'");
  auto w = p.optional_real(raw, "weight");
  if (!w)
    p.fail("weight", "required field is empty");
  else if (*w < 0)
    p.fail("weight", "weight must be non-negative");
  else
    ev.weight = *w;

  if (p.error) {
    violations.push_back(*p.error);
    return std::nullopt;
  }
  return ev;
}

template <class Record, class Parse>
LoadResult<Record> load_csv(const std::string& path, std::span<const std::string_view> columns,
                            std::span<const std::string_view> required, Parse parse) {
  auto in = open_input(path);
  CsvReader reader(in);
  LoadResult<Record> result;
  std::vector<std::string> fields;
  if (!reader.next(fields))
    throw Error(ErrorCode::SchemaViolation, path + ": missing header row");
  CsvHeader header(fields, required, path);

  std::vector<std::size_t> positions;
  for (auto c : columns) positions.push_back(header.index(c));

  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    RawRow raw;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto pos = positions[i];
      raw.values.emplace_back(columns[i], pos < fields.size() ? fields[pos] : std::string{});
    }
    if (auto rec = parse(raw, row, result.violations)) result.records.push_back(std::move(*rec));
  }
  return result;
}

std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

std::string json_series_text(const nlohmann::json& v) {
  if (!v.is_object()) return json_scalar_text(v);
  std::string out;
  for (const auto& [year, count] : v.items()) {
    if (!out.empty()) out += ';';
    out += year + ":" + json_scalar_text(count);
  }
  return out;
}

template <class Record, class Parse>
LoadResult<Record> load_jsonl(const std::string& path, std::span<const std::string_view> columns,
                              Parse parse) {
  auto in = open_input(path);
  LoadResult<Record> result;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      result.violations.push_back({row, "", std::string("invalid JSON: ") + e.what()});
      continue;
    }
    if (!obj.is_object()) {
      result.violations.push_back({row, "", "expected a JSON object"});
      continue;
    }
    RawRow raw;
    for (auto c : columns) {
      auto it = obj.find(std::string(c));
      std::string text;
      if (it != obj.end())
        text = c == "citations_by_year" ? json_series_text(*it) : json_scalar_text(*it);
      raw.values.emplace_back(c, std::move(text));
    }
    if (auto rec = parse(raw, row, result.violations)) result.records.push_back(std::move(*rec));
  }
  return result;
}

std::string opt_int_text(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

}  // namespace

const char* source_type_name(SourceType type) {
  switch (type) {
    case SourceType::News: return "news";
    case SourceType::Blog: return "blog";
    case SourceType::Social: return "social";
    case SourceType::Repository: return "repository";
    case SourceType::Other: return "other";
  }
  return "other";
}

std::optional<SourceType> parse_source_type(std::string_view text) {
  const auto key = lower(trim(text));
  for (auto t : {SourceType::News, SourceType::Blog, SourceType::Social, SourceType::Repository,
                 SourceType::Other})
    if (key == source_type_name(t)) return t;
  return std::nullopt;
}

FileFormat format_from_path(const std::string& path) {
  const auto ext = lower(std::filesystem::path(path).extension().string());
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return FileFormat::JsonLines;
  return FileFormat::Csv;
}

std::string SchemaViolation::describe(const std::string& source) const {
  std::ostringstream os;
  os << source << ": row " << row;
  if (!field.empty()) os << ", field '" << field << "'";
  os << ": " << reason;
  return os.str();
}

std::optional<std::string> normalize_doi(std::string_view raw) {
  std::string doi = lower(trim(raw));
  for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
                                  "http://dx.doi.org/", "doi.org/", "dx.doi.org/", "doi:"}) {
    if (std::string_view(doi).starts_with(prefix)) {
      doi.erase(0, prefix.size());
      break;
    }
  }
  doi = std::string(trim(doi));
  if (doi.empty()) return std::nullopt;
  return doi;
}

std::optional<std::map<int, long long>> parse_citation_series(std::string_view text,
                                                              std::string& reason) {
  std::map<int, long long> series;
  text = trim(text);
  while (!text.empty()) {
    const auto semi = text.find(';');
    const auto item = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      reason = "expected year:count, got '" + std::string(item) + "'";
      return std::nullopt;
    }
    auto year = parse_int(item.substr(0, colon));
    auto count = parse_int(item.substr(colon + 1));
    if (!year || !count) {
      reason = "expected year:count, got '" + std::string(item) + "'";
      return std::nullopt;
    }
    if (*count < 0) {
      reason = "negative citation count for year " + std::to_string(*year);
      return std::nullopt;
    }
    if (!series.emplace(static_cast<int>(*year), *count).second) {
      reason = "duplicate year " + std::to_string(*year);
      return std::nullopt;
    }
  }
  return series;
}

std::string format_citation_series(const std::map<int, long long>& series) {
  std::string out;
  for (const auto& [year, count] : series) {
    if (!out.empty()) out += ';';
    out += std::to_string(year) + ":" + std::to_string(count);
  }
  return out;
}

std::optional<SchemaViolation> check_record(const PaperRecord& r) {
  auto violation = [](std::string field, std::string reason) {
    return SchemaViolation{0, std::move(field), std::move(reason)};
  };
  if (r.paper_id.empty()) return violation("paper_id", "required field is empty");
  if (r.retraction_date) {
    const auto& d = *r.retraction_date;
    if (d.month < 1 || d.month > 12) return violation("retraction_month", "month must be in 1..12");
    if (d.year < r.pub_year)
      return violation("retraction_year", "retraction year " + std::to_string(d.year) +
                                              " precedes publication year " +
                                              std::to_string(r.pub_year));
  }
  if (r.n_authors && *r.n_authors < 1) return violation("n_authors", "must be a positive integer");
  for (const auto& [year, count] : r.citations_by_year) {
    if (year < r.pub_year)
      return violation("citations_by_year", "citations recorded in " + std::to_string(year) +
                                                " before publication year " +
                                                std::to_string(r.pub_year));
    if (count < 0) return violation("citations_by_year", "negative citation count");
  }
  return std::nullopt;
}

LoadResult<PaperRecord> load_corpus(const std::string& path, FileFormat format) {
  static constexpr std::string_view required[] = {"paper_id", "pub_year", "venue", "discipline"};
  if (format == FileFormat::JsonLines)
    return load_jsonl<PaperRecord>(path, kCorpusColumns, parse_paper);
  return load_csv<PaperRecord>(path, kCorpusColumns, required, parse_paper);
}

LoadResult<PaperRecord> load_corpus(const std::string& path) {
  return load_corpus(path, format_from_path(path));
}

LoadResult<MentionEvent> load_mentions(const std::string& path, FileFormat format) {
  if (format == FileFormat::JsonLines)
    return load_jsonl<MentionEvent>(path, kMentionColumns, parse_mention);
  return load_csv<MentionEvent>(path, kMentionColumns, kMentionColumns, parse_mention);
}

LoadResult<MentionEvent> load_mentions(const std::string& path) {
  return load_mentions(path, format_from_path(path));
}

void write_corpus_csv(const std::vector<PaperRecord>& records, const std::string& path) {
  auto out = open_output(path);
  std::vector<std::string> row(std::begin(kCorpusColumns), std::end(kCorpusColumns));
  write_csv_row(out, row);
  for (const auto& r : records) {
    row = {r.paper_id,
           r.doi.value_or(""),
           r.title,
           std::to_string(r.pub_year),
           r.venue,
           r.discipline,
           r.retraction_date ? std::to_string(r.retraction_date->year) : "",
           r.retraction_date ? std::to_string(r.retraction_date->month) : "",
           r.retraction_reason.value_or(""),
           opt_int_text(r.n_authors),
           r.journal_rank ? format_double(*r.journal_rank) : "",
           r.subject_area.value_or(""),
           format_citation_series(r.citations_by_year)};
    write_csv_row(out, row);
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

void write_mentions_csv(const std::vector<MentionEvent>& mentions, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"paper_id", "year", "month", "source_type", "weight"});
  for (const auto& m : mentions) {
    write_csv_row(out, {m.paper_id, std::to_string(m.timestamp.year),
                        std::to_string(m.timestamp.month), source_type_name(m.source_type),
                        format_double(m.weight)});
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

std::string casefold_key(std::string_view text) { return lower(trim(text)); }

Partition filter_bulk_retractions(const std::vector<PaperRecord>& records,
                                  std::size_t cluster_threshold) {
  using Key = std::tuple<std::string, int, int>;
  auto key_of = [](const PaperRecord& r) {
    return Key{casefold_key(r.venue), r.retraction_date->year, r.retraction_date->month};
  };
  std::map<Key, std::size_t> sizes;
  for (const auto& r : records)
    if (r.is_retracted()) ++sizes[key_of(r)];

  Partition part;
  for (const auto& r : records) {
    if (r.is_retracted() && sizes[key_of(r)] > cluster_threshold)
      part.removed.push_back(r);
    else
      part.kept.push_back(r);
  }
  return part;
}

std::vector<PaperRecord> filter_retraction_window(const std::vector<PaperRecord>& records,
                                                  int first_year, int last_year) {
  if (first_year > last_year)
    throw Error(ErrorCode::InvalidArgument, "retraction window requires first_year <= last_year");
  std::vector<PaperRecord> kept;
  for (const auto& r : records) {
    if (r.retraction_date && r.retraction_date->year >= first_year &&
        r.retraction_date->year <= last_year)
      kept.push_back(r);
  }
  return kept;
}

}  // namespace retraction
