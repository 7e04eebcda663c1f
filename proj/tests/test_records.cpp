#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <string>

#include "doctest.h"
#include "retraction/error.hpp"
#include "retraction/records.hpp"

using namespace retraction;

namespace {

const std::string kData = RTX_TEST_DATA;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Internal;
}

PaperRecord retracted(std::string id, std::string venue, int year, int month) {
  PaperRecord r;
  r.paper_id = std::move(id);
  r.title = "t";
  r.pub_year = year - 1;
  r.venue = std::move(venue);
  r.discipline = "d";
  r.retraction_date = YearMonth{year, month};
  return r;
}

PaperRecord plain(std::string id) {
  PaperRecord r;
  r.paper_id = std::move(id);
  r.pub_year = 2000;
  r.venue = "v";
  r.discipline = "d";
  return r;
}

void check_fixture(const std::vector<PaperRecord>& recs) {
  REQUIRE(recs.size() == 3);
  const auto& p1 = recs[0];
  CHECK(p1.paper_id == "P1");
  CHECK(p1.doi == std::optional<std::string>("10.1000/abc.1"));
  CHECK(p1.title == "Gene expression, revisited");
  CHECK(p1.pub_year == 2005);
  CHECK(p1.venue == "Cell Reports");
  CHECK(p1.discipline == "Biology");
  REQUIRE(p1.retraction_date.has_value());
  CHECK(p1.retraction_date->year == 2009);
  CHECK(p1.retraction_date->month == 3);
  CHECK(p1.retraction_reason == std::optional<std::string>("misconduct"));
  CHECK(p1.n_authors == std::optional<int>(4));
  CHECK(p1.journal_rank == std::optional<double>(1.25));
  CHECK(p1.subject_area == std::optional<std::string>("Genetics"));
  CHECK(p1.citations_by_year == std::map<int, long long>{{2005, 2}, {2006, 7}, {2010, 1}});

  const auto& p2 = recs[1];
  CHECK_FALSE(p2.doi.has_value());
  CHECK_FALSE(p2.is_retracted());
  CHECK_FALSE(p2.n_authors.has_value());
  CHECK_FALSE(p2.journal_rank.has_value());
  CHECK(p2.citations_by_year == std::map<int, long long>{{2008, 0}, {2009, 12}});

  const auto& p3 = recs[2];
  CHECK(p3.title == "A \"quoted\" title");
  CHECK(p3.doi == std::optional<std::string>("10.2000/xyz"));
  CHECK(p3.retraction_date == std::optional<YearMonth>(YearMonth{1999, 12}));
  CHECK(p3.citations_by_year.empty());
}

}  // namespace

TEST_CASE("three-row CSV fixture") {
  const auto r = load_corpus(kData + "/corpus3.csv");
  CHECK(r.violations.empty());
  check_fixture(r.records);
}

TEST_CASE("JSON-lines fixture mirrors the CSV") {
  const auto j = load_corpus(kData + "/corpus3.jsonl");
  CHECK(j.violations.empty());
  check_fixture(j.records);
  CHECK(j.records == load_corpus(kData + "/corpus3.csv").records);
}

TEST_CASE("header-only file loads as empty") {
  const auto r = load_corpus(kData + "/empty_corpus.csv");
  CHECK(r.records.empty());
  CHECK(r.violations.empty());
}

TEST_CASE("malformed rows are reported, not dropped silently") {
  const auto r = load_corpus(kData + "/bad_rows.csv");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].paper_id == "B2");
  REQUIRE(r.violations.size() == 5);
  CHECK(r.violations[0].row == 1);
  CHECK(r.violations[0].field == "retraction_year");
  CHECK(r.violations[1].row == 3);
  CHECK(r.violations[1].field == "citations_by_year");
  CHECK(r.violations[2].row == 4);
  CHECK(r.violations[2].field == "retraction_month");
  CHECK(r.violations[3].row == 5);
  CHECK(r.violations[3].field == "citations_by_year");
  CHECK(r.violations[4].row == 6);
  CHECK(r.violations[4].field == "venue");
  CHECK(r.violations[0].describe("bad_rows.csv").find("row 1") != std::string::npos);
}

TEST_CASE("loader error conditions") {
  CHECK(code_of([] { load_corpus(kData + "/does_not_exist.csv"); }) == ErrorCode::FileNotFound);
  CHECK(code_of([] { load_corpus(kData + "/missing_columns.csv"); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([] { load_mentions(kData + "/nope.jsonl"); }) == ErrorCode::FileNotFound);
}

TEST_CASE("mention loading") {
  const auto m = load_mentions(kData + "/mentions.csv");
  REQUIRE(m.records.size() == 2);
  CHECK(m.records[0].source_type == SourceType::News);
  CHECK(m.records[0].weight == 8.0);
  CHECK(m.records[1].source_type == SourceType::Blog);
  CHECK(m.records[1].timestamp == YearMonth{2009, 4});
  REQUIRE(m.violations.size() == 3);
  CHECK(m.violations[0].field == "source_type");
  CHECK(m.violations[1].field == "month");
  CHECK(m.violations[2].field == "weight");
}

TEST_CASE("DOI normalization") {
  CHECK(normalize_doi("https://doi.org/10.1/ABC") == std::optional<std::string>("10.1/abc"));
  CHECK(normalize_doi("  DOI:10.5/X ") == std::optional<std::string>("10.5/x"));
  CHECK(normalize_doi("http://dx.doi.org/10.9/q") == std::optional<std::string>("10.9/q"));
  CHECK(normalize_doi("10.7/plain") == std::optional<std::string>("10.7/plain"));
  CHECK_FALSE(normalize_doi("").has_value());
  CHECK_FALSE(normalize_doi("   ").has_value());
}

TEST_CASE("citation series parsing") {
  std::string reason;
  CHECK(parse_citation_series("2001:3; 2003:0", reason) == std::map<int, long long>{{2001, 3}, {2003, 0}});
  CHECK(parse_citation_series("", reason)->empty());
  CHECK_FALSE(parse_citation_series("2001", reason).has_value());
  CHECK_FALSE(parse_citation_series("2001:-1", reason).has_value());
  CHECK_FALSE(parse_citation_series("2001:1;2001:2", reason).has_value());
  CHECK(reason.find("duplicate") != std::string::npos);
  CHECK(format_citation_series({{2001, 3}, {2003, 0}}) == "2001:3;2003:0");
}

TEST_CASE("bulk filter removes only oversized clusters") {
  std::vector<PaperRecord> recs;
  for (int i = 0; i < 51; ++i) recs.push_back(retracted("A" + std::to_string(i), "Conf A", 2010, 6));
  for (int i = 0; i < 49; ++i) recs.push_back(retracted("B" + std::to_string(i), "Conf B", 2010, 6));
  recs.push_back(plain("N1"));
  const auto part = filter_bulk_retractions(recs, 50);
  CHECK(part.removed.size() == 51);
  CHECK(part.kept.size() == 50);
  for (const auto& r : part.removed) CHECK(r.venue == "Conf A");
}

TEST_CASE("bulk filter on a mass conference retraction") {
  std::vector<PaperRecord> recs;
  for (int i = 0; i < 1200; ++i) recs.push_back(retracted("X" + std::to_string(i), "Big Conf", 2014, 2));
  for (int i = 0; i < 10; ++i) recs.push_back(retracted("Y" + std::to_string(i), "Big Conf", 2014, 3));
  const auto part = filter_bulk_retractions(recs, 50);
  CHECK(part.removed.size() == 1200);
  CHECK(part.kept.size() == 10);

  std::vector<PaperRecord> small(recs.end() - 10, recs.end());
  CHECK(filter_bulk_retractions(small, 50).removed.empty());
}

TEST_CASE("bulk clusters key on case-folded venue") {
  std::vector<PaperRecord> recs;
  for (int i = 0; i < 3; ++i) recs.push_back(retracted("a" + std::to_string(i), "Venue", 2001, 1));
  recs.push_back(retracted("b", " venue ", 2001, 1));
  CHECK(filter_bulk_retractions(recs, 3).removed.size() == 4);
}

TEST_CASE("filters partition their input") {
  std::mt19937_64 rng(3);
  std::vector<PaperRecord> recs;
  for (int i = 0; i < 600; ++i) {
    if (rng() % 4 == 0) {
      recs.push_back(plain("p" + std::to_string(i)));
    } else {
      recs.push_back(retracted("r" + std::to_string(i), "V" + std::to_string(rng() % 3),
                               2000 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2)));
    }
  }
  const auto copy = recs;
  for (std::size_t threshold : {0u, 10u, 40u, 1000u}) {
    const auto part = filter_bulk_retractions(recs, threshold);
    CHECK(part.kept.size() + part.removed.size() == recs.size());
    std::multiset<std::string> ids;
    for (const auto& r : part.kept) ids.insert(r.paper_id);
    for (const auto& r : part.removed) ids.insert(r.paper_id);
    std::multiset<std::string> want;
    for (const auto& r : recs) want.insert(r.paper_id);
    CHECK(ids == want);
  }
  CHECK(recs == copy);
}

TEST_CASE("retraction window bounds are inclusive") {
  std::vector<PaperRecord> recs{retracted("a", "v", 1989, 12), retracted("b", "v", 1990, 1),
                                retracted("c", "v", 2015, 12), retracted("d", "v", 2016, 1),
                                plain("e")};
  const auto kept = filter_retraction_window(recs, 1990, 2015);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].paper_id == "b");
  CHECK(kept[1].paper_id == "c");
  CHECK(code_of([&] { filter_retraction_window(recs, 2001, 2000); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("corpus and mentions round-trip through CSV") {
  auto recs = load_corpus(kData + "/corpus3.csv").records;
  recs[1].title = "comma, \"quote\"\nand newline";
  recs[1].journal_rank = 0.1;
  const std::string path = "roundtrip_corpus.csv";
  write_corpus_csv(recs, path);
  const auto back = load_corpus(path);
  CHECK(back.violations.empty());
  CHECK(back.records == recs);
  std::remove(path.c_str());

  const auto mentions = load_mentions(kData + "/mentions.csv").records;
  const std::string mpath = "roundtrip_mentions.csv";
  write_mentions_csv(mentions, mpath);
  CHECK(load_mentions(mpath).records == mentions);
  std::remove(mpath.c_str());
}

TEST_CASE("format detection and source types") {
  CHECK(format_from_path("a/b.JSONL") == FileFormat::JsonLines);
  CHECK(format_from_path("x.ndjson") == FileFormat::JsonLines);
  CHECK(format_from_path("x.csv") == FileFormat::Csv);
  CHECK(parse_source_type(" Repository ") == std::optional<SourceType>(SourceType::Repository));
  CHECK_FALSE(parse_source_type("tweet").has_value());
  CHECK(YearMonth{2001, 1}.month_index() - YearMonth{2000, 12}.month_index() == 1);
}
