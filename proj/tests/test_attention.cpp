#include <cmath>
#include <random>

#include "doctest.h"
#include "retraction/attention.hpp"
#include "retraction/error.hpp"

using namespace retraction;
using namespace retraction::attention;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Internal;
}

PaperRecord retracted_paper(std::string id, YearMonth when) {
  PaperRecord p;
  p.paper_id = std::move(id);
  p.pub_year = when.year - 2;
  p.venue = "v";
  p.discipline = "d";
  p.retraction_date = when;
  p.citations_by_year = {{when.year - 2, 4}, {when.year, 1}, {when.year + 1, 50}};
  p.journal_rank = 2.5;
  p.retraction_reason = "error";
  p.n_authors = 3;
  p.subject_area = "bio";
  return p;
}

YearMonth shift(YearMonth ym, int months) {
  const long idx = ym.month_index() + months;
  return YearMonth{static_cast<int>(idx / 12), static_cast<int>(idx % 12) + 1};
}

MentionEvent mention(std::string id, YearMonth when, double weight, SourceType t = SourceType::News) {
  return MentionEvent{std::move(id), when, t, weight};
}

AttentionRow row(std::string id, long long pre, std::optional<double> rank, std::string reason,
                 std::string subject) {
  AttentionRow r;
  r.paper_id = std::move(id);
  r.pre_citations = pre;
  r.window_score = static_cast<double>(pre) * 0.5;
  r.window_mentions = pre;
  r.controls.pub_year = 2000;
  r.controls.years_to_retraction = 2;
  r.controls.journal_rank = rank;
  r.controls.reason = reason;
  r.controls.n_authors = 2;
  r.controls.subject_area = subject;
  return r;
}

}  // namespace

TEST_CASE("window definitions") {
  const auto c = WindowSpec::centered();
  CHECK(c.first_offset == -6);
  CHECK(c.last_offset == 5);
  CHECK(c.month_count() == 12);
  CHECK(c.contains(0));
  CHECK_FALSE(c.contains(6));
  CHECK_FALSE(c.contains(-7));
  const auto s = WindowSpec::symmetric_excluding_retraction();
  CHECK(s.month_count() == 12);
  CHECK_FALSE(s.contains(0));
  CHECK(s.contains(6));
  CHECK(month_offset({2010, 11}, {2011, 2}) == 3);
  CHECK(month_offset({2010, 1}, {2009, 12}) == -1);
}

TEST_CASE("window attention examples") {
  const auto p = retracted_paper("P", {2012, 4});
  CHECK(window_attention(p, {}).window_score == 0.0);
  CHECK(window_attention(p, {}).window_mentions == 0);

  const std::vector<MentionEvent> one{mention("P", {2012, 4}, 8)};
  const auto r = window_attention(p, one);
  CHECK(r.window_score == 8.0);
  CHECK(r.window_mentions == 1);

  const std::vector<MentionEvent> late{mention("P", shift({2012, 4}, 7), 3)};
  CHECK(window_attention(p, late).window_mentions == 0);

  const std::vector<MentionEvent> edges{mention("P", shift({2012, 4}, -6), 1), mention("P", shift({2012, 4}, 5), 2),
                                        mention("P", shift({2012, 4}, 6), 4), mention("P", shift({2012, 4}, -7), 8),
                                        mention("Q", {2012, 4}, 16)};
  const auto e = window_attention(p, edges);
  CHECK(e.window_score == 3.0);
  CHECK(e.window_mentions == 2);
  CHECK(e.pre_citations == 5);
  CHECK(e.controls.years_to_retraction == 2);
  CHECK(e.controls.journal_rank == std::optional<double>(2.5));

  PaperRecord unretracted = p;
  unretracted.retraction_date.reset();
  CHECK(code_of([&] { window_attention(unretracted, one); }) == ErrorCode::MissingRetractionDate);
  CHECK(code_of([&] { monthly_series(unretracted, one); }) == ErrorCode::MissingRetractionDate);
}

TEST_CASE("monthly series") {
  const auto p = retracted_paper("P", {2015, 12});
  const auto empty = monthly_series(p, {});
  REQUIRE(empty.size() == 12);
  for (const auto& pt : empty) {
    CHECK(pt.offset != 0);
    CHECK(pt.log_score == 0.0);
  }
  const std::vector<MentionEvent> m{mention("P", {2016, 1}, 1), mention("P", {2015, 12}, 50)};
  const auto s = monthly_series(p, m);
  REQUIRE(s.size() == 12);
  CHECK(s[0].offset == -6);
  CHECK(s[11].offset == 6);
  for (const auto& pt : s) {
    if (pt.offset == 1)
      CHECK(pt.log_score == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    else
      CHECK(pt.log_score == 0.0);
  }
}

TEST_CASE("window additivity, monotonicity and shift invariance") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> off(-10, 10);
  std::uniform_real_distribution<double> w(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const YearMonth when{2000 + trial % 15, 1 + trial % 12};
    const auto p = retracted_paper("P", when);
    std::vector<MentionEvent> ms;
    for (int i = 0; i < 30; ++i) ms.push_back(mention(i % 5 ? "P" : "Q", shift(when, off(rng)), w(rng)));

    const auto r = window_attention(p, ms);
    const auto months = monthly_scores(p, ms, -6, 5);
    double total = 0;
    for (int o = -6; o <= 5; ++o)
      if (o != 0) total += months[o + 6];
    total += months[6];
    CHECK(r.window_score == doctest::Approx(total).epsilon(1e-12));

    auto more = ms;
    more.push_back(mention("P", shift(when, 2), 0.5));
    CHECK(window_attention(p, more).window_score > r.window_score);

    const int k = off(rng) * 7;
    auto shifted_paper = p;
    shifted_paper.retraction_date = shift(when, k);
    shifted_paper.pub_year = 1900;
    auto shifted = ms;
    for (auto& m : shifted) m.timestamp = shift(m.timestamp, k);
    const auto rs = window_attention(shifted_paper, shifted);
    CHECK(rs.window_score == r.window_score);
    CHECK(rs.window_mentions == r.window_mentions);
    const auto a = monthly_series(p, ms);
    const auto b = monthly_series(shifted_paper, shifted);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].log_score == b[i].log_score);
  }
}

TEST_CASE("tier attention summary") {
  std::vector<AttentionRow> rows{row("a", 0, 1.0, "x", "s"), row("b", 12, 1.0, "x", "s"),
                                 row("c", 14, 1.0, "x", "s")};
  const auto t = tier_attention_summary(rows, matching::TierSpec::published());
  REQUIRE(t.size() == 4);
  CHECK(t[0].n == 1);
  CHECK(*t[0].mean_score == 0.0);
  CHECK(t[1].n == 0);
  CHECK_FALSE(t[1].mean_score.has_value());
  CHECK_FALSE(t[1].mean_mentions.has_value());
  CHECK(*t[2].mean_score == 6.5);
  CHECK(*t[2].mean_mentions == 13.0);
  CHECK(t[3].label == "[31,inf)");
}

TEST_CASE("regression dataset coding") {
  std::vector<AttentionRow> rows{
      row("a", 1, 1.0, "error", "bio"),      row("b", 2, 2.0, "error", "chem"),
      row("c", 3, std::nullopt, "fraud", "bio"), row("d", 4, 3.0, "fraud", "bio"),
      row("e", 5, 4.0, "plagiarism", "phys"), row("f", 6, 5.0, "error", "bio"),
  };
  rows[5].controls.n_authors.reset();
  const auto ds = build_regression_dataset(rows);
  CHECK(ds.dropped_count == 2);
  CHECK(ds.paper_ids == std::vector<std::string>{"a", "b", "d", "e"});
  // reasons: error x2 (reference), fraud, plagiarism; subjects: bio x2 (reference), chem, phys
  CHECK(ds.column_names == std::vector<std::string>{"intercept", "pre_citations", "pub_year",
                                                    "years_to_retraction", "journal_rank", "n_authors",
                                                    "reason=fraud", "reason=plagiarism",
                                                    "subject_area=chem", "subject_area=phys"});
  CHECK(ds.design.rows() == 4);
  CHECK(ds.design.cols() == 10);
  CHECK(ds.design(2, 6) == 1.0);
  CHECK(ds.design(2, 7) == 0.0);
  CHECK(ds.design(3, 9) == 1.0);
  CHECK(ds.design(0, 1) == 1.0);
  CHECK(ds.y_score == std::vector<double>{0.5, 1.0, 2.0, 2.5});
  CHECK(ds.y_mentions == std::vector<double>{1, 2, 4, 5});

  std::vector<AttentionRow> k_levels;
  for (int i = 0; i < 12; ++i) k_levels.push_back(row(std::to_string(i), i, 1.0, "r" + std::to_string(i % 4), "s"));
  const auto kd = build_regression_dataset(k_levels);
  CHECK(kd.design.cols() == 6 + 3);

  std::vector<AttentionRow> none{row("z", 1, std::nullopt, "x", "s")};
  CHECK(code_of([&] { build_regression_dataset(none); }) == ErrorCode::EmptyAfterFiltering);
}

TEST_CASE("analyze wires rows, series and regression together") {
  std::mt19937_64 rng(8);
  std::vector<PaperRecord> papers;
  std::vector<MentionEvent> mentions;
  for (int i = 0; i < 80; ++i) {
    auto p = retracted_paper("P" + std::to_string(i), {2005 + i % 5, 1 + i % 12});
    p.pub_year -= i % 4;
    p.citations_by_year = {{p.pub_year, static_cast<long long>(rng() % 40)}};
    p.journal_rank = static_cast<double>(rng() % 100) / 10.0;
    p.n_authors = 1 + static_cast<int>(rng() % 6);
    p.retraction_reason = i % 3 ? "error" : "fraud";
    for (int k = 0; k < static_cast<int>(rng() % 6); ++k)
      mentions.push_back(mention(p.paper_id, shift(*p.retraction_date, static_cast<int>(rng() % 9) - 4), 1.0));
    papers.push_back(p);
  }
  const auto report = analyze(papers, mentions);
  CHECK(report.rows.size() == 80);
  CHECK(report.series.size() == 80);
  CHECK(report.tiers.size() == 4);
  CHECK_FALSE(report.regression_error.has_value());
  REQUIRE(report.score_fit.has_value());
  CHECK(report.score_fit->coefficients.size() == report.dataset.column_names.size());
  const auto json = regression_report_json(report);
  CHECK(json.find("pre_citations") != std::string::npos);

  std::vector<PaperRecord> incomplete(papers.begin(), papers.begin() + 3);
  for (auto& p : incomplete) p.journal_rank.reset();
  const auto bad = analyze(incomplete, mentions);
  REQUIRE(bad.regression_error.has_value());
  CHECK(bad.regression_error->find("EmptyAfterFiltering") != std::string::npos);
}
