#pragma once

// Attention around the retraction date: windowed scores and mention counts,
// a monthly log-score series, per-tier means and the regression dataset.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "retraction/matching.hpp"
#include "retraction/records.hpp"
#include "retraction/stats.hpp"

namespace retraction::attention {

// Inclusive month offsets relative to the retraction month (offset 0).
struct WindowSpec {
  int first_offset = -6;
  int last_offset = 5;
  bool include_retraction_month = true;

  // 12 months, offsets -6..+5, retraction month included.
  static WindowSpec centered(int months = 12);
  // offsets -6..+6 without 0, the monthly-series display convention.
  static WindowSpec symmetric_excluding_retraction(int half_width = 6);

  bool contains(int offset) const;
  int month_count() const;
};

struct AttentionControls {
  int pub_year = 0;
  int years_to_retraction = 0;
  std::optional<double> journal_rank;
  std::optional<std::string> reason;
  std::optional<int> n_authors;
  std::optional<std::string> subject_area;
};

struct AttentionRow {
  std::string paper_id;
  double window_score = 0;
  long long window_mentions = 0;
  long long pre_citations = 0;
  AttentionControls controls;
};

// Month offset of `when` relative to the paper's retraction month.
int month_offset(const YearMonth& retraction, const YearMonth& when);

// Only events whose paper_id equals paper.paper_id are considered. Throws
// MissingRetractionDate for papers without a retraction date.
AttentionRow window_attention(const PaperRecord& paper, std::span<const MentionEvent> mentions,
                              const WindowSpec& window = WindowSpec::centered());

// Raw (unlogged) weight sums per offset in [first, last], index 0 = first.
std::vector<double> monthly_scores(const PaperRecord& paper, std::span<const MentionEvent> mentions,
                                   int first_offset, int last_offset);

struct MonthlyPoint {
  int offset = 0;
  double log_score = 0;  // log(1 + sum of weights)
};

// Offsets -half_width..+half_width, month 0 omitted.
std::vector<MonthlyPoint> monthly_series(const PaperRecord& paper,
                                         std::span<const MentionEvent> mentions,
                                         int half_width = 6);

struct TierAttention {
  std::size_t tier = 0;
  std::string label;
  std::size_t n = 0;
  std::optional<double> mean_score;
  std::optional<double> mean_mentions;
};

std::vector<TierAttention> tier_attention_summary(std::span<const AttentionRow> rows,
                                                  const matching::TierSpec& tiers);

struct RegressionDataset {
  std::vector<double> y_score;
  std::vector<double> y_mentions;
  Eigen::MatrixXd design;
  std::vector<std::string> column_names;
  std::vector<std::string> paper_ids;
  std::size_t dropped_count = 0;
};

// Complete-case filter, then columns: intercept, pre_citations, pub_year,
// years_to_retraction, journal_rank, n_authors, reason dummies, subject
// dummies. Each categorical drops its most frequent level (ties: smallest
// label). Throws EmptyAfterFiltering when no row survives.
RegressionDataset build_regression_dataset(std::span<const AttentionRow> rows);

struct AttentionReport {
  std::vector<AttentionRow> rows;
  std::vector<std::pair<std::string, std::vector<MonthlyPoint>>> series;
  std::vector<TierAttention> tiers;
  RegressionDataset dataset;
  std::optional<stats::RegressionFit> score_fit;
  std::optional<stats::RegressionFit> mentions_fit;
  std::optional<std::string> regression_error;
};

struct AttentionConfig {
  WindowSpec window = WindowSpec::centered();
  int series_half_width = 6;
  matching::TierSpec tiers = matching::TierSpec::published();
};

// Runs every retracted paper through the window, series and regression steps.
AttentionReport analyze(std::span<const PaperRecord> retracted,
                        std::span<const MentionEvent> mentions, const AttentionConfig& config = {});

void write_rows_csv(std::span<const AttentionRow> rows, const std::string& path);
void write_series_csv(const AttentionReport& report, const std::string& path);
void write_tier_csv(std::span<const TierAttention> tiers, const std::string& path);
std::string regression_report_json(const AttentionReport& report);

}  // namespace retraction::attention
