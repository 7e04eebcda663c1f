#include "retraction/attention.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "retraction/csv.hpp"
#include "retraction/error.hpp"

namespace retraction::attention {

WindowSpec WindowSpec::centered(int months) {
  if (months < 1) throw Error(ErrorCode::InvalidArgument, "window must span at least one month");
  return WindowSpec{-(months / 2), months - months / 2 - 1, true};
}

WindowSpec WindowSpec::symmetric_excluding_retraction(int half_width) {
  if (half_width < 1) throw Error(ErrorCode::InvalidArgument, "half width must be positive");
  return WindowSpec{-half_width, half_width, false};
}

bool WindowSpec::contains(int offset) const {
  if (offset == 0 && !include_retraction_month) return false;
  return offset >= first_offset && offset <= last_offset;
}

int WindowSpec::month_count() const {
  const int span = last_offset - first_offset + 1;
  const bool zero_inside = first_offset <= 0 && last_offset >= 0;
  return span - (zero_inside && !include_retraction_month ? 1 : 0);
}

int month_offset(const YearMonth& retraction, const YearMonth& when) {
  return static_cast<int>(when.month_index() - retraction.month_index());
}

namespace {

const YearMonth& retraction_of(const PaperRecord& paper) {
  if (!paper.retraction_date)
    throw Error(ErrorCode::MissingRetractionDate,
                paper.paper_id + " has no retraction date");
  return *paper.retraction_date;
}

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json fit_json(const stats::RegressionFit& fit, const std::vector<std::string>& names) {
  nlohmann::json coefs = nlohmann::json::array();
  for (std::size_t j = 0; j < fit.coefficients.size(); ++j) {
    coefs.push_back({{"name", names[j]},
                     {"estimate", number(fit.coefficients[j])},
                     {"std_error", number(fit.std_errors[j])},
                     {"t", number(fit.t_values[j])},
                     {"p", number(fit.p_values[j])}});
  }
  return {{"n_obs", fit.n_obs},
          {"df_resid", number(fit.df_resid)},
          {"r_squared", number(fit.r_squared)},
          {"coefficients", coefs}};
}

}  // namespace

AttentionRow window_attention(const PaperRecord& paper, std::span<const MentionEvent> mentions,
                              const WindowSpec& window) {
  const auto& retraction = retraction_of(paper);
  AttentionRow row;
  row.paper_id = paper.paper_id;
  for (const auto& m : mentions) {
    if (m.paper_id != paper.paper_id) continue;
    if (!window.contains(month_offset(retraction, m.timestamp))) continue;
    row.window_score += m.weight;
    ++row.window_mentions;
  }
  row.pre_citations = matching::pre_retraction_citations(paper, retraction.year);
  row.controls.pub_year = paper.pub_year;
  row.controls.years_to_retraction = retraction.year - paper.pub_year;
  row.controls.journal_rank = paper.journal_rank;
  row.controls.reason = paper.retraction_reason;
  row.controls.n_authors = paper.n_authors;
  row.controls.subject_area = paper.subject_area;
  return row;
}

std::vector<double> monthly_scores(const PaperRecord& paper, std::span<const MentionEvent> mentions,
                                   int first_offset, int last_offset) {
  const auto& retraction = retraction_of(paper);
  if (last_offset < first_offset) throw Error(ErrorCode::InvalidArgument, "empty offset range");
  std::vector<double> scores(static_cast<std::size_t>(last_offset - first_offset + 1), 0.0);
  for (const auto& m : mentions) {
    if (m.paper_id != paper.paper_id) continue;
    const int off = month_offset(retraction, m.timestamp);
    if (off >= first_offset && off <= last_offset) scores[off - first_offset] += m.weight;
  }
  return scores;
}

std::vector<MonthlyPoint> monthly_series(const PaperRecord& paper,
                                         std::span<const MentionEvent> mentions, int half_width) {
  if (half_width < 1) throw Error(ErrorCode::InvalidArgument, "half width must be positive");
  const auto scores = monthly_scores(paper, mentions, -half_width, half_width);
  std::vector<MonthlyPoint> out;
  for (int off = -half_width; off <= half_width; ++off) {
    if (off == 0) continue;
    out.push_back({off, std::log1p(scores[off + half_width])});
  }
  return out;
}

std::vector<TierAttention> tier_attention_summary(std::span<const AttentionRow> rows,
                                                  const matching::TierSpec& tiers) {
  tiers.validate();
  std::vector<TierAttention> out(tiers.tier_count());
  std::vector<double> score_sum(out.size(), 0.0), mention_sum(out.size(), 0.0);
  for (const auto& r : rows) {
    const auto t = tiers.tier_of(r.pre_citations);
    ++out[t].n;
    score_sum[t] += r.window_score;
    mention_sum[t] += static_cast<double>(r.window_mentions);
  }
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t].tier = t;
    out[t].label = tiers.label(t);
    if (out[t].n > 0) {
      out[t].mean_score = score_sum[t] / static_cast<double>(out[t].n);
      out[t].mean_mentions = mention_sum[t] / static_cast<double>(out[t].n);
    }
  }
  return out;
}

namespace {

struct DummyCoding {
  std::string prefix;
  std::vector<std::string> levels;  // encoded levels (reference excluded)
  std::string reference;
};

DummyCoding dummy_coding(std::string prefix, const std::vector<std::string>& values) {
  std::map<std::string, std::size_t> freq;
  for (const auto& v : values) ++freq[v];
  DummyCoding coding{std::move(prefix), {}, {}};
  std::size_t best = 0;
  for (const auto& [level, n] : freq) {
    if (n > best) {  // map order makes the smallest label win ties
      best = n;
      coding.reference = level;
    }
  }
  for (const auto& [level, n] : freq)
    if (level != coding.reference) coding.levels.push_back(level);
  return coding;
}

}  // namespace

RegressionDataset build_regression_dataset(std::span<const AttentionRow> rows) {
  RegressionDataset ds;
  std::vector<const AttentionRow*> complete;
  for (const auto& r : rows) {
    const auto& c = r.controls;
    if (c.journal_rank && c.reason && c.n_authors && c.subject_area)
      complete.push_back(&r);
    else
      ++ds.dropped_count;
  }
  if (complete.empty())
    throw Error(ErrorCode::EmptyAfterFiltering,
                "no rows with complete control variables");

  std::vector<std::string> reasons, subjects;
  for (const auto* r : complete) {
    reasons.push_back(*r->controls.reason);
    subjects.push_back(*r->controls.subject_area);
  }
  const auto reason_coding = dummy_coding("reason", reasons);
  const auto subject_coding = dummy_coding("subject_area", subjects);

  ds.column_names = {"intercept",   "pre_citations", "pub_year",
                     "years_to_retraction", "journal_rank", "n_authors"};
  for (const auto& l : reason_coding.levels) ds.column_names.push_back("reason=" + l);
  for (const auto& l : subject_coding.levels) ds.column_names.push_back("subject_area=" + l);

  const auto n = static_cast<Eigen::Index>(complete.size());
  const auto p = static_cast<Eigen::Index>(ds.column_names.size());
  ds.design = Eigen::MatrixXd::Zero(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = *complete[i];
    const auto& c = r.controls;
    ds.design(i, 0) = 1.0;
    ds.design(i, 1) = static_cast<double>(r.pre_citations);
    ds.design(i, 2) = c.pub_year;
    ds.design(i, 3) = c.years_to_retraction;
    ds.design(i, 4) = *c.journal_rank;
    ds.design(i, 5) = *c.n_authors;
    Eigen::Index col = 6;
    for (const auto& l : reason_coding.levels) ds.design(i, col++) = *c.reason == l ? 1.0 : 0.0;
    for (const auto& l : subject_coding.levels) ds.design(i, col++) = *c.subject_area == l ? 1.0 : 0.0;
    ds.y_score.push_back(r.window_score);
    ds.y_mentions.push_back(static_cast<double>(r.window_mentions));
    ds.paper_ids.push_back(r.paper_id);
  }
  return ds;
}

AttentionReport analyze(std::span<const PaperRecord> retracted,
                        std::span<const MentionEvent> mentions, const AttentionConfig& config) {
  std::unordered_map<std::string, std::vector<MentionEvent>> by_paper;
  for (const auto& m : mentions) by_paper[m.paper_id].push_back(m);
  const std::vector<MentionEvent> none;

  AttentionReport report;
  for (const auto& paper : retracted) {
    auto it = by_paper.find(paper.paper_id);
    const auto& own = it == by_paper.end() ? none : it->second;
    report.rows.push_back(window_attention(paper, own, config.window));
    report.series.emplace_back(paper.paper_id, monthly_series(paper, own, config.series_half_width));
  }
  report.tiers = tier_attention_summary(report.rows, config.tiers);
  try {
    report.dataset = build_regression_dataset(report.rows);
    report.score_fit = stats::ols(report.dataset.y_score, report.dataset.design);
    report.mentions_fit = stats::ols(report.dataset.y_mentions, report.dataset.design);
  } catch (const Error& e) {
    report.regression_error = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return report;
}

void write_rows_csv(std::span<const AttentionRow> rows, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"paper_id", "window_score", "window_mentions", "pre_citations", "pub_year",
                      "years_to_retraction", "journal_rank", "retraction_reason", "n_authors",
                      "subject_area"});
  for (const auto& r : rows) {
    const auto& c = r.controls;
    write_csv_row(out, {r.paper_id, format_double(r.window_score), std::to_string(r.window_mentions),
                        std::to_string(r.pre_citations), std::to_string(c.pub_year),
                        std::to_string(c.years_to_retraction),
                        c.journal_rank ? format_double(*c.journal_rank) : "", c.reason.value_or(""),
                        c.n_authors ? std::to_string(*c.n_authors) : "",
                        c.subject_area.value_or("")});
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

void write_series_csv(const AttentionReport& report, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"paper_id", "offset", "log_score"});
  for (const auto& [id, points] : report.series)
    for (const auto& pt : points)
      write_csv_row(out, {id, std::to_string(pt.offset), format_double(pt.log_score)});
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

void write_tier_csv(std::span<const TierAttention> tiers, const std::string& path) {
  auto out = open_output(path);
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
  write_csv_row(out, {"tier", "n", "mean_score", "mean_mentions"});
  for (const auto& t : tiers)
    write_csv_row(out, {t.label, std::to_string(t.n), opt(t.mean_score), opt(t.mean_mentions)});
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

std::string regression_report_json(const AttentionReport& report) {
  nlohmann::json j;
  j["method"] = "ols";
  j["dropped_count"] = report.dataset.dropped_count;
  j["columns"] = report.dataset.column_names;
  if (report.regression_error) {
    j["error"] = *report.regression_error;
  } else {
    j["outcomes"] = {{"window_score", fit_json(*report.score_fit, report.dataset.column_names)},
                     {"window_mentions", fit_json(*report.mentions_fit, report.dataset.column_names)}};
  }
  return j.dump(2) + "\n";
}

}  // namespace retraction::attention
