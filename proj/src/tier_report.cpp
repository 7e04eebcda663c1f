#include "retraction/tier_report.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "json.hpp"
#include "retraction/error.hpp"
#include "retraction/stats.hpp"

namespace retraction::stats {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json error_json(const std::string& method, const Error& e) {
  return {{"method", method}, {"error", std::string(error_code_name(e.code())) + ": " + e.what()}};
}

json test_json(const TestResult& r) {
  json j = {{"method", r.method}, {"statistic", number(r.statistic)}, {"p", number(r.p_value)}};
  if (r.df2)
    j["df"] = {number(r.df1), number(*r.df2)};
  else
    j["df"] = number(r.df1);
  if (r.warning) j["warning"] = *r.warning;
  return j;
}

json pairwise_json(const PairwiseTable& t, const std::vector<std::string>& labels) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"group_a", labels[r.group_a]},
                    {"group_b", labels[r.group_b]},
                    {"statistic", number(r.statistic)},
                    {"p_raw", number(r.p_raw)},
                    {"p_adjusted", number(r.p_adjusted)}});
  return {{"method", t.method}, {"adjust", "holm"}, {"rows", rows}};
}

template <class F>
json guarded(const std::string& method, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return error_json(method, e);
  }
}

json outcome_block(std::span<const matching::OutcomeRow> rows, double matching::OutcomeRow::*field,
                   const TierReportOptions& options) {
  std::map<std::size_t, std::pair<std::string, Sample>> by_tier;
  for (const auto& r : rows) {
    auto& slot = by_tier[r.tier];
    slot.first = r.tier_label;
    slot.second.push_back(r.*field);
  }
  std::vector<Sample> groups;
  std::vector<std::string> labels;
  json group_json = json::array();
  for (auto& [tier, entry] : by_tier) {
    group_json.push_back({{"tier", entry.first}, {"n", entry.second.size()}});
    labels.push_back(entry.first);
    groups.push_back(std::move(entry.second));
  }

  json tests = json::array();
  json pairwise = json::array();
  if (options.mean_tests) {
    tests.push_back(guarded("welch_anova", [&] { return test_json(welch_anova(groups)); }));
    pairwise.push_back(guarded("welch_t", [&] { return pairwise_json(pairwise_welch_t(groups), labels); }));
  }
  if (options.rank_tests) {
    tests.push_back(guarded("kruskal_wallis", [&] { return test_json(kruskal_wallis(groups)); }));
    pairwise.push_back(guarded("dunn", [&] { return pairwise_json(dunn_posthoc(groups), labels); }));
  }
  return {{"groups", group_json}, {"tests", tests}, {"pairwise", pairwise}};
}

}  // namespace

std::string tier_report_json(std::span<const matching::OutcomeRow> rows,
                             const TierReportOptions& options) {
  json j;
  j["n_rows"] = rows.size();
  json outcomes = json::object();
  if (options.outcome1) outcomes["outcome1"] = outcome_block(rows, &matching::OutcomeRow::outcome1, options);
  if (options.outcome2) outcomes["outcome2"] = outcome_block(rows, &matching::OutcomeRow::outcome2, options);
  j["outcomes"] = outcomes;
  return j.dump(2) + "\n";
}

}  // namespace retraction::stats
