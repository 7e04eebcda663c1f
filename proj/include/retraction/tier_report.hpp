#pragma once

// Omnibus and pairwise tier comparisons of the outcome rows, as JSON.

#include <span>
#include <string>

#include "retraction/matching.hpp"

namespace retraction::stats {

struct TierReportOptions {
  bool outcome1 = true;
  bool outcome2 = true;
  bool mean_tests = true;  // Welch ANOVA + pairwise Welch t (Holm)
  bool rank_tests = true;  // Kruskal-Wallis + Dunn (Holm)
};

// Groups rows by tier. A test that cannot run on the data (degenerate group,
// fewer than two tiers) is reported with an "error" entry instead of values.
std::string tier_report_json(std::span<const matching::OutcomeRow> rows,
                             const TierReportOptions& options = {});

}  // namespace retraction::stats
