#pragma once

// Exact covariate matching of retracted papers to never-retracted controls
// and the two post-retraction citation outcomes.
//
// A retracted paper r and control m match when they share publication year,
// venue, discipline and the citation count accumulated from publication
// through r's retraction year (inclusive). Post-retraction citations are
// counted over the `horizon_years` years following the retraction year.
//
//   outcome1 = mean_m (post_r - post_m)
//   outcome2 = mean_m ln((post_r + eps) / (post_m + eps))

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "retraction/records.hpp"

namespace retraction::matching {

// Half-open citation tiers [0,b0), [b0,b1), ..., [bk,inf).
struct TierSpec {
  std::vector<long long> boundaries;

  static TierSpec published() { return TierSpec{{1, 9, 31}}; }

  // Cut point floor(q)+1 for each requested percentile q (linear
  // interpolation); duplicates and non-positive cuts are dropped, so a tier
  // always holds every value up to and including its percentile.
  static TierSpec from_percentiles(std::span<const long long> values,
                                   std::span<const double> percentiles);

  // Throws InvalidArgument unless boundaries are positive and strictly ascending.
  void validate() const;

  std::size_t tier_count() const { return boundaries.size() + 1; }
  std::size_t tier_of(long long pre_citations) const;
  std::string label(std::size_t tier) const;  // "[9,31)", "[31,inf)"
};

// Sum of citations over [pub_year, retraction_year]. Throws YearOrderViolation
// when retraction_year < pub_year.
long long pre_retraction_citations(const PaperRecord& paper, int retraction_year);

// Sum of citations over [retraction_year + 1, retraction_year + horizon_years].
long long post_retraction_citations(const PaperRecord& paper, int retraction_year,
                                    int horizon_years = 5);

struct MatchKey {
  int pub_year = 0;
  std::string venue;       // casefolded
  std::string discipline;  // casefolded
  long long pre_citations = 0;

  friend auto operator<=>(const MatchKey&, const MatchKey&) = default;
};

MatchKey match_key(const PaperRecord& paper, int retraction_year);

struct MatchedSet {
  std::string retracted_id;
  std::vector<std::string> control_ids;
  int retraction_year = 0;

  friend bool operator==(const MatchedSet&, const MatchedSet&) = default;
};

// Read-only index over a corpus. The corpus must outlive the index.
class CorpusIndex {
 public:
  explicit CorpusIndex(const std::vector<PaperRecord>& corpus);

  const PaperRecord* find(std::string_view paper_id) const;
  const PaperRecord& at(std::string_view paper_id) const;  // throws InvalidArgument

  // All never-retracted papers sharing the full MatchKey, anchored to the
  // retracted paper's retraction year; nullopt when there are none.
  std::optional<MatchedSet> find_controls(const PaperRecord& retracted) const;

  const std::vector<PaperRecord>& corpus() const { return *corpus_; }

 private:
  using Block = std::tuple<int, std::string, std::string>;
  const std::vector<PaperRecord>* corpus_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<Block, std::vector<std::size_t>> controls_by_block_;
};

struct MatchingRun {
  std::vector<MatchedSet> matched;
  std::vector<std::string> unmatched_ids;
};

// Matches every retracted paper in `retracted`; order follows the input.
MatchingRun match_all(std::span<const PaperRecord> retracted, const CorpusIndex& index,
                      unsigned threads = 1);

double outcome1(long long post_retracted, std::span<const long long> post_controls);
double outcome2(long long post_retracted, std::span<const long long> post_controls,
                double epsilon = 1e-5);

double outcome1(const MatchedSet& matched, const CorpusIndex& index, int horizon_years = 5);
double outcome2(const MatchedSet& matched, const CorpusIndex& index, double epsilon = 1e-5,
                int horizon_years = 5);

struct OutcomeConfig {
  double epsilon = 1e-5;
  int horizon_years = 5;
  TierSpec tiers = TierSpec::published();
};

struct OutcomeRow {
  std::string retracted_id;
  std::size_t tier = 0;
  std::string tier_label;
  long long pre_citations = 0;
  double outcome1 = 0;
  double outcome2 = 0;
  std::size_t n_controls = 0;
};

OutcomeRow compute_outcome(const MatchedSet& matched, const CorpusIndex& index,
                           const OutcomeConfig& config = {});
std::vector<OutcomeRow> compute_outcomes(std::span<const MatchedSet> matched,
                                         const CorpusIndex& index,
                                         const OutcomeConfig& config = {});

// Reassigns tiers by pre_citations; result[t] holds the rows of tier t.
std::vector<std::vector<OutcomeRow>> stratify(std::span<const OutcomeRow> rows,
                                              const TierSpec& tiers);

struct TierSummary {
  std::size_t tier = 0;
  std::string label;
  std::size_t n = 0;
  std::optional<double> outcome1_mean;
  std::optional<double> outcome2_median;
  std::optional<double> outcome2_mean;
  std::optional<double> outcome2_max;
};

std::vector<TierSummary> summarize_tiers(const std::vector<std::vector<OutcomeRow>>& stratified,
                                         const TierSpec& tiers);

double median(std::vector<double> values);  // midpoint average for even sizes

void write_matched_csv(std::span<const MatchedSet> matched, const std::string& path);
// Rebuilds matched sets from (retracted_id, control_id) rows, in first-seen
// order; retraction years come from the index.
std::vector<MatchedSet> read_matched_csv(const std::string& path, const CorpusIndex& index);
void write_outcomes_csv(std::span<const OutcomeRow> rows, const std::string& path);
// Reads an outcomes CSV back. pre_citations is not stored, so it is left 0;
// tier indices are assigned by ascending lower bound of the tier labels.
std::vector<OutcomeRow> read_outcomes_csv(const std::string& path);
void write_tier_summary_csv(std::span<const TierSummary> summaries, const std::string& path);

}  // namespace retraction::matching
