#pragma once

// Group-comparison tests and ordinary least squares.
//
// All p-values are asymptotic. Ranks are midranks; rank-based statistics
// apply the usual tie corrections.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace retraction::stats {

using Sample = std::vector<double>;

struct TestResult {
  std::string method;
  double statistic = 0;
  double df1 = 0;
  std::optional<double> df2;  // F tests only
  double p_value = 1;
  std::optional<std::string> warning;
};

struct PairwiseRow {
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  double statistic = 0;
  double p_raw = 1;
  double p_adjusted = 1;
};

// Rows ordered (0,1), (0,2), ..., (1,2), ...; p_adjusted is Holm across all rows.
struct PairwiseTable {
  std::string method;
  std::vector<PairwiseRow> rows;
};

// Welch's heteroscedastic one-way ANOVA. Throws DegenerateGroup when a
// group has fewer than two observations or zero variance.
TestResult welch_anova(std::span<const Sample> groups);

// Two-sided Welch t-test. Throws DegenerateGroup when a sample has fewer than
// two observations or both variances are zero.
TestResult welch_t(std::span<const double> a, std::span<const double> b);

// Kruskal-Wallis H with tie correction, chi-square(k-1) reference. When every
// observation is tied H is undefined: statistic 0, p 1 and a warning.
TestResult kruskal_wallis(std::span<const Sample> groups);

// Dunn's pairwise z tests on pooled midranks.
PairwiseTable dunn_posthoc(std::span<const Sample> groups);

// Welch t for every pair of groups.
PairwiseTable pairwise_welch_t(std::span<const Sample> groups);

// Holm step-down adjustment, returned in input order. Throws OutOfRangeP.
std::vector<double> holm_adjust(std::span<const double> p_values);

// Midranks (1-based) of `values`; `tie_term` receives sum(t^3 - t) over tie groups.
std::vector<double> midranks(std::span<const double> values, double* tie_term = nullptr);

struct RegressionFit {
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  std::vector<double> residuals;
  std::size_t n_obs = 0;
  double df_resid = 0;
  double sigma2 = 0;
  double r_squared = 0;
};

// Least squares via column-pivoted Householder QR. Throws
// InsufficientObservations when rows <= columns and RankDeficient when the
// design does not have full column rank.
RegressionFit ols(std::span<const double> y, const Eigen::MatrixXd& design);

}  // namespace retraction::stats
