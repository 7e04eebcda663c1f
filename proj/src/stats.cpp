#include "retraction/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "retraction/distributions.hpp"
#include "retraction/error.hpp"

namespace retraction::stats {

namespace {

struct Moments {
  double n = 0;
  double mean = 0;
  double var = 0;  // unbiased
};

Moments moments(std::span<const double> x) {
  Moments m;
  m.n = static_cast<double>(x.size());
  if (x.empty()) return m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / m.n;
  double ss = 0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.var = x.size() > 1 ? ss / (m.n - 1) : 0.0;
  return m;
}

void require_groups(std::span<const Sample> groups) {
  if (groups.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two groups");
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (groups[g].empty())
      throw Error(ErrorCode::InvalidArgument, "group " + std::to_string(g) + " is empty");
}

struct PooledRanks {
  std::vector<double> mean_rank;  // per group
  std::vector<double> sum_rank;
  double n_total = 0;
  double tie_term = 0;  // sum(t^3 - t)
};

PooledRanks pooled_ranks(std::span<const Sample> groups) {
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  PooledRanks out;
  const auto ranks = midranks(pooled, &out.tie_term);
  out.n_total = static_cast<double>(pooled.size());
  std::size_t pos = 0;
  for (const auto& g : groups) {
    double s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) s += ranks[pos++];
    out.sum_rank.push_back(s);
    out.mean_rank.push_back(s / static_cast<double>(g.size()));
  }
  return out;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values, double* tie_term) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  double ties = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    ties += t * t * t - t;
    i = j + 1;
  }
  if (tie_term) *tie_term = ties;
  return ranks;
}

TestResult welch_anova(std::span<const Sample> groups) {
  require_groups(groups);
  const double k = static_cast<double>(groups.size());
  std::vector<Moments> m;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    m.push_back(moments(groups[g]));
    if (groups[g].size() < 2 || !(m.back().var > 0))
      throw Error(ErrorCode::DegenerateGroup,
                  "group " + std::to_string(g) +
                      " needs at least two observations and positive variance");
  }
  double w_sum = 0, weighted_mean = 0;
  std::vector<double> w;
  for (const auto& gm : m) {
    w.push_back(gm.n / gm.var);
    w_sum += w.back();
    weighted_mean += w.back() * gm.mean;
  }
  weighted_mean /= w_sum;

  double between = 0, lambda = 0;
  for (std::size_t g = 0; g < m.size(); ++g) {
    between += w[g] * (m[g].mean - weighted_mean) * (m[g].mean - weighted_mean);
    const double r = 1.0 - w[g] / w_sum;
    lambda += r * r / (m[g].n - 1.0);
  }
  const double a = between / (k - 1.0);
  const double b = 1.0 + 2.0 * (k - 2.0) / (k * k - 1.0) * lambda;

  TestResult res;
  res.method = "welch_anova";
  res.statistic = a / b;
  res.df1 = k - 1.0;
  res.df2 = (k * k - 1.0) / (3.0 * lambda);
  res.p_value = f_upper_tail(res.statistic, res.df1, *res.df2);
  return res;
}

TestResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw Error(ErrorCode::DegenerateGroup, "Welch t needs two observations per sample");
  const auto ma = moments(a);
  const auto mb = moments(b);
  const double va = ma.var / ma.n;
  const double vb = mb.var / mb.n;
  if (!(va + vb > 0))
    throw Error(ErrorCode::DegenerateGroup, "both samples have zero variance");

  TestResult res;
  res.method = "welch_t";
  res.statistic = (ma.mean - mb.mean) / std::sqrt(va + vb);
  res.df1 = (va + vb) * (va + vb) / (va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0));
  res.p_value = student_t_two_sided_p(res.statistic, res.df1);
  return res;
}

TestResult kruskal_wallis(std::span<const Sample> groups) {
  require_groups(groups);
  const auto pr = pooled_ranks(groups);
  const double n = pr.n_total;
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "Kruskal-Wallis needs at least 3 observations");

  TestResult res;
  res.method = "kruskal_wallis";
  res.df1 = static_cast<double>(groups.size()) - 1.0;
  const double correction = 1.0 - pr.tie_term / (n * n * n - n);
  if (correction <= 0) {
    res.statistic = 0;
    res.p_value = 1;
    res.warning = "AllTied: every observation is equal; H is undefined";
    return res;
  }
  double h = 0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    h += pr.sum_rank[g] * pr.sum_rank[g] / static_cast<double>(groups[g].size());
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  res.statistic = std::max(0.0, h) / correction;
  res.p_value = chi_square_upper_tail(res.statistic, res.df1);
  return res;
}

PairwiseTable dunn_posthoc(std::span<const Sample> groups) {
  require_groups(groups);
  const auto pr = pooled_ranks(groups);
  const double n = pr.n_total;
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "Dunn's test needs at least 3 observations");
  const double base_var = n * (n + 1.0) / 12.0 - pr.tie_term / (12.0 * (n - 1.0));

  PairwiseTable table;
  table.method = "dunn";
  std::vector<double> raw;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      PairwiseRow row{i, j, 0.0, 1.0, 1.0};
      const double se = std::sqrt(std::max(0.0, base_var) *
                                  (1.0 / static_cast<double>(groups[i].size()) +
                                   1.0 / static_cast<double>(groups[j].size())));
      if (se > 0) {
        row.statistic = (pr.mean_rank[i] - pr.mean_rank[j]) / se;
        row.p_raw = normal_two_sided_p(row.statistic);
      }
      table.rows.push_back(row);
      raw.push_back(row.p_raw);
    }
  }
  const auto adjusted = holm_adjust(raw);
  for (std::size_t r = 0; r < table.rows.size(); ++r) table.rows[r].p_adjusted = adjusted[r];
  return table;
}

PairwiseTable pairwise_welch_t(std::span<const Sample> groups) {
  require_groups(groups);
  PairwiseTable table;
  table.method = "welch_t";
  std::vector<double> raw;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      const auto t = welch_t(groups[i], groups[j]);
      table.rows.push_back({i, j, t.statistic, t.p_value, t.p_value});
      raw.push_back(t.p_value);
    }
  }
  const auto adjusted = holm_adjust(raw);
  for (std::size_t r = 0; r < table.rows.size(); ++r) table.rows[r].p_adjusted = adjusted[r];
  return table;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorCode::OutOfRangeP, "p-value outside [0, 1]");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double scaled = static_cast<double>(m - i) * p_values[order[i]];
    running = std::max(running, std::min(1.0, scaled));
    adjusted[order[i]] = running;
  }
  return adjusted;
}

RegressionFit ols(std::span<const double> y, const Eigen::MatrixXd& design) {
  const auto n = design.rows();
  const auto p = design.cols();
  if (static_cast<Eigen::Index>(y.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "response length does not match design rows");
  if (p == 0) throw Error(ErrorCode::InvalidArgument, "design has no columns");
  if (n <= p)
    throw Error(ErrorCode::InsufficientObservations,
                std::to_string(n) + " rows for " +
                    std::to_string(p) + " predictors");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < p)
    throw Error(ErrorCode::RankDeficient, "design rank " + std::to_string(qr.rank()) +
                                              " < " + std::to_string(p) + " columns");

  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  const Eigen::VectorXd beta = qr.solve(yv);
  const Eigen::VectorXd resid = yv - design * beta;

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd perm = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = perm * (r_inv * r_inv.transpose()) * perm.transpose();

  RegressionFit fit;
  fit.n_obs = static_cast<std::size_t>(n);
  fit.df_resid = static_cast<double>(n - p);
  const double ssr = resid.squaredNorm();
  fit.sigma2 = ssr / fit.df_resid;
  const double y_mean = yv.mean();
  const double sst = (yv.array() - y_mean).square().sum();
  fit.r_squared = sst > 0 ? 1.0 - ssr / sst : (ssr == 0 ? 1.0 : 0.0);

  for (Eigen::Index j = 0; j < p; ++j) {
    const double b = beta(j);
    const double se = std::sqrt(std::max(0.0, fit.sigma2 * xtx_inv(j, j)));
    double t;
    double pv;
    if (se > 0) {
      t = b / se;
      pv = student_t_two_sided_p(t, fit.df_resid);
    } else {
      // exact fit
      t = b == 0 ? 0.0 : std::copysign(INFINITY, b);
      pv = b == 0 ? 1.0 : 0.0;
    }
    fit.coefficients.push_back(b);
    fit.std_errors.push_back(se);
    fit.t_values.push_back(t);
    fit.p_values.push_back(pv);
  }
  fit.residuals.assign(resid.data(), resid.data() + n);
  return fit;
}

}  // namespace retraction::stats
