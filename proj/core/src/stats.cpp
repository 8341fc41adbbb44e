#include "krv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "krv/error.hpp"

namespace krv {

std::vector<double> rank_row(const std::vector<double>& accuracies) {
  const std::size_t g = accuracies.size();
  std::vector<double> ranks(g);
  for (std::size_t j = 0; j < g; ++j) {
    if (!std::isfinite(accuracies[j])) throw Error("rank_row: non-finite accuracy");
    int better = 0;
    int equal = 0;
    for (std::size_t l = 0; l < g; ++l) {
      if (accuracies[l] > accuracies[j]) ++better;
      if (accuracies[l] == accuracies[j]) ++equal;
    }
    // Average of the ranks the tie block spans: better+1 .. better+equal.
    ranks[j] = better + (equal + 1) / 2.0;
  }
  return ranks;
}

double friedman_chi2(const std::vector<std::vector<double>>& ranks) {
  const std::size_t s = ranks.size();
  if (s < 2) throw Error("friedman_chi2: need at least 2 datasets");
  const std::size_t g = ranks[0].size();
  if (g < 2) throw Error("friedman_chi2: need at least 2 learners");

  std::vector<double> avg(g, 0.0);
  for (const auto& row : ranks) {
    if (row.size() != g) throw Error("friedman_chi2: ragged rank matrix");
    for (std::size_t j = 0; j < g; ++j) avg[j] += row[j];
  }
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < g; ++j) {
    avg[j] /= static_cast<double>(s);
    sum_sq += avg[j] * avg[j];
  }
  const double gd = static_cast<double>(g);
  const double sd = static_cast<double>(s);
  return 12.0 * sd / (gd * (gd + 1.0)) * (sum_sq - gd * (gd + 1.0) * (gd + 1.0) / 4.0);
}

double fisher_f(double chi2, int s, int g) {
  const double denom = static_cast<double>(s) * (g - 1) - chi2;
  if (denom <= 0.0) throw Error("fisher_f: chi2 at or past the S(G-1) pole");
  return (s - 1) * chi2 / denom;
}

double nemenyi_q05(int g) {
  // Two-tailed Nemenyi critical values at alpha = 0.05.
  static const double table[] = {1.960, 2.343, 2.569, 2.728, 2.850,
                                 2.949, 3.031, 3.102, 3.164};
  if (g < 2 || g > 10) throw Error("nemenyi_q05: tabulated for 2..10 learners");
  return table[g - 2];
}

double nemenyi_cd(int g, int s, double q_alpha) {
  if (g < 2 || s < 1) throw Error("nemenyi_cd: need G >= 2 and S >= 1");
  return q_alpha * std::sqrt(static_cast<double>(g) * (g + 1) / (6.0 * s));
}

double chi2_critical(int df, double alpha) {
  static const double at_05[] = {3.8415, 5.9915, 7.8147, 9.4877, 11.0705,
                                 12.5916, 14.0671, 15.5073, 16.9190, 18.3070};
  static const double at_01[] = {6.6349, 9.2103, 11.3449, 13.2767, 15.0863,
                                 16.8119, 18.4753, 20.0902, 21.6660, 23.2093};
  if (df < 1 || df > 10) throw Error("chi2_critical: tabulated for df 1..10");
  if (alpha == 0.05) return at_05[df - 1];
  if (alpha == 0.01) return at_01[df - 1];
  throw Error("chi2_critical: tabulated for alpha 0.05 and 0.01");
}

bool friedman_decision(double chi2, int g, int s, double alpha) {
  if (s < 2) throw Error("friedman_decision: need at least 2 datasets");
  return chi2 > chi2_critical(g - 1, alpha);
}

std::vector<std::vector<int>> group_by_cd(const std::vector<double>& avg_ranks, double cd) {
  const std::size_t g = avg_ranks.size();
  std::vector<int> order(g);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (avg_ranks[static_cast<std::size_t>(a)] != avg_ranks[static_cast<std::size_t>(b)])
      return avg_ranks[static_cast<std::size_t>(a)] < avg_ranks[static_cast<std::size_t>(b)];
    return a < b;
  });

  std::vector<std::vector<int>> groups;
  std::size_t prev_end = 0;  // one past the end of the previous group
  for (std::size_t i = 0; i < g; ++i) {
    std::size_t j = i;
    while (j + 1 < g && avg_ranks[static_cast<std::size_t>(order[j + 1])] -
                                avg_ranks[static_cast<std::size_t>(order[i])] <
                            cd)
      ++j;
    // Windows with the same right edge as their predecessor are subsets.
    if (groups.empty() || j + 1 > prev_end) {
      groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                          order.begin() + static_cast<std::ptrdiff_t>(j + 1));
      prev_end = j + 1;
    }
  }
  return groups;
}

double student_t_critical(int df, double alpha) {
  if (df < 1) throw Error("student_t_critical: df must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("student_t_critical: alpha must be in (0,1)");
  boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, 1.0 - alpha / 2.0);
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                          double alpha) {
  if (a.size() != b.size()) throw Error("paired_t_test: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) throw Error("paired_t_test: need at least 2 pairs");

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.critical = student_t_critical(static_cast<int>(n) - 1, alpha);
  if (sd == 0.0) {
    if (mean == 0.0) {
      r.statistic = 0.0;
      r.reject = false;
    } else {
      r.statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.reject = true;
    }
    return r;
  }
  r.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.reject = std::abs(r.statistic) > r.critical;
  return r;
}

RankReport build_rank_report(const std::vector<std::string>& learners,
                             const std::vector<std::string>& datasets,
                             const std::vector<std::vector<double>>& accuracies,
                             double alpha) {
  RankReport rep;
  rep.learners = learners;
  rep.datasets = datasets;
  rep.accuracies = accuracies;
  rep.alpha = alpha;

  const std::size_t s = accuracies.size();
  const std::size_t g = learners.size();
  if (s != datasets.size()) throw Error("rank report: dataset count mismatch");
  if (s < 2 || g < 2) throw Error("rank report: need at least 2 datasets and 2 learners");

  rep.ranks.reserve(s);
  for (const auto& row : accuracies) {
    if (row.size() != g) throw Error("rank report: ragged accuracy matrix");
    rep.ranks.push_back(rank_row(row));
  }
  rep.avg_ranks.assign(g, 0.0);
  for (const auto& row : rep.ranks)
    for (std::size_t j = 0; j < g; ++j) rep.avg_ranks[j] += row[j];
  for (auto& r : rep.avg_ranks) r /= static_cast<double>(s);

  rep.chi2_f = friedman_chi2(rep.ranks);
  const double denom = static_cast<double>(s) * (static_cast<double>(g) - 1.0) - rep.chi2_f;
  rep.fisher_f_value = (denom > 0.0) ? fisher_f(rep.chi2_f, static_cast<int>(s), static_cast<int>(g))
                                     : std::numeric_limits<double>::infinity();
  rep.cd = nemenyi_cd(static_cast<int>(g), static_cast<int>(s), nemenyi_q05(static_cast<int>(g)));
  rep.groups = group_by_cd(rep.avg_ranks, rep.cd);
  rep.rejected = friedman_decision(rep.chi2_f, static_cast<int>(g), static_cast<int>(s), alpha);
  return rep;
}

}  // namespace krv
