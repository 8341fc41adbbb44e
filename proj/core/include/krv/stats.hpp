#pragma once

#include <string>
#include <vector>

namespace krv {

// Ranks within one row of accuracies: rank 1 for the highest value, ties
// receive the average of the ranks they span.
std::vector<double> rank_row(const std::vector<double>& accuracies);

// Friedman statistic (12S/(G(G+1))) (sum_j R_j^2 - G(G+1)^2/4) over an
// S x G rank matrix.
double friedman_chi2(const std::vector<std::vector<double>>& ranks);

// Fisher refinement (S-1) chi2 / (S(G-1) - chi2); errors at or past the pole.
double fisher_f(double chi2, int s, int g);

// Two-tailed Nemenyi q for 2..10 learners at alpha = 0.05.
double nemenyi_q05(int g);

// Critical difference q_alpha * sqrt(G(G+1)/(6S)).
double nemenyi_cd(int g, int s, double q_alpha);

// Upper chi-square critical value, df 1..10, alpha in {0.05, 0.01}.
double chi2_critical(int df, double alpha);

// True iff chi2 strictly exceeds the critical value at G-1 degrees of freedom.
bool friedman_decision(double chi2, int g, int s, double alpha);

// Maximal groups of learners (by sorted average rank) whose extreme ranks
// differ by less than cd. Groups may overlap; singletons are always valid.
// Each group lists original learner indices, sorted by rank.
std::vector<std::vector<int>> group_by_cd(const std::vector<double>& avg_ranks, double cd);

// Two-tailed Student-t critical value at level alpha with df degrees of
// freedom, computed from the incomplete-beta CDF (any df).
double student_t_critical(int df, double alpha);

struct TTestResult {
  bool reject = false;
  double statistic = 0.0;
  double critical = 0.0;
};

// Two-tailed paired t-test on equal-length samples. All-zero differences
// accept; zero-variance nonzero-mean differences reject.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                          double alpha);

// Learner comparison over several datasets: accuracy matrix, per-dataset
// ranks, Friedman/Fisher statistics, critical difference and the resulting
// overlap groups.
struct RankReport {
  std::vector<std::string> learners;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> accuracies;  // S x G
  std::vector<std::vector<double>> ranks;       // S x G
  std::vector<double> avg_ranks;                // G
  double chi2_f = 0.0;
  double fisher_f_value = 0.0;  // +inf when chi2 sits at the pole
  double cd = 0.0;
  std::vector<std::vector<int>> groups;
  bool rejected = false;
  double alpha = 0.05;
};

RankReport build_rank_report(const std::vector<std::string>& learners,
                             const std::vector<std::string>& datasets,
                             const std::vector<std::vector<double>>& accuracies,
                             double alpha = 0.05);

}  // namespace krv
