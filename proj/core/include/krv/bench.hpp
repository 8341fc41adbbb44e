#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krv/kernels.hpp"
#include "krv/neighbors.hpp"
#include "krv/sbl.hpp"
#include "krv/stats.hpp"

namespace krv {

// Grid-search experiment description. Defaults reproduce the standard
// protocol: 10 runs of 10-fold cross validation, k in 1..51, Gaussian widths
// 0.05..1.0 in steps of 0.05, stopping thresholds 1e-6..10 by decades,
// polynomial order 2.
struct ExperimentConfig {
  std::vector<std::string> datasets;
  std::vector<std::string> learners;  // of: knn wnn kernn krv rvm_bern rvm_gauss
  KernelSpec::Family kernel_family = KernelSpec::Family::gaussian;
  std::vector<int> k_grid;
  std::vector<double> width_grid;
  std::vector<double> delta_grid;
  int poly_order = 2;
  int runs = 10;
  int folds = 10;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware concurrency
  SblConfig sbl;    // delta_alpha is swept via delta_grid

  static ExperimentConfig defaults();
  void validate() const;
};

// Key-value config file, one key per field. Unknown keys are errors.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Hyperparameters of one grid cell; fields that a learner does not sweep
// stay at their defaults and are ignored in output.
struct CellKey {
  int k = 0;
  double width = 0.0;
  double delta = 0.0;
};

struct LearnerResult {
  std::string learner;
  std::string dataset;
  std::uint64_t seed = 0;
  CellKey best;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> fold_accuracies;  // runs*folds samples of the best cell
  double rv_count = 0.0;                // mean over folds; krv / rvm only
  double used_fraction = 0.0;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  std::size_t cells_evaluated = 0;
};

struct RunReport {
  ExperimentConfig cfg;
  std::vector<std::string> dataset_names;
  std::vector<std::string> learner_names;
  std::vector<LearnerResult> rows;  // dataset-major, learners in listed order
  std::vector<std::string> warnings;
  std::size_t total_cells = 0;
  bool has_ranks = false;
  RankReport ranks;

  const LearnerResult* find(const std::string& dataset, const std::string& learner) const;
};

// Grid-searches every requested learner on every loadable dataset with
// shared folds, reporting each learner's best cell by mean CV accuracy.
// Deterministic for a fixed config and seed.
RunReport run_experiment(const ExperimentConfig& cfg);

struct SparsityInfo {
  int rv_count = 0;          // retained non-bias dimensions
  double used_fraction = 0.0;  // rv_count / training size
};

SparsityInfo sparsity_accounting(const KrvModel& model, int train_size);

// Writes accuracy, sparsity, paired t-test and rank tables (CSV plus aligned
// text) under dir, together with the Nemenyi diagram. Identical reports
// produce identical bytes; wall-clock timings go to a separate timings.csv.
void emit_tables(const RunReport& report, const std::string& dir);

// Horizontal rank axis with one labeled tick per learner, a thick bar per
// CD-overlap group and an annotated CD ruler.
void emit_nemenyi_diagram(const RankReport& report, const std::string& path);

// Reads an emitted accuracy.csv back into a fresh rank report.
RankReport rank_report_from_accuracy_csv(const std::string& path);

}  // namespace krv
