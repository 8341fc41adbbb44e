#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "krv/bench.hpp"
#include "krv/csv.hpp"
#include "krv/error.hpp"
#include "krv/folds.hpp"
#include "krv/parallel.hpp"
#include "krv/rng.hpp"
#include "krv/standardize.hpp"

namespace krv {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct FoldData {
  Dataset train_raw;
  Dataset test_raw;
  Dataset train_std;
  Dataset test_std;
  Eigen::VectorXd wnn_weights;  // inverse sample variance of raw train columns
};

Eigen::VectorXd inverse_variance_weights(const Eigen::MatrixXd& x) {
  Eigen::VectorXd w(x.cols());
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double mean = x.col(c).mean();
    double var = (n > 1) ? (x.col(c).array() - mean).square().sum() / (n - 1.0) : 0.0;
    w(c) = (var > 0.0) ? 1.0 / var : 0.0;
  }
  return w;
}

bool wants(const std::vector<std::string>& learners, const std::string& name) {
  return std::find(learners.begin(), learners.end(), name) != learners.end();
}

// Per-test-row neighbor sweep: ordered labels -> votes at every k, counted
// into `correct` (one slot per k).
void count_votes(const std::vector<int>& ordered_labels, int truth, const std::vector<int>& ks,
                 int num_classes, std::vector<int>& correct) {
  std::vector<int> votes = vote_over_ks(ordered_labels, ks, num_classes);
  for (std::size_t i = 0; i < votes.size(); ++i)
    if (votes[i] == truth) ++correct[i];
}

std::vector<int> ordered_labels_from_sq_dist(const Eigen::VectorXd& sq,
                                             const std::vector<int>& labels) {
  std::vector<int> order = order_by_distance(sq);
  std::vector<int> out(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[i] = labels[static_cast<std::size_t>(order[i])];
  return out;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd ms;
  if (v.empty()) return ms;
  double sum = 0.0;
  for (double x : v) sum += x;
  ms.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - ms.mean) * (x - ms.mean);
    ms.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return ms;
}

// Flat accuracy store: one row per grid cell, one column per (run, fold).
struct CellTable {
  std::size_t cells = 0;
  std::size_t rf = 0;
  std::vector<double> acc;

  void init(std::size_t cells_, std::size_t rf_) {
    cells = cells_;
    rf = rf_;
    acc.assign(cells * rf, 0.0);
  }
  double& at(std::size_t cell, std::size_t slot) { return acc[cell * rf + slot]; }
  std::vector<double> row(std::size_t cell) const {
    return {acc.begin() + static_cast<std::ptrdiff_t>(cell * rf),
            acc.begin() + static_cast<std::ptrdiff_t>((cell + 1) * rf)};
  }
};

}  // namespace

SparsityInfo sparsity_accounting(const KrvModel& model, int train_size) {
  SparsityInfo info;
  for (int d : model.retained_dims)
    if (d != 0) ++info.rv_count;
  info.used_fraction =
      (train_size > 0) ? static_cast<double>(info.rv_count) / static_cast<double>(train_size) : 0.0;
  return info;
}

const LearnerResult* RunReport::find(const std::string& dataset, const std::string& learner) const {
  for (const auto& row : rows)
    if (row.dataset == dataset && row.learner == learner) return &row;
  return nullptr;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  RunReport report;
  report.cfg = cfg;

  // Deduplicated learner list in the order given.
  for (const auto& l : cfg.learners)
    if (!wants(report.learner_names, l)) report.learner_names.push_back(l);

  const bool gaussian = cfg.kernel_family == KernelSpec::Family::gaussian;
  std::vector<double> widths = gaussian ? cfg.width_grid : std::vector<double>{0.0};
  const std::size_t nw = widths.size();

  // Stopping thresholds are swept along one trajectory, largest first.
  std::vector<double> deltas_desc = cfg.delta_grid;
  std::sort(deltas_desc.begin(), deltas_desc.end(), std::greater<>());
  const std::size_t nd = deltas_desc.size();
  // Map from descending trajectory order back to ascending cell order.
  auto delta_cell = [&](std::size_t traj_idx) { return nd - 1 - traj_idx; };
  std::vector<double> deltas_asc = cfg.delta_grid;  // already sorted ascending

  auto make_kernel = [&](double width) {
    return gaussian ? KernelSpec::gaussian(width) : KernelSpec::polynomial(cfg.poly_order);
  };

  const std::size_t rf = static_cast<std::size_t>(cfg.runs) * static_cast<std::size_t>(cfg.folds);

  for (const auto& path : cfg.datasets) {
    Dataset data;
    try {
      data = load_csv(path);
      data.validate();
      if (cfg.folds > data.size()) throw Error("more folds than instances");
    } catch (const Error& e) {
      report.warnings.push_back("skipped " + path + ": " + e.what());
      continue;
    }
    report.dataset_names.push_back(data.name);

    // Shared fold plans: one per run, reused by every learner.
    std::vector<FoldPlan> plans;
    plans.reserve(static_cast<std::size_t>(cfg.runs));
    for (int r = 0; r < cfg.runs; ++r)
      plans.push_back(
          stratified_kfold(data, cfg.folds, derive_seed(cfg.seed, fnv1a(data.name), r)));

    // Fold preparation (subset, standardize, attribute weights).
    std::vector<FoldData> fold_data(rf);
    {
      std::vector<std::function<void()>> tasks;
      for (int r = 0; r < cfg.runs; ++r) {
        for (int f = 0; f < cfg.folds; ++f) {
          std::size_t slot = static_cast<std::size_t>(r) * cfg.folds + f;
          tasks.push_back([&, r, f, slot]() {
            FoldData& fd = fold_data[slot];
            fd.train_raw = data.subset(plans[static_cast<std::size_t>(r)].train_indices(f));
            fd.test_raw = data.subset(plans[static_cast<std::size_t>(r)].test_indices(f));
            Standardizer sc = Standardizer::fit(fd.train_raw.instances);
            fd.train_std = fd.train_raw;
            fd.train_std.instances = sc.apply(fd.train_raw.instances);
            fd.test_std = fd.test_raw;
            fd.test_std.instances = sc.apply(fd.test_raw.instances);
            fd.wnn_weights = inverse_variance_weights(fd.train_raw.instances);
          });
        }
      }
      run_tasks(tasks, cfg.threads);
    }

    Eigen::Index min_train = data.size();
    for (const auto& fd : fold_data) min_train = std::min(min_train, fd.train_raw.size());
    std::vector<int> ks;
    for (int k : cfg.k_grid)
      if (k <= min_train) ks.push_back(k);
    if (ks.empty())
      throw Error(data.name + ": no k in k_grid fits the training folds (max " +
                  std::to_string(min_train) + ")");
    const std::size_t nk = ks.size();

    const bool want_knn = wants(report.learner_names, "knn");
    const bool want_wnn = wants(report.learner_names, "wnn");
    const bool want_kernn = wants(report.learner_names, "kernn");
    const bool want_krv = wants(report.learner_names, "krv");
    const bool want_rvmb = wants(report.learner_names, "rvm_bern");
    const bool want_rvmg = wants(report.learner_names, "rvm_gauss");

    CellTable knn_acc, wnn_acc, kernn_acc, krv_acc, rvmb_acc, rvmg_acc;
    if (want_knn) knn_acc.init(nk, rf);
    if (want_wnn) wnn_acc.init(nk, rf);
    if (want_kernn) kernn_acc.init(nw * nk, rf);
    if (want_krv) krv_acc.init(nw * nd * nk, rf);
    if (want_rvmb) rvmb_acc.init(nw * nd, rf);
    if (want_rvmg) rvmg_acc.init(nw * nd, rf);

    CellTable krv_rv, krv_used, rvmb_rv, rvmb_used, rvmg_rv, rvmg_used;
    if (want_krv) {
      krv_rv.init(nw * nd, rf);
      krv_used.init(nw * nd, rf);
    }
    if (want_rvmb) {
      rvmb_rv.init(nw * nd, rf);
      rvmb_used.init(nw * nd, rf);
    }
    if (want_rvmg) {
      rvmg_rv.init(nw * nd, rf);
      rvmg_used.init(nw * nd, rf);
    }

    // Wall-clock accumulators (volatile; reported separately).
    CellTable knn_test, wnn_test, kernn_train, kernn_test;
    CellTable krv_train, krv_test, rvmb_train, rvmb_test, rvmg_train, rvmg_test;
    if (want_knn) knn_test.init(1, rf);
    if (want_wnn) wnn_test.init(1, rf);
    if (want_kernn) {
      kernn_train.init(nw, rf);
      kernn_test.init(nw, rf);
    }
    if (want_krv) {
      krv_train.init(nw, rf);
      krv_test.init(nw * nd, rf);
    }
    if (want_rvmb) {
      rvmb_train.init(nw, rf);
      rvmb_test.init(nw * nd, rf);
    }
    if (want_rvmg) {
      rvmg_train.init(nw, rf);
      rvmg_test.init(nw * nd, rf);
    }

    std::vector<std::function<void()>> tasks;

    if (want_knn || want_wnn) {
      for (std::size_t slot = 0; slot < rf; ++slot) {
        tasks.push_back([&, slot]() {
          const FoldData& fd = fold_data[slot];
          const Eigen::Index n_test = fd.test_raw.size();
          std::vector<int> correct_knn(nk, 0), correct_wnn(nk, 0);
          auto t0 = Clock::now();
          for (Eigen::Index q = 0; q < n_test; ++q) {
            Eigen::VectorXd z = fd.test_raw.instances.row(q);
            int truth = fd.test_raw.labels[static_cast<std::size_t>(q)];
            if (want_knn) {
              Eigen::VectorXd sq =
                  (fd.train_raw.instances.rowwise() - z.transpose()).rowwise().squaredNorm();
              count_votes(ordered_labels_from_sq_dist(sq, fd.train_raw.labels), truth, ks,
                          data.num_classes(), correct_knn);
            }
            if (want_wnn) {
              Eigen::MatrixXd diff = fd.train_raw.instances.rowwise() - z.transpose();
              Eigen::VectorXd sq = (diff.array().square().rowwise() *
                                    fd.wnn_weights.transpose().array())
                                       .rowwise()
                                       .sum();
              count_votes(ordered_labels_from_sq_dist(sq, fd.train_raw.labels), truth, ks,
                          data.num_classes(), correct_wnn);
            }
          }
          double elapsed = seconds_since(t0);
          for (std::size_t i = 0; i < nk; ++i) {
            if (want_knn)
              knn_acc.at(i, slot) = static_cast<double>(correct_knn[i]) / static_cast<double>(n_test);
            if (want_wnn)
              wnn_acc.at(i, slot) = static_cast<double>(correct_wnn[i]) / static_cast<double>(n_test);
          }
          if (want_knn) knn_test.at(0, slot) = elapsed;
          if (want_wnn) wnn_test.at(0, slot) = elapsed;
        });
      }
    }

    if (want_kernn) {
      for (std::size_t w = 0; w < nw; ++w) {
        for (std::size_t slot = 0; slot < rf; ++slot) {
          tasks.push_back([&, w, slot]() {
            const FoldData& fd = fold_data[slot];
            KernelSpec spec = make_kernel(widths[w]);
            auto t0 = Clock::now();
            DesignMatrix train_dm =
                design_matrix(spec, fd.train_std.instances, fd.train_std.instances);
            kernn_train.at(w, slot) = seconds_since(t0);

            t0 = Clock::now();
            DesignMatrix test_dm =
                design_matrix(spec, fd.test_std.instances, fd.train_std.instances);
            const Eigen::Index n_test = fd.test_std.size();
            std::vector<int> correct(nk, 0);
            for (Eigen::Index q = 0; q < n_test; ++q) {
              Eigen::VectorXd sq = (train_dm.values.rowwise() - test_dm.values.row(q))
                                       .rowwise()
                                       .squaredNorm();
              count_votes(ordered_labels_from_sq_dist(sq, fd.train_std.labels),
                          fd.test_std.labels[static_cast<std::size_t>(q)], ks, data.num_classes(),
                          correct);
            }
            for (std::size_t i = 0; i < nk; ++i)
              kernn_acc.at(w * nk + i, slot) =
                  static_cast<double>(correct[i]) / static_cast<double>(n_test);
            kernn_test.at(w, slot) = seconds_since(t0);
          });
        }
      }
    }

    if (want_krv) {
      for (std::size_t w = 0; w < nw; ++w) {
        for (std::size_t slot = 0; slot < rf; ++slot) {
          tasks.push_back([&, w, slot]() {
            const FoldData& fd = fold_data[slot];
            KernelSpec spec = make_kernel(widths[w]);
            auto t0 = Clock::now();
            std::vector<KrvModel> models =
                krv_train_path(fd.train_std, spec, 1, cfg.sbl, deltas_desc);
            krv_train.at(w, slot) = seconds_since(t0);

            const Eigen::Index n_test = fd.test_std.size();
            const int train_size = static_cast<int>(fd.train_std.size());
            // Query expansion does not depend on delta; share it.
            DesignMatrix test_dm =
                design_matrix(spec, fd.test_std.instances, fd.train_std.instances);
            for (std::size_t di = 0; di < nd; ++di) {
              const KrvModel& model = models[di];
              const std::size_t cell_wd = w * nd + delta_cell(di);
              SparsityInfo sp = sparsity_accounting(model, train_size);
              krv_rv.at(cell_wd, slot) = sp.rv_count;
              krv_used.at(cell_wd, slot) = sp.used_fraction;

              auto t1 = Clock::now();
              std::vector<int> correct(nk, 0);
              Eigen::VectorXd w_abs = model.sparse_weights.cwiseAbs();
              for (Eigen::Index q = 0; q < n_test; ++q) {
                Eigen::VectorXd zf(static_cast<Eigen::Index>(model.retained_dims.size()));
                for (std::size_t j = 0; j < model.retained_dims.size(); ++j)
                  zf(static_cast<Eigen::Index>(j)) = test_dm.values(q, model.retained_dims[j]);
                Eigen::MatrixXd diff = model.train_features.rowwise() - zf.transpose();
                Eigen::VectorXd sq =
                    (diff.array().square().rowwise() * w_abs.transpose().array()).rowwise().sum();
                count_votes(ordered_labels_from_sq_dist(sq, model.train_labels),
                            fd.test_std.labels[static_cast<std::size_t>(q)], ks,
                            data.num_classes(), correct);
              }
              for (std::size_t i = 0; i < nk; ++i)
                krv_acc.at(cell_wd * nk + i, slot) =
                    static_cast<double>(correct[i]) / static_cast<double>(n_test);
              krv_test.at(cell_wd, slot) = seconds_since(t1);
            }
          });
        }
      }
    }

    auto add_rvm_tasks = [&](Likelihood lik, CellTable& acc, CellTable& rv, CellTable& used,
                             CellTable& train_t, CellTable& test_t) {
      for (std::size_t w = 0; w < nw; ++w) {
        for (std::size_t slot = 0; slot < rf; ++slot) {
          tasks.push_back([&, lik, w, slot]() {
            const FoldData& fd = fold_data[slot];
            KernelSpec spec = make_kernel(widths[w]);
            auto t0 = Clock::now();
            std::vector<RvmClassifier> models =
                train_rvm_path(fd.train_std, spec, lik, cfg.sbl, deltas_desc);
            train_t.at(w, slot) = seconds_since(t0);

            const Eigen::Index n_test = fd.test_std.size();
            const int train_size = static_cast<int>(fd.train_std.size());
            DesignMatrix test_dm =
                design_matrix(spec, fd.test_std.instances, fd.train_std.instances);
            for (std::size_t di = 0; di < nd; ++di) {
              const RvmClassifier& model = models[di];
              const std::size_t cell_wd = w * nd + delta_cell(di);
              int rv_count = static_cast<int>(model.retained_columns().size());
              rv.at(cell_wd, slot) = rv_count;
              used.at(cell_wd, slot) =
                  static_cast<double>(rv_count) / static_cast<double>(train_size);

              auto t1 = Clock::now();
              int correct = 0;
              for (Eigen::Index q = 0; q < n_test; ++q) {
                Eigen::VectorXd phi = test_dm.values.row(q);
                if (rvm_predict_phi(model, phi) ==
                    fd.test_std.labels[static_cast<std::size_t>(q)])
                  ++correct;
              }
              acc.at(cell_wd, slot) = static_cast<double>(correct) / static_cast<double>(n_test);
              test_t.at(cell_wd, slot) = seconds_since(t1);
            }
          });
        }
      }
    };
    if (want_rvmb) add_rvm_tasks(Likelihood::bernoulli, rvmb_acc, rvmb_rv, rvmb_used, rvmb_train, rvmb_test);
    if (want_rvmg) add_rvm_tasks(Likelihood::gaussian, rvmg_acc, rvmg_rv, rvmg_used, rvmg_train, rvmg_test);

    run_tasks(tasks, cfg.threads);

    // Sequential reduction in canonical cell order (width, delta, k ascending).
    auto sum_row = [](const CellTable& t, std::size_t cell) {
      double s = 0.0;
      for (std::size_t i = 0; i < t.rf; ++i) s += t.acc[cell * t.rf + i];
      return s;
    };
    auto mean_row = [&](const CellTable& t, std::size_t cell) {
      return sum_row(t, cell) / static_cast<double>(t.rf);
    };

    for (const auto& learner : report.learner_names) {
      LearnerResult row;
      row.learner = learner;
      row.dataset = data.name;
      row.seed = cfg.seed;

      double best_mean = -1.0;
      std::size_t best_cell = 0;
      CellKey best_key;

      auto consider = [&](const CellTable& table, std::size_t cell, const CellKey& key) {
        double m = mean_row(table, cell);
        if (m > best_mean) {
          best_mean = m;
          best_cell = cell;
          best_key = key;
        }
        ++row.cells_evaluated;
      };

      if (learner == "knn" || learner == "wnn") {
        const CellTable& table = (learner == "knn") ? knn_acc : wnn_acc;
        for (std::size_t i = 0; i < nk; ++i)
          consider(table, i, CellKey{ks[i], 0.0, 0.0});
        const CellTable& table_t = (learner == "knn") ? knn_test : wnn_test;
        row.test_seconds = sum_row(table_t, 0);
        auto accs = table.row(best_cell);
        MeanStd ms = mean_std(accs);
        row.mean_accuracy = ms.mean;
        row.std_accuracy = ms.std;
        row.fold_accuracies = std::move(accs);
      } else if (learner == "kernn") {
        for (std::size_t w = 0; w < nw; ++w)
          for (std::size_t i = 0; i < nk; ++i)
            consider(kernn_acc, w * nk + i, CellKey{ks[i], widths[w], 0.0});
        std::size_t w_best = best_cell / nk;
        row.train_seconds = sum_row(kernn_train, w_best);
        row.test_seconds = sum_row(kernn_test, w_best);
        auto accs = kernn_acc.row(best_cell);
        MeanStd ms = mean_std(accs);
        row.mean_accuracy = ms.mean;
        row.std_accuracy = ms.std;
        row.fold_accuracies = std::move(accs);
      } else if (learner == "krv") {
        for (std::size_t w = 0; w < nw; ++w)
          for (std::size_t d = 0; d < nd; ++d)
            for (std::size_t i = 0; i < nk; ++i)
              consider(krv_acc, (w * nd + d) * nk + i, CellKey{ks[i], widths[w], deltas_asc[d]});
        std::size_t cell_wd = best_cell / nk;
        row.rv_count = mean_row(krv_rv, cell_wd);
        row.used_fraction = mean_row(krv_used, cell_wd);
        row.train_seconds = sum_row(krv_train, cell_wd / nd);
        row.test_seconds = sum_row(krv_test, cell_wd);
        auto accs = krv_acc.row(best_cell);
        MeanStd ms = mean_std(accs);
        row.mean_accuracy = ms.mean;
        row.std_accuracy = ms.std;
        row.fold_accuracies = std::move(accs);
      } else {  // rvm_bern / rvm_gauss
        const bool bern = learner == "rvm_bern";
        const CellTable& acc = bern ? rvmb_acc : rvmg_acc;
        for (std::size_t w = 0; w < nw; ++w)
          for (std::size_t d = 0; d < nd; ++d)
            consider(acc, w * nd + d, CellKey{0, widths[w], deltas_asc[d]});
        row.rv_count = mean_row(bern ? rvmb_rv : rvmg_rv, best_cell);
        row.used_fraction = mean_row(bern ? rvmb_used : rvmg_used, best_cell);
        row.train_seconds = sum_row(bern ? rvmb_train : rvmg_train, best_cell / nd);
        row.test_seconds = sum_row(bern ? rvmb_test : rvmg_test, best_cell);
        auto accs = acc.row(best_cell);
        MeanStd ms = mean_std(accs);
        row.mean_accuracy = ms.mean;
        row.std_accuracy = ms.std;
        row.fold_accuracies = std::move(accs);
      }

      row.best = best_key;
      report.total_cells += row.cells_evaluated;
      report.rows.push_back(std::move(row));
    }
  }

  if (report.dataset_names.empty()) throw Error("no dataset could be loaded");

  if (report.dataset_names.size() >= 2 && report.learner_names.size() >= 2) {
    std::vector<std::vector<double>> acc_matrix;
    for (const auto& ds : report.dataset_names) {
      std::vector<double> r;
      for (const auto& l : report.learner_names) r.push_back(report.find(ds, l)->mean_accuracy);
      acc_matrix.push_back(std::move(r));
    }
    report.ranks =
        build_rank_report(report.learner_names, report.dataset_names, acc_matrix, 0.05);
    report.has_ranks = true;
  }
  return report;
}

}  // namespace krv
