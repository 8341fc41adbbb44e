#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "krv/bench.hpp"
#include "krv/error.hpp"

namespace krv {
namespace {

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string fmtg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  return os;
}

bool is_kernel_learner(const std::string& l) {
  return l == "kernn" || l == "krv" || l == "rvm_bern" || l == "rvm_gauss";
}

bool is_sparse_learner(const std::string& l) {
  return l == "krv" || l == "rvm_bern" || l == "rvm_gauss";
}

std::string kernel_param(const RunReport& rep, const LearnerResult& row) {
  if (!is_kernel_learner(row.learner)) return "";
  if (rep.cfg.kernel_family == KernelSpec::Family::gaussian) return fmtg(row.best.width);
  return std::to_string(rep.cfg.poly_order);
}

void write_aligned(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& r : rows) {
    if (widths.size() < r.size()) widths.resize(r.size(), 0);
    for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
  }
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      os << r[c];
      if (c + 1 < r.size()) os << std::string(widths[c] - r[c].size() + 2, ' ');
    }
    os << '\n';
  }
}

}  // namespace

void emit_tables(const RunReport& report, const std::string& dir) {
  std::filesystem::path base(dir);
  std::filesystem::create_directories(base);

  // Accuracy matrix.
  {
    auto csv = open_out(base / "accuracy.csv");
    csv << "dataset";
    for (const auto& l : report.learner_names) csv << ',' << l;
    csv << '\n';
    std::vector<std::vector<std::string>> txt;
    txt.push_back({"dataset"});
    for (const auto& l : report.learner_names) txt.back().push_back(l);
    for (const auto& ds : report.dataset_names) {
      csv << ds;
      txt.push_back({ds});
      for (const auto& l : report.learner_names) {
        const LearnerResult* r = report.find(ds, l);
        csv << ',' << fmt(r->mean_accuracy, 6);
        txt.back().push_back(fmt(r->mean_accuracy, 4));
      }
      csv << '\n';
    }
    auto txt_os = open_out(base / "accuracy.txt");
    write_aligned(txt_os, txt);
  }

  // Sparsity accounting for the sparse learners.
  {
    auto csv = open_out(base / "sparsity.csv");
    csv << "dataset,learner,rv_count,kernel_param,delta,used_fraction\n";
    std::vector<std::vector<std::string>> txt;
    txt.push_back({"dataset", "learner", "#RV", "param", "delta", "#used"});
    for (const auto& row : report.rows) {
      if (!is_sparse_learner(row.learner)) continue;
      csv << row.dataset << ',' << row.learner << ',' << fmt(row.rv_count, 2) << ','
          << kernel_param(report, row) << ',' << fmtg(row.best.delta) << ','
          << fmt(row.used_fraction, 4) << '\n';
      txt.push_back({row.dataset, row.learner, fmt(row.rv_count, 2), kernel_param(report, row),
                     fmtg(row.best.delta), fmt(row.used_fraction, 4)});
    }
    auto txt_os = open_out(base / "sparsity.txt");
    write_aligned(txt_os, txt);
  }

  // Paired t-test of the proposed rule against its dense counterpart, on the
  // per-fold accuracy samples of each learner's best cell.
  {
    auto csv = open_out(base / "ttest.csv");
    csv << "dataset,krv,kernn,S\n";
    std::vector<std::vector<std::string>> txt;
    txt.push_back({"dataset", "krv", "kernn", "S"});
    for (const auto& ds : report.dataset_names) {
      const LearnerResult* a = report.find(ds, "krv");
      const LearnerResult* b = report.find(ds, "kernn");
      if (a == nullptr || b == nullptr) continue;
      TTestResult t = paired_t_test(a->fold_accuracies, b->fold_accuracies, 0.05);
      csv << ds << ',' << fmt(a->mean_accuracy, 6) << ',' << fmt(b->mean_accuracy, 6) << ','
          << (t.reject ? 1 : 0) << '\n';
      txt.push_back({ds, fmt(a->mean_accuracy, 4), fmt(b->mean_accuracy, 4),
                     t.reject ? std::string("1") : std::string("0")});
    }
    auto txt_os = open_out(base / "ttest.txt");
    write_aligned(txt_os, txt);
  }

  // Best hyperparameters per (dataset, learner).
  {
    auto csv = open_out(base / "best_cells.csv");
    csv << "dataset,learner,k,kernel_param,delta,mean_accuracy,std_accuracy,cells,seed\n";
    for (const auto& row : report.rows) {
      csv << row.dataset << ',' << row.learner << ',';
      if (row.best.k > 0) csv << row.best.k;
      csv << ',' << kernel_param(report, row) << ',';
      if (row.best.delta > 0) csv << fmtg(row.best.delta);
      csv << ',' << fmt(row.mean_accuracy, 6) << ',' << fmt(row.std_accuracy, 6) << ','
          << row.cells_evaluated << ',' << row.seed << '\n';
    }
  }

  // Rank statistics.
  if (report.has_ranks) {
    const RankReport& rk = report.ranks;
    auto csv = open_out(base / "ranks.csv");
    csv << "# accuracies\ndataset";
    for (const auto& l : rk.learners) csv << ',' << l;
    csv << '\n';
    for (std::size_t s = 0; s < rk.datasets.size(); ++s) {
      csv << rk.datasets[s];
      for (double a : rk.accuracies[s]) csv << ',' << fmt(a, 6);
      csv << '\n';
    }
    csv << "# ranks\ndataset";
    for (const auto& l : rk.learners) csv << ',' << l;
    csv << '\n';
    for (std::size_t s = 0; s < rk.datasets.size(); ++s) {
      csv << rk.datasets[s];
      for (double r : rk.ranks[s]) csv << ',' << fmt(r, 2);
      csv << '\n';
    }
    csv << "# avg_ranks\n";
    for (std::size_t j = 0; j < rk.learners.size(); ++j)
      csv << rk.learners[j] << ',' << fmt(rk.avg_ranks[j], 4) << '\n';
    csv << "# statistics\n";
    csv << "chi2_F," << fmt(rk.chi2_f, 4) << '\n';
    csv << "fisher_f," << fmt(rk.fisher_f_value, 4) << '\n';
    csv << "cd," << fmt(rk.cd, 4) << '\n';
    csv << "alpha," << fmtg(rk.alpha) << '\n';
    csv << "rejected," << (rk.rejected ? 1 : 0) << '\n';
    csv << "# groups\n";
    for (std::size_t g = 0; g < rk.groups.size(); ++g) {
      csv << "group" << g;
      for (int j : rk.groups[g]) csv << ',' << rk.learners[static_cast<std::size_t>(j)];
      csv << '\n';
    }

    std::vector<std::vector<std::string>> txt;
    txt.push_back({"learner", "avg_rank"});
    for (std::size_t j = 0; j < rk.learners.size(); ++j)
      txt.push_back({rk.learners[j], fmt(rk.avg_ranks[j], 4)});
    txt.push_back({});
    txt.push_back({"chi2_F", fmt(rk.chi2_f, 4)});
    txt.push_back({"fisher_f", fmt(rk.fisher_f_value, 4)});
    txt.push_back({"CD", fmt(rk.cd, 4)});
    txt.push_back({"rejected", rk.rejected ? "yes" : "no"});
    auto txt_os = open_out(base / "ranks.txt");
    write_aligned(txt_os, txt);

    emit_nemenyi_diagram(rk, (base / "nemenyi.svg").string());
  }

  // Wall-clock timings; the one intentionally non-reproducible artifact.
  {
    auto csv = open_out(base / "timings.csv");
    csv << "dataset,learner,train_seconds,test_seconds\n";
    for (const auto& row : report.rows)
      csv << row.dataset << ',' << row.learner << ',' << fmt(row.train_seconds, 3) << ','
          << fmt(row.test_seconds, 3) << '\n';
  }

  // Run log.
  {
    auto os = open_out(base / "run.txt");
    os << "datasets: " << report.dataset_names.size() << '\n';
    os << "learners: " << report.learner_names.size() << '\n';
    os << "total grid cells evaluated: " << report.total_cells << '\n';
    os << "seed: " << report.cfg.seed << '\n';
    os << "note: hyperparameters are selected on the same cross-validation folds\n"
          "that produce the reported accuracy, so the selection is optimistic.\n";
    for (const auto& w : report.warnings) os << "warning: " << w << '\n';
  }
}

void emit_nemenyi_diagram(const RankReport& report, const std::string& path) {
  const std::size_t g = report.learners.size();
  if (g < 2) throw Error("nemenyi diagram: need at least 2 learners");

  const double margin = 70.0;
  const double plot_w = 580.0;
  const double axis_y = 150.0;
  auto x_of = [&](double rank) {
    return margin + (rank - 1.0) / (static_cast<double>(g) - 1.0) * plot_w;
  };

  // Bars only for groups of two or more; singletons draw nothing.
  std::vector<std::vector<int>> bars;
  for (const auto& grp : report.groups)
    if (grp.size() >= 2) bars.push_back(grp);

  const double height = axis_y + 40.0 + 18.0 * static_cast<double>(bars.size()) + 30.0;
  auto os = open_out(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(margin * 2 + plot_w, 0)
     << "\" height=\"" << fmt(height, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";

  // CD ruler.
  if (report.cd > 0.0) {
    double x0 = x_of(1.0);
    double x1 = x_of(std::min(1.0 + report.cd, static_cast<double>(g)));
    os << "<line x1=\"" << fmt(x0, 1) << "\" y1=\"30\" x2=\"" << fmt(x1, 1)
       << "\" y2=\"30\" stroke=\"black\" stroke-width=\"2\"/>\n";
    os << "<line x1=\"" << fmt(x0, 1) << "\" y1=\"25\" x2=\"" << fmt(x0, 1)
       << "\" y2=\"35\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fmt(x1, 1) << "\" y1=\"25\" x2=\"" << fmt(x1, 1)
       << "\" y2=\"35\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt((x0 + x1) / 2, 1)
       << "\" y=\"20\" text-anchor=\"middle\">CD = " << fmt(report.cd, 4) << "</text>\n";
  }

  // Axis with one tick per integer rank.
  os << "<line x1=\"" << fmt(x_of(1.0), 1) << "\" y1=\"" << fmt(axis_y, 1) << "\" x2=\""
     << fmt(x_of(static_cast<double>(g)), 1) << "\" y2=\"" << fmt(axis_y, 1)
     << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  for (std::size_t r = 1; r <= g; ++r) {
    double x = x_of(static_cast<double>(r));
    os << "<line x1=\"" << fmt(x, 1) << "\" y1=\"" << fmt(axis_y - 4, 1) << "\" x2=\"" << fmt(x, 1)
       << "\" y2=\"" << fmt(axis_y + 4, 1) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(x, 1) << "\" y=\"" << fmt(axis_y + 18, 1)
       << "\" text-anchor=\"middle\">" << r << "</text>\n";
  }

  // Learner ticks, labels staggered by rank order to limit overlap.
  std::vector<std::size_t> order(g);
  for (std::size_t j = 0; j < g; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (report.avg_ranks[a] != report.avg_ranks[b]) return report.avg_ranks[a] < report.avg_ranks[b];
    return a < b;
  });
  for (std::size_t pos = 0; pos < g; ++pos) {
    std::size_t j = order[pos];
    double x = x_of(report.avg_ranks[j]);
    double label_y = axis_y - 14.0 - 16.0 * static_cast<double>(pos % 4);
    os << "<line x1=\"" << fmt(x, 1) << "\" y1=\"" << fmt(label_y + 4, 1) << "\" x2=\"" << fmt(x, 1)
       << "\" y2=\"" << fmt(axis_y, 1) << "\" stroke=\"gray\" stroke-dasharray=\"2,2\"/>\n";
    os << "<text x=\"" << fmt(x, 1) << "\" y=\"" << fmt(label_y, 1) << "\" text-anchor=\"middle\">"
       << report.learners[j] << " (" << fmt(report.avg_ranks[j], 2) << ")</text>\n";
  }

  // Group bars.
  for (std::size_t b = 0; b < bars.size(); ++b) {
    double lo = report.avg_ranks[static_cast<std::size_t>(bars[b].front())];
    double hi = report.avg_ranks[static_cast<std::size_t>(bars[b].back())];
    double y = axis_y + 34.0 + 18.0 * static_cast<double>(b);
    os << "<line x1=\"" << fmt(x_of(lo) - 3, 1) << "\" y1=\"" << fmt(y, 1) << "\" x2=\""
       << fmt(x_of(hi) + 3, 1) << "\" y2=\"" << fmt(y, 1)
       << "\" stroke=\"black\" stroke-width=\"5\"/>\n";
  }
  os << "</svg>\n";
}

RankReport rank_report_from_accuracy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> learners;
  {
    std::stringstream ss(line);
    std::string tok;
    bool first = true;
    while (std::getline(ss, tok, ',')) {
      if (first) {
        if (tok != "dataset") throw Error(path + ": expected 'dataset' header");
        first = false;
      } else {
        learners.push_back(tok);
      }
    }
  }

  std::vector<std::string> datasets;
  std::vector<std::vector<double>> acc;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    datasets.push_back(tok);
    std::vector<double> row;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    if (row.size() != learners.size()) throw Error(path + ": ragged accuracy row");
    acc.push_back(std::move(row));
  }
  return build_rank_report(learners, datasets, acc, 0.05);
}

}  // namespace krv
