#include "krv/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "krv/error.hpp"

namespace krv {

std::vector<int> order_by_distance(const Eigen::VectorXd& distances) {
  std::vector<int> order(static_cast<std::size_t>(distances.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (distances(a) != distances(b)) return distances(a) < distances(b);
    return a < b;
  });
  return order;
}

namespace {

int vote_from_counts(const std::vector<int>& counts, int nearest_label) {
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  // Tie: prefer the nearest neighbor's class when it is tied for the top,
  // otherwise the lowest tied class id (which the scan above already found).
  if (counts[static_cast<std::size_t>(nearest_label)] == counts[static_cast<std::size_t>(best)])
    return nearest_label;
  return best;
}

void check_k(int k, Eigen::Index n) {
  if (k < 1) throw Error("neighbors: k must be at least 1");
  if (k > n) throw Error("neighbors: k exceeds the number of training instances");
}

}  // namespace

int majority_vote(const std::vector<int>& ordered_labels, int k, int num_classes) {
  check_k(k, static_cast<Eigen::Index>(ordered_labels.size()));
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  for (int i = 0; i < k; ++i) ++counts[static_cast<std::size_t>(ordered_labels[static_cast<std::size_t>(i)])];
  return vote_from_counts(counts, ordered_labels[0]);
}

std::vector<int> vote_over_ks(const std::vector<int>& ordered_labels, const std::vector<int>& ks,
                              int num_classes) {
  std::vector<int> out;
  out.reserve(ks.size());
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  int taken = 0;
  for (int k : ks) {
    check_k(k, static_cast<Eigen::Index>(ordered_labels.size()));
    if (k < taken) throw Error("vote_over_ks: ks must be ascending");
    while (taken < k) {
      ++counts[static_cast<std::size_t>(ordered_labels[static_cast<std::size_t>(taken)])];
      ++taken;
    }
    out.push_back(vote_from_counts(counts, ordered_labels[0]));
  }
  return out;
}

namespace {

std::vector<int> ordered_labels_from_sq(const Eigen::VectorXd& sq, const std::vector<int>& labels) {
  std::vector<int> order = order_by_distance(sq);
  std::vector<int> out(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[i] = labels[static_cast<std::size_t>(order[i])];
  return out;
}

}  // namespace

int knn_predict(const Dataset& train, const Eigen::VectorXd& z, int k) {
  check_k(k, train.size());
  if (z.size() != train.dim()) throw Error("knn_predict: dimension mismatch");
  Eigen::VectorXd sq = (train.instances.rowwise() - z.transpose()).rowwise().squaredNorm();
  return majority_vote(ordered_labels_from_sq(sq, train.labels), k, train.num_classes());
}

int wnn_predict(const Dataset& train, const Eigen::VectorXd& z, const Eigen::VectorXd& weights,
                int k) {
  check_k(k, train.size());
  if (z.size() != train.dim()) throw Error("wnn_predict: dimension mismatch");
  if (weights.size() != train.dim()) throw Error("wnn_predict: weight length mismatch");
  if ((weights.array() < 0.0).any()) throw Error("wnn_predict: negative weight");
  Eigen::MatrixXd diff = train.instances.rowwise() - z.transpose();
  Eigen::VectorXd sq = (diff.array().square().rowwise() * weights.transpose().array()).rowwise().sum();
  return majority_vote(ordered_labels_from_sq(sq, train.labels), k, train.num_classes());
}

int kernn_predict(const Dataset& train, const Eigen::VectorXd& z, const KernelSpec& spec, int k) {
  check_k(k, train.size());
  DesignMatrix dm = design_matrix(spec, train.instances, train.instances);
  Eigen::VectorXd phi = expand_row(spec, z, train.instances);
  Eigen::VectorXd sq = (dm.values.rowwise() - phi.transpose()).rowwise().squaredNorm();
  return majority_vote(ordered_labels_from_sq(sq, train.labels), k, train.num_classes());
}

std::vector<KrvModel> krv_train_path(const Dataset& train, const KernelSpec& spec, int k,
                                     const SblConfig& cfg, const std::vector<double>& thresholds) {
  if (k < 1) throw Error("krv_train: k must be at least 1");
  const int c = train.num_classes();
  DesignMatrix dm = design_matrix(spec, train.instances, train.instances);

  const int n_sub = (c == 2) ? 1 : c;
  std::vector<std::vector<SblModel>> per_class(static_cast<std::size_t>(n_sub));
  std::vector<char> trained(static_cast<std::size_t>(n_sub), 0);
  bool any = false;
  Error last_error("krv_train: no class could be trained");
  for (int s = 0; s < n_sub; ++s) {
    const int positive = (c == 2) ? 1 : s;
    Eigen::VectorXd t(train.size());
    for (Eigen::Index i = 0; i < train.size(); ++i)
      t(i) = (train.labels[static_cast<std::size_t>(i)] == positive) ? 1.0 : 0.0;
    try {
      per_class[static_cast<std::size_t>(s)] =
          train_path(dm.values, t, Likelihood::bernoulli, cfg, thresholds);
      trained[static_cast<std::size_t>(s)] = 1;
      any = true;
    } catch (const Error& e) {
      last_error = e;
    }
  }
  if (!any) throw last_error;

  std::vector<KrvModel> out;
  out.reserve(thresholds.size());
  for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
    KrvModel m;
    m.kernel = spec;
    m.anchors = train.instances;
    m.train_labels = train.labels;
    m.num_classes = c;
    m.k = k;

    if (n_sub == 1) {
      const SblModel& sub = per_class[0][ti];
      m.retained_dims = sub.active;
      m.sparse_weights = sub.weights;
    } else {
      // Union of surviving dimensions; per-dimension weight is the largest
      // |w| across the one-vs-rest runs.
      std::map<int, double> merged;
      for (int s = 0; s < n_sub; ++s) {
        if (!trained[static_cast<std::size_t>(s)]) continue;
        const SblModel& sub = per_class[static_cast<std::size_t>(s)][ti];
        for (std::size_t i = 0; i < sub.active.size(); ++i) {
          double aw = std::abs(sub.weights(static_cast<Eigen::Index>(i)));
          auto [it, inserted] = merged.emplace(sub.active[i], aw);
          if (!inserted && aw > it->second) it->second = aw;
        }
      }
      m.retained_dims.reserve(merged.size());
      m.sparse_weights.resize(static_cast<Eigen::Index>(merged.size()));
      Eigen::Index j = 0;
      for (const auto& [dim, weight] : merged) {
        m.retained_dims.push_back(dim);
        m.sparse_weights(j++) = weight;
      }
    }

    m.train_features.resize(train.size(), static_cast<Eigen::Index>(m.retained_dims.size()));
    for (std::size_t j = 0; j < m.retained_dims.size(); ++j)
      m.train_features.col(static_cast<Eigen::Index>(j)) = dm.values.col(m.retained_dims[j]);
    out.push_back(std::move(m));
  }
  return out;
}

KrvModel krv_train(const Dataset& train, const KernelSpec& spec, int k, const SblConfig& cfg) {
  std::vector<KrvModel> v = krv_train_path(train, spec, k, cfg, {cfg.delta_alpha});
  return std::move(v.front());
}

Eigen::VectorXd krv_query_features(const KrvModel& model, const Eigen::VectorXd& z) {
  if (z.size() != model.anchors.cols()) throw Error("krv_predict: dimension mismatch");
  Eigen::VectorXd phi = expand_row(model.kernel, z, model.anchors);
  Eigen::VectorXd zf(static_cast<Eigen::Index>(model.retained_dims.size()));
  for (std::size_t i = 0; i < model.retained_dims.size(); ++i)
    zf(static_cast<Eigen::Index>(i)) = phi(model.retained_dims[i]);
  return zf;
}

namespace {

Eigen::VectorXd krv_sq_distances(const KrvModel& model, const Eigen::VectorXd& z_features) {
  if (z_features.size() != model.train_features.cols())
    throw Error("krv_distances: feature count mismatch");
  Eigen::VectorXd w_abs = model.sparse_weights.cwiseAbs();
  Eigen::MatrixXd diff = model.train_features.rowwise() - z_features.transpose();
  return (diff.array().square().rowwise() * w_abs.transpose().array()).rowwise().sum();
}

}  // namespace

Eigen::VectorXd krv_distances(const KrvModel& model, const Eigen::VectorXd& z_features) {
  return krv_sq_distances(model, z_features).cwiseSqrt();
}

std::vector<int> krv_ordered_labels(const KrvModel& model, const Eigen::VectorXd& z) {
  Eigen::VectorXd sq = krv_sq_distances(model, krv_query_features(model, z));
  return ordered_labels_from_sq(sq, model.train_labels);
}

int krv_predict(const KrvModel& model, const Eigen::VectorXd& z) {
  return majority_vote(krv_ordered_labels(model, z), model.k, model.num_classes);
}

}  // namespace krv
