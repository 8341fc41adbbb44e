#pragma once

#include <Eigen/Dense>
#include <vector>

#include "krv/dataset.hpp"
#include "krv/kernels.hpp"
#include "krv/sbl.hpp"

namespace krv {

// Training row indices sorted by ascending distance, ties by index.
// Squared distances are accepted; the ordering is the same.
std::vector<int> order_by_distance(const Eigen::VectorXd& distances);

// Majority class among the first k entries. A vote tie goes to the class of
// the nearest neighbor when it is among the tied classes, otherwise to the
// lowest class id.
int majority_vote(const std::vector<int>& ordered_labels, int k, int num_classes);

// Vote outcomes for several neighbor counts over one ordered label list;
// ks must be ascending. Costs one pass regardless of how many ks.
std::vector<int> vote_over_ks(const std::vector<int>& ordered_labels, const std::vector<int>& ks,
                              int num_classes);

// Plain Euclidean k-NN over the input attributes.
int knn_predict(const Dataset& train, const Eigen::VectorXd& z, int k);

// Per-attribute weighted k-NN: squared coordinate differences scaled by
// weights (all >= 0). Unit weights reduce to knn_predict.
int wnn_predict(const Dataset& train, const Eigen::VectorXd& z, const Eigen::VectorXd& weights,
                int k);

// k-NN in kernel feature space: rows and query expanded against the training
// anchor set, Euclidean distance over all columns.
int kernn_predict(const Dataset& train, const Eigen::VectorXd& z, const KernelSpec& spec, int k);

// Sparsified weighted nearest-neighbor classifier: kernel expansion columns
// that survive sparse Bayesian pruning, their posterior weights as
// per-dimension relevance, and the training rows projected onto them.
struct KrvModel {
  KernelSpec kernel;
  Eigen::MatrixXd anchors;          // training instances (kernel anchor set)
  std::vector<int> retained_dims;   // surviving design-matrix columns
  Eigen::VectorXd sparse_weights;   // aligned with retained_dims
  Eigen::MatrixXd train_features;   // N x |retained_dims|
  std::vector<int> train_labels;
  int num_classes = 0;
  int k = 1;
};

// Builds the design matrix, runs Bernoulli sparse Bayesian training (one
// model per class when C > 2), and stores the surviving dimensions. For
// multi-class, retained dimensions are the union across the per-class runs
// and each dimension's weight is the largest |w| any run assigned it.
KrvModel krv_train(const Dataset& train, const KernelSpec& spec, int k, const SblConfig& cfg);

// One model per stopping threshold from a single training trajectory per
// class; entry i matches krv_train with cfg.delta_alpha = thresholds[i].
std::vector<KrvModel> krv_train_path(const Dataset& train, const KernelSpec& spec, int k,
                                     const SblConfig& cfg, const std::vector<double>& thresholds);

// Query expansion restricted to the retained dimensions.
Eigen::VectorXd krv_query_features(const KrvModel& model, const Eigen::VectorXd& z);

// Sqrt of sum_i |w_i| (h_i - z_i)^2 against every stored training row.
Eigen::VectorXd krv_distances(const KrvModel& model, const Eigen::VectorXd& z_features);

// Training labels ordered by ascending weighted distance to z.
std::vector<int> krv_ordered_labels(const KrvModel& model, const Eigen::VectorXd& z);

int krv_predict(const KrvModel& model, const Eigen::VectorXd& z);

}  // namespace krv
