#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "krv/dataset.hpp"
#include "krv/kernels.hpp"
#include "krv/neighbors.hpp"
#include "krv/sbl.hpp"
#include "krv/standardize.hpp"

namespace krv {

enum class LearnerKind { knn, wnn, kernn, krv, rvm_bern, rvm_gauss };

std::string to_string(LearnerKind kind);
LearnerKind learner_from_string(const std::string& name);

// Stored instances for the memory-based rules; weights is used by w-NN only.
struct MemoryModel {
  Eigen::MatrixXd instances;
  std::vector<int> labels;
  Eigen::VectorXd weights;
};

// A trained classifier of any supported kind, plus everything needed to take
// a raw query row to a class id: label names for reporting, preprocessing
// statistics, kernel spec. Exactly one payload is meaningful per kind.
struct TrainedModel {
  LearnerKind kind = LearnerKind::knn;
  int k = 1;
  int num_classes = 0;
  std::vector<std::string> label_names;
  bool has_scaler = false;
  Standardizer scaler;
  bool has_kernel = false;
  KernelSpec kernel;

  MemoryModel memory;   // knn, wnn, kernn
  KrvModel krv_model;   // krv
  RvmClassifier rvm;    // rvm_bern, rvm_gauss

  Eigen::VectorXd preprocess(const Eigen::VectorXd& raw_row) const;
  int predict_class(const Eigen::VectorXd& raw_row) const;
  const std::string& predict_label(const Eigen::VectorXd& raw_row) const;
};

// Versioned flat text format; floating-point values are written as C
// hexfloats, so save -> load -> predict reproduces scores bit-for-bit.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace krv
