#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace krv {

enum class AttrKind { real, integer, nominal };

// In-memory classification dataset. Nominal attributes are already one-hot
// encoded by the time a Dataset exists; labels are dense ids 0..C-1 in
// first-appearance order, with the original label text kept for reporting.
struct Dataset {
  std::string name;
  Eigen::MatrixXd instances;             // N x D
  std::vector<int> labels;               // N, values in 0..C-1
  std::vector<AttrKind> attribute_kinds; // D, post-encoding
  std::vector<std::string> label_names;  // C, first-appearance order

  Eigen::Index size() const { return instances.rows(); }
  Eigen::Index dim() const { return instances.cols(); }
  int num_classes() const { return static_cast<int>(label_names.size()); }

  // Throws Error if any structural invariant is violated (empty data,
  // out-of-range label, empty class, non-finite value).
  void validate() const;

  // New dataset holding the given rows, in order. Label ids and names are
  // preserved even if a class ends up empty in the subset.
  Dataset subset(const std::vector<int>& rows) const;

  std::vector<int> class_counts() const;
};

}  // namespace krv
