#pragma once

#include <Eigen/Dense>
#include <utility>

#include "krv/dataset.hpp"

namespace krv {

// Per-column affine transform (x - mean) / scale fitted on one matrix and
// applicable to another, so a transform fitted on a training fold can be
// replayed on held-out rows without touching them.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // sample stddev; 1.0 where the column is constant

  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply_row(const Eigen::VectorXd& row) const;
};

// Returns the standardized dataset together with the fitted statistics.
std::pair<Dataset, Standardizer> standardize(const Dataset& d);

}  // namespace krv
