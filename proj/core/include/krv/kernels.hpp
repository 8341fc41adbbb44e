#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace krv {

// Kernel family plus its single parameter: width sigma for the Gaussian
// kernel exp(-|u-v|^2 / (2 sigma^2)), order c for the inhomogeneous
// polynomial kernel (u.v + 1)^c.
struct KernelSpec {
  enum class Family { gaussian, polynomial };

  Family family = Family::gaussian;
  double width = 1.0;
  int order = 2;

  static KernelSpec gaussian(double width);
  static KernelSpec polynomial(int order);

  std::string describe() const;
};

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Feature expansion of a set of rows against a set of anchor instances.
// Column 0 is the constant bias basis; column j+1 holds k(row_i, anchor_j).
struct DesignMatrix {
  Eigen::MatrixXd values;      // rows x (anchors + 1)
  Eigen::MatrixXd basis_refs;  // the anchor instances, one per non-bias column
};

DesignMatrix design_matrix(const KernelSpec& spec, const Eigen::MatrixXd& rows,
                           const Eigen::MatrixXd& anchors);

// Single-row expansion (bias + one kernel value per anchor); the row
// equivalent of design_matrix for query-time use.
Eigen::VectorXd expand_row(const KernelSpec& spec, const Eigen::VectorXd& row,
                           const Eigen::MatrixXd& anchors);

}  // namespace krv
