#include "krv/standardize.hpp"

#include <cmath>

#include "krv/error.hpp"

namespace krv {

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  if (n < 1) throw Error("standardize: empty matrix");
  Standardizer s;
  s.mean = x.colwise().mean();
  s.scale.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double var = 0.0;
    if (n > 1) {
      var = (x.col(c).array() - s.mean(c)).square().sum() / static_cast<double>(n - 1);
    }
    double sd = std::sqrt(var);
    s.scale(c) = (sd > 0.0) ? sd : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) throw Error("standardize: column count mismatch");
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::VectorXd Standardizer::apply_row(const Eigen::VectorXd& row) const {
  if (row.size() != mean.size()) throw Error("standardize: column count mismatch");
  return (row - mean).cwiseQuotient(scale);
}

std::pair<Dataset, Standardizer> standardize(const Dataset& d) {
  Standardizer s = Standardizer::fit(d.instances);
  Dataset out = d;
  out.instances = s.apply(d.instances);
  return {std::move(out), std::move(s)};
}

}  // namespace krv
