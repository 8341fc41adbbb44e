#include "krv/kernels.hpp"

#include <cmath>
#include <sstream>

#include "krv/error.hpp"

namespace krv {

KernelSpec KernelSpec::gaussian(double width) {
  if (!(width > 0.0)) throw Error("gaussian kernel: width must be positive");
  KernelSpec s;
  s.family = Family::gaussian;
  s.width = width;
  return s;
}

KernelSpec KernelSpec::polynomial(int order) {
  if (order < 1) throw Error("polynomial kernel: order must be at least 1");
  KernelSpec s;
  s.family = Family::polynomial;
  s.order = order;
  return s;
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  if (family == Family::gaussian)
    os << "gaussian(width=" << width << ")";
  else
    os << "polynomial(order=" << order << ")";
  return os.str();
}

namespace {

// Integer power by repeated multiplication; exact accumulation order keeps
// results identical regardless of surrounding matrix shapes.
double ipow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

double eval_pair(const KernelSpec& spec, const double* u, const double* v, Eigen::Index d) {
  if (spec.family == KernelSpec::Family::gaussian) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      double diff = u[i] - v[i];
      sq += diff * diff;
    }
    return std::exp(-sq / (2.0 * spec.width * spec.width));
  }
  double dot = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) dot += u[i] * v[i];
  return ipow(dot + 1.0, spec.order);
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw Error("kernel_eval: dimension mismatch");
  return eval_pair(spec, u.data(), v.data(), u.size());
}

DesignMatrix design_matrix(const KernelSpec& spec, const Eigen::MatrixXd& rows,
                           const Eigen::MatrixXd& anchors) {
  if (anchors.rows() == 0) throw Error("design_matrix: empty anchor set");
  if (rows.cols() != anchors.cols()) throw Error("design_matrix: dimension mismatch");

  const Eigen::Index n = rows.rows();
  const Eigen::Index m = anchors.rows();

  DesignMatrix dm;
  dm.basis_refs = anchors;
  dm.values.resize(n, m + 1);
  dm.values.col(0).setOnes();

  // Row-major pair loop; entry (i, j+1) depends only on row i and anchor j,
  // so any column subset matches a rebuild against that anchor subset
  // bit-for-bit.
  Eigen::MatrixXd rows_t = rows.transpose();      // column-major access per row
  Eigen::MatrixXd anchors_t = anchors.transpose();
  const Eigen::Index d = rows.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* u = rows_t.col(i).data();
    for (Eigen::Index j = 0; j < m; ++j) {
      dm.values(i, j + 1) = eval_pair(spec, u, anchors_t.col(j).data(), d);
    }
  }
  if (!dm.values.allFinite()) throw Error("design_matrix: non-finite kernel value");
  return dm;
}

Eigen::VectorXd expand_row(const KernelSpec& spec, const Eigen::VectorXd& row,
                           const Eigen::MatrixXd& anchors) {
  if (row.size() != anchors.cols()) throw Error("expand_row: dimension mismatch");
  Eigen::VectorXd phi(anchors.rows() + 1);
  phi(0) = 1.0;
  Eigen::MatrixXd anchors_t = anchors.transpose();
  for (Eigen::Index j = 0; j < anchors.rows(); ++j)
    phi(j + 1) = eval_pair(spec, row.data(), anchors_t.col(j).data(), row.size());
  return phi;
}

}  // namespace krv
