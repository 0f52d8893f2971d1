#include "nij/common/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "nij/common/error.hpp"

namespace nij::linalg {

RankInfo numerical_rank(const MatrixXd& a, double rel_tol, double zero_tol) {
  RankInfo info;
  if (a.size() == 0) return info;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  info.singular_values = svd.singularValues();
  info.sigma_max = info.singular_values.size() ? info.singular_values(0) : 0.0;
  info.threshold = std::max(rel_tol * info.sigma_max, zero_tol);
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    const double s = info.singular_values(i);
    if (s > info.threshold) ++info.rank;
    if (s > info.threshold / 10.0 && s < info.threshold * 10.0) info.unreliable = true;
  }
  return info;
}

MatrixXd column_space(const MatrixXd& a, double rel_tol, double zero_tol) {
  if (a.size() == 0) return MatrixXd(a.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullU);
  const VectorXd& s = svd.singularValues();
  const double cut = std::max(rel_tol * (s.size() ? s(0) : 0.0), zero_tol);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

MatrixXd null_space(const MatrixXd& a, double rel_tol, double zero_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  const double cut = std::max(rel_tol * (s.size() ? s(0) : 0.0), zero_tol);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixV().rightCols(n - r);
}

double containment_residual(const VectorXd& v, const MatrixXd& q) {
  if (q.cols() == 0) return v.norm();
  return (v - q * (q.transpose() * v)).norm();
}

namespace {
MatrixXd orthonormal(const MatrixXd& a) {
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ() * MatrixXd::Identity(a.rows(), a.cols());
}
}  // namespace

double subspace_distance(const MatrixXd& a, const MatrixXd& b) {
  if (a.cols() != b.cols()) throw Error(ErrorKind::Dimension, "subspace_distance: dimension mismatch");
  if (a.cols() == 0) return 0.0;
  const MatrixXd qa = orthonormal(a);
  const MatrixXd qb = orthonormal(b);
  const MatrixXd diff = qa - qb * (qb.transpose() * qa);
  Eigen::JacobiSVD<MatrixXd> svd(diff);
  return std::min(1.0, svd.singularValues()(0));
}

double max_overlap(const MatrixXd& a, const MatrixXd& b) {
  if (a.cols() == 0 || b.cols() == 0) return 0.0;
  const MatrixXd qa = orthonormal(a);
  const MatrixXd qb = orthonormal(b);
  Eigen::JacobiSVD<MatrixXd> svd(qa.transpose() * qb);
  return std::min(1.0, svd.singularValues()(0));
}

bool transversal(const MatrixXd& a, const MatrixXd& b, double rel_tol) {
  MatrixXd stacked(a.rows(), a.cols() + b.cols());
  stacked << a, b;
  return numerical_rank(stacked, rel_tol, 0.0).rank == stacked.cols();
}

}  // namespace nij::linalg
