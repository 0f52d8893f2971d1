#include "nij/webs/webs.hpp"

#include <cmath>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"

namespace nij::webs {

namespace {

// Coordinates of plane a in the basis [B0 B1]: columns of the 4x2 result
// stacked as [X; Y].
Eigen::Matrix<double, 4, 2> split(const PlaneWeb4& w, int a) {
  Matrix4d base;
  base << w.planes[0], w.planes[1];
  return base.partialPivLu().solve(w.planes[a]);
}

bool invertible(const Matrix2d& m, double rel) {
  Eigen::JacobiSVD<Matrix2d> svd(m);
  const auto& s = svd.singularValues();
  return s(0) > 0.0 && s(1) > rel * s(0);
}

}  // namespace

void validate_web(const PlaneWeb4& w, const Tolerances& tol) {
  for (const MatrixXd& p : w.planes) {
    if (p.rows() != 4 || p.cols() != 2) throw Error(ErrorKind::Dimension, "web planes must be 4x2 bases");
    if (linalg::numerical_rank(p, tol.rank, tol.zero).rank != 2)
      throw Error(ErrorKind::SingularConfiguration, "web plane basis is degenerate");
  }
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (!linalg::transversal(w.planes[a], w.planes[b], tol.rank))
        throw Error(ErrorKind::SingularConfiguration,
                    "planes " + std::to_string(a) + " and " + std::to_string(b) + " intersect");
}

Matrix2d graph_map(const PlaneWeb4& w, int a, const Tolerances& tol) {
  if (a != 2 && a != 3) throw Error(ErrorKind::Argument, "graph_map: plane index must be 2 or 3");
  for (const MatrixXd& p : w.planes)
    if (p.rows() != 4 || p.cols() != 2) throw Error(ErrorKind::Dimension, "web planes must be 4x2 bases");
  if (!linalg::transversal(w.planes[0], w.planes[1], tol.rank))
    throw Error(ErrorKind::SingularConfiguration, "planes 0 and 1 are not transversal");
  const Eigen::Matrix<double, 4, 2> xy = split(w, a);
  const Matrix2d x = xy.topRows<2>();
  const Matrix2d y = xy.bottomRows<2>();
  if (!invertible(x, tol.rank) || !invertible(y, tol.rank))
    throw Error(ErrorKind::SingularConfiguration,
                "plane " + std::to_string(a) + " is not the graph of an isomorphism between planes 0 and 1");
  return y * x.inverse();
}

WebSolution web_to_J(const PlaneWeb4& w, const Tolerances& tol) {
  validate_web(w, tol);
  // Classification uses the user's bases; reconstruction uses orthonormal ones.
  const Matrix2d l = graph_map(w, 3, tol).inverse() * graph_map(w, 2, tol);
  PlaneWeb4 ortho;
  for (int a = 0; a < 4; ++a) ortho.planes[a] = linalg::column_space(w.planes[a], tol.rank, tol.zero);
  const Matrix2d f3 = graph_map(ortho, 2, tol);
  const Matrix2d lo = graph_map(ortho, 3, tol).inverse() * f3;

  const double norm2 = l.squaredNorm();
  const double half_trace = l.trace() / 2.0;
  const Matrix2d traceless = l - half_trace * Matrix2d::Identity();
  if (traceless.norm() <= tol.rank * std::sqrt(norm2))
    throw Error(ErrorKind::DegenerateWeb, "L is proportional to the identity");
  // For traceless T, T^2 = -det(T) I, so the discriminant is -4 det(T).
  const double disc = -4.0 * traceless.determinant();
  const double band = 1e-10 * norm2;
  if (disc >= band) throw Error(ErrorKind::NoComplexStructure, "L has real simple spectrum");
  if (disc > -band)
    throw Error(ErrorKind::NoComplexStructure, "L is a Jordan box (discriminant indeterminate within the band)");
  const double gamma = std::sqrt(traceless.determinant());

  const Matrix2d to = lo - (lo.trace() / 2.0) * Matrix2d::Identity();
  const Matrix2d j1 = to / std::sqrt(to.determinant());
  const Matrix2d j2 = f3 * j1 * f3.inverse();
  Matrix4d base;
  base << ortho.planes[0], ortho.planes[1];
  Matrix4d block = Matrix4d::Zero();
  block.topLeftCorner<2, 2>() = j1;
  block.bottomRightCorner<2, 2>() = j2;
  MatrixXd j = base * block * base.inverse();
  const Eigen::Vector2d c = w.planes[0].colPivHouseholderQr().solve(j * w.planes[0].col(0));
  if (c(1) < 0.0) j = -j;

  const Eigen::JacobiSVD<Matrix4d> svd(base);
  const double cond = svd.singularValues()(0) / svd.singularValues()(3);
  WebSolution out{model::CSMatrix(j, tol.alg * std::max(1.0, cond)), -j, l, half_trace / gamma, 1.0 / gamma, 0.0};
  for (const MatrixXd& q : ortho.planes)
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd v = j * q.col(k);
      out.residual = std::max(out.residual, linalg::containment_residual(v, q) / std::max(1.0, v.norm()));
    }
  if (out.residual > tol.alg)
    throw Error(ErrorKind::SingularConfiguration, "web is too ill-conditioned: invariance residual " +
                                                      std::to_string(out.residual));
  return out;
}

bool verify_web(const MatrixXd& j, const PlaneWeb4& w, const Tolerances& tol) {
  if (j.rows() != 4 || j.cols() != 4) return false;
  for (const MatrixXd& p : w.planes) {
    const MatrixXd q = linalg::column_space(p, tol.rank, tol.zero);
    if (q.cols() != 2) return false;
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd v = j * q.col(c);
      if (linalg::containment_residual(v, q) > tol.alg * std::max(1.0, v.norm())) return false;
    }
  }
  return true;
}

int min_web_size(int n) {
  if (n < 2) throw Error(ErrorKind::Argument, "min_web_size needs n >= 2");
  return n + 2;
}

}  // namespace nij::webs
