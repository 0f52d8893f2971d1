#pragma once

#include <Eigen/Dense>

namespace nij::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Outcome of a singular-value rank decision.
struct RankInfo {
  int rank = 0;
  /// Some singular value lies within a factor 10 of the cut.
  bool unreliable = false;
  double sigma_max = 0.0;
  double threshold = 0.0;
  VectorXd singular_values;
};

/// Counts singular values above max(rel_tol * sigma_max, zero_tol).
RankInfo numerical_rank(const MatrixXd& a, double rel_tol, double zero_tol);

/// Orthonormal basis of the column space (rank decided as in numerical_rank).
MatrixXd column_space(const MatrixXd& a, double rel_tol, double zero_tol);

/// Orthonormal basis of {x : a x = 0}.
MatrixXd null_space(const MatrixXd& a, double rel_tol, double zero_tol);

/// Distance from v to span(q) for an orthonormal q.
double containment_residual(const VectorXd& v, const MatrixXd& q);

/// Sine of the largest principal angle between span(a) and span(b); both bases
/// are orthonormalized first. Requires equal dimensions.
double subspace_distance(const MatrixXd& a, const MatrixXd& b);

/// Largest cosine between a unit vector of span(a) and one of span(b); zero
/// means the subspaces are orthogonal, one means they intersect.
double max_overlap(const MatrixXd& a, const MatrixXd& b);

/// True when span(a) and span(b) are in direct sum (rank adds up).
bool transversal(const MatrixXd& a, const MatrixXd& b, double rel_tol);

/// Largest absolute entry.
inline double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace nij::linalg
