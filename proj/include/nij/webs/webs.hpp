#pragma once

#include <array>

#include <Eigen/Dense>

#include "nij/common/tolerances.hpp"
#include "nij/model/model.hpp"

namespace nij::webs {

using Eigen::Matrix2d;
using Eigen::Matrix4d;
using Eigen::MatrixXd;

/// Four 2-planes in R^4, each given by a 4x2 basis.
struct PlaneWeb4 {
  std::array<MatrixXd, 4> planes;
};

/// Throws Dimension for wrong shapes and SingularConfiguration when two planes
/// meet nontrivially or a basis is degenerate.
void validate_web(const PlaneWeb4& w, const Tolerances& tol = {});

/// The linear map F: plane 0 -> plane 1, in the chosen bases, whose graph in
/// plane0 + plane1 is plane a (a = 2 or 3). Throws SingularConfiguration when
/// plane a is not such a graph.
Matrix2d graph_map(const PlaneWeb4& w, int a, const Tolerances& tol = {});

struct WebSolution {
  /// Complex structure with J e > 0 in the second coordinate, e the first
  /// basis vector of plane 0 (in plane-0 coordinates).
  model::CSMatrix j;
  MatrixXd minus_j;
  /// Automorphism of plane 0 built from the two graphs.
  Matrix2d l;
  /// Eigenvalues of L written as (lambda +- i) / beta.
  double lambda = 0.0;
  double beta = 0.0;
  /// Largest invariance residual of the four planes.
  double residual = 0.0;
};

/// Reconstructs the complex structure making all four planes complex lines.
/// Throws NoComplexStructure (real spectrum, Jordan box, or a discriminant in
/// the indeterminate band) and DegenerateWeb (L proportional to identity).
WebSolution web_to_J(const PlaneWeb4& w, const Tolerances& tol = {});

/// True iff every plane is J-invariant within tol.alg (relative to the basis).
bool verify_web(const MatrixXd& j, const PlaneWeb4& w, const Tolerances& tol = {});

/// Number of complex curves through a point needed to fix J up to sign: n + 2.
int min_web_size(int n);

}  // namespace nij::webs
