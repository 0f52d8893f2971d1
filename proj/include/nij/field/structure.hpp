#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nij/common/tolerances.hpp"
#include "nij/field/polynomial.hpp"
#include "nij/model/model.hpp"

/// Almost complex structures on a coordinate box with polynomial entries.
namespace nij::field {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Axis-aligned box [min, max] in R^m.
struct Box {
  VectorXd min;
  VectorXd max;

  int dim() const { return static_cast<int>(min.size()); }
  bool contains(const VectorXd& x, double slack = 0.0) const;
  VectorXd center() const { return (min + max) / 2.0; }
  /// Longest side.
  double size() const;

  static Box cube(int dim, double lo, double hi);
};

/// Validates min <= max componentwise; throws Schema otherwise.
void validate_box(const Box& b, const std::string& what);

/// Tensor grid with k points per axis, endpoints included (k = 1 gives the center).
std::vector<VectorXd> grid_points(const Box& box, int points_per_axis);

/// J-field on a box with polynomial entries.
class ChartedStructure {
 public:
  /// Validates dimensions and J^2 = -I within tol.field on a
  /// validation_points_per_axis^m grid; throws InvalidStructure on violation.
  ChartedStructure(Box domain, PolyMatrix j, const Tolerances& tol = {}, int validation_points_per_axis = 3);

  int dim() const { return domain_.dim(); }
  const Box& domain() const { return domain_; }
  const PolyMatrix& entries() const { return j_; }
  const PolyExpr& entry(int row, int col) const { return j_[row][col]; }
  int degree() const { return field::degree(j_); }

  /// J(x) without domain or structure checks.
  MatrixXd eval_raw(const VectorXd& x) const;
  /// d_a J(x) for a = 0..m-1, exact.
  std::vector<MatrixXd> derivative_raw(const VectorXd& x) const;
  /// d_a J as polynomials.
  const std::vector<PolyMatrix>& derivative_entries() const { return dj_; }

  /// Largest |J^2 + I| seen on the validation grid.
  double validation_residual() const { return validation_residual_; }

 private:
  Box domain_;
  PolyMatrix j_;
  std::vector<PolyMatrix> dj_;
  CompiledPolyMatrix j_compiled_;
  // d_a J stacked as rows a * m + k.
  CompiledPolyMatrix dj_compiled_;
  double validation_residual_ = 0.0;
};

/// J(x). Throws Domain outside the box and InvalidStructure when J^2 = -I
/// fails beyond tol.field.
model::CSMatrix eval_J(const ChartedStructure& s, const VectorXd& x, const Tolerances& tol = {});

/// d_a J^k_j at x, returned as dJ[a](k, j); exact term-wise differentiation.
std::vector<MatrixXd> d_J(const ChartedStructure& s, const VectorXd& x);

/// Central-difference oracle for d_J with step h (default 1e-5 * box size).
std::vector<MatrixXd> d_J_fd(const ChartedStructure& s, const VectorXd& x, double h = 0.0);

/// Coordinate formula of the Nijenhuis tensor from J and its first derivatives:
///   N^k_ij = J^a_i d_a J^k_j - J^a_j d_a J^k_i - J^k_l (d_i J^l_j - d_j J^l_i).
model::NTensor nijenhuis_from_jet(const model::CSMatrix& j, const std::vector<MatrixXd>& dj);

/// N_J(d_i, d_j) at x through the exact derivative path.
model::NTensor nijenhuis_at(const ChartedStructure& s, const VectorXd& x, const Tolerances& tol = {});

/// Independent oracle: [J X, J Y] - J[X, J Y] - J[J X, Y] - [X, Y] for the
/// constant fields X = d_i, Y = d_j, with every Lie bracket taken by central
/// differences of the literal vector fields (step h, default 1e-5 * box size).
model::NTensor nijenhuis_fd_oracle(const ChartedStructure& s, const VectorXd& x, double h = 0.0);

/// Polynomial diffeomorphism y = forward(x) with polynomial inverse x = inverse(y).
struct DiffeoPair {
  std::vector<PolyExpr> forward;
  std::vector<PolyExpr> inverse;
  /// Box of x values.
  Box forward_domain;
  /// Box of y values; the pulled-back structure lives here.
  Box inverse_domain;

  int dim() const { return static_cast<int>(forward.size()); }
  VectorXd apply_forward(const VectorXd& x) const;
  VectorXd apply_inverse(const VectorXd& y) const;
  /// D forward at x.
  MatrixXd forward_jacobian(const VectorXd& x) const;

  /// max |forward(inverse(y)) - y| and |inverse(forward(x)) - x| on grids.
  double roundtrip_residual(int points_per_axis = 3) const;

  /// Linear map y = P x (+ shift) with the given boxes.
  static DiffeoPair linear(const MatrixXd& p, const Box& forward_domain, const Box& inverse_domain);
  /// Composite: first `first`, then `second`.
  static DiffeoPair compose(const DiffeoPair& first, const DiffeoPair& second);
};

/// Throws Argument when the round trip fails beyond tol.field.
void validate_diffeo(const DiffeoPair& phi, const Tolerances& tol = {});

/// Random polynomial diffeomorphism: y = P2 (shear(P1 x)), where the shear
/// adds quadratic polynomials of the second half of coordinates to the first
/// half. The inverse is exact. `y_box` becomes the inverse domain; the forward
/// domain is a padded bounding box of its preimage.
DiffeoPair random_diffeo(int dim, std::uint64_t seed, const Box& y_box, double shear_scale = 0.3);

struct PullbackResult {
  ChartedStructure structure;
  /// max |fit - sampled J'| over fit and check points.
  double fit_residual = 0.0;
  int degree = 0;
};

/// Transports S along phi: J'(y) = D phi(x) J(x) D phi(x)^-1 at x = inverse(y),
/// refit by least squares to a polynomial of the given degree on a
/// Chebyshev-type grid in the y box. Throws Domain when inverse(y) leaves
/// S.domain and Refit when the residual exceeds tol.fit.
PullbackResult pullback(const ChartedStructure& s, const DiffeoPair& phi, int degree, const Tolerances& tol = {});

/// Tensor pushed forward by the linear map P: the expected N of the pullback
/// by y = P x at y = P x.
model::NTensor push_forward(const model::NTensor& n, const MatrixXd& p);

struct ScanReport {
  std::size_t points = 0;
  double max_norm = 0.0;
  VectorXd argmax;
  std::map<std::string, int> histogram;
  std::size_t unreliable = 0;
  bool integrable = false;
};

/// Samples nijenhuis_at on a points_per_axis^m grid; the verdict is integrable
/// iff max |N| < tol.field. Throws Argument for an empty grid.
ScanReport integrability_scan(const ChartedStructure& s, int points_per_axis, const Tolerances& tol = {});

}  // namespace nij::field
