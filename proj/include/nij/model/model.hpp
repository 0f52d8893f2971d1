#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nij/common/random.hpp"
#include "nij/common/tolerances.hpp"

/// Pointwise linear algebra of almost complex structures: complex structure
/// matrices, Nijenhuis tensors as data, degeneracy classes, and the
/// (1,1)-form / quadric pair built from a tensor.
namespace nij::model {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// True iff max |(J^2 + I)_ij| <= tol. Throws ErrorKind::Dimension for a
/// non-square or odd-dimensional matrix.
bool check_acs(const MatrixXd& j, double tol);

/// Block-diagonal diag(R, ..., R), R = [[0,-1],[1,0]].
MatrixXd standard_structure(int n);

/// A validated linear complex structure J on R^m, m = 2n.
class CSMatrix {
 public:
  /// Throws Dimension for odd or non-square input and InvalidStructure when
  /// J^2 = -I fails beyond tol.
  explicit CSMatrix(MatrixXd j, double tol = Tolerances{}.alg);

  int dim() const { return static_cast<int>(j_.rows()); }
  int n() const { return dim() / 2; }
  const MatrixXd& matrix() const { return j_; }
  VectorXd apply(const VectorXd& v) const { return j_ * v; }

 private:
  MatrixXd j_;
};

/// Random J = P J0 P^-1 with a well-conditioned random P.
CSMatrix random_structure(int n, Rng& rng);

/// A pointwise Nijenhuis-type tensor: entry (k, i, j) is the k-th component of
/// N(e_i, e_j). Only entries with i < j are read at construction; the rest are
/// mirrored so skew-symmetry holds exactly.
class NTensor {
 public:
  explicit NTensor(CSMatrix j);
  /// `full` holds m^3 values in (k, i, j) row-major order.
  NTensor(CSMatrix j, const std::vector<double>& full);

  /// Builds the tensor from its values on basis pairs, called for i < j only.
  static NTensor from_pairs(CSMatrix j, const std::function<VectorXd(int, int)>& pair_value);

  int dim() const { return j_.dim(); }
  const CSMatrix& structure() const { return j_; }

  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }
  const std::vector<double>& data() const { return data_; }

  /// N(xi, eta).
  VectorXd apply(const VectorXd& xi, const VectorXd& eta) const;
  /// N(e_i, e_j).
  VectorXd pair(int i, int j) const;
  /// Matrix of v -> N(xi, v).
  MatrixXd left(const VectorXd& xi) const;
  double max_abs() const;

  /// Tensor in new coordinates x' = P x, attached to P J P^-1.
  NTensor transformed(const MatrixXd& p) const;
  /// Copy with entry (k, i, j), i < j, shifted by delta (mirrored).
  NTensor perturbed(int k, int i, int j, double delta) const;

 private:
  std::size_t index(int k, int i, int j) const {
    const auto m = static_cast<std::size_t>(dim());
    return (static_cast<std::size_t>(k) * m + static_cast<std::size_t>(i)) * m + static_cast<std::size_t>(j);
  }

  CSMatrix j_;
  std::vector<double> data_;
};

/// Residuals of the algebraic identities of a Nijenhuis tensor.
struct IdentityResiduals {
  double skew = 0.0;
  double antilinear_left = 0.0;   // N(J e_i, e_j) + J N(e_i, e_j)
  double antilinear_right = 0.0;  // N(e_i, J e_j) + J N(e_i, e_j)
  double max() const;
};

IdentityResiduals identity_residuals(const NTensor& n);
bool n_identities_check(const NTensor& n, double tol);

/// A J-invariant real subspace, stored by an orthonormal basis.
class ComplexSubspace {
 public:
  ComplexSubspace(MatrixXd orthonormal_basis, CSMatrix j);

  /// Orthonormal basis of span(spanning) with the given rank cut.
  static ComplexSubspace span(const MatrixXd& spanning, const CSMatrix& j, const Tolerances& tol);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int real_dim() const { return static_cast<int>(basis_.cols()); }
  int complex_dim() const { return (real_dim() + 1) / 2; }
  const MatrixXd& basis() const { return basis_; }
  const CSMatrix& structure() const { return j_; }

  /// max over basis vectors of dist(J b, span).
  double invariance_residual() const;
  bool contains(const VectorXd& v, double tol) const;

 private:
  MatrixXd basis_;
  CSMatrix j_;
};

ComplexSubspace image(const NTensor& n, const Tolerances& tol = {});
ComplexSubspace kernel(const NTensor& n, const Tolerances& tol = {});

enum class DegeneracyTag { Zero, NDG, DG1, DG2, Rank };

struct DegeneracyClass {
  DegeneracyTag tag = DegeneracyTag::Zero;
  /// Complex dimension of the image.
  int complex_rank = 0;
  ComplexSubspace image;
  std::optional<ComplexSubspace> kernel;
  /// Singular values near the rank cut, or an odd real rank.
  bool unreliable = false;

  std::string name() const;
};

DegeneracyClass degeneracy_class(const NTensor& n, const Tolerances& tol = {});

/// omega(e_i, e_j) = Tr[N(e_i, J N(e_j, .)) - N(e_j, J N(e_i, .))].
MatrixXd bryant_form(const NTensor& n);
/// q(e_i, e_j) = Tr[N(e_i, N(e_j, .)) + N(e_j, N(e_i, .))].
MatrixXd quadric_form(const NTensor& n);

struct OmegaDegeneracy {
  bool degenerate = false;
  MatrixXd kernel;
  bool unreliable = false;
};

OmegaDegeneracy omega_degenerate(const MatrixXd& omega, const Tolerances& tol = {});

/// Greedy J-adapted real frame (f1, J f1, f2, J f2, ...): each f is the first
/// standard basis vector independent of the span so far.
MatrixXd adapted_frame(const CSMatrix& j, double rel_tol = Tolerances{}.rank);

/// Complex coordinates z_a = c_{2a} + i c_{2a+1} of v in the adapted frame.
VectorXcd to_complex(const MatrixXd& frame, const VectorXd& v);
VectorXd to_real(const MatrixXd& frame, const VectorXcd& z);

/// Complex components of an antilinear tensor in an adapted frame, stored as
/// comps[c](a, b).
using ComplexComponents = std::vector<MatrixXcd>;

enum class ComponentConvention {
  /// comps[c](a, b) is the c-th complex coordinate of N(f_a, f_b).
  Direct,
  /// The complex conjugate of Direct.
  Conjugate,
};

ComplexComponents complex_components(const NTensor& n, const MatrixXd& frame,
                                     ComponentConvention convention = ComponentConvention::Direct);

/// The real tensor with N(xi, eta) = sum conj(xi_a) conj(eta_b) comps[c](a, b) f_c
/// (components must be antisymmetric in a, b).
NTensor from_complex_components(const CSMatrix& j, const MatrixXd& frame, const ComplexComponents& comps);

/// Random antilinear skew tensor attached to j.
NTensor random_tensor(const CSMatrix& j, Rng& rng);

/// The (1,1)-form from the complex coordinate formula
///   T_ij = N_ik^l conj(N_jl^k),  omega(xi, eta) = (T(xi, eta) - T(eta, xi)) / i,
/// with T(xi, eta) = xi^* T eta, expressed back in the standard real basis.
/// Equals bryant_form(n) / 2 under the default convention.
MatrixXd omega_complex_oracle(const NTensor& n,
                              ComponentConvention convention = ComponentConvention::Direct);

}  // namespace nij::model
