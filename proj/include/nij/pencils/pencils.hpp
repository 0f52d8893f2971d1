#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nij/common/tolerances.hpp"
#include "nij/field/structure.hpp"
#include "nij/model/model.hpp"

/// Generators for block-structured examples in dimension 6 and pointwise
/// verifiers for pencils of pseudoholomorphic submanifolds.
namespace nij::pencils {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Largest degree accepted by the generators.
inline constexpr int kMaxDegree = 8;

/// Coordinates of the 2-plane V1 = span(e0, e1) and its complement V23.
inline const std::vector<int> kV1{0, 1};
inline const std::vector<int> kV23{2, 3, 4, 5};

/// diag(A1, A2, A3) with exact 2x2 blocks depending on all six variables.
field::ChartedStructure make_example1(std::uint64_t seed, int degree, const field::Box& box = field::Box::cube(6, -1, 1));

/// True iff the span of N(V_i, V_j) leaves V_i for every ordered pair i != j
/// of the coordinate 2-planes.
bool genericity_check_e1(const field::ChartedStructure& s, const VectorXd& x, const Tolerances& tol = {});

/// [[A, C], [0, D]] in the splitting V1 + V23. A depends on all variables; D is
/// a 4x4 structure in the V23 variables only (a direct sum of exact blocks
/// conjugated by a unipotent block matrix). C = 0 when triangular is false,
/// and C = A G - G D for a random block G otherwise, so J^2 = -I holds exactly.
field::ChartedStructure make_example2(std::uint64_t seed, int degree, bool triangular,
                                      const field::Box& box = field::Box::cube(6, -1, 1));

/// diag(A(x0, x1), D(x2..x5)): N lives on V23 and its kernel is V1.
field::ChartedStructure make_dg2_kernel_v1(std::uint64_t seed, int degree,
                                           const field::Box& box = field::Box::cube(6, -1, 1));

/// diag(A, D) with D constant (integrable) and A depending on the V23
/// variables: the image lies in V1 and the kernel is transversal to V1.
field::ChartedStructure make_dg2_kernel_transversal(std::uint64_t seed, int degree,
                                                    const field::Box& box = field::Box::cube(6, -1, 1));

/// A field of 4-planes, x -> m x 4 basis.
using PlaneField = std::function<MatrixXd(const VectorXd&)>;

/// Four plane fields V + span(v_a, J v_a) with fixed random vectors v_a in the
/// coordinates complementary to V.
std::vector<PlaneField> product_foliations(const field::ChartedStructure& s, const std::vector<int>& v_coords,
                                           std::uint64_t seed);

struct PencilOptions {
  int samples = 20;
  /// Shifted copies of each sample along V.
  int shifts = 3;
  std::uint64_t seed = 1;
};

struct PencilReport {
  bool v_invariant = false;
  bool webs_reconstructed = false;
  bool shift_symmetric = false;
  bool block_triangular = false;

  /// max |(I - P_V) J v| over V basis vectors and samples.
  double v_residual = 0.0;
  int web_failures = 0;
  /// max over samples and shifts of |J~(x) -+ J~(x + t)|.
  double shift_residual = 0.0;
  /// max over samples of |J[Q, Q] -+ J~| and |J[Q, V]|.
  double block_residual = 0.0;
  int samples = 0;

  bool pass() const { return v_invariant && webs_reconstructed && shift_symmetric && block_triangular; }
};

/// Pointwise pencil checks for the coordinate 2-plane field V and four 4-plane
/// fields containing it: V is J-invariant, the quotient planes determine a
/// quotient structure J~ through the web reconstruction, J~ is constant along
/// V, and J is block triangular with quotient block J~.
PencilReport verify_pencil(const field::ChartedStructure& s, const std::vector<int>& v_coords,
                           const std::vector<PlaneField>& phi, const PencilOptions& opt = {},
                           const Tolerances& tol = {});

struct DegeneracyConstraint {
  enum class Kind {
    /// Image of N inside the complex 2-plane spanned by `basis` (m x 4).
    ImageIn,
    /// N(v, .) = 0 for v in the complex line spanned by `basis` (m x 2).
    KernelContains,
  };
  Kind kind = Kind::ImageIn;
  MatrixXd basis;
};

struct AccumulationVerdict {
  /// Real dimension of the antilinear skew tensors meeting every constraint.
  int solution_dim = 0;
  bool forced_zero = false;
  /// Largest constraint violation of the given tensor.
  double tensor_residual = 0.0;
};

/// Solves the linear constraints on the 18-dimensional real space of
/// antilinear skew tensors attached to N's structure (n = 3). Throws Argument
/// when a constraint has the wrong shape, is not J-invariant, or is violated
/// by N itself.
AccumulationVerdict degeneracy_accumulation(const model::NTensor& n, const std::vector<DegeneracyConstraint>& constraints,
                                            const Tolerances& tol = {});

/// Real basis of the antilinear skew tensors attached to j, n = dim / 2.
std::vector<model::NTensor> antilinear_tensor_basis(const model::CSMatrix& j);

}  // namespace nij::pencils
