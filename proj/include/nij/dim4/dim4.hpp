#pragma once

#include <array>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "nij/common/tolerances.hpp"
#include "nij/common/vector_field.hpp"
#include "nij/field/structure.hpp"
#include "nij/model/model.hpp"

/// Invariants of almost complex structures in dimension 4.
namespace nij::dim4 {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct FrameOptions {
  /// Difference step as a fraction of the domain size.
  double step_factor = 1e-4;
  /// Fixed reference vector for the unit section of the characteristic
  /// distribution; when empty the first of e1..e4 with a projection of length
  /// at least 0.3 is used.
  std::optional<VectorXd> reference;
};

/// Image of N at x (complex dimension 1). Throws DegenerateInput when N = 0.
model::ComplexSubspace char_distribution(const field::ChartedStructure& s, const VectorXd& x,
                                         const Tolerances& tol = {});

/// Orthonormal 4x3 basis of span(char distribution, [u, J u]) at x, with u
/// the unit reference section. Throws NonGeneric with the rank when the
/// bracket stays inside the characteristic distribution.
MatrixXd derived_distribution(const field::ChartedStructure& s, const VectorXd& x, const Tolerances& tol = {},
                              const FrameOptions& opt = {});

struct Frame4 {
  VectorXd x;
  /// Columns xi1..xi4.
  MatrixXd xi;
  int sign = 1;
  /// N(u, [u, J u]) = w u in the complex line of u.
  std::complex<double> w;
  /// Complex rescaling factor of the unit section.
  std::complex<double> z;
  /// Index (0..3) of the reference basis vector, or -1 for a user reference.
  int reference_index = -1;

  double n_residual = 0.0;         // |N(xi1, xi3) - xi1| / |xi1|
  double bracket_residual = 0.0;   // |[xi1, xi2] - xi3| / |xi3| at a second step
  double j_residual = 0.0;         // |xi2 - J xi1| + |xi4 - J xi3|
  double pi2_residual = 0.0;       // distance of xi1 from the characteristic plane
  double pi3_residual = 0.0;       // distance of xi3 from the derived distribution
};

/// The canonical frame at x with the given sign (+1 or -1).
/// Throws NonGeneric when the derived distribution has rank < 3 or |w| is
/// below tol.rank, and DegenerateInput when N(x) = 0.
Frame4 canonical_frame(const field::ChartedStructure& s, const VectorXd& x, int sign = 1, const Tolerances& tol = {},
                       const FrameOptions& opt = {});

/// Pointwise frame fields: xi_k(y) evaluated near a base point, with the sign
/// of the square root kept continuous with the base value.
class FrameFields {
 public:
  /// xi1 and xi2 are the +1 fields times `sign`; xi3 and xi4 do not depend on
  /// it. With need_z = false only u and v are available.
  FrameFields(const field::ChartedStructure& s, const VectorXd& base, int sign, const Tolerances& tol,
              const FrameOptions& opt, bool need_z = true);

  VectorXd u(const VectorXd& y) const;
  VectorXd v(const VectorXd& y) const;
  std::complex<double> w(const VectorXd& y) const;
  VectorXd xi(int k, const VectorXd& y) const;
  /// The char_distribution at y spanned by one fixed pair value and its J-image.
  MatrixXd pi2(const VectorXd& y) const;
  VectorField field(int k) const;

  double step() const { return h_; }
  int reference_index() const { return ref_index_; }
  std::complex<double> z0() const { return z0_; }

 private:
  std::complex<double> z_at(const VectorXd& y) const;
  VectorXd xi_plus(int k, const VectorXd& y) const;

  const field::ChartedStructure& s_;
  Tolerances tol_;
  double h_;
  int pair_i_ = 0, pair_j_ = 1;
  VectorXd ref_;
  int ref_index_ = -1;
  int sign_ = 1;
  std::complex<double> z0_;
};

/// [xi_i, xi_j] = c_ij^k xi_k at x for the sign = +1 frame.
struct MaurerCartan {
  Frame4 frame;
  /// coefficients[p](k) for pairs p in the order (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
  std::array<Eigen::Vector4d, 6> coefficients;
  /// parity[p](k) = +1 or -1: the factor picked up under the sign flip.
  std::array<Eigen::Vector4i, 6> parity;
  static constexpr int reported = 24;
  /// c_12 = (0, 0, 1, 0), fixed by the construction and checked.
  static constexpr int pinned_verified = 4;
  /// The [xi_2, xi_4] row, expressible through the other brackets; cited, not checked.
  static constexpr int pinned_cited = 4;
  static constexpr int independent = reported - pinned_verified - pinned_cited;
};

/// Pair order used by MaurerCartan.
inline constexpr std::array<std::array<int, 2>, 6> kFramePairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

MaurerCartan maurer_cartan(const field::ChartedStructure& s, const VectorXd& x, const Tolerances& tol = {},
                           const FrameOptions& opt = {});

}  // namespace nij::dim4
