#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nij/common/tolerances.hpp"
#include "nij/model/model.hpp"

/// Complex 2-planes of (R^6, J) as points of CP^2, real quadrics through
/// them, and the planes invariant under a Nijenhuis tensor.
namespace nij::quadrics {

using Eigen::MatrixXd;
using Eigen::Vector3cd;
using Eigen::Vector4d;
using Eigen::VectorXd;

/// Affine chart point of the annihilator line [alpha] of a complex 2-plane:
/// alpha(chart_index) = 1 and the other two complex entries, in increasing
/// index order, are stored as (re, im, re, im). Indices are 0-based and refer
/// to the complex coordinates of the adapted frame of J.
struct GrChartPoint {
  int chart_index = 0;
  Vector4d coords = Vector4d::Zero();
};

/// Homogeneous annihilator with alpha(chart_index) = 1.
Vector3cd homogeneous(const GrChartPoint& p);

/// Normalizes alpha in the given chart, or in the chart of its largest-modulus
/// entry. Throws Argument when the normalizing entry is below 1e-6 relative to
/// |alpha|.
GrChartPoint to_chart(const Vector3cd& alpha, std::optional<int> chart = std::nullopt);

/// Chart point of a complex 2-plane in R^6. Throws Argument for a subspace
/// that is not 4-dimensional or not J-invariant.
GrChartPoint plane_to_chart(const model::ComplexSubspace& w, std::optional<int> chart = std::nullopt,
                            const Tolerances& tol = {});

/// The complex 2-plane ker(alpha) as a J-invariant subspace of R^6.
model::ComplexSubspace chart_to_plane(const GrChartPoint& p, const model::CSMatrix& j);

/// Re-expresses points in the chart whose smallest normalizing modulus is
/// largest. Throws Argument when even that chart has a point within 1e-6 of
/// its hyperplane at infinity.
std::vector<GrChartPoint> common_chart(const std::vector<GrChartPoint>& points);

/// Inhomogeneous real quadratic polynomial on the chart R^4 with coefficients
/// of (1, x0..x3, x0x0, x0x1, x0x2, x0x3, x1x1, x1x2, x1x3, x2x2, x2x3, x3x3).
struct QuadricModel {
  std::array<double, 15> coeffs{};
  /// max |q(p)| over the fitted points (coefficients have unit norm).
  double residual = 0.0;

  double eval(const Vector4d& x) const;
};

Eigen::Matrix<double, 1, 15> veronese(const Vector4d& x);

/// Rows veronese(p.coords). Throws Argument for mixed charts or no points.
MatrixXd design_matrix(const std::vector<GrChartPoint>& points);

/// Dimension of the space of quadrics through the points (15 - rank).
int quadric_nullity(const std::vector<GrChartPoint>& points, const Tolerances& tol = {});

/// A quadric through all points when the design matrix has rank < 15.
std::optional<QuadricModel> quadric_through(const std::vector<GrChartPoint>& points, const Tolerances& tol = {});

/// True iff the design matrix has full rank 15. Throws Argument for fewer
/// than 15 points.
bool quadratically_nondegenerate(const std::vector<GrChartPoint>& points, const Tolerances& tol = {});

/// max |N(b_i, b_j) projected off W| over an orthonormal basis of W.
double plane_invariance_residual(const model::NTensor& n, const model::ComplexSubspace& w);

/// True iff N(W, W) lies in W within tol.alg * max(1, |N|).
bool is_invariant_plane(const model::NTensor& n, const model::ComplexSubspace& w, const Tolerances& tol = {});

struct SamplerOptions {
  int trials = 200;
  std::uint64_t seed = 1;
  int max_iterations = 60;
  /// Hits closer than this in a common chart are merged.
  double dedupe = 1e-6;
};

/// Invariant planes found by damped Gauss-Newton on the two real equations
/// alpha(N(w1, w2)) = 0 from random chart starts. Returned points are in their
/// best chart. Throws Argument when N = 0.
std::vector<GrChartPoint> invariant_plane_sampler(const model::NTensor& n, const SamplerOptions& opt = {},
                                                  const Tolerances& tol = {});

enum class Theorem4Verdict { Contradiction, IntegrableCertified, Inconclusive };

std::string verdict_name(Theorem4Verdict v);

/// Quadratically nondegenerate invariant planes force N = 0: a nondegenerate
/// set with |N| > tol.alg is reported as a contradiction. Fewer than 15 planes
/// are inconclusive. Throws Argument when a plane is not invariant.
Theorem4Verdict theorem4_certificate(const model::NTensor& n, const std::vector<model::ComplexSubspace>& planes,
                                     const Tolerances& tol = {});

}  // namespace nij::quadrics
