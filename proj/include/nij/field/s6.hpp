#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "nij/field/structure.hpp"
#include "nij/model/model.hpp"

/// The G2-invariant almost complex structure of the round 6-sphere, in the
/// stereographic chart from the pole e7.
///
/// With imaginary octonions R^7 and cross product x, J_p v = p x v on T_p S^6.
/// The chart is sigma(y) = (2y, |y|^2 - 1) / (1 + |y|^2), y in R^6; sigma is
/// conformal, so J(y) = R^T C_sigma R with R = D sigma / |D sigma| and C_p the
/// matrix of v -> p x v.
namespace nij::field::s6 {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Fano-plane triples (1-based): e_i x e_j = e_k for each cyclic rotation.
inline constexpr std::array<std::array<int, 3>, 7> kTriples{
    {{1, 2, 3}, {1, 4, 5}, {1, 7, 6}, {2, 4, 6}, {2, 5, 7}, {3, 4, 7}, {3, 6, 5}}};

/// Cross product on R^7.
VectorXd cross(const VectorXd& a, const VectorXd& b);

/// sigma(y) in S^6.
VectorXd sphere_point(const VectorXd& y);

/// J(y), 6x6.
MatrixXd structure(const VectorXd& y);

/// d_a J(y) for a = 0..5 by forward-mode dual numbers.
std::vector<MatrixXd> derivative(const VectorXd& y);

/// Nijenhuis tensor at y from the exact jet.
model::NTensor nijenhuis(const VectorXd& y, const Tolerances& tol = {});

/// max |J^2 + I| over a k^6 grid of the box.
double grid_residual(const Box& box, int points_per_axis);

}  // namespace nij::field::s6
