#pragma once

#include <cstdint>

#include "nij/common/random.hpp"
#include "nij/field/structure.hpp"

namespace nij::field {

/// Random polynomial in `num_vars` variables of total degree <= degree whose
/// coefficients are normal draws scaled by `scale`, restricted to the
/// variables flagged in `uses` (all variables when empty).
PolyExpr random_polynomial(int num_vars, int degree, double scale, Rng& rng, const std::vector<bool>& uses = {});

/// Exact 2x2 complex-structure block [[a, -(1+a^2)/b], [b, -a]] with
///   a = r + p (1 + r^2),  b = 1 + r^2,  c = -(1+a^2)/b = -1 - 2 p r - p^2 (1 + r^2),
/// which is U L R L^-1 U^-1 for the unipotent U = [[1,p],[0,1]], L = [[1,0],[r,1]].
/// b >= 1 everywhere, and J^2 = -I holds identically.
PolyMatrix complex_block(const PolyExpr& r, const PolyExpr& p);

/// Random exact block whose entries have degree <= degree (rounded down to
/// even), depending only on the variables flagged in `uses`.
PolyMatrix random_complex_block(int num_vars, int degree, Rng& rng, const std::vector<bool>& uses = {});

/// Block-diagonal assembly of square blocks.
PolyMatrix block_diagonal(const std::vector<PolyMatrix>& blocks, int num_vars);

/// P J P^-1 for a constant P.
PolyMatrix conjugate(const PolyMatrix& j, const Eigen::MatrixXd& p);

/// Random polynomial structure on the box: diagonal random_complex_blocks in
/// all variables, conjugated by a random well-conditioned constant matrix.
ChartedStructure random_polynomial_structure(int dim, int degree, std::uint64_t seed, const Box& box,
                                             const Tolerances& tol = {});

/// Constant structure P J0 P^-1 as a charted field.
ChartedStructure constant_structure(const Eigen::MatrixXd& j, const Box& box, const Tolerances& tol = {});

}  // namespace nij::field
