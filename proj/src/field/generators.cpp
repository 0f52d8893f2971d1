#include "nij/field/generators.hpp"

#include "nij/common/error.hpp"

namespace nij::field {

PolyExpr random_polynomial(int num_vars, int degree, double scale, Rng& rng, const std::vector<bool>& uses) {
  PolyExpr out(num_vars);
  for (const auto& e : monomials(num_vars, degree)) {
    bool ok = true;
    for (int a = 0; a < num_vars && !uses.empty(); ++a)
      if (e[a] > 0 && !uses[a]) ok = false;
    const double c = scale * rng.normal();
    if (ok) out += PolyExpr(num_vars, {{c, e}});
  }
  return out;
}

PolyMatrix complex_block(const PolyExpr& r, const PolyExpr& p) {
  const int nv = r.num_vars();
  const PolyExpr one = PolyExpr::constant(nv, 1.0);
  const PolyExpr b = one + r * r;
  const PolyExpr a = r + p * b;
  const PolyExpr c = -(one + 2.0 * (p * r) + p * p * b);
  return {{a, c}, {b, -a}};
}

PolyMatrix random_complex_block(int num_vars, int degree, Rng& rng, const std::vector<bool>& uses) {
  if (degree < 2) {
    // Constant block: r, p constants.
    return complex_block(PolyExpr::constant(num_vars, 0.5 * rng.normal()), PolyExpr::constant(num_vars, 0.5 * rng.normal()));
  }
  const int dp = degree / 2 - 1;
  const PolyExpr r = random_polynomial(num_vars, 1, 0.4, rng, uses);
  const PolyExpr p = random_polynomial(num_vars, dp, 0.4, rng, uses);
  return complex_block(r, p);
}

PolyMatrix block_diagonal(const std::vector<PolyMatrix>& blocks, int num_vars) {
  int m = 0;
  for (const auto& b : blocks) m += static_cast<int>(b.size());
  PolyMatrix out(m, std::vector<PolyExpr>(m, PolyExpr(num_vars)));
  int off = 0;
  for (const auto& b : blocks) {
    const int k = static_cast<int>(b.size());
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) out[off + i][off + j] = b[i][j];
    off += k;
  }
  return out;
}

PolyMatrix conjugate(const PolyMatrix& j, const Eigen::MatrixXd& p) {
  const int nv = j.empty() ? 0 : j[0][0].num_vars();
  return multiply(multiply(constant_matrix(p, nv), j), constant_matrix(p.inverse(), nv));
}

ChartedStructure random_polynomial_structure(int dim, int degree, std::uint64_t seed, const Box& box,
                                             const Tolerances& tol) {
  if (dim < 2 || dim % 2 != 0) throw Error(ErrorKind::Dimension, "structure dimension must be even");
  Rng rng(seed);
  std::vector<PolyMatrix> blocks;
  for (int b = 0; b < dim / 2; ++b) blocks.push_back(random_complex_block(dim, degree, rng));
  Eigen::MatrixXd p;
  for (;;) {
    p = Eigen::MatrixXd::Identity(dim, dim) + 0.3 * rng.normal_matrix(dim, dim);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p);
    if (svd.singularValues()(dim - 1) > 0.0 && svd.singularValues()(0) / svd.singularValues()(dim - 1) < 4.0) break;
  }
  return ChartedStructure(box, conjugate(block_diagonal(blocks, dim), p), tol);
}

ChartedStructure constant_structure(const Eigen::MatrixXd& j, const Box& box, const Tolerances& tol) {
  return ChartedStructure(box, constant_matrix(j, box.dim()), tol);
}

}  // namespace nij::field
