#include "nij/common/vector_field.hpp"

namespace nij {

Eigen::VectorXd directional_derivative(const VectorField& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                                       double h, Stencil stencil) {
  if (stencil == Stencil::Central3) return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
  return (-f(x + 2.0 * h * v) + 8.0 * f(x + h * v) - 8.0 * f(x - h * v) + f(x - 2.0 * h * v)) / (12.0 * h);
}

Eigen::MatrixXd jacobian_fd(const VectorField& f, const Eigen::VectorXd& x, double h, Stencil stencil) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd jac;
  for (Eigen::Index a = 0; a < n; ++a) {
    const Eigen::VectorXd col = directional_derivative(f, x, Eigen::VectorXd::Unit(n, a), h, stencil);
    if (a == 0) jac.resize(col.size(), n);
    jac.col(a) = col;
  }
  return jac;
}

Eigen::VectorXd lie_bracket_fd(const VectorField& x_field, const VectorField& y_field, const Eigen::VectorXd& x,
                               double h, Stencil stencil) {
  const Eigen::VectorXd xv = x_field(x);
  const Eigen::VectorXd yv = y_field(x);
  return directional_derivative(y_field, x, xv, h, stencil) - directional_derivative(x_field, x, yv, h, stencil);
}

}  // namespace nij
