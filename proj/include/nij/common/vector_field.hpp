#pragma once

#include <functional>

#include <Eigen/Dense>

namespace nij {

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

enum class Stencil {
  /// (f(x+h) - f(x-h)) / 2h
  Central3,
  /// (-f(x+2h) + 8 f(x+h) - 8 f(x-h) + f(x-2h)) / 12h
  Central5,
};

/// Finite-difference derivative of f at x along direction v.
Eigen::VectorXd directional_derivative(const VectorField& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                                       double h, Stencil stencil = Stencil::Central3);

/// Jacobian of f at x by coordinate differences; column a is d f / d x_a.
Eigen::MatrixXd jacobian_fd(const VectorField& f, const Eigen::VectorXd& x, double h,
                            Stencil stencil = Stencil::Central3);

/// [X, Y](x) = DY(x) X(x) - DX(x) Y(x) by directional differences.
Eigen::VectorXd lie_bracket_fd(const VectorField& x_field, const VectorField& y_field, const Eigen::VectorXd& x,
                               double h, Stencil stencil = Stencil::Central3);

}  // namespace nij
