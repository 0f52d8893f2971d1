#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nij::field {

/// Sparse real polynomial in a fixed number of variables, stored as a map
/// from exponent tuples to nonzero coefficients.
class PolyExpr {
 public:
  using Exponents = std::vector<int>;

  struct Term {
    double coef;
    Exponents powers;
  };

  explicit PolyExpr(int num_vars = 0);
  /// Like terms are summed; zero coefficients are dropped.
  PolyExpr(int num_vars, const std::vector<Term>& terms);

  static PolyExpr constant(int num_vars, double c);
  static PolyExpr variable(int num_vars, int index);

  int num_vars() const { return num_vars_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  std::vector<Term> terms() const;
  const std::map<Exponents, double>& coefficients() const { return terms_; }

  double eval(const Eigen::VectorXd& x) const;
  PolyExpr derivative(int var) const;
  bool depends_on(int var) const;

  /// Substitutes subs[i] for variable i; all subs share one variable count.
  PolyExpr compose(const std::vector<PolyExpr>& subs) const;

  /// Drops terms with |coef| <= threshold.
  PolyExpr pruned(double threshold) const;

  PolyExpr& operator+=(const PolyExpr& other);
  PolyExpr& operator-=(const PolyExpr& other);
  PolyExpr& operator*=(double s);

  friend PolyExpr operator+(PolyExpr a, const PolyExpr& b) { return a += b; }
  friend PolyExpr operator-(PolyExpr a, const PolyExpr& b) { return a -= b; }
  friend PolyExpr operator*(PolyExpr a, double s) { return a *= s; }
  friend PolyExpr operator*(double s, PolyExpr a) { return a *= s; }
  friend PolyExpr operator-(PolyExpr a) { return a *= -1.0; }
  friend PolyExpr operator*(const PolyExpr& a, const PolyExpr& b);

  std::string to_string() const;

 private:
  void add_term(const Exponents& e, double c);

  int num_vars_;
  std::map<Exponents, double> terms_;
};

using PolyMatrix = std::vector<std::vector<PolyExpr>>;

/// Entrywise evaluation.
Eigen::MatrixXd eval(const PolyMatrix& m, const Eigen::VectorXd& x);
PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix identity(int size, int num_vars);
PolyMatrix constant_matrix(const Eigen::MatrixXd& m, int num_vars);
int degree(const PolyMatrix& m);

/// A polynomial matrix flattened to one shared monomial list and a dense
/// coefficient table, so every monomial is evaluated once per point.
class CompiledPolyMatrix {
 public:
  CompiledPolyMatrix() = default;
  explicit CompiledPolyMatrix(const PolyMatrix& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int num_vars_ = 0;
  int max_power_ = 0;
  std::vector<PolyExpr::Exponents> monomials_;
  // Row r * cols + c holds the coefficients of entry (r, c).
  Eigen::MatrixXd coefs_;
};

/// All exponent tuples of total degree <= degree, graded then lexicographic.
std::vector<PolyExpr::Exponents> monomials(int num_vars, int degree);

}  // namespace nij::field
