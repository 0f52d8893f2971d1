#include "nij/field/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <map>
#include <sstream>

#include "nij/common/error.hpp"

namespace nij::field {

PolyExpr::PolyExpr(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 0) throw Error(ErrorKind::Argument, "PolyExpr: negative variable count");
}

PolyExpr::PolyExpr(int num_vars, const std::vector<Term>& terms) : PolyExpr(num_vars) {
  for (const Term& t : terms) {
    if (static_cast<int>(t.powers.size()) != num_vars)
      throw Error(ErrorKind::Dimension, "PolyExpr: term has " + std::to_string(t.powers.size()) +
                                            " exponents, expected " + std::to_string(num_vars));
    for (int p : t.powers)
      if (p < 0) throw Error(ErrorKind::Argument, "PolyExpr: negative exponent");
    add_term(t.powers, t.coef);
  }
}

PolyExpr PolyExpr::constant(int num_vars, double c) {
  PolyExpr p(num_vars);
  p.add_term(Exponents(num_vars, 0), c);
  return p;
}

PolyExpr PolyExpr::variable(int num_vars, int index) {
  if (index < 0 || index >= num_vars) throw Error(ErrorKind::Argument, "PolyExpr::variable: index out of range");
  Exponents e(num_vars, 0);
  e[index] = 1;
  PolyExpr p(num_vars);
  p.add_term(e, 1.0);
  return p;
}

void PolyExpr::add_term(const Exponents& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

int PolyExpr::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

std::vector<PolyExpr::Term> PolyExpr::terms() const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& [e, c] : terms_) out.push_back({c, e});
  return out;
}

double PolyExpr::eval(const Eigen::VectorXd& x) const {
  if (x.size() != num_vars_) throw Error(ErrorKind::Dimension, "PolyExpr::eval: point has wrong dimension");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double v = c;
    for (int i = 0; i < num_vars_; ++i)
      for (int k = 0; k < e[i]; ++k) v *= x(i);
    sum += v;
  }
  return sum;
}

PolyExpr PolyExpr::derivative(int var) const {
  if (var < 0 || var >= num_vars_) throw Error(ErrorKind::Argument, "PolyExpr::derivative: index out of range");
  PolyExpr d(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents de = e;
    de[var] -= 1;
    d.add_term(de, c * e[var]);
  }
  return d;
}

bool PolyExpr::depends_on(int var) const {
  return std::any_of(terms_.begin(), terms_.end(), [var](const auto& t) { return t.first[var] > 0; });
}

PolyExpr PolyExpr::compose(const std::vector<PolyExpr>& subs) const {
  if (static_cast<int>(subs.size()) != num_vars_) throw Error(ErrorKind::Dimension, "PolyExpr::compose: arity mismatch");
  const int out_vars = subs.empty() ? 0 : subs.front().num_vars();
  for (const PolyExpr& s : subs)
    if (s.num_vars() != out_vars) throw Error(ErrorKind::Dimension, "PolyExpr::compose: inconsistent substitutions");

  // Cache powers of each substitution.
  std::vector<std::vector<PolyExpr>> powers(num_vars_);
  for (int i = 0; i < num_vars_; ++i) powers[i].push_back(PolyExpr::constant(out_vars, 1.0));
  PolyExpr result(out_vars);
  for (const auto& [e, c] : terms_) {
    PolyExpr term = PolyExpr::constant(out_vars, c);
    for (int i = 0; i < num_vars_; ++i) {
      while (static_cast<int>(powers[i].size()) <= e[i]) powers[i].push_back(powers[i].back() * subs[i]);
      if (e[i] > 0) term = term * powers[i][e[i]];
    }
    result += term;
  }
  return result;
}

PolyExpr PolyExpr::pruned(double threshold) const {
  PolyExpr out(num_vars_);
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > threshold) out.terms_.emplace(e, c);
  return out;
}

PolyExpr& PolyExpr::operator+=(const PolyExpr& other) {
  if (other.num_vars_ != num_vars_) throw Error(ErrorKind::Dimension, "PolyExpr: variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

PolyExpr& PolyExpr::operator-=(const PolyExpr& other) {
  if (other.num_vars_ != num_vars_) throw Error(ErrorKind::Dimension, "PolyExpr: variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

PolyExpr& PolyExpr::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

PolyExpr operator*(const PolyExpr& a, const PolyExpr& b) {
  if (a.num_vars_ != b.num_vars_) throw Error(ErrorKind::Dimension, "PolyExpr: variable count mismatch");
  PolyExpr out(a.num_vars_);
  PolyExpr::Exponents e(a.num_vars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.num_vars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

std::string PolyExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int i = 0; i < num_vars_; ++i) {
      if (e[i] == 0) continue;
      os << "*x" << (i + 1);
      if (e[i] > 1) os << '^' << e[i];
    }
  }
  return os.str();
}

Eigen::MatrixXd eval(const PolyMatrix& m, const Eigen::VectorXd& x) {
  const auto rows = static_cast<Eigen::Index>(m.size());
  const auto cols = rows ? static_cast<Eigen::Index>(m.front().size()) : 0;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = m[r][c].eval(x);
  return out;
}

PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b) {
  const std::size_t rows = a.size();
  const std::size_t inner = b.size();
  if (rows == 0 || inner == 0 || a.front().size() != inner) throw Error(ErrorKind::Dimension, "PolyMatrix multiply: shape mismatch");
  const std::size_t cols = b.front().size();
  const int nv = a.front().front().num_vars();
  PolyMatrix out(rows, std::vector<PolyExpr>(cols, PolyExpr(nv)));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t k = 0; k < inner; ++k) {
        if (a[r][k].is_zero() || b[k][c].is_zero()) continue;
        out[r][c] += a[r][k] * b[k][c];
      }
  return out;
}

PolyMatrix identity(int size, int num_vars) {
  PolyMatrix out(size, std::vector<PolyExpr>(size, PolyExpr(num_vars)));
  for (int i = 0; i < size; ++i) out[i][i] = PolyExpr::constant(num_vars, 1.0);
  return out;
}

PolyMatrix constant_matrix(const Eigen::MatrixXd& m, int num_vars) {
  PolyMatrix out(m.rows(), std::vector<PolyExpr>(m.cols(), PolyExpr(num_vars)));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = PolyExpr::constant(num_vars, m(r, c));
  return out;
}

int degree(const PolyMatrix& m) {
  int d = 0;
  for (const auto& row : m)
    for (const auto& p : row) d = std::max(d, p.degree());
  return d;
}

std::vector<PolyExpr::Exponents> monomials(int num_vars, int degree) {
  std::vector<PolyExpr::Exponents> out;
  PolyExpr::Exponents e(num_vars, 0);
  for (int total = 0; total <= degree; ++total) {
    // Enumerate compositions of `total` into num_vars parts in lexicographic order.
    std::vector<PolyExpr::Exponents> level;
    auto rec = [&](auto&& self, int var, int remaining) -> void {
      if (var == num_vars - 1) {
        e[var] = remaining;
        level.push_back(e);
        return;
      }
      for (int k = remaining; k >= 0; --k) {
        e[var] = k;
        self(self, var + 1, remaining - k);
      }
    };
    if (num_vars == 0) {
      if (total == 0) out.emplace_back();
      continue;
    }
    rec(rec, 0, total);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

CompiledPolyMatrix::CompiledPolyMatrix(const PolyMatrix& m) {
  rows_ = static_cast<int>(m.size());
  cols_ = rows_ ? static_cast<int>(m[0].size()) : 0;
  num_vars_ = rows_ && cols_ ? m[0][0].num_vars() : 0;
  std::map<PolyExpr::Exponents, int> index;
  for (const auto& row : m)
    for (const auto& p : row)
      for (const auto& [e, c] : p.coefficients()) {
        if (index.emplace(e, 0).second) monomials_.push_back(e);
        for (int k : e) max_power_ = std::max(max_power_, k);
      }
  for (std::size_t q = 0; q < monomials_.size(); ++q) index[monomials_[q]] = static_cast<int>(q);
  coefs_ = Eigen::MatrixXd::Zero(rows_ * cols_, static_cast<Eigen::Index>(monomials_.size()));
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      for (const auto& [e, v] : m[r][c].coefficients()) coefs_(r * cols_ + c, index.at(e)) = v;
}

Eigen::MatrixXd CompiledPolyMatrix::eval(const Eigen::VectorXd& x) const {
  if (x.size() != num_vars_) throw Error(ErrorKind::Dimension, "CompiledPolyMatrix::eval: point has wrong dimension");
  Eigen::MatrixXd powers(num_vars_, max_power_ + 1);
  for (int i = 0; i < num_vars_; ++i) {
    powers(i, 0) = 1.0;
    for (int k = 1; k <= max_power_; ++k) powers(i, k) = powers(i, k - 1) * x(i);
  }
  Eigen::VectorXd values(static_cast<Eigen::Index>(monomials_.size()));
  for (std::size_t q = 0; q < monomials_.size(); ++q) {
    double v = 1.0;
    for (int i = 0; i < num_vars_; ++i)
      if (monomials_[q][i]) v *= powers(i, monomials_[q][i]);
    values(static_cast<Eigen::Index>(q)) = v;
  }
  const Eigen::VectorXd flat = coefs_ * values;
  Eigen::MatrixXd out(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out(r, c) = flat(r * cols_ + c);
  return out;
}

}  // namespace nij::field
