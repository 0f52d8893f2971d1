#include "nij/field/s6.hpp"

#include "nij/common/error.hpp"

namespace nij::field::s6 {

namespace {

// Dual number with a gradient in the six chart variables.
struct Dual {
  double v = 0.0;
  Eigen::Matrix<double, 6, 1> d = Eigen::Matrix<double, 6, 1>::Zero();

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Dual(double value, const Eigen::Matrix<double, 6, 1>& grad) : v(value), d(grad) {}

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.v * b.d + b.v * a.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
  }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
};

using Table = std::array<std::array<std::pair<int, int>, 7>, 7>;  // (index, sign), index -1 for zero

Table make_table() {
  Table t;
  for (auto& row : t) row.fill({-1, 0});
  for (const auto& tr : kTriples) {
    const int i = tr[0] - 1, j = tr[1] - 1, k = tr[2] - 1;
    for (const auto& [a, b, c] : {std::array<int, 3>{i, j, k}, {j, k, i}, {k, i, j}}) {
      t[a][b] = {c, 1};
      t[b][a] = {c, -1};
    }
  }
  return t;
}

const Table& table() {
  static const Table t = make_table();
  return t;
}

template <typename T>
using Mat = std::array<std::array<T, 6>, 6>;

template <typename T>
Mat<T> structure_t(const std::array<T, 6>& y) {
  T r2(0.0);
  for (const T& c : y) r2 += c * c;
  const T den = T(1.0) + r2;
  std::array<T, 7> p;
  for (int i = 0; i < 6; ++i) p[i] = T(2.0) * y[i] / den;
  p[6] = (r2 - T(1.0)) / den;
  // R = D sigma (1 + r^2) / 2: R_ij = delta_ij - 2 y_i y_j / (1 + r^2), R_6j = 2 y_j / (1 + r^2).
  std::array<std::array<T, 6>, 7> rr;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) rr[i][j] = (i == j ? T(1.0) : T(0.0)) - T(2.0) * y[i] * y[j] / den;
  for (int j = 0; j < 6; ++j) rr[6][j] = T(2.0) * y[j] / den;
  // C R: column j is p x (R e_j).
  std::array<std::array<T, 6>, 7> cr;
  for (auto& row : cr) row.fill(T(0.0));
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) {
      const auto [k, s] = table()[a][b];
      if (k < 0) continue;
      const T pa = T(static_cast<double>(s)) * p[a];
      for (int j = 0; j < 6; ++j) cr[k][j] += pa * rr[b][j];
    }
  Mat<T> out;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      T acc(0.0);
      for (int k = 0; k < 7; ++k) acc += rr[k][i] * cr[k][j];
      out[i][j] = acc;
    }
  return out;
}

void check_point(const VectorXd& y) {
  if (y.size() != 6) throw Error(ErrorKind::Dimension, "chart points of S^6 have 6 coordinates");
}

}  // namespace

VectorXd cross(const VectorXd& a, const VectorXd& b) {
  if (a.size() != 7 || b.size() != 7) throw Error(ErrorKind::Dimension, "cross product needs vectors in R^7");
  VectorXd out = VectorXd::Zero(7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const auto [k, s] = table()[i][j];
      if (k >= 0) out(k) += s * a(i) * b(j);
    }
  return out;
}

VectorXd sphere_point(const VectorXd& y) {
  check_point(y);
  const double r2 = y.squaredNorm();
  VectorXd p(7);
  p.head(6) = 2.0 * y / (1.0 + r2);
  p(6) = (r2 - 1.0) / (1.0 + r2);
  return p;
}

MatrixXd structure(const VectorXd& y) {
  check_point(y);
  std::array<double, 6> a;
  for (int i = 0; i < 6; ++i) a[i] = y(i);
  const Mat<double> j = structure_t(a);
  MatrixXd out(6, 6);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) out(r, c) = j[r][c];
  return out;
}

std::vector<MatrixXd> derivative(const VectorXd& y) {
  check_point(y);
  std::array<Dual, 6> a;
  for (int i = 0; i < 6; ++i) a[i] = Dual(y(i), Eigen::Matrix<double, 6, 1>::Unit(i));
  const Mat<Dual> j = structure_t(a);
  std::vector<MatrixXd> out(6, MatrixXd(6, 6));
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      for (int v = 0; v < 6; ++v) out[v](r, c) = j[r][c].d(v);
  return out;
}

model::NTensor nijenhuis(const VectorXd& y, const Tolerances& tol) {
  return nijenhuis_from_jet(model::CSMatrix(structure(y), tol.alg), derivative(y));
}

double grid_residual(const Box& box, int points_per_axis) {
  if (box.dim() != 6) throw Error(ErrorKind::Dimension, "the S^6 chart box is 6-dimensional");
  double worst = 0.0;
  for (const VectorXd& y : grid_points(box, points_per_axis)) {
    const MatrixXd j = structure(y);
    worst = std::max(worst, (j * j + MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace nij::field::s6
