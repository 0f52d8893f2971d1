#include "nij/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"

namespace nij::model {

namespace {

void require_even_square(const MatrixXd& j) {
  if (j.rows() != j.cols()) throw Error(ErrorKind::Dimension, "complex structure matrix must be square");
  if (j.rows() == 0 || j.rows() % 2 != 0)
    throw Error(ErrorKind::Dimension, "complex structure matrix must have even dimension, got " +
                                          std::to_string(j.rows()));
}

MatrixXd pair_columns(const NTensor& n) {
  const int m = n.dim();
  MatrixXd cols(m, m * (m - 1) / 2);
  int c = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) cols.col(c++) = n.pair(i, j);
  return cols;
}

}  // namespace

bool check_acs(const MatrixXd& j, double tol) {
  require_even_square(j);
  const MatrixXd r = j * j + MatrixXd::Identity(j.rows(), j.cols());
  return linalg::max_abs(r) <= tol;
}

MatrixXd standard_structure(int n) {
  if (n < 1) throw Error(ErrorKind::Dimension, "standard_structure: n must be positive");
  MatrixXd j = MatrixXd::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    j(2 * a, 2 * a + 1) = -1.0;
    j(2 * a + 1, 2 * a) = 1.0;
  }
  return j;
}

CSMatrix::CSMatrix(MatrixXd j, double tol) : j_(std::move(j)) {
  if (!check_acs(j_, tol)) {
    const double r = linalg::max_abs(j_ * j_ + MatrixXd::Identity(j_.rows(), j_.cols()));
    throw Error(ErrorKind::InvalidStructure, "J^2 + I has residual " + std::to_string(r));
  }
}

CSMatrix random_structure(int n, Rng& rng) {
  const int m = 2 * n;
  for (;;) {
    const MatrixXd p = rng.normal_matrix(m, m);
    Eigen::JacobiSVD<MatrixXd> svd(p);
    const auto& s = svd.singularValues();
    if (s(m - 1) <= 0.0 || s(0) / s(m - 1) > 20.0) continue;
    MatrixXd j = p * standard_structure(n) * p.inverse();
    // Round-off of the conjugation stays far below the default check.
    return CSMatrix(std::move(j));
  }
}

NTensor::NTensor(CSMatrix j) : j_(std::move(j)) {
  const auto m = static_cast<std::size_t>(dim());
  data_.assign(m * m * m, 0.0);
}

NTensor::NTensor(CSMatrix j, const std::vector<double>& full) : NTensor(std::move(j)) {
  const int m = dim();
  if (full.size() != data_.size())
    throw Error(ErrorKind::Dimension, "tensor array must hold m^3 = " + std::to_string(data_.size()) + " values");
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int jj = i + 1; jj < m; ++jj) {
        const double v = full[index(k, i, jj)];
        data_[index(k, i, jj)] = v;
        data_[index(k, jj, i)] = -v;
      }
}

NTensor NTensor::from_pairs(CSMatrix j, const std::function<VectorXd(int, int)>& pair_value) {
  NTensor t(std::move(j));
  const int m = t.dim();
  for (int i = 0; i < m; ++i)
    for (int jj = i + 1; jj < m; ++jj) {
      const VectorXd v = pair_value(i, jj);
      if (v.size() != m) throw Error(ErrorKind::Dimension, "pair value has wrong length");
      for (int k = 0; k < m; ++k) {
        t.data_[t.index(k, i, jj)] = v(k);
        t.data_[t.index(k, jj, i)] = -v(k);
      }
    }
  return t;
}

VectorXd NTensor::apply(const VectorXd& xi, const VectorXd& eta) const {
  const int m = dim();
  VectorXd out = VectorXd::Zero(m);
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      if (xi(i) == 0.0) continue;
      double row = 0.0;
      for (int jj = 0; jj < m; ++jj) row += data_[index(k, i, jj)] * eta(jj);
      acc += xi(i) * row;
    }
    out(k) = acc;
  }
  return out;
}

VectorXd NTensor::pair(int i, int j) const {
  const int m = dim();
  VectorXd out(m);
  for (int k = 0; k < m; ++k) out(k) = data_[index(k, i, j)];
  return out;
}

MatrixXd NTensor::left(const VectorXd& xi) const {
  const int m = dim();
  MatrixXd a = MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      if (xi(i) == 0.0) continue;
      for (int l = 0; l < m; ++l) a(k, l) += xi(i) * data_[index(k, i, l)];
    }
  return a;
}

double NTensor::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

NTensor NTensor::transformed(const MatrixXd& p) const {
  const MatrixXd pinv = p.inverse();
  CSMatrix jp(p * j_.matrix() * pinv, std::max(Tolerances{}.alg, 1e-12 * p.norm() * pinv.norm()));
  return from_pairs(std::move(jp), [&](int i, int j) -> VectorXd {
    return p * apply(pinv.col(i), pinv.col(j));
  });
}

NTensor NTensor::perturbed(int k, int i, int j, double delta) const {
  if (i == j) throw Error(ErrorKind::Argument, "perturbed: diagonal entries are fixed at zero");
  NTensor out = *this;
  out.data_[index(k, i, j)] += delta;
  out.data_[index(k, j, i)] -= delta;
  return out;
}

double IdentityResiduals::max() const { return std::max({skew, antilinear_left, antilinear_right}); }

IdentityResiduals identity_residuals(const NTensor& n) {
  IdentityResiduals r;
  const int m = n.dim();
  const MatrixXd& j = n.structure().matrix();
  for (int k = 0; k < m; ++k)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) r.skew = std::max(r.skew, std::abs(n(k, a, b) + n(k, b, a)));
  for (int a = 0; a < m; ++a) {
    const VectorXd ea = VectorXd::Unit(m, a);
    for (int b = 0; b < m; ++b) {
      const VectorXd eb = VectorXd::Unit(m, b);
      const VectorXd jn = j * n.pair(a, b);
      r.antilinear_left = std::max(r.antilinear_left, (n.apply(j * ea, eb) + jn).cwiseAbs().maxCoeff());
      r.antilinear_right = std::max(r.antilinear_right, (n.apply(ea, j * eb) + jn).cwiseAbs().maxCoeff());
    }
  }
  return r;
}

bool n_identities_check(const NTensor& n, double tol) {
  return check_acs(n.structure().matrix(), tol) && identity_residuals(n).max() <= tol;
}

ComplexSubspace::ComplexSubspace(MatrixXd orthonormal_basis, CSMatrix j)
    : basis_(std::move(orthonormal_basis)), j_(std::move(j)) {
  if (basis_.rows() != j_.dim()) throw Error(ErrorKind::Dimension, "subspace basis does not match structure");
}

ComplexSubspace ComplexSubspace::span(const MatrixXd& spanning, const CSMatrix& j, const Tolerances& tol) {
  return ComplexSubspace(linalg::column_space(spanning, tol.rank, tol.zero), j);
}

double ComplexSubspace::invariance_residual() const {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < basis_.cols(); ++c)
    worst = std::max(worst, linalg::containment_residual(j_.matrix() * basis_.col(c), basis_));
  return worst;
}

bool ComplexSubspace::contains(const VectorXd& v, double tol) const {
  return linalg::containment_residual(v, basis_) <= tol * std::max(1.0, v.norm());
}

ComplexSubspace image(const NTensor& n, const Tolerances& tol) {
  return ComplexSubspace::span(pair_columns(n), n.structure(), tol);
}

ComplexSubspace kernel(const NTensor& n, const Tolerances& tol) {
  const int m = n.dim();
  // Row (k, j) of the stack is v -> N(v, e_j)^k.
  MatrixXd stack(m * m, m);
  for (int k = 0; k < m; ++k)
    for (int jj = 0; jj < m; ++jj)
      for (int i = 0; i < m; ++i) stack(k * m + jj, i) = n(k, i, jj);
  return ComplexSubspace(linalg::null_space(stack, tol.rank, tol.zero), n.structure());
}

std::string DegeneracyClass::name() const {
  switch (tag) {
    case DegeneracyTag::Zero: return "ZERO";
    case DegeneracyTag::NDG: return "NDG";
    case DegeneracyTag::DG1: return "DG1";
    case DegeneracyTag::DG2: return "DG2";
    case DegeneracyTag::Rank: return "RANK(" + std::to_string(complex_rank) + ")";
  }
  return "?";
}

DegeneracyClass degeneracy_class(const NTensor& n, const Tolerances& tol) {
  const MatrixXd cols = pair_columns(n);
  const linalg::RankInfo info = linalg::numerical_rank(cols, tol.rank, tol.zero);
  ComplexSubspace img = ComplexSubspace::span(cols, n.structure(), tol);
  ComplexSubspace ker = kernel(n, tol);

  DegeneracyTag tag = DegeneracyTag::Rank;
  const int complex_rank = (info.rank + 1) / 2;
  if (info.rank == 0) {
    tag = DegeneracyTag::Zero;
  } else if (n.dim() == 6) {
    tag = complex_rank == 3 ? DegeneracyTag::NDG : complex_rank == 2 ? DegeneracyTag::DG1 : DegeneracyTag::DG2;
  }
  std::optional<ComplexSubspace> kernel_opt;
  if (ker.real_dim() > 0) kernel_opt = std::move(ker);
  return DegeneracyClass{.tag = tag,
                         .complex_rank = complex_rank,
                         .image = std::move(img),
                         .kernel = std::move(kernel_opt),
                         .unreliable = info.unreliable || (info.rank % 2 != 0)};
}

MatrixXd bryant_form(const NTensor& n) {
  const int m = n.dim();
  const MatrixXd& j = n.structure().matrix();
  std::vector<MatrixXd> a(m);
  for (int i = 0; i < m; ++i) a[i] = n.left(VectorXd::Unit(m, i));
  MatrixXd omega = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int k = i + 1; k < m; ++k) {
      const double v = (a[i] * j * a[k]).trace() - (a[k] * j * a[i]).trace();
      omega(i, k) = v;
      omega(k, i) = -v;
    }
  return omega;
}

MatrixXd quadric_form(const NTensor& n) {
  const int m = n.dim();
  std::vector<MatrixXd> a(m);
  for (int i = 0; i < m; ++i) a[i] = n.left(VectorXd::Unit(m, i));
  MatrixXd q(m, m);
  for (int i = 0; i < m; ++i)
    for (int k = i; k < m; ++k) {
      const double v = (a[i] * a[k]).trace() + (a[k] * a[i]).trace();
      q(i, k) = v;
      q(k, i) = v;
    }
  return q;
}

OmegaDegeneracy omega_degenerate(const MatrixXd& omega, const Tolerances& tol) {
  const linalg::RankInfo info = linalg::numerical_rank(omega, tol.rank, tol.zero);
  return OmegaDegeneracy{.degenerate = info.rank < omega.rows(),
                         .kernel = linalg::null_space(omega, tol.rank, tol.zero),
                         .unreliable = info.unreliable};
}

MatrixXd adapted_frame(const CSMatrix& j, double rel_tol) {
  const int m = j.dim();
  MatrixXd frame(m, 0);
  MatrixXd ortho(m, 0);
  for (int s = 0; s < m && frame.cols() < m; ++s) {
    const VectorXd e = VectorXd::Unit(m, s);
    if (ortho.cols() > 0 && linalg::containment_residual(e, ortho) <= std::sqrt(rel_tol)) continue;
    frame.conservativeResize(m, frame.cols() + 2);
    frame.col(frame.cols() - 2) = e;
    frame.col(frame.cols() - 1) = j.matrix() * e;
    ortho = linalg::column_space(frame, rel_tol, 0.0);
  }
  if (frame.cols() != m) throw Error(ErrorKind::DegenerateInput, "adapted_frame: could not complete the frame");
  return frame;
}

VectorXcd to_complex(const MatrixXd& frame, const VectorXd& v) {
  const VectorXd c = frame.partialPivLu().solve(v);
  const Eigen::Index n = c.size() / 2;
  VectorXcd z(n);
  for (Eigen::Index a = 0; a < n; ++a) z(a) = {c(2 * a), c(2 * a + 1)};
  return z;
}

VectorXd to_real(const MatrixXd& frame, const VectorXcd& z) {
  VectorXd c(2 * z.size());
  for (Eigen::Index a = 0; a < z.size(); ++a) {
    c(2 * a) = z(a).real();
    c(2 * a + 1) = z(a).imag();
  }
  return frame * c;
}

ComplexComponents complex_components(const NTensor& n, const MatrixXd& frame, ComponentConvention convention) {
  const int nc = n.dim() / 2;
  ComplexComponents comps(nc, MatrixXcd::Zero(nc, nc));
  for (int a = 0; a < nc; ++a)
    for (int b = 0; b < nc; ++b) {
      const VectorXcd w = to_complex(frame, n.apply(frame.col(2 * a), frame.col(2 * b)));
      for (int c = 0; c < nc; ++c)
        comps[c](a, b) = convention == ComponentConvention::Direct ? w(c) : std::conj(w(c));
    }
  return comps;
}

NTensor from_complex_components(const CSMatrix& j, const MatrixXd& frame, const ComplexComponents& comps) {
  const int m = j.dim();
  const int nc = m / 2;
  std::vector<VectorXcd> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = to_complex(frame, VectorXd::Unit(m, i));
  return NTensor::from_pairs(j, [&](int i, int k) -> VectorXd {
    VectorXcd w = VectorXcd::Zero(nc);
    for (int c = 0; c < nc; ++c)
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) w(c) += std::conj(basis[i](a)) * std::conj(basis[k](b)) * comps[c](a, b);
    return to_real(frame, w);
  });
}

NTensor random_tensor(const CSMatrix& j, Rng& rng) {
  const int nc = j.n();
  ComplexComponents comps(nc, MatrixXcd::Zero(nc, nc));
  for (int c = 0; c < nc; ++c)
    for (int a = 0; a < nc; ++a)
      for (int b = a + 1; b < nc; ++b) {
        const std::complex<double> v{rng.normal(), rng.normal()};
        comps[c](a, b) = v;
        comps[c](b, a) = -v;
      }
  return from_complex_components(j, adapted_frame(j), comps);
}

MatrixXd omega_complex_oracle(const NTensor& n, ComponentConvention convention) {
  const int m = n.dim();
  const int nc = m / 2;
  const MatrixXd frame = adapted_frame(n.structure());
  const ComplexComponents comps = complex_components(n, frame, convention);

  MatrixXcd t = MatrixXcd::Zero(nc, nc);
  for (int i = 0; i < nc; ++i)
    for (int jj = 0; jj < nc; ++jj)
      for (int k = 0; k < nc; ++k)
        for (int l = 0; l < nc; ++l) t(i, jj) += comps[l](i, k) * std::conj(comps[k](jj, l));

  MatrixXcd z(nc, m);
  for (int a = 0; a < m; ++a) {
    const VectorXcd za = to_complex(frame, VectorXd::Unit(m, a));
    z.col(a) = convention == ComponentConvention::Direct ? za : VectorXcd(za.conjugate());
  }
  const MatrixXcd x = z.adjoint() * t * z;
  const std::complex<double> i_unit{0.0, 1.0};
  return ((x - x.transpose()) / i_unit).real();
}

}  // namespace nij::model
