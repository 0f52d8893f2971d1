#include "nij/dim4/dim4.hpp"

#include <cmath>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"

namespace nij::dim4 {

namespace {

void require_dim4(const field::ChartedStructure& s) {
  if (s.dim() != 4) throw Error(ErrorKind::Dimension, "dimension-4 structure required");
}

model::NTensor tensor_at(const field::ChartedStructure& s, const VectorXd& y) {
  return field::nijenhuis_from_jet(model::CSMatrix(s.eval_raw(y), 1e-6), s.derivative_raw(y));
}

}  // namespace

model::ComplexSubspace char_distribution(const field::ChartedStructure& s, const VectorXd& x, const Tolerances& tol) {
  require_dim4(s);
  const model::NTensor n = field::nijenhuis_at(s, x, tol);
  if (n.max_abs() <= tol.zero) throw Error(ErrorKind::DegenerateInput, "N vanishes at the point");
  return model::image(n, tol);
}

FrameFields::FrameFields(const field::ChartedStructure& s, const VectorXd& base, int sign, const Tolerances& tol,
                         const FrameOptions& opt, bool need_z)
    : s_(s), tol_(tol), h_(opt.step_factor * s.domain().size()), sign_(sign) {
  require_dim4(s);
  if (sign != 1 && sign != -1) throw Error(ErrorKind::Argument, "frame sign must be +1 or -1");
  if (!s.domain().contains(base)) throw Error(ErrorKind::Domain, "base point lies outside the structure domain");
  const model::NTensor n = field::nijenhuis_at(s, base, tol);
  if (n.max_abs() <= tol.zero) throw Error(ErrorKind::DegenerateInput, "N vanishes at the point");
  double best = -1.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (const double v = n.pair(i, j).norm(); v > best) {
        best = v;
        pair_i_ = i;
        pair_j_ = j;
      }

  const MatrixXd q = pi2(base);
  if (opt.reference) {
    if (opt.reference->size() != 4) throw Error(ErrorKind::Dimension, "reference vector must have 4 entries");
    ref_ = *opt.reference;
    if ((q.transpose() * ref_).norm() < 1e-3 * ref_.norm())
      throw Error(ErrorKind::NonGeneric, "reference vector is orthogonal to the characteristic distribution");
  } else {
    for (int k = 0; k < 4; ++k)
      if ((q.transpose() * VectorXd::Unit(4, k)).norm() >= 0.3) {
        ref_ = VectorXd::Unit(4, k);
        ref_index_ = k;
        break;
      }
  }

  if (need_z) {
    const std::complex<double> w0 = w(base);
    if (std::abs(w0) < tol.rank)
      throw Error(ErrorKind::NonGeneric, "N(u, [u, Ju]) vanishes: the structure is not generic at the point");
    z0_ = std::sqrt(w0) / std::abs(w0);
  }
}

MatrixXd FrameFields::pi2(const VectorXd& y) const {
  const model::NTensor n = tensor_at(s_, y);
  const VectorXd b = n.pair(pair_i_, pair_j_);
  const VectorXd jb = s_.eval_raw(y) * b;
  MatrixXd q(4, 2);
  q.col(0) = b.normalized();
  q.col(1) = (jb - q.col(0).dot(jb) * q.col(0)).normalized();
  return q;
}

VectorXd FrameFields::u(const VectorXd& y) const {
  const MatrixXd q = pi2(y);
  return (q * (q.transpose() * ref_)).normalized();
}

VectorXd FrameFields::v(const VectorXd& y) const {
  const VectorField uf = [this](const VectorXd& p) { return u(p); };
  const VectorField juf = [this](const VectorXd& p) -> VectorXd { return s_.eval_raw(p) * u(p); };
  return lie_bracket_fd(uf, juf, y, h_, Stencil::Central5);
}

std::complex<double> FrameFields::w(const VectorXd& y) const {
  const VectorXd uy = u(y);
  const MatrixXd j = s_.eval_raw(y);
  Eigen::Matrix<double, 4, 2> basis;
  basis.col(0) = uy;
  basis.col(1) = j * uy;
  const VectorXd n = tensor_at(s_, y).apply(uy, v(y));
  const Eigen::Vector2d c = basis.colPivHouseholderQr().solve(n);
  return {c(0), c(1)};
}

std::complex<double> FrameFields::z_at(const VectorXd& y) const {
  const std::complex<double> wy = w(y);
  std::complex<double> z = std::sqrt(wy) / std::abs(wy);
  if ((z * std::conj(z0_)).real() < 0.0) z = -z;
  return z;
}

VectorXd FrameFields::xi_plus(int k, const VectorXd& y) const {
  switch (k) {
    case 0: {
      const std::complex<double> z = z_at(y);
      const VectorXd uy = u(y);
      return z.real() * uy + z.imag() * (s_.eval_raw(y) * uy);
    }
    case 1:
      return s_.eval_raw(y) * xi_plus(0, y);
    case 2: {
      const VectorField a = [this](const VectorXd& p) { return xi_plus(0, p); };
      const VectorField b = [this](const VectorXd& p) { return xi_plus(1, p); };
      return lie_bracket_fd(a, b, y, h_, Stencil::Central5);
    }
    case 3:
      return s_.eval_raw(y) * xi_plus(2, y);
    default:
      throw Error(ErrorKind::Argument, "frame index must be 0..3");
  }
}

VectorXd FrameFields::xi(int k, const VectorXd& y) const {
  return k < 2 ? VectorXd(sign_ * xi_plus(k, y)) : xi_plus(k, y);
}

VectorField FrameFields::field(int k) const {
  return [this, k](const VectorXd& p) { return xi(k, p); };
}

MatrixXd derived_distribution(const field::ChartedStructure& s, const VectorXd& x, const Tolerances& tol,
                              const FrameOptions& opt) {
  const FrameFields f(s, x, 1, tol, opt, false);
  const MatrixXd q = f.pi2(x);
  const VectorXd b = f.v(x);
  const VectorXd transverse = b - q * (q.transpose() * b);
  if (transverse.norm() <= tol.frame * std::max(1.0, b.norm()))
    throw Error(ErrorKind::NonGeneric, "derived distribution has rank 2 (bracket stays in the characteristic plane)");
  MatrixXd out(4, 3);
  out << q, transverse.normalized();
  return out;
}

Frame4 canonical_frame(const field::ChartedStructure& s, const VectorXd& x, int sign, const Tolerances& tol,
                       const FrameOptions& opt) {
  const MatrixXd pi3 = derived_distribution(s, x, tol, opt);
  const FrameFields f(s, x, sign, tol, opt);
  Frame4 out;
  out.x = x;
  out.sign = sign;
  out.w = f.w(x);
  out.z = static_cast<double>(sign) * f.z0();
  out.reference_index = f.reference_index();
  out.xi.resize(4, 4);
  for (int k = 0; k < 4; ++k) out.xi.col(k) = f.xi(k, x);

  const MatrixXd j = s.eval_raw(x);
  const model::NTensor n = field::nijenhuis_at(s, x, tol);
  const VectorXd x1 = out.xi.col(0), x3 = out.xi.col(2);
  out.n_residual = (n.apply(x1, x3) - x1).norm() / x1.norm();
  const VectorXd check = lie_bracket_fd(f.field(0), f.field(1), x, 2.0 * f.step(), Stencil::Central5);
  out.bracket_residual = (check - x3).norm() / std::max(1e-300, x3.norm());
  out.j_residual = (out.xi.col(1) - j * x1).norm() + (out.xi.col(3) - j * x3).norm();
  const MatrixXd q = f.pi2(x);
  out.pi2_residual = linalg::containment_residual(x1, q) / x1.norm();
  out.pi3_residual = linalg::containment_residual(x3, pi3) / x3.norm();
  return out;
}

MaurerCartan maurer_cartan(const field::ChartedStructure& s, const VectorXd& x, const Tolerances& tol,
                           const FrameOptions& opt) {
  MaurerCartan mc;
  mc.frame = canonical_frame(s, x, 1, tol, opt);
  const FrameFields f(s, x, 1, tol, opt);
  const auto lu = mc.frame.xi.partialPivLu();
  constexpr std::array<int, 4> eps{-1, -1, 1, 1};
  for (std::size_t p = 0; p < kFramePairs.size(); ++p) {
    const auto [a, b] = kFramePairs[p];
    const VectorXd br = lie_bracket_fd(f.field(a), f.field(b), x, f.step(), Stencil::Central5);
    mc.coefficients[p] = lu.solve(br);
    for (int k = 0; k < 4; ++k) mc.parity[p](k) = eps[a] * eps[b] * eps[k];
  }
  return mc;
}

}  // namespace nij::dim4
