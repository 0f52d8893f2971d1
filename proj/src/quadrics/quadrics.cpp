#include "nij/quadrics/quadrics.hpp"

#include <algorithm>
#include <cmath>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"
#include "nij/common/parallel.hpp"

namespace nij::quadrics {

namespace {

constexpr double kInfinity = 1e-6;

std::array<int, 2> others(int idx) {
  return idx == 0 ? std::array<int, 2>{1, 2} : idx == 1 ? std::array<int, 2>{0, 2} : std::array<int, 2>{0, 1};
}

void check_chart(int idx) {
  if (idx < 0 || idx > 2) throw Error(ErrorKind::Argument, "chart index must be 0, 1 or 2");
}

// Real spanning set of ker(alpha) in the adapted frame: e_k - alpha_k e_idx and
// their products with i.
MatrixXd kernel_vectors(const Vector3cd& alpha, int idx, const MatrixXd& frame) {
  MatrixXd out(6, 4);
  int c = 0;
  for (int k : others(idx)) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(3);
    w(k) = 1.0;
    w(idx) = -alpha(k) / alpha(idx);
    out.col(c++) = model::to_real(frame, w);
    out.col(c++) = model::to_real(frame, std::complex<double>(0, 1) * w);
  }
  return out;
}

// Projective distance between annihilator lines.
double line_distance(const Vector3cd& a, const Vector3cd& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

}  // namespace

Vector3cd homogeneous(const GrChartPoint& p) {
  check_chart(p.chart_index);
  Vector3cd a;
  a(p.chart_index) = 1.0;
  const auto o = others(p.chart_index);
  a(o[0]) = {p.coords(0), p.coords(1)};
  a(o[1]) = {p.coords(2), p.coords(3)};
  return a;
}

GrChartPoint to_chart(const Vector3cd& alpha, std::optional<int> chart) {
  int idx = 0;
  if (chart) {
    check_chart(*chart);
    idx = *chart;
  } else {
    alpha.cwiseAbs().maxCoeff(&idx);
  }
  if (!(std::abs(alpha(idx)) > kInfinity * alpha.norm()))
    throw Error(ErrorKind::Argument, "point lies at infinity of chart " + std::to_string(idx));
  const Vector3cd b = alpha / alpha(idx);
  const auto o = others(idx);
  GrChartPoint p;
  p.chart_index = idx;
  p.coords << b(o[0]).real(), b(o[0]).imag(), b(o[1]).real(), b(o[1]).imag();
  return p;
}

GrChartPoint plane_to_chart(const model::ComplexSubspace& w, std::optional<int> chart, const Tolerances& tol) {
  if (w.ambient_dim() != 6 || w.real_dim() != 4)
    throw Error(ErrorKind::Argument, "a complex 2-plane in R^6 (real dimension 4) is required");
  const MatrixXd frame = model::adapted_frame(w.structure());
  Eigen::MatrixXcd z(3, 4);
  for (int c = 0; c < 4; ++c) z.col(c) = model::to_complex(frame, w.basis().col(c));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(z, Eigen::ComputeFullU);
  const VectorXd s = svd.singularValues();
  if (s(2) > std::sqrt(tol.rank) * s(0) || s(1) <= std::sqrt(tol.rank) * s(0))
    throw Error(ErrorKind::Argument, "basis does not span a complex 2-plane");
  return to_chart(svd.matrixU().col(2).conjugate(), chart);
}

model::ComplexSubspace chart_to_plane(const GrChartPoint& p, const model::CSMatrix& j) {
  if (j.dim() != 6) throw Error(ErrorKind::Dimension, "chart points describe complex 2-planes of R^6");
  const MatrixXd frame = model::adapted_frame(j);
  const MatrixXd span = kernel_vectors(homogeneous(p), p.chart_index, frame);
  return model::ComplexSubspace(span.householderQr().householderQ() * MatrixXd::Identity(6, 4), j);
}

std::vector<GrChartPoint> common_chart(const std::vector<GrChartPoint>& points) {
  if (points.empty()) return {};
  std::vector<Vector3cd> h;
  for (const auto& p : points) h.push_back(homogeneous(p));
  int best = 0;
  double best_min = -1.0;
  for (int c = 0; c < 3; ++c) {
    double worst = 1.0;
    for (const auto& a : h) worst = std::min(worst, std::abs(a(c)) / a.norm());
    if (worst > best_min) {
      best_min = worst;
      best = c;
    }
  }
  if (best_min < kInfinity)
    throw Error(ErrorKind::Argument, "no common chart: every chart has a point within 1e-6 of its hyperplane at infinity");
  std::vector<GrChartPoint> out;
  for (const auto& a : h) out.push_back(to_chart(a, best));
  return out;
}

Eigen::Matrix<double, 1, 15> veronese(const Vector4d& x) {
  Eigen::Matrix<double, 1, 15> r;
  r(0) = 1.0;
  r.segment<4>(1) = x.transpose();
  int k = 5;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) r(k++) = x(i) * x(j);
  return r;
}

double QuadricModel::eval(const Vector4d& x) const {
  return veronese(x).dot(Eigen::Map<const Eigen::Matrix<double, 1, 15>>(coeffs.data()));
}

MatrixXd design_matrix(const std::vector<GrChartPoint>& points) {
  if (points.empty()) throw Error(ErrorKind::Argument, "at least one point is required");
  MatrixXd d(points.size(), 15);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].chart_index != points[0].chart_index)
      throw Error(ErrorKind::Argument, "points lie in different charts");
    d.row(static_cast<Eigen::Index>(i)) = veronese(points[i].coords);
  }
  return d;
}

int quadric_nullity(const std::vector<GrChartPoint>& points, const Tolerances& tol) {
  return 15 - linalg::numerical_rank(design_matrix(points), tol.rank, tol.zero).rank;
}

std::optional<QuadricModel> quadric_through(const std::vector<GrChartPoint>& points, const Tolerances& tol) {
  const MatrixXd d = design_matrix(points);
  if (linalg::numerical_rank(d, tol.rank, tol.zero).rank >= 15) return std::nullopt;
  MatrixXd padded = MatrixXd::Zero(std::max<Eigen::Index>(d.rows(), 15), 15);
  padded.topRows(d.rows()) = d;
  Eigen::JacobiSVD<MatrixXd> svd(padded, Eigen::ComputeFullV);
  const VectorXd c = svd.matrixV().col(14);
  QuadricModel q;
  for (int k = 0; k < 15; ++k) q.coeffs[k] = c(k);
  q.residual = (d * c).cwiseAbs().maxCoeff();
  return q;
}

bool quadratically_nondegenerate(const std::vector<GrChartPoint>& points, const Tolerances& tol) {
  if (points.size() < 15)
    throw Error(ErrorKind::Argument, "at least 15 points are required: any 14 points lie on a real quadric");
  return quadric_nullity(points, tol) == 0;
}

double plane_invariance_residual(const model::NTensor& n, const model::ComplexSubspace& w) {
  const MatrixXd& b = w.basis();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < b.cols(); ++i)
    for (Eigen::Index k = i + 1; k < b.cols(); ++k)
      worst = std::max(worst, linalg::containment_residual(n.apply(b.col(i), b.col(k)), b));
  return worst;
}

bool is_invariant_plane(const model::NTensor& n, const model::ComplexSubspace& w, const Tolerances& tol) {
  if (n.dim() != 6 || w.ambient_dim() != 6 || w.real_dim() != 4)
    throw Error(ErrorKind::Argument, "a tensor in dimension 6 and a complex 2-plane are required");
  return plane_invariance_residual(n, w) <= tol.alg * std::max(1.0, n.max_abs());
}

std::vector<GrChartPoint> invariant_plane_sampler(const model::NTensor& n, const SamplerOptions& opt,
                                                  const Tolerances& tol) {
  if (n.dim() != 6) throw Error(ErrorKind::Dimension, "the sampler works in dimension 6");
  if (n.max_abs() <= tol.zero) throw Error(ErrorKind::Argument, "N = 0: every plane is invariant");
  if (opt.trials < 1 || opt.max_iterations < 1) throw Error(ErrorKind::Argument, "trial counts must be positive");
  const MatrixXd frame = model::adapted_frame(n.structure());
  const auto frame_lu = frame.partialPivLu();
  const double scale = n.max_abs();

  auto residual = [&](int idx, const Vector4d& y) -> Eigen::Vector2d {
    const Vector3cd a = homogeneous({idx, y});
    const MatrixXd k = kernel_vectors(a, idx, frame);
    const VectorXd c = frame_lu.solve(n.apply(k.col(0), k.col(2)));
    std::complex<double> v = 0.0;
    for (int q = 0; q < 3; ++q) v += a(q) * std::complex<double>(c(2 * q), c(2 * q + 1));
    return {v.real(), v.imag()};
  };

  std::vector<std::optional<GrChartPoint>> hits(opt.trials);
  parallel_for(static_cast<std::size_t>(opt.trials), [&](std::size_t t) {
    Rng rng(opt.seed * 0x9E3779B97F4A7C15ULL + t);
    const int idx = static_cast<int>(t % 3);
    Vector4d y = rng.normal_vector(4);
    Eigen::Vector2d f = residual(idx, y);
    // Past the threshold, iterate on while the residual still drops: near a
    // double root (degenerate tensors) convergence is only linear.
    bool converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
      const double ftol = 1e-13 * scale * std::pow(1.0 + y.squaredNorm(), 1.5);
      converged = converged || f.norm() <= ftol;
      if (f.norm() == 0.0) break;
      Eigen::Matrix<double, 2, 4> jac;
      const double h = 1e-6 * (1.0 + y.norm());
      for (int c = 0; c < 4; ++c) {
        Vector4d yp = y, ym = y;
        yp(c) += h;
        ym(c) -= h;
        jac.col(c) = (residual(idx, yp) - residual(idx, ym)) / (2.0 * h);
      }
      const Vector4d step = -jac.completeOrthogonalDecomposition().solve(f);
      double lambda = 1.0;
      Vector4d next = y + step;
      Eigen::Vector2d fn = residual(idx, next);
      while (fn.norm() >= f.norm() && lambda > 1e-4) {
        lambda /= 2.0;
        next = y + lambda * step;
        fn = residual(idx, next);
      }
      if (fn.norm() >= f.norm() || next.norm() > 1e6) break;
      y = next;
      f = fn;
    }
    if (!converged) return;
    try {
      const GrChartPoint p = to_chart(homogeneous({idx, y}));
      if (is_invariant_plane(n, chart_to_plane(p, n.structure()), tol)) hits[t] = p;
    } catch (const Error&) {
    }
  });

  std::vector<GrChartPoint> out;
  for (const auto& h : hits) {
    if (!h) continue;
    const Vector3cd a = homogeneous(*h);
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const GrChartPoint& q) { return line_distance(a, homogeneous(q)) <= opt.dedupe; });
    if (!dup) out.push_back(*h);
  }
  return out;
}

std::string verdict_name(Theorem4Verdict v) {
  switch (v) {
    case Theorem4Verdict::Contradiction:
      return "CONTRADICTION";
    case Theorem4Verdict::IntegrableCertified:
      return "INTEGRABLE_CERTIFIED";
    case Theorem4Verdict::Inconclusive:
      break;
  }
  return "INCONCLUSIVE";
}

Theorem4Verdict theorem4_certificate(const model::NTensor& n, const std::vector<model::ComplexSubspace>& planes,
                                     const Tolerances& tol) {
  std::vector<GrChartPoint> pts;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (!is_invariant_plane(n, planes[i], tol))
      throw Error(ErrorKind::Argument, "plane " + std::to_string(i) + " is not invariant under N");
    pts.push_back(plane_to_chart(planes[i], std::nullopt, tol));
  }
  if (pts.size() < 15) return Theorem4Verdict::Inconclusive;
  if (!quadratically_nondegenerate(common_chart(pts), tol)) return Theorem4Verdict::Inconclusive;
  return n.max_abs() > tol.alg ? Theorem4Verdict::Contradiction : Theorem4Verdict::IntegrableCertified;
}

}  // namespace nij::quadrics
