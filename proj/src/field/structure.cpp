#include "nij/field/structure.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"
#include "nij/common/parallel.hpp"
#include "nij/common/random.hpp"
#include "nij/common/vector_field.hpp"

namespace nij::field {

bool Box::contains(const VectorXd& x, double slack) const {
  if (x.size() != min.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) < min(i) - slack || x(i) > max(i) + slack) return false;
  return true;
}

double Box::size() const { return min.size() ? (max - min).maxCoeff() : 0.0; }

Box Box::cube(int dim, double lo, double hi) {
  return Box{VectorXd::Constant(dim, lo), VectorXd::Constant(dim, hi)};
}

void validate_box(const Box& b, const std::string& what) {
  if (b.min.size() != b.max.size()) throw Error(ErrorKind::Schema, what + ": min and max differ in length");
  for (Eigen::Index i = 0; i < b.min.size(); ++i)
    if (!(b.min(i) <= b.max(i))) throw Error(ErrorKind::Schema, what + ": min exceeds max on axis " + std::to_string(i));
}

std::vector<VectorXd> grid_points(const Box& box, int points_per_axis) {
  if (points_per_axis < 1) throw Error(ErrorKind::Argument, "grid needs at least one point per axis");
  const int m = box.dim();
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<VectorXd> pts;
  pts.reserve(total);
  std::vector<int> idx(m, 0);
  for (std::size_t t = 0; t < total; ++t) {
    VectorXd x(m);
    for (int i = 0; i < m; ++i) {
      const double s = points_per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / (points_per_axis - 1);
      x(i) = box.min(i) + s * (box.max(i) - box.min(i));
    }
    pts.push_back(std::move(x));
    for (int i = m - 1; i >= 0; --i) {
      if (++idx[i] < points_per_axis) break;
      idx[i] = 0;
    }
  }
  return pts;
}

ChartedStructure::ChartedStructure(Box domain, PolyMatrix j, const Tolerances& tol, int validation_points_per_axis)
    : domain_(std::move(domain)), j_(std::move(j)) {
  validate_box(domain_, "domain");
  const int m = dim();
  if (m == 0 || m % 2 != 0) throw Error(ErrorKind::Dimension, "structure dimension must be even and positive");
  if (static_cast<int>(j_.size()) != m) throw Error(ErrorKind::Dimension, "J must have dim rows");
  for (const auto& row : j_) {
    if (static_cast<int>(row.size()) != m) throw Error(ErrorKind::Dimension, "J must have dim columns");
    for (const auto& p : row)
      if (p.num_vars() != m) throw Error(ErrorKind::Dimension, "J entries must be polynomials in dim variables");
  }
  dj_.resize(m);
  for (int a = 0; a < m; ++a) {
    dj_[a] = PolyMatrix(m, std::vector<PolyExpr>(m, PolyExpr(m)));
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) dj_[a][r][c] = j_[r][c].derivative(a);
  }
  j_compiled_ = CompiledPolyMatrix(j_);
  PolyMatrix stacked;
  for (const auto& d : dj_) stacked.insert(stacked.end(), d.begin(), d.end());
  dj_compiled_ = CompiledPolyMatrix(stacked);
  const MatrixXd id = MatrixXd::Identity(m, m);
  for (const VectorXd& x : grid_points(domain_, validation_points_per_axis)) {
    const MatrixXd jx = eval_raw(x);
    validation_residual_ = std::max(validation_residual_, linalg::max_abs(jx * jx + id));
  }
  if (validation_residual_ > tol.field)
    throw Error(ErrorKind::InvalidStructure,
                "J^2 = -I fails on the validation grid with residual " + std::to_string(validation_residual_));
}

MatrixXd ChartedStructure::eval_raw(const VectorXd& x) const { return j_compiled_.eval(x); }

std::vector<MatrixXd> ChartedStructure::derivative_raw(const VectorXd& x) const {
  const int m = dim();
  const MatrixXd stacked = dj_compiled_.eval(x);
  std::vector<MatrixXd> out;
  out.reserve(m);
  for (int a = 0; a < m; ++a) out.push_back(stacked.middleRows(a * m, m));
  return out;
}

namespace {

void require_in_domain(const ChartedStructure& s, const VectorXd& x) {
  if (x.size() != s.dim()) throw Error(ErrorKind::Dimension, "point has wrong dimension");
  if (!s.domain().contains(x)) throw Error(ErrorKind::Domain, "point lies outside the structure domain");
}

double default_step(const ChartedStructure& s, double h) { return h > 0.0 ? h : 1e-5 * std::max(s.domain().size(), 1e-12); }

}  // namespace

model::CSMatrix eval_J(const ChartedStructure& s, const VectorXd& x, const Tolerances& tol) {
  require_in_domain(s, x);
  return model::CSMatrix(s.eval_raw(x), tol.field);
}

std::vector<MatrixXd> d_J(const ChartedStructure& s, const VectorXd& x) {
  require_in_domain(s, x);
  return s.derivative_raw(x);
}

std::vector<MatrixXd> d_J_fd(const ChartedStructure& s, const VectorXd& x, double h) {
  const double step = default_step(s, h);
  const int m = s.dim();
  std::vector<MatrixXd> out(m);
  for (int a = 0; a < m; ++a) {
    const VectorXd e = VectorXd::Unit(m, a);
    out[a] = (s.eval_raw(x + step * e) - s.eval_raw(x - step * e)) / (2.0 * step);
  }
  return out;
}

model::NTensor nijenhuis_from_jet(const model::CSMatrix& j, const std::vector<MatrixXd>& dj) {
  const int m = j.dim();
  if (static_cast<int>(dj.size()) != m) throw Error(ErrorKind::Dimension, "derivative array has wrong length");
  const MatrixXd& jm = j.matrix();
  return model::NTensor::from_pairs(j, [&](int i, int k) -> VectorXd {
    VectorXd v = VectorXd::Zero(m);
    for (int a = 0; a < m; ++a) v += jm(a, i) * dj[a].col(k) - jm(a, k) * dj[a].col(i);
    v -= jm * (dj[i].col(k) - dj[k].col(i));
    return v;
  });
}

model::NTensor nijenhuis_at(const ChartedStructure& s, const VectorXd& x, const Tolerances& tol) {
  model::CSMatrix j = eval_J(s, x, tol);
  return nijenhuis_from_jet(j, s.derivative_raw(x));
}

model::NTensor nijenhuis_fd_oracle(const ChartedStructure& s, const VectorXd& x, double h) {
  const double step = default_step(s, h);
  const int m = s.dim();
  model::CSMatrix j(s.eval_raw(x), Tolerances{}.field);
  const MatrixXd& jm = j.matrix();
  auto constant_field = [](VectorXd v) -> VectorField { return [v](const VectorXd&) { return v; }; };
  auto j_field = [&s](int i) -> VectorField { return [&s, i](const VectorXd& y) -> VectorXd { return s.eval_raw(y).col(i); }; };
  return model::NTensor::from_pairs(j, [&](int i, int k) -> VectorXd {
    const VectorField ei = constant_field(VectorXd::Unit(m, i));
    const VectorField ek = constant_field(VectorXd::Unit(m, k));
    const VectorField jei = j_field(i);
    const VectorField jek = j_field(k);
    return lie_bracket_fd(jei, jek, x, step) - jm * lie_bracket_fd(ei, jek, x, step) -
           jm * lie_bracket_fd(jei, ek, x, step) - lie_bracket_fd(ei, ek, x, step);
  });
}

VectorXd DiffeoPair::apply_forward(const VectorXd& x) const {
  VectorXd y(dim());
  for (int i = 0; i < dim(); ++i) y(i) = forward[i].eval(x);
  return y;
}

VectorXd DiffeoPair::apply_inverse(const VectorXd& y) const {
  VectorXd x(dim());
  for (int i = 0; i < dim(); ++i) x(i) = inverse[i].eval(y);
  return x;
}

MatrixXd DiffeoPair::forward_jacobian(const VectorXd& x) const {
  const int m = dim();
  MatrixXd jac(m, m);
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < m; ++a) jac(i, a) = forward[i].derivative(a).eval(x);
  return jac;
}

double DiffeoPair::roundtrip_residual(int points_per_axis) const {
  double r = 0.0;
  for (const VectorXd& y : grid_points(inverse_domain, points_per_axis))
    r = std::max(r, (apply_forward(apply_inverse(y)) - y).cwiseAbs().maxCoeff());
  for (const VectorXd& x : grid_points(forward_domain, points_per_axis))
    r = std::max(r, (apply_inverse(apply_forward(x)) - x).cwiseAbs().maxCoeff());
  return r;
}

DiffeoPair DiffeoPair::linear(const MatrixXd& p, const Box& forward_domain, const Box& inverse_domain) {
  const int m = static_cast<int>(p.rows());
  const MatrixXd pinv = p.inverse();
  DiffeoPair d;
  for (int i = 0; i < m; ++i) {
    PolyExpr f(m), g(m);
    for (int a = 0; a < m; ++a) {
      if (p(i, a) != 0.0) f += p(i, a) * PolyExpr::variable(m, a);
      if (pinv(i, a) != 0.0) g += pinv(i, a) * PolyExpr::variable(m, a);
    }
    d.forward.push_back(std::move(f));
    d.inverse.push_back(std::move(g));
  }
  d.forward_domain = forward_domain;
  d.inverse_domain = inverse_domain;
  return d;
}

DiffeoPair DiffeoPair::compose(const DiffeoPair& first, const DiffeoPair& second) {
  DiffeoPair d;
  for (const PolyExpr& p : second.forward) d.forward.push_back(p.compose(first.forward));
  for (const PolyExpr& p : first.inverse) d.inverse.push_back(p.compose(second.inverse));
  d.forward_domain = first.forward_domain;
  d.inverse_domain = second.inverse_domain;
  return d;
}

void validate_diffeo(const DiffeoPair& phi, const Tolerances& tol) {
  const int m = phi.dim();
  if (m == 0 || static_cast<int>(phi.inverse.size()) != m) throw Error(ErrorKind::Schema, "diffeo: forward and inverse lengths differ");
  for (const auto& p : phi.forward)
    if (p.num_vars() != m) throw Error(ErrorKind::Schema, "diffeo: forward entries must use dim variables");
  for (const auto& p : phi.inverse)
    if (p.num_vars() != m) throw Error(ErrorKind::Schema, "diffeo: inverse entries must use dim variables");
  validate_box(phi.forward_domain, "forward domain");
  validate_box(phi.inverse_domain, "inverse domain");
  if (phi.forward_domain.dim() != m || phi.inverse_domain.dim() != m)
    throw Error(ErrorKind::Schema, "diffeo: domain dimension mismatch");
  const double r = phi.roundtrip_residual();
  if (r > tol.field) throw Error(ErrorKind::Argument, "diffeo round trip fails with residual " + std::to_string(r));
}

namespace {

MatrixXd well_conditioned(int m, Rng& rng) {
  for (;;) {
    MatrixXd p = MatrixXd::Identity(m, m) + 0.5 * rng.normal_matrix(m, m);
    Eigen::JacobiSVD<MatrixXd> svd(p);
    const auto& s = svd.singularValues();
    if (s(m - 1) > 0.0 && s(0) / s(m - 1) < 5.0) return p;
  }
}

}  // namespace

DiffeoPair random_diffeo(int dim, std::uint64_t seed, const Box& y_box, double shear_scale) {
  if (dim < 2 || dim % 2 != 0) throw Error(ErrorKind::Dimension, "random_diffeo: even dimension >= 2 required");
  Rng rng(seed);
  const int half = dim / 2;
  const MatrixXd p1 = well_conditioned(dim, rng);
  const MatrixXd p2 = well_conditioned(dim, rng);

  // Shear s(w) = (w_u + Q(w_v), w_v) with Q quadratic in the second half.
  std::vector<PolyExpr> shear, unshear;
  for (int i = 0; i < dim; ++i) {
    PolyExpr q(dim);
    if (i < half) {
      for (int a = half; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
          const double c = shear_scale * rng.normal() / dim;
          q += c * PolyExpr::variable(dim, a) * PolyExpr::variable(dim, b);
        }
    }
    shear.push_back(PolyExpr::variable(dim, i) + q);
    unshear.push_back(PolyExpr::variable(dim, i) - q);
  }
  const Box unit = Box::cube(dim, -1.0, 1.0);
  DiffeoPair s{shear, unshear, unit, unit};
  DiffeoPair l1 = DiffeoPair::linear(p1, unit, unit);
  DiffeoPair l2 = DiffeoPair::linear(p2, unit, unit);
  DiffeoPair phi = DiffeoPair::compose(DiffeoPair::compose(l1, s), l2);
  phi.inverse_domain = y_box;

  // x box: bounding box of inverse(y_box) on a sample grid, padded.
  VectorXd lo = VectorXd::Constant(dim, std::numeric_limits<double>::infinity());
  VectorXd hi = -lo;
  for (const VectorXd& y : grid_points(y_box, dim <= 4 ? 7 : 5)) {
    const VectorXd x = phi.apply_inverse(y);
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  const VectorXd pad = 0.1 * (hi - lo) + VectorXd::Constant(dim, 1e-3);
  phi.forward_domain = Box{lo - pad, hi + pad};
  return phi;
}

namespace {

/// Chebyshev-type sample points in the box: a tensor grid of Chebyshev nodes
/// when small enough, else a deterministic subset of it.
std::vector<VectorXd> chebyshev_samples(const Box& box, int degree, std::size_t wanted) {
  const int m = box.dim();
  const int k = degree + 2;
  std::vector<double> nodes(k);
  for (int i = 0; i < k; ++i) nodes[i] = std::cos(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * k));
  auto to_point = [&](const std::vector<int>& idx) {
    VectorXd x(m);
    for (int a = 0; a < m; ++a) x(a) = box.center()(a) + 0.5 * (box.max(a) - box.min(a)) * nodes[idx[a]];
    return x;
  };
  double total = std::pow(static_cast<double>(k), m);
  std::vector<VectorXd> pts;
  if (total <= static_cast<double>(wanted)) {
    std::vector<int> idx(m, 0);
    for (std::size_t t = 0; t < static_cast<std::size_t>(total); ++t) {
      pts.push_back(to_point(idx));
      for (int a = m - 1; a >= 0; --a) {
        if (++idx[a] < k) break;
        idx[a] = 0;
      }
    }
    return pts;
  }
  Rng rng(0x5eed);
  std::vector<int> idx(m);
  for (std::size_t t = 0; t < wanted; ++t) {
    for (int a = 0; a < m; ++a) idx[a] = static_cast<int>(rng.index(static_cast<std::uint64_t>(k)));
    pts.push_back(to_point(idx));
  }
  return pts;
}

}  // namespace

PullbackResult pullback(const ChartedStructure& s, const DiffeoPair& phi, int degree, const Tolerances& tol) {
  const int m = s.dim();
  if (phi.dim() != m) throw Error(ErrorKind::Dimension, "pullback: diffeo dimension differs from structure");
  if (degree < 0) throw Error(ErrorKind::Argument, "pullback: negative degree");
  const Box& ybox = phi.inverse_domain;

  const auto monos = monomials(m, degree);
  const std::size_t nmono = monos.size();
  std::vector<VectorXd> fit_pts = chebyshev_samples(ybox, degree, 4 * nmono);
  std::vector<VectorXd> check_pts;
  {
    Rng rng(0xc4ec);
    for (int i = 0; i < 32; ++i) check_pts.push_back(rng.uniform_vector(ybox.min, ybox.max));
  }

  auto sample = [&](const VectorXd& y) -> MatrixXd {
    const VectorXd x = phi.apply_inverse(y);
    if (!s.domain().contains(x, 1e-12 * std::max(1.0, s.domain().size())))
      throw Error(ErrorKind::Domain, "pullback: inverse image of the new domain leaves the structure domain");
    const MatrixXd d = phi.forward_jacobian(x);
    return d * s.eval_raw(x) * d.inverse();
  };

  // Fit in scaled coordinates t = (y - c) / r, t in [-1, 1].
  const VectorXd c = ybox.center();
  VectorXd r = 0.5 * (ybox.max - ybox.min);
  for (Eigen::Index a = 0; a < r.size(); ++a)
    if (r(a) <= 0.0) r(a) = 1.0;
  auto design_row = [&](const VectorXd& y) {
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(nmono));
    const VectorXd t = (y - c).cwiseQuotient(r);
    for (std::size_t q = 0; q < nmono; ++q) {
      double v = 1.0;
      for (int a = 0; a < m; ++a)
        for (int e = 0; e < monos[q][a]; ++e) v *= t(a);
      row(static_cast<Eigen::Index>(q)) = v;
    }
    return row;
  };

  const auto npts = static_cast<Eigen::Index>(fit_pts.size());
  MatrixXd design(npts, static_cast<Eigen::Index>(nmono));
  MatrixXd values(npts, m * m);
  std::vector<MatrixXd> samples(fit_pts.size());
  for (Eigen::Index p = 0; p < npts; ++p) {
    design.row(p) = design_row(fit_pts[p]);
    samples[p] = sample(fit_pts[p]);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) values(p, i * m + j) = samples[p](i, j);
  }
  const MatrixXd coefs = design.colPivHouseholderQr().solve(values);

  std::vector<PolyExpr> scaled(m);
  for (int a = 0; a < m; ++a) scaled[a] = (PolyExpr::variable(m, a) - PolyExpr::constant(m, c(a))) * (1.0 / r(a));
  PolyMatrix fitted(m, std::vector<PolyExpr>(m, PolyExpr(m)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      PolyExpr in_t(m);
      double scale = 0.0;
      for (std::size_t q = 0; q < nmono; ++q) {
        const double v = coefs(static_cast<Eigen::Index>(q), i * m + j);
        scale = std::max(scale, std::abs(v));
        in_t += PolyExpr(m, {{v, monos[q]}});
      }
      fitted[i][j] = in_t.compose(scaled).pruned(1e-14 * std::max(1.0, scale));
    }

  double residual = 0.0;
  for (std::size_t p = 0; p < fit_pts.size(); ++p)
    residual = std::max(residual, linalg::max_abs(field::eval(fitted, fit_pts[p]) - samples[p]));
  for (const VectorXd& y : check_pts) residual = std::max(residual, linalg::max_abs(field::eval(fitted, y) - sample(y)));
  if (residual > tol.fit)
    throw Error(ErrorKind::Refit, "pullback: fit residual " + std::to_string(residual) + " exceeds tolerance at degree " +
                                      std::to_string(degree) + "; try a higher degree");

  return PullbackResult{ChartedStructure(ybox, std::move(fitted), tol), residual, degree};
}

model::NTensor push_forward(const model::NTensor& n, const MatrixXd& p) { return n.transformed(p); }

ScanReport integrability_scan(const ChartedStructure& s, int points_per_axis, const Tolerances& tol) {
  if (points_per_axis < 1) throw Error(ErrorKind::Argument, "integrability_scan: empty grid");
  const std::vector<VectorXd> pts = grid_points(s.domain(), points_per_axis);
  if (pts.empty()) throw Error(ErrorKind::Argument, "integrability_scan: empty grid");

  std::vector<double> norms(pts.size());
  std::vector<std::string> tags(pts.size());
  std::vector<char> unreliable(pts.size(), 0);
  parallel_for(pts.size(), [&](std::size_t i) {
    const model::NTensor n = nijenhuis_at(s, pts[i], tol);
    norms[i] = n.max_abs();
    const model::DegeneracyClass dc = model::degeneracy_class(n, tol);
    tags[i] = dc.name();
    unreliable[i] = dc.unreliable ? 1 : 0;
  });

  ScanReport rep;
  rep.points = pts.size();
  std::size_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (norms[i] > norms[best]) best = i;
    ++rep.histogram[tags[i]];
    rep.unreliable += static_cast<std::size_t>(unreliable[i]);
  }
  rep.max_norm = norms[best];
  rep.argmax = pts[best];
  rep.integrable = rep.max_norm < tol.field;
  return rep;
}

}  // namespace nij::field
