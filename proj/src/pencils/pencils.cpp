#include "nij/pencils/pencils.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"
#include "nij/field/generators.hpp"
#include "nij/webs/webs.hpp"

namespace nij::pencils {

using field::PolyExpr;
using field::PolyMatrix;

namespace {

constexpr int kVars = 6;

void check_degree(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw Error(ErrorKind::Argument, "degree must lie in [0, " + std::to_string(kMaxDegree) + "]");
}

void check_box(const field::Box& box) {
  if (box.dim() != kVars) throw Error(ErrorKind::Dimension, "example structures live on a 6-dimensional box");
}

std::vector<bool> uses(const std::vector<int>& vars) {
  std::vector<bool> u(kVars, false);
  for (int v : vars) u[v] = true;
  return u;
}

PolyMatrix zero_matrix(int rows, int cols) { return PolyMatrix(rows, std::vector<PolyExpr>(cols, PolyExpr(kVars))); }

// U diag(B1, B2) U^-1 with U = [[I, E], [0, I]], so U^-1 = [[I, -E], [0, I]].
PolyMatrix quotient_block(int degree, Rng& rng) {
  const std::vector<bool> u = uses(kV23);
  const PolyMatrix inner =
      field::block_diagonal({field::random_complex_block(kVars, degree, rng, u), field::random_complex_block(kVars, degree, rng, u)}, kVars);
  PolyMatrix up = field::identity(4, kVars), down = field::identity(4, kVars);
  for (int i = 0; i < 2; ++i)
    for (int j = 2; j < 4; ++j) {
      const PolyExpr e = degree == 0 ? PolyExpr::constant(kVars, 0.3 * rng.normal())
                                     : field::random_polynomial(kVars, 1, 0.3, rng, u);
      up[i][j] = e;
      down[i][j] = -e;
    }
  return field::multiply(field::multiply(up, inner), down);
}

PolyMatrix assemble(const PolyMatrix& a, const PolyMatrix& c, const PolyMatrix& d) {
  PolyMatrix j = zero_matrix(kVars, kVars);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) j[i][k] = a[i][k];
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 4; ++k) j[i][2 + k] = c[i][k];
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) j[2 + i][2 + k] = d[i][k];
  return j;
}

std::vector<int> complement(const std::vector<int>& v, int m) {
  std::vector<int> q;
  for (int i = 0; i < m; ++i)
    if (std::find(v.begin(), v.end(), i) == v.end()) q.push_back(i);
  return q;
}

MatrixXd select(const MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < cols.size(); ++k) out(i, k) = m(rows[i], cols[k]);
  return out;
}

double signed_distance(const MatrixXd& a, const MatrixXd& b) {
  return std::min(linalg::max_abs(a - b), linalg::max_abs(a + b));
}

}  // namespace

field::ChartedStructure make_example1(std::uint64_t seed, int degree, const field::Box& box) {
  check_degree(degree);
  check_box(box);
  Rng rng(seed);
  std::vector<PolyMatrix> blocks;
  for (int b = 0; b < 3; ++b) blocks.push_back(field::random_complex_block(kVars, degree, rng));
  return field::ChartedStructure(box, field::block_diagonal(blocks, kVars));
}

bool genericity_check_e1(const field::ChartedStructure& s, const VectorXd& x, const Tolerances& tol) {
  if (s.dim() != kVars) throw Error(ErrorKind::Dimension, "genericity check needs a 6-dimensional structure");
  const model::NTensor n = field::nijenhuis_at(s, x, tol);
  const double floor = tol.rank * std::max(1.0, n.max_abs());
  for (int bi = 0; bi < 3; ++bi)
    for (int bj = 0; bj < 3; ++bj) {
      if (bi == bj) continue;
      double outside = 0.0;
      for (int a = 2 * bi; a < 2 * bi + 2; ++a)
        for (int b = 2 * bj; b < 2 * bj + 2; ++b) {
          VectorXd v = n.apply(VectorXd::Unit(kVars, a), VectorXd::Unit(kVars, b));
          v.segment(2 * bi, 2).setZero();
          outside = std::max(outside, v.norm());
        }
      if (outside <= floor) return false;
    }
  return true;
}

field::ChartedStructure make_example2(std::uint64_t seed, int degree, bool triangular, const field::Box& box) {
  check_degree(degree);
  check_box(box);
  Rng rng(seed);
  const PolyMatrix a = field::random_complex_block(kVars, degree, rng);
  const PolyMatrix d = quotient_block(degree, rng);
  PolyMatrix c = zero_matrix(2, 4);
  if (triangular) {
    PolyMatrix g = zero_matrix(2, 4);
    for (auto& row : g)
      for (auto& e : row) e = field::random_polynomial(kVars, degree == 0 ? 0 : 1, 0.3, rng);
    const PolyMatrix ag = field::multiply(a, g), gd = field::multiply(g, d);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 4; ++k) c[i][k] = ag[i][k] - gd[i][k];
  }
  return field::ChartedStructure(box, assemble(a, c, d));
}

field::ChartedStructure make_dg2_kernel_v1(std::uint64_t seed, int degree, const field::Box& box) {
  check_degree(degree);
  check_box(box);
  Rng rng(seed);
  const PolyMatrix a = field::random_complex_block(kVars, degree, rng, uses(kV1));
  const PolyMatrix d = quotient_block(degree, rng);
  return field::ChartedStructure(box, assemble(a, zero_matrix(2, 4), d));
}

field::ChartedStructure make_dg2_kernel_transversal(std::uint64_t seed, int degree, const field::Box& box) {
  check_degree(degree);
  check_box(box);
  Rng rng(seed);
  const PolyMatrix a = field::random_complex_block(kVars, degree, rng, uses(kV23));
  const PolyMatrix d = field::constant_matrix(model::random_structure(2, rng).matrix(), kVars);
  return field::ChartedStructure(box, assemble(a, zero_matrix(2, 4), d));
}

std::vector<PlaneField> product_foliations(const field::ChartedStructure& s, const std::vector<int>& v_coords,
                                           std::uint64_t seed) {
  const int m = s.dim();
  const std::vector<int> q = complement(v_coords, m);
  Rng rng(seed);
  std::vector<PlaneField> out;
  for (int a = 0; a < 4; ++a) {
    VectorXd w = VectorXd::Zero(m);
    for (int i : q) w(i) = rng.normal();
    out.push_back([&s, v_coords, w](const VectorXd& x) {
      MatrixXd b = MatrixXd::Zero(w.size(), 4);
      b(v_coords[0], 0) = 1.0;
      b(v_coords[1], 1) = 1.0;
      b.col(2) = w;
      b.col(3) = s.eval_raw(x) * w;
      return b;
    });
  }
  return out;
}

PencilReport verify_pencil(const field::ChartedStructure& s, const std::vector<int>& v_coords,
                           const std::vector<PlaneField>& phi, const PencilOptions& opt, const Tolerances& tol) {
  const int m = s.dim();
  if (v_coords.size() != 2 || v_coords[0] == v_coords[1] ||
      std::any_of(v_coords.begin(), v_coords.end(), [m](int i) { return i < 0 || i >= m; }))
    throw Error(ErrorKind::Argument, "V must be given by two distinct coordinate indices");
  if (m != 6) throw Error(ErrorKind::Dimension, "pencil verification needs a 6-dimensional structure");
  if (phi.size() != 4) throw Error(ErrorKind::Argument, "exactly four plane fields are required");
  if (opt.samples < 1 || opt.shifts < 0) throw Error(ErrorKind::Argument, "sample counts must be positive");
  const std::vector<int> q = complement(v_coords, m);

  // Quotient structure from the four planes reduced mod V; empty on failure.
  auto quotient = [&](const VectorXd& x) -> std::optional<MatrixXd> {
    webs::PlaneWeb4 w;
    for (int a = 0; a < 4; ++a) {
      const MatrixXd b = phi[a](x);
      if (b.rows() != m) throw Error(ErrorKind::Dimension, "plane field basis has the wrong number of rows");
      const MatrixXd reduced = linalg::column_space(b(q, Eigen::all), tol.rank, tol.zero);
      if (reduced.cols() != 2) return std::nullopt;
      w.planes[a] = reduced;
    }
    try {
      return webs::web_to_J(w, tol).j.matrix();
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  const field::Box& box = s.domain();
  const VectorXd lo = box.center() - 0.9 * (box.max - box.min) / 2.0;
  const VectorXd hi = box.center() + 0.9 * (box.max - box.min) / 2.0;
  Rng rng(opt.seed);
  PencilReport r;
  double j_scale = 1.0, jt_scale = 1.0;
  for (int t = 0; t < opt.samples; ++t) {
    const VectorXd x = rng.uniform_vector(lo, hi);
    const MatrixXd j = s.eval_raw(x);
    j_scale = std::max(j_scale, linalg::max_abs(j));
    const double lower = linalg::max_abs(select(j, q, v_coords));
    r.v_residual = std::max(r.v_residual, lower);
    ++r.samples;
    const std::optional<MatrixXd> jt = quotient(x);
    if (!jt) {
      ++r.web_failures;
      continue;
    }
    jt_scale = std::max(jt_scale, linalg::max_abs(*jt));
    r.block_residual = std::max({r.block_residual, lower, signed_distance(select(j, q, q), *jt)});
    for (int k = 0; k < opt.shifts; ++k) {
      VectorXd y = x;
      for (int v : v_coords) y(v) = rng.uniform(lo(v), hi(v));
      const std::optional<MatrixXd> jy = quotient(y);
      if (!jy) {
        ++r.web_failures;
        continue;
      }
      r.shift_residual = std::max(r.shift_residual, signed_distance(*jt, *jy));
    }
  }
  r.v_invariant = r.v_residual <= tol.field * j_scale;
  r.webs_reconstructed = r.web_failures == 0;
  r.shift_symmetric = r.webs_reconstructed && r.shift_residual <= tol.field * jt_scale;
  r.block_triangular = r.webs_reconstructed && r.block_residual <= tol.field * std::max(j_scale, jt_scale);
  return r;
}

std::vector<model::NTensor> antilinear_tensor_basis(const model::CSMatrix& j) {
  const int nc = j.n();
  const MatrixXd frame = model::adapted_frame(j);
  std::vector<model::NTensor> out;
  for (int c = 0; c < nc; ++c)
    for (int a = 0; a < nc; ++a)
      for (int b = a + 1; b < nc; ++b)
        for (const std::complex<double> unit : {std::complex<double>(1, 0), std::complex<double>(0, 1)}) {
          model::ComplexComponents comps(nc, Eigen::MatrixXcd::Zero(nc, nc));
          comps[c](a, b) = unit;
          comps[c](b, a) = -unit;
          out.push_back(model::from_complex_components(j, frame, comps));
        }
  return out;
}

namespace {

// Constraint residual vector of a tensor: components that must vanish.
VectorXd constraint_values(const model::NTensor& n, const DegeneracyConstraint& c, const MatrixXd& q) {
  const int m = n.dim();
  std::vector<double> vals;
  if (c.kind == DegeneracyConstraint::Kind::ImageIn) {
    const MatrixXd proj = MatrixXd::Identity(m, m) - q * q.transpose();
    for (int i = 0; i < m; ++i)
      for (int k = i + 1; k < m; ++k) {
        const VectorXd v = proj * n.pair(i, k);
        vals.insert(vals.end(), v.data(), v.data() + m);
      }
  } else {
    for (Eigen::Index a = 0; a < q.cols(); ++a)
      for (int k = 0; k < m; ++k) {
        const VectorXd v = n.apply(q.col(a), VectorXd::Unit(m, k));
        vals.insert(vals.end(), v.data(), v.data() + m);
      }
  }
  return Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

AccumulationVerdict degeneracy_accumulation(const model::NTensor& n, const std::vector<DegeneracyConstraint>& constraints,
                                            const Tolerances& tol) {
  const model::CSMatrix& j = n.structure();
  const int m = n.dim();
  std::vector<MatrixXd> spans;
  for (std::size_t c = 0; c < constraints.size(); ++c) {
    const auto& con = constraints[c];
    const Eigen::Index want = con.kind == DegeneracyConstraint::Kind::ImageIn ? m - 2 : 2;
    const std::string tag = "constraint " + std::to_string(c);
    if (con.basis.rows() != m || con.basis.cols() != want)
      throw Error(ErrorKind::Argument, tag + ": basis must be " + std::to_string(m) + "x" + std::to_string(want));
    const MatrixXd q = linalg::column_space(con.basis, tol.rank, tol.zero);
    if (q.cols() != want) throw Error(ErrorKind::Argument, tag + ": basis is rank deficient");
    const model::ComplexSubspace sub(q, j);
    if (sub.invariance_residual() > std::sqrt(tol.alg) * std::max(1.0, linalg::max_abs(j.matrix())))
      throw Error(ErrorKind::Argument, tag + ": subspace is not J-invariant");
    spans.push_back(q);
  }

  AccumulationVerdict out;
  const double scale = std::max(1.0, n.max_abs());
  for (std::size_t c = 0; c < constraints.size(); ++c) {
    const VectorXd v = constraint_values(n, constraints[c], spans[c]);
    out.tensor_residual = std::max(out.tensor_residual, v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
  }
  if (out.tensor_residual > tol.alg * scale)
    throw Error(ErrorKind::Argument, "the tensor violates its declared degeneracy constraints");

  const std::vector<model::NTensor> basis = antilinear_tensor_basis(j);
  const int dim = static_cast<int>(basis.size());
  if (constraints.empty()) {
    out.solution_dim = dim;
    return out;
  }
  std::vector<VectorXd> columns;
  for (const auto& t : basis) {
    std::vector<VectorXd> parts;
    Eigen::Index rows = 0;
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      parts.push_back(constraint_values(t, constraints[c], spans[c]));
      rows += parts.back().size();
    }
    VectorXd col(rows);
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      col.segment(off, p.size()) = p;
      off += p.size();
    }
    columns.push_back(col);
  }
  MatrixXd a(columns.front().size(), dim);
  for (int k = 0; k < dim; ++k) a.col(k) = columns[k];
  out.solution_dim = dim - linalg::numerical_rank(a, tol.rank, tol.zero).rank;
  out.forced_zero = out.solution_dim == 0;
  return out;
}

}  // namespace nij::pencils
