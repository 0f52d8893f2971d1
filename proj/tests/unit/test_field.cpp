#include <gtest/gtest.h>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"
#include "nij/field/generators.hpp"
#include "nij/field/structure.hpp"

using namespace nij;
using namespace nij::field;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double rel_diff(const model::NTensor& a, const model::NTensor& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d / std::max(1.0, a.max_abs());
}

MatrixXd well_conditioned(int m, Rng& rng) {
  for (;;) {
    MatrixXd p = MatrixXd::Identity(m, m) + 0.4 * rng.normal_matrix(m, m);
    Eigen::JacobiSVD<MatrixXd> svd(p);
    if (svd.singularValues()(m - 1) > 0.5) return p;
  }
}

}  // namespace

TEST(PolyExpr, EvaluatesAndDifferentiates) {
  // 3 x0 x1^2 - 2 + x2
  const PolyExpr p(3, {{3.0, {1, 2, 0}}, {-2.0, {0, 0, 0}}, {1.0, {0, 0, 1}}});
  VectorXd x(3);
  x << 0.5, -2.0, 0.25;
  EXPECT_DOUBLE_EQ(p.eval(x), 3.0 * 0.5 * 4.0 - 2.0 + 0.25);
  EXPECT_DOUBLE_EQ(p.derivative(1).eval(x), 6.0 * 0.5 * -2.0);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_TRUE(p.depends_on(2));
  EXPECT_FALSE(p.derivative(0).depends_on(0));
}

TEST(PolyExpr, MergesLikeTermsAndComposes) {
  const PolyExpr p(2, {{1.0, {1, 0}}, {2.0, {1, 0}}, {0.0, {0, 1}}});
  EXPECT_EQ(p.coefficients().size(), 1u);
  const PolyExpr x = PolyExpr::variable(2, 0), y = PolyExpr::variable(2, 1);
  const PolyExpr sq = (x + y) * (x + y);
  const PolyExpr composed = sq.compose({x - y, y});
  VectorXd v(2);
  v << 1.5, 0.7;
  EXPECT_NEAR(composed.eval(v), 1.5 * 1.5, 1e-14);
}

TEST(PolyExpr, MonomialCount) {
  EXPECT_EQ(monomials(4, 2).size(), 15u);
  EXPECT_EQ(monomials(6, 2).size(), 28u);
}

TEST(GridPoints, CenterAndCount) {
  const Box b = Box::cube(2, -1.0, 3.0);
  const auto one = grid_points(b, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0](0), 1.0);
  EXPECT_EQ(grid_points(b, 5).size(), 25u);
}

TEST(EvalJ, ConstantStructure) {
  const MatrixXd j0 = model::standard_structure(2);
  const ChartedStructure s = constant_structure(j0, Box::cube(4, -1, 1));
  EXPECT_EQ(eval_J(s, VectorXd::Constant(4, 0.3)).matrix(), j0);
  try {
    eval_J(s, VectorXd::Constant(4, 2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(EvalJ, RejectsNonStructure) {
  PolyMatrix id = identity(4, 4);
  EXPECT_THROW(ChartedStructure(Box::cube(4, -1, 1), id), Error);
}

TEST(EvalJ, ComplexBlockIsExactAtRationalPoints) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const PolyMatrix b = random_complex_block(3, 4, rng);
    VectorXd x(3);
    x << 0.5, -0.25, 0.125;
    const MatrixXd m = eval(b, x);
    EXPECT_LT(linalg::max_abs(m * m + MatrixXd::Identity(2, 2)), 1e-12);
    EXPECT_GE(m(1, 0), 1.0);
  }
}

TEST(DJ, ConstantIsZero) {
  const ChartedStructure s = constant_structure(model::standard_structure(2), Box::cube(4, -1, 1));
  for (const MatrixXd& d : d_J(s, VectorXd::Zero(4))) EXPECT_EQ(linalg::max_abs(d), 0.0);
}

TEST(DJ, SingleTermDerivative) {
  const double c = 1.75;
  const PolyExpr term(2, {{c, {1, 1}}});
  VectorXd x(2);
  x << 0.3, -0.8;
  EXPECT_DOUBLE_EQ(term.derivative(0).eval(x), c * x(1));
}

TEST(DJ, ExactMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ChartedStructure s = random_polynomial_structure(4, 4, seed, Box::cube(4, -1, 1));
    Rng rng(seed + 100);
    const VectorXd x = rng.uniform_vector(VectorXd::Constant(4, -0.8), VectorXd::Constant(4, 0.8));
    const auto exact = d_J(s, x);
    const auto fd = d_J_fd(s, x);
    for (int a = 0; a < 4; ++a)
      EXPECT_LT(linalg::max_abs(exact[a] - fd[a]), 1e-6 * std::max(1.0, linalg::max_abs(exact[a])));
  }
}

TEST(Nijenhuis, ConstantStructureIsZero) {
  Rng rng(4);
  const ChartedStructure s = constant_structure(model::random_structure(3, rng).matrix(), Box::cube(6, -1, 1));
  EXPECT_EQ(nijenhuis_at(s, VectorXd::Constant(6, 0.1)).max_abs(), 0.0);
}

TEST(Nijenhuis, AnalyticMatchesBracketOracle) {
  for (int m : {4, 6, 8}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const ChartedStructure s = random_polynomial_structure(m, 4, seed * 7 + m, Box::cube(m, -1, 1));
      Rng rng(seed);
      const VectorXd x = rng.uniform_vector(VectorXd::Constant(m, -0.9), VectorXd::Constant(m, 0.9));
      const model::NTensor n = nijenhuis_at(s, x);
      EXPECT_TRUE(model::n_identities_check(n, 1e-9));
      EXPECT_GT(n.max_abs(), 1e-3);
      EXPECT_LT(rel_diff(n, nijenhuis_fd_oracle(s, x)), 1e-6);
    }
  }
}

TEST(Nijenhuis, NaturalUnderLinearMaps) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int m = seed % 2 ? 4 : 6;
    const ChartedStructure s = random_polynomial_structure(m, 2, seed, Box::cube(m, -1, 1));
    Rng rng(seed + 50);
    const MatrixXd p = well_conditioned(m, rng);
    const DiffeoPair phi = DiffeoPair::linear(p, Box::cube(m, -1, 1), Box::cube(m, -0.1, 0.1));
    const PullbackResult pb = pullback(s, phi, 2);
    const VectorXd y = rng.uniform_vector(VectorXd::Constant(m, -0.1), VectorXd::Constant(m, 0.1));
    const VectorXd x = phi.apply_inverse(y);
    const model::NTensor expected = push_forward(nijenhuis_at(s, x), p);
    EXPECT_LT(rel_diff(expected, nijenhuis_at(pb.structure, y)), 1e-8);
  }
}

TEST(Pullback, IdentityDiffeoKeepsStructure) {
  const ChartedStructure s = random_polynomial_structure(4, 4, 9, Box::cube(4, -1, 1));
  const DiffeoPair id = DiffeoPair::linear(MatrixXd::Identity(4, 4), Box::cube(4, -1, 1), Box::cube(4, -1, 1));
  const PullbackResult pb = pullback(s, id, 4);
  for (const VectorXd& x : grid_points(Box::cube(4, -1, 1), 3))
    EXPECT_LT(linalg::max_abs(pb.structure.eval_raw(x) - s.eval_raw(x)), 1e-9);
}

TEST(Pullback, LinearClosedForm) {
  const ChartedStructure s = random_polynomial_structure(4, 2, 11, Box::cube(4, -1, 1));
  Rng rng(12);
  const MatrixXd p = well_conditioned(4, rng);
  const DiffeoPair phi = DiffeoPair::linear(p, Box::cube(4, -1, 1), Box::cube(4, -0.1, 0.1));
  const PullbackResult pb = pullback(s, phi, 2);
  EXPECT_LT(pb.fit_residual, 1e-9);
  for (int t = 0; t < 10; ++t) {
    const VectorXd y = rng.uniform_vector(VectorXd::Constant(4, -0.1), VectorXd::Constant(4, 0.1));
    const MatrixXd expected = p * s.eval_raw(p.inverse() * y) * p.inverse();
    EXPECT_LT(linalg::max_abs(pb.structure.eval_raw(y) - expected), 1e-9);
  }
}

TEST(Pullback, ShearOfConstantIsIntegrable) {
  Rng rng(13);
  const ChartedStructure s = constant_structure(model::random_structure(2, rng).matrix(), Box::cube(4, -3, 3));
  const DiffeoPair phi = random_diffeo(4, 21, Box::cube(4, -0.5, 0.5));
  validate_diffeo(phi);
  const PullbackResult pb = pullback(s, phi, 2);
  EXPECT_GT(pb.structure.degree(), 0);
  const ScanReport rep = integrability_scan(pb.structure, 3);
  EXPECT_LT(rep.max_norm, 1e-6);
}

TEST(Pullback, LowDegreeRefitFails) {
  Rng rng(14);
  const ChartedStructure s = constant_structure(model::random_structure(2, rng).matrix(), Box::cube(4, -3, 3));
  const DiffeoPair phi = random_diffeo(4, 22, Box::cube(4, -0.5, 0.5));
  try {
    pullback(s, phi, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Refit);
  }
}

TEST(Pullback, LeavingDomainIsAnError) {
  const ChartedStructure s = constant_structure(model::standard_structure(2), Box::cube(4, -0.1, 0.1));
  const DiffeoPair phi = DiffeoPair::linear(MatrixXd::Identity(4, 4), Box::cube(4, -1, 1), Box::cube(4, -1, 1));
  EXPECT_THROW(pullback(s, phi, 0), Error);
}

TEST(Diffeo, RandomDiffeoRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DiffeoPair phi = random_diffeo(6, seed, Box::cube(6, -0.5, 0.5));
    EXPECT_LT(phi.roundtrip_residual(), 1e-9);
  }
}

TEST(Scan, ConstantStructureIsIntegrable) {
  const ChartedStructure s = constant_structure(model::standard_structure(2), Box::cube(4, -1, 1));
  const ScanReport rep = integrability_scan(s, 3);
  EXPECT_TRUE(rep.integrable);
  EXPECT_EQ(rep.max_norm, 0.0);
  EXPECT_EQ(rep.points, 81u);
  EXPECT_EQ(rep.histogram.at("ZERO"), 81);
  EXPECT_THROW(integrability_scan(s, 0), Error);
}

TEST(Scan, RandomStructureIsNotIntegrable) {
  const ChartedStructure s = random_polynomial_structure(6, 2, 5, Box::cube(6, -1, 1));
  const ScanReport rep = integrability_scan(s, 2);
  EXPECT_FALSE(rep.integrable);
  EXPECT_GT(rep.max_norm, 1e-3);
}
