#include <gtest/gtest.h>

#include "nij/common/error.hpp"
#include "nij/common/random.hpp"
#include "nij/field/s6.hpp"

using namespace nij;
using namespace nij::field;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd unit(int i) { return VectorXd::Unit(7, i); }

VectorXd chart_sample(Rng& rng) { return rng.uniform_vector(VectorXd::Constant(6, -1.5), VectorXd::Constant(6, 1.5)); }

}  // namespace

TEST(S6Cross, BasisProductsFollowTriples) {
  for (const auto& t : s6::kTriples) {
    const int i = t[0] - 1, j = t[1] - 1, k = t[2] - 1;
    EXPECT_LT((s6::cross(unit(i), unit(j)) - unit(k)).norm(), 1e-15);
    EXPECT_LT((s6::cross(unit(j), unit(k)) - unit(i)).norm(), 1e-15);
    EXPECT_LT((s6::cross(unit(j), unit(i)) + unit(k)).norm(), 1e-15);
  }
  for (int i = 0; i < 7; ++i) EXPECT_EQ(s6::cross(unit(i), unit(i)).norm(), 0.0);
}

TEST(S6Cross, NormAndOrthogonalityIdentities) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const VectorXd u = rng.normal_vector(7), v = rng.normal_vector(7);
    const VectorXd w = s6::cross(u, v);
    const double lagrange = u.squaredNorm() * v.squaredNorm() - u.dot(v) * u.dot(v);
    EXPECT_NEAR(w.squaredNorm(), lagrange, 1e-12 * (1.0 + lagrange));
    EXPECT_NEAR(w.dot(u), 0.0, 1e-12 * (1.0 + w.norm() * u.norm()));
    EXPECT_NEAR(w.dot(v), 0.0, 1e-12 * (1.0 + w.norm() * v.norm()));
    // u x (u x v) = -|u|^2 v + (u.v) u
    const VectorXd uuv = s6::cross(u, w);
    EXPECT_LT((uuv + u.squaredNorm() * v - u.dot(v) * u).norm(), 1e-11 * (1.0 + u.squaredNorm() * v.norm()));
  }
}

TEST(S6Cross, RejectsWrongSize) {
  EXPECT_THROW(s6::cross(VectorXd::Zero(6), VectorXd::Zero(7)), Error);
  EXPECT_THROW(s6::structure(VectorXd::Zero(7)), Error);
}

TEST(S6Structure, SpherePointIsUnit) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) EXPECT_NEAR(s6::sphere_point(chart_sample(rng)).norm(), 1.0, 1e-15);
  EXPECT_LT((s6::sphere_point(VectorXd::Zero(6)) + unit(6)).norm(), 1e-15);
}

TEST(S6Structure, AtOriginIsCrossWithSouthPole) {
  const MatrixXd j = s6::structure(VectorXd::Zero(6));
  for (int b = 0; b < 6; ++b) {
    const VectorXd col = s6::cross(-unit(6), unit(b));
    EXPECT_NEAR(col(6), 0.0, 1e-15);
    for (int a = 0; a < 6; ++a) EXPECT_NEAR(j(a, b), col(a), 1e-15);
  }
}

TEST(S6Structure, MatchesCrossProductOnTangentVectors) {
  // sigma_* J v = sigma(y) x sigma_* v, with sigma_* by central differences.
  Rng rng(7);
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const VectorXd y = chart_sample(rng);
    const VectorXd v = rng.normal_vector(6);
    auto push = [&](const VectorXd& w) {
      return VectorXd((s6::sphere_point(y + h * w) - s6::sphere_point(y - h * w)) / (2 * h));
    };
    const VectorXd lhs = push(s6::structure(y) * v);
    const VectorXd rhs = s6::cross(s6::sphere_point(y), push(v));
    EXPECT_LT((lhs - rhs).norm(), 1e-8 * (1.0 + rhs.norm()));
  }
}

TEST(S6Structure, SquaresToMinusIdentityOnGrid) {
  EXPECT_LT(s6::grid_residual(Box::cube(6, -2, 2), 5), 1e-12);
  EXPECT_THROW(s6::grid_residual(Box::cube(4, -1, 1), 3), Error);
}

TEST(S6Structure, DualDerivativeMatchesCentralDifferences) {
  Rng rng(11);
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const VectorXd y = chart_sample(rng);
    const auto dj = s6::derivative(y);
    ASSERT_EQ(dj.size(), 6u);
    for (int a = 0; a < 6; ++a) {
      const VectorXd e = VectorXd::Unit(6, a);
      const MatrixXd fd = (s6::structure(y + h * e) - s6::structure(y - h * e)) / (2 * h);
      EXPECT_LT((dj[a] - fd).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(S6Nijenhuis, NondegenerateWithNondegenerateBryantForm) {
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    const VectorXd y = chart_sample(rng);
    const model::NTensor n = s6::nijenhuis(y);
    const auto cls = model::degeneracy_class(n);
    EXPECT_EQ(cls.tag, model::DegeneracyTag::NDG) << cls.name();
    const auto om = model::omega_degenerate(model::bryant_form(n));
    EXPECT_FALSE(om.degenerate);
    EXPECT_FALSE(om.unreliable);
  }
}
