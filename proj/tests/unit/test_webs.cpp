#include <gtest/gtest.h>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"
#include "nij/webs/webs.hpp"

using namespace nij;
using namespace nij::webs;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd complex_line(const MatrixXd& j, const VectorXd& v) {
  MatrixXd p(4, 2);
  p.col(0) = v;
  p.col(1) = j * v;
  return p;
}

PlaneWeb4 random_complex_web(const MatrixXd& j, Rng& rng) {
  PlaneWeb4 w;
  for (auto& p : w.planes) p = complex_line(j, rng.normal_vector(4));
  return w;
}

MatrixXd coord_plane(int a, int b) {
  MatrixXd p = MatrixXd::Zero(4, 2);
  p(a, 0) = 1.0;
  p(b, 1) = 1.0;
  return p;
}

// Web with planes E = span(e0, e1), F = span(e2, e3), graph(I), graph(L^-1):
// the automorphism built by web_to_J is L.
PlaneWeb4 web_with_l(const Eigen::Matrix2d& l) {
  PlaneWeb4 w;
  w.planes[0] = coord_plane(0, 1);
  w.planes[1] = coord_plane(2, 3);
  w.planes[2] = MatrixXd(4, 2);
  w.planes[2] << Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity();
  w.planes[3] = MatrixXd(4, 2);
  w.planes[3] << Eigen::Matrix2d::Identity(), l.inverse();
  return w;
}

ErrorKind kind_of(const PlaneWeb4& w) {
  try {
    web_to_J(w);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;  // no error
}

}  // namespace

TEST(GraphMap, DiagonalIsIdentity) {
  PlaneWeb4 w = web_with_l(2.0 * Eigen::Matrix2d::Identity() + Eigen::Matrix2d{{0, 1}, {-1, 0}});
  EXPECT_LT((graph_map(w, 2) - Eigen::Matrix2d::Identity()).norm(), 1e-15);
}

TEST(GraphMap, RotationLikeMap) {
  PlaneWeb4 w = web_with_l(Eigen::Matrix2d{{0, 1}, {-1, 0}});
  // span(e0 + f1, e1 - f0)
  w.planes[2] = MatrixXd::Zero(4, 2);
  w.planes[2](0, 0) = 1.0;
  w.planes[2](3, 0) = 1.0;
  w.planes[2](1, 1) = 1.0;
  w.planes[2](2, 1) = -1.0;
  const Eigen::Matrix2d expected{{0, -1}, {1, 0}};
  EXPECT_LT((graph_map(w, 2) - expected).norm(), 1e-15);
}

TEST(GraphMap, NonGraphIsAnError) {
  PlaneWeb4 w = web_with_l(Eigen::Matrix2d::Identity() * 2.0);
  w.planes[2] = coord_plane(0, 2);
  try {
    graph_map(w, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularConfiguration);
  }
}

TEST(WebToJ, RecoversStandardStructure) {
  const MatrixXd j0 = model::standard_structure(2);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const WebSolution sol = web_to_J(random_complex_web(j0, rng));
    const double d = std::min((sol.j.matrix() - j0).norm(), (sol.j.matrix() + j0).norm());
    EXPECT_LT(d, 1e-10);
  }
}

TEST(WebToJ, RoundTripRandomStructures) {
  Rng rng(2);
  for (int t = 0; t < 1000; ++t) {
    const MatrixXd j = model::random_structure(2, rng).matrix();
    const PlaneWeb4 w = random_complex_web(j, rng);
    const WebSolution sol = web_to_J(w);
    const double d = std::min((sol.j.matrix() - j).cwiseAbs().maxCoeff(), (sol.j.matrix() + j).cwiseAbs().maxCoeff());
    EXPECT_LT(d, 1e-9);
    EXPECT_TRUE(verify_web(sol.j.matrix(), w));
    EXPECT_TRUE(verify_web(sol.minus_j, w));
  }
}

TEST(WebToJ, SignConventionIsDeterministic) {
  Rng rng(3);
  const MatrixXd j = model::random_structure(2, rng).matrix();
  const PlaneWeb4 w = random_complex_web(j, rng);
  const WebSolution sol = web_to_J(w);
  // J e lies in plane 0; its second coordinate in the plane-0 basis is positive.
  const Eigen::Vector2d c = w.planes[0].colPivHouseholderQr().solve(sol.j.matrix() * w.planes[0].col(0));
  EXPECT_GT(c(1), 0.0);
}

TEST(WebToJ, EigenvalueParametrization) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const PlaneWeb4 w = random_complex_web(model::random_structure(2, rng).matrix(), rng);
    const WebSolution sol = web_to_J(w);
    const Eigen::Matrix2d m = sol.beta * sol.l - sol.lambda * Eigen::Matrix2d::Identity();
    const Eigen::Vector2cd ev = m.eigenvalues();
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(ev(k).real(), 0.0, 1e-9);
      EXPECT_NEAR(std::abs(ev(k).imag()), 1.0, 1e-9);
    }
  }
}

TEST(WebToJ, RealSpectrumIsRejected) {
  EXPECT_EQ(kind_of(web_with_l(Eigen::Matrix2d{{2, 0}, {0, 3}})), ErrorKind::NoComplexStructure);
}

TEST(WebToJ, JordanBoxIsRejected) {
  EXPECT_EQ(kind_of(web_with_l(Eigen::Matrix2d{{2, 1}, {0, 2}})), ErrorKind::NoComplexStructure);
}

TEST(WebToJ, ScalarLIsDegenerate) {
  EXPECT_EQ(kind_of(web_with_l(2.0 * Eigen::Matrix2d::Identity())), ErrorKind::DegenerateWeb);
}

TEST(WebToJ, IntersectingPlanesAreSingular) {
  PlaneWeb4 w = web_with_l(Eigen::Matrix2d{{0, 1}, {-1, 0}});
  w.planes[3] = coord_plane(0, 2);
  EXPECT_EQ(kind_of(w), ErrorKind::SingularConfiguration);
}

TEST(WebToJ, ErrorDichotomyOnArbitraryWebs) {
  Rng rng(5);
  int solved = 0, errors = 0;
  for (int t = 0; t < 500; ++t) {
    PlaneWeb4 w;
    for (auto& p : w.planes) p = rng.normal_matrix(4, 2);
    try {
      const WebSolution sol = web_to_J(w);
      EXPECT_TRUE(verify_web(sol.j.matrix(), w));
      ++solved;
    } catch (const Error& e) {
      const ErrorKind k = e.kind();
      EXPECT_TRUE(k == ErrorKind::NoComplexStructure || k == ErrorKind::DegenerateWeb ||
                  k == ErrorKind::SingularConfiguration);
      ++errors;
    }
  }
  EXPECT_GT(solved, 0);
  EXPECT_GT(errors, 0);
}

TEST(WebToJ, NoThirdSolutionOnNet) {
  // Every J1 = [[a, b], [c, -a]] on plane 0 with a^2 + b c = -1 commuting with
  // L lies near +J1 or -J1.
  Rng rng(6);
  const MatrixXd j = model::random_structure(2, rng).matrix();
  const PlaneWeb4 w = random_complex_web(j, rng);
  const WebSolution sol = web_to_J(w);
  const Eigen::Matrix2d jl = sol.beta * sol.l - sol.lambda * Eigen::Matrix2d::Identity();
  const double scale = sol.l.norm();
  int near_plus = 0, near_minus = 0, other = 0;
  for (double a = -4.0; a <= 4.0; a += 0.01)
    for (double b = -4.0; b <= 4.0; b += 0.01) {
      if (std::abs(b) < 1e-3) continue;
      const Eigen::Matrix2d m{{a, b}, {-(1 + a * a) / b, -a}};
      if ((m * sol.l - sol.l * m).norm() > 0.02 * scale) continue;
      if ((m - jl).norm() < 0.5) ++near_plus;
      else if ((m + jl).norm() < 0.5) ++near_minus;
      else ++other;
    }
  EXPECT_EQ(other, 0);
  if (std::abs(jl(0, 0)) < 4.0 && std::abs(jl(0, 1)) < 4.0) {
    EXPECT_GT(near_plus, 0);
    EXPECT_GT(near_minus, 0);
  }
}

TEST(VerifyWeb, NonComplexPlaneFails) {
  const MatrixXd j0 = model::standard_structure(2);
  Rng rng(7);
  PlaneWeb4 w = random_complex_web(j0, rng);
  EXPECT_TRUE(verify_web(j0, w));
  EXPECT_TRUE(verify_web(-j0, w));
  w.planes[1] = coord_plane(0, 2);
  EXPECT_FALSE(verify_web(j0, w));
}

TEST(MinWebSize, Formula) {
  EXPECT_EQ(min_web_size(2), 4);
  EXPECT_EQ(min_web_size(3), 5);
  EXPECT_EQ(min_web_size(10), 12);
  EXPECT_THROW(min_web_size(1), Error);
}
