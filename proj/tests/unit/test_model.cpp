#include <gtest/gtest.h>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"
#include "nij/model/model.hpp"

using namespace nij;
using namespace nij::model;

namespace {

MatrixXd random_invertible(int m, Rng& rng) {
  return MatrixXd::Identity(m, m) + 0.4 * rng.normal_matrix(m, m);
}

// Trace of v -> N(e_i, J N(e_j, v)) - (i <-> j), summed index by index.
MatrixXd bryant_loop_oracle(const NTensor& n) {
  const int m = n.dim();
  const MatrixXd& j = n.structure().matrix();
  MatrixXd out = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) {
            s += n(a, i, b) * j(b, c) * n(c, k, a);
            s -= n(a, k, b) * j(b, c) * n(c, i, a);
          }
      out(i, k) = s;
    }
  return out;
}

double trace_nn(const NTensor& n, const VectorXd& xi) {
  const MatrixXd a = n.left(xi);
  return (a * a).trace();
}

}  // namespace

TEST(CheckAcs, StandardStructureHolds) { EXPECT_TRUE(check_acs(standard_structure(3), 1e-9)); }

TEST(CheckAcs, IdentityFails) { EXPECT_FALSE(check_acs(MatrixXd::Identity(6, 6), 1e-9)); }

TEST(CheckAcs, ConjugatedStructureHolds) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd p = random_invertible(6, rng);
    EXPECT_TRUE(check_acs(p * standard_structure(3) * p.inverse(), 1e-9));
  }
}

TEST(CheckAcs, OddDimensionThrows) {
  try {
    check_acs(MatrixXd::Zero(3, 3), 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}

TEST(CSMatrix, RejectsNonStructure) {
  EXPECT_THROW(CSMatrix(MatrixXd::Identity(4, 4)), Error);
}

TEST(NIdentities, ZeroTensorPasses) {
  EXPECT_TRUE(n_identities_check(NTensor(CSMatrix(standard_structure(3))), 1e-9));
}

TEST(NIdentities, RandomTensorPassesAndPerturbedFails) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const CSMatrix j = random_structure(3, rng);
    const NTensor n = random_tensor(j, rng);
    EXPECT_TRUE(n_identities_check(n, 1e-9));
    EXPECT_FALSE(n_identities_check(n.perturbed(0, 1, 4, 1.0), 1e-9));
  }
}

TEST(NTensor, SkewSymmetryIsExact) {
  Rng rng(3);
  const NTensor n = random_tensor(random_structure(2, rng), rng);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) EXPECT_EQ(n(k, i, j), -n(k, j, i));
}

TEST(ImageKernel, ZeroTensor) {
  const NTensor n(CSMatrix(standard_structure(3)));
  EXPECT_EQ(image(n).real_dim(), 0);
  EXPECT_EQ(image(n).complex_dim(), 0);
  EXPECT_EQ(kernel(n).real_dim(), 6);
  EXPECT_EQ(degeneracy_class(n).tag, DegeneracyTag::Zero);
}

TEST(ImageKernel, RandomTensorIsNondegenerateAndInvariant) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const NTensor n = random_tensor(random_structure(3, rng), rng);
    const ComplexSubspace img = image(n);
    EXPECT_EQ(img.complex_dim(), 3);
    EXPECT_LT(img.invariance_residual(), 1e-9);
    const DegeneracyClass dc = degeneracy_class(n);
    EXPECT_EQ(dc.tag, DegeneracyTag::NDG);
    EXPECT_FALSE(dc.unreliable);
  }
}

TEST(ImageKernel, SingleTargetTensorIsDG2WithKernel) {
  Rng rng(5);
  const CSMatrix j = random_structure(3, rng);
  const MatrixXd frame = adapted_frame(j);
  ComplexComponents comps(3, MatrixXcd::Zero(3, 3));
  comps[0](0, 1) = {1.0, 0.5};
  comps[0](1, 0) = -comps[0](0, 1);
  comps[0](1, 2) = {-0.3, 2.0};
  comps[0](2, 1) = -comps[0](1, 2);
  const NTensor n = from_complex_components(j, frame, comps);
  const DegeneracyClass dc = degeneracy_class(n);
  EXPECT_EQ(dc.tag, DegeneracyTag::DG2);
  ASSERT_TRUE(dc.kernel.has_value());
  EXPECT_EQ(dc.kernel->real_dim(), 2);
  EXPECT_LT(dc.kernel->invariance_residual(), 1e-9);
  for (int c = 0; c < 2; ++c) {
    const VectorXd v = dc.kernel->basis().col(c);
    for (int i = 0; i < 6; ++i) EXPECT_LT(n.apply(v, VectorXd::Unit(6, i)).norm(), 1e-9);
  }
}

TEST(ImageKernel, TwoTargetTensorIsDG1) {
  Rng rng(6);
  const CSMatrix j = random_structure(3, rng);
  ComplexComponents comps(3, MatrixXcd::Zero(3, 3));
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        comps[c](a, b) = {rng.normal(), rng.normal()};
        comps[c](b, a) = -comps[c](a, b);
      }
  const NTensor n = from_complex_components(j, adapted_frame(j), comps);
  EXPECT_EQ(degeneracy_class(n).tag, DegeneracyTag::DG1);
}

TEST(DegeneracyClass, OtherDimensionsReportRank) {
  Rng rng(7);
  const NTensor n = random_tensor(random_structure(2, rng), rng);
  const DegeneracyClass dc = degeneracy_class(n);
  EXPECT_EQ(dc.tag, DegeneracyTag::Rank);
  EXPECT_EQ(dc.complex_rank, 1);
  EXPECT_EQ(dc.name(), "RANK(1)");
}

TEST(DegeneracyClass, InvariantUnderConjugation) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const CSMatrix j = random_structure(3, rng);
    ComplexComponents comps(3, MatrixXcd::Zero(3, 3));
    const int targets = 1 + static_cast<int>(rng.index(3));
    for (int c = 0; c < targets; ++c)
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
          comps[c](a, b) = {rng.normal(), rng.normal()};
          comps[c](b, a) = -comps[c](a, b);
        }
    const NTensor n = from_complex_components(j, adapted_frame(j), comps);
    const NTensor moved = n.transformed(random_invertible(6, rng));
    EXPECT_EQ(degeneracy_class(n).tag, degeneracy_class(moved).tag);
  }
}

TEST(Bryant, ZeroTensorGivesZero) {
  const NTensor n(CSMatrix(standard_structure(3)));
  EXPECT_EQ(linalg::max_abs(bryant_form(n)), 0.0);
  EXPECT_EQ(linalg::max_abs(quadric_form(n)), 0.0);
  EXPECT_EQ(linalg::max_abs(omega_complex_oracle(n)), 0.0);
}

TEST(Bryant, SkewCompatibleAndTraceIdentity) {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const NTensor n = random_tensor(random_structure(3, rng), rng);
    const MatrixXd& j = n.structure().matrix();
    const MatrixXd w = bryant_form(n);
    const double scale = std::max(1.0, linalg::max_abs(w));
    EXPECT_LT(linalg::max_abs(w + w.transpose()), 1e-9 * scale);
    EXPECT_LT(linalg::max_abs(j.transpose() * w * j - w), 1e-9 * scale);
    for (int s = 0; s < 100; ++s) {
      const VectorXd xi = rng.normal_vector(6);
      const double lhs = xi.dot(w * (j * xi));
      EXPECT_NEAR(lhs, 2.0 * trace_nn(n, xi), 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST(Bryant, MatchesLoopOracle) {
  Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    const NTensor n = random_tensor(random_structure(3, rng), rng);
    const MatrixXd w = bryant_form(n);
    EXPECT_LT(linalg::max_abs(w - bryant_loop_oracle(n)), 1e-9 * std::max(1.0, linalg::max_abs(w)));
  }
}

TEST(Bryant, EquivariantUnderLinearMaps) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const NTensor n = random_tensor(random_structure(3, rng), rng);
    const MatrixXd p = random_invertible(6, rng);
    const MatrixXd w = bryant_form(n);
    const MatrixXd w2 = bryant_form(n.transformed(p));
    // omega'(P xi, P eta) = omega(xi, eta)
    EXPECT_LT(linalg::max_abs(p.transpose() * w2 * p - w), 1e-8 * std::max(1.0, linalg::max_abs(w)));
  }
}

TEST(Quadric, SymmetricAndRelatedToOmega) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const NTensor n = random_tensor(random_structure(3, rng), rng);
    const MatrixXd& j = n.structure().matrix();
    const MatrixXd q = quadric_form(n);
    const MatrixXd w = bryant_form(n);
    const double scale = std::max(1.0, linalg::max_abs(w));
    EXPECT_LT(linalg::max_abs(q - q.transpose()), 1e-9 * scale);
    EXPECT_LT(linalg::max_abs(q - w * j), 1e-9 * scale);
    for (int s = 0; s < 10; ++s) {
      const VectorXd xi = rng.normal_vector(6);
      EXPECT_NEAR(xi.dot(q * xi), 2.0 * trace_nn(n, xi), 1e-9 * scale * xi.squaredNorm());
    }
  }
}

TEST(OmegaDegenerate, ZeroMatrix) {
  const OmegaDegeneracy d = omega_degenerate(MatrixXd::Zero(6, 6));
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.kernel.cols(), 6);
}

TEST(OmegaDegenerate, RandomTensorNondegenerate) {
  Rng rng(13);
  int nondegenerate = 0;
  for (int t = 0; t < 50; ++t) {
    const NTensor n = random_tensor(random_structure(3, rng), rng);
    if (!omega_degenerate(bryant_form(n)).degenerate) ++nondegenerate;
  }
  EXPECT_GT(nondegenerate, 25);
}

TEST(OmegaComplex, ProportionalWithUniversalConstant) {
  Rng rng(14);
  double c0 = 0.0;
  for (int t = 0; t < 50; ++t) {
    const NTensor n = random_tensor(random_structure(3, rng), rng);
    const MatrixXd w = bryant_form(n);
    const MatrixXd o = omega_complex_oracle(n);
    Eigen::Index r, c;
    w.cwiseAbs().maxCoeff(&r, &c);
    const double ratio = o(r, c) / w(r, c);
    if (t == 0) c0 = ratio;
    EXPECT_NEAR(ratio, c0, 1e-6 * std::abs(c0));
    EXPECT_LT(linalg::max_abs(o - c0 * w), 1e-8 * linalg::max_abs(w));
  }
  EXPECT_GT(c0, 0.0);
  EXPECT_NEAR(c0, 0.5, 1e-9);
}

TEST(OmegaComplex, ConjugateConventionFlipsSign) {
  Rng rng(15);
  const NTensor n = random_tensor(random_structure(3, rng), rng);
  const MatrixXd w = bryant_form(n);
  EXPECT_LT(linalg::max_abs(omega_complex_oracle(n, ComponentConvention::Conjugate) + 0.5 * w),
            1e-8 * linalg::max_abs(w));
}

TEST(OmegaComplex, SingleComponentHandExpansion) {
  // Standard J0, one component N(f_2, f_1) = c f_1: T = |c|^2 E_22, so the
  // form pairs f_2 with J f_2 = e_3 with value 2 |c|^2.
  const CSMatrix j(standard_structure(3));
  const std::complex<double> c{0.6, -1.3};
  ComplexComponents comps(3, MatrixXcd::Zero(3, 3));
  comps[0](1, 0) = c;
  comps[0](0, 1) = -c;
  const NTensor n = from_complex_components(j, MatrixXd::Identity(6, 6), comps);
  MatrixXd expected = MatrixXd::Zero(6, 6);
  expected(2, 3) = 2.0 * std::norm(c);
  expected(3, 2) = -2.0 * std::norm(c);
  EXPECT_LT(linalg::max_abs(omega_complex_oracle(n) - expected), 1e-12);
}

TEST(AdaptedFrame, IsJAdapted) {
  Rng rng(16);
  const CSMatrix j = random_structure(3, rng);
  const MatrixXd f = adapted_frame(j);
  for (int a = 0; a < 3; ++a) EXPECT_LT((j.matrix() * f.col(2 * a) - f.col(2 * a + 1)).norm(), 1e-12);
  EXPECT_GT(std::abs(f.determinant()), 1e-6);
  const VectorXd v = rng.normal_vector(6);
  EXPECT_LT((to_real(f, to_complex(f, v)) - v).norm(), 1e-12);
}
