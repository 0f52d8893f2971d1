#include <gtest/gtest.h>

#include "nij/common/error.hpp"
#include "nij/common/linalg.hpp"
#include "nij/field/generators.hpp"
#include "nij/pencils/pencils.hpp"

using namespace nij;
using namespace nij::pencils;
using field::PolyExpr;
using field::PolyMatrix;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd sample(Rng& rng) { return rng.uniform_vector(VectorXd::Constant(6, -0.9), VectorXd::Constant(6, 0.9)); }

MatrixXd coord_span(std::initializer_list<int> idx) {
  MatrixXd b = MatrixXd::Zero(6, static_cast<Eigen::Index>(idx.size()));
  int c = 0;
  for (int i : idx) b(i, c++) = 1.0;
  return b;
}

std::vector<bool> mask(std::initializer_list<int> vars) {
  std::vector<bool> u(6, false);
  for (int v : vars) u[v] = true;
  return u;
}

MatrixXd complex_span(const MatrixXd& j, const MatrixXd& vs) {
  MatrixXd out(j.rows(), 2 * vs.cols());
  for (Eigen::Index c = 0; c < vs.cols(); ++c) {
    out.col(2 * c) = vs.col(c);
    out.col(2 * c + 1) = j * vs.col(c);
  }
  return out;
}

}  // namespace

TEST(Example1, ExactStructureAndBlockForm) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = make_example1(seed, 4);
    Rng rng(seed);
    for (int t = 0; t < 20; ++t) {
      // Dyadic rationals keep every product exact up to rounding of the sums.
      VectorXd x(6);
      for (int i = 0; i < 6; ++i) x(i) = static_cast<double>(static_cast<int>(rng.index(17)) - 8) / 8.0;
      const MatrixXd j = s.eval_raw(x);
      EXPECT_LT(linalg::max_abs(j * j + MatrixXd::Identity(6, 6)), 1e-12);
      for (int b = 0; b < 3; ++b) {
        MatrixXd off = j.middleCols(2 * b, 2);
        off.middleRows(2 * b, 2).setZero();
        EXPECT_EQ(linalg::max_abs(off), 0.0);
      }
    }
  }
}

TEST(Example1, DependsOnAllVariablesAndIsDeterministic) {
  const auto s = make_example1(9, 4);
  for (int b = 0; b < 3; ++b)
    for (int v = 0; v < 6; ++v) EXPECT_TRUE(s.entry(2 * b + 1, 2 * b).depends_on(v));
  const VectorXd x = VectorXd::Constant(6, 0.25);
  EXPECT_EQ(s.eval_raw(x), make_example1(9, 4).eval_raw(x));
  EXPECT_NE(s.eval_raw(x), make_example1(10, 4).eval_raw(x));
  EXPECT_THROW(make_example1(1, kMaxDegree + 1), Error);
}

TEST(Example1, GenericSeedsAreNonDegenerate) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = make_example1(seed, 4);
    Rng rng(seed + 100);
    int ndg = 0, generic = 0;
    for (int t = 0; t < 100; ++t) {
      const VectorXd x = sample(rng);
      if (model::degeneracy_class(field::nijenhuis_at(s, x)).tag == model::DegeneracyTag::NDG) ++ndg;
      if (genericity_check_e1(s, x)) ++generic;
    }
    EXPECT_GE(ndg, 90);
    EXPECT_GE(generic, 90);
  }
}

TEST(Example1, GenericityFailsWhenBlocksIgnoreV1) {
  Rng rng(4);
  const PolyMatrix a1 = field::random_complex_block(6, 0, rng);
  const PolyMatrix a2 = field::random_complex_block(6, 4, rng, mask({2, 3, 4, 5}));
  const PolyMatrix a3 = field::random_complex_block(6, 4, rng, mask({2, 3, 4, 5}));
  const field::ChartedStructure s(field::Box::cube(6, -1, 1), field::block_diagonal({a1, a2, a3}, 6));
  const VectorXd x = VectorXd::Constant(6, 0.3);
  EXPECT_FALSE(genericity_check_e1(s, x));
  // Direct evaluation: N(V1, V2) = 0, which lies in V1.
  const model::NTensor n = field::nijenhuis_at(s, x);
  for (int a = 0; a < 2; ++a)
    for (int b = 2; b < 4; ++b) EXPECT_LT(n.pair(a, b).norm(), 1e-12);
  EXPECT_GT(n.max_abs(), 1e-3);
}

TEST(Example1, ConstantBlocksAreNotGeneric) {
  const auto s = make_example1(3, 0);
  EXPECT_FALSE(genericity_check_e1(s, VectorXd::Zero(6)));
}

TEST(Example2, QuotientBlockIsProjectible) {
  for (const bool tri : {false, true}) {
    const auto s = make_example2(5, 4, tri);
    for (int i = 2; i < 6; ++i) {
      for (int k = 2; k < 6; ++k) {
        EXPECT_FALSE(s.entry(i, k).depends_on(0));
        EXPECT_FALSE(s.entry(i, k).depends_on(1));
      }
      for (int k = 0; k < 2; ++k) EXPECT_TRUE(s.entry(i, k).is_zero());
    }
    bool upper = false;
    for (int i = 0; i < 2; ++i)
      for (int k = 2; k < 6; ++k) upper = upper || !s.entry(i, k).is_zero();
    EXPECT_EQ(upper, tri);
    EXPECT_LT(s.validation_residual(), 1e-10);
  }
}

TEST(Example2, NeverNonDegenerate) {
  for (const bool tri : {false, true})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = make_example2(seed, 4, tri);
      Rng rng(seed);
      for (int t = 0; t < 100; ++t) {
        const auto tag = model::degeneracy_class(field::nijenhuis_at(s, sample(rng))).tag;
        EXPECT_TRUE(tag == model::DegeneracyTag::DG1 || tag == model::DegeneracyTag::DG2 ||
                    tag == model::DegeneracyTag::Zero);
      }
    }
}

TEST(DG2Cases, KernelEqualsV1) {
  const MatrixXd v1 = coord_span({0, 1});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = make_dg2_kernel_v1(seed, 4);
    Rng rng(seed);
    const auto dc = model::degeneracy_class(field::nijenhuis_at(s, sample(rng)));
    ASSERT_EQ(dc.tag, model::DegeneracyTag::DG2);
    ASSERT_TRUE(dc.kernel.has_value());
    EXPECT_LT(linalg::subspace_distance(dc.kernel->basis(), v1), 1e-6);
  }
}

TEST(DG2Cases, KernelTransversalToV1) {
  const MatrixXd v1 = coord_span({0, 1});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = make_dg2_kernel_transversal(seed, 4);
    Rng rng(seed);
    const VectorXd x = sample(rng);
    const model::NTensor n = field::nijenhuis_at(s, x);
    const auto dc = model::degeneracy_class(n);
    ASSERT_EQ(dc.tag, model::DegeneracyTag::DG2);
    ASSERT_TRUE(dc.kernel.has_value());
    EXPECT_LT(linalg::max_overlap(dc.kernel->basis(), v1), 1e-6);
    // The image lies in V1.
    EXPECT_LT(linalg::subspace_distance(dc.image.basis(), v1), 1e-6);
  }
}

TEST(VerifyPencil, Example2Passes) {
  for (const bool tri : {false, true})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = make_example2(seed, 4, tri);
      const PencilReport r = verify_pencil(s, kV1, product_foliations(s, kV1, seed));
      EXPECT_TRUE(r.pass());
      EXPECT_EQ(r.web_failures, 0);
      EXPECT_LT(r.block_residual, 1e-10);
    }
}

TEST(VerifyPencil, Example1FailsShiftSymmetry) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = make_example1(seed, 4);
    const PencilReport r = verify_pencil(s, kV1, product_foliations(s, kV1, seed));
    EXPECT_TRUE(r.v_invariant);
    EXPECT_FALSE(r.shift_symmetric);
    EXPECT_FALSE(r.pass());
    EXPECT_GT(r.shift_residual, 1e-3);
  }
}

TEST(VerifyPencil, ConstantStructurePasses) {
  const auto s = field::constant_structure(model::standard_structure(3), field::Box::cube(6, -1, 1));
  EXPECT_TRUE(verify_pencil(s, kV1, product_foliations(s, kV1, 3)).pass());
}

TEST(VerifyPencil, NonInvariantVFails) {
  const auto s = make_example2(2, 2, true);
  // span(e2, e3) is not J-invariant for the conjugated quotient block.
  const std::vector<int> v{2, 4};
  const PencilReport r = verify_pencil(s, v, product_foliations(s, v, 1));
  EXPECT_FALSE(r.v_invariant);
  EXPECT_FALSE(r.pass());
}

TEST(VerifyPencil, WebFailuresAreReported) {
  const auto s = make_example2(2, 2, false);
  auto phi = product_foliations(s, kV1, 1);
  phi[3] = phi[2];
  const PencilReport r = verify_pencil(s, kV1, phi);
  EXPECT_GT(r.web_failures, 0);
  EXPECT_FALSE(r.pass());
}

TEST(VerifyPencil, ArgumentErrors) {
  const auto s = make_example2(2, 2, false);
  const auto phi = product_foliations(s, kV1, 1);
  EXPECT_THROW(verify_pencil(s, {0, 0}, phi), Error);
  EXPECT_THROW(verify_pencil(s, {0, 7}, phi), Error);
  EXPECT_THROW(verify_pencil(s, kV1, {phi[0], phi[1]}), Error);
}

TEST(AntilinearBasis, DimensionAndIdentities) {
  Rng rng(1);
  const model::CSMatrix j = model::random_structure(3, rng);
  const auto basis = antilinear_tensor_basis(j);
  ASSERT_EQ(basis.size(), 18u);
  MatrixXd flat(216, 18);
  for (int k = 0; k < 18; ++k) {
    EXPECT_TRUE(model::n_identities_check(basis[k], 1e-9));
    flat.col(k) = Eigen::Map<const VectorXd>(basis[k].data().data(), 216);
  }
  EXPECT_EQ(linalg::numerical_rank(flat, 1e-10, 0.0).rank, 18);
}

TEST(DegeneracyAccumulation, ZeroTensorIsConsistent) {
  Rng rng(2);
  const model::CSMatrix j = model::random_structure(3, rng);
  const model::NTensor zero(j);
  std::vector<DegeneracyConstraint> cons;
  for (int k = 0; k < 3; ++k)
    cons.push_back({DegeneracyConstraint::Kind::ImageIn, complex_span(j.matrix(), rng.normal_matrix(6, 2))});
  const AccumulationVerdict v = degeneracy_accumulation(zero, cons);
  EXPECT_TRUE(v.forced_zero);
  EXPECT_EQ(v.tensor_residual, 0.0);
  EXPECT_EQ(degeneracy_accumulation(zero, {}).solution_dim, 18);
}

TEST(DegeneracyAccumulation, SingleConstraintDoesNotForceZero) {
  Rng rng(3);
  const model::CSMatrix j = model::random_structure(3, rng);
  const MatrixXd frame = model::adapted_frame(j);
  for (int t = 0; t < 20; ++t) {
    // Components only along f1, f2: image in span(f1, J f1, f2, J f2).
    model::ComplexComponents comps(3, Eigen::MatrixXcd::Zero(3, 3));
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
          comps[c](a, b) = {rng.normal(), rng.normal()};
          comps[c](b, a) = -comps[c](a, b);
        }
    const model::NTensor n = model::from_complex_components(j, frame, comps);
    ASSERT_GT(n.max_abs(), 1e-3);
    const AccumulationVerdict v =
        degeneracy_accumulation(n, {{DegeneracyConstraint::Kind::ImageIn, frame.leftCols(4)}});
    EXPECT_FALSE(v.forced_zero);
    EXPECT_EQ(v.solution_dim, 12);
    EXPECT_LT(v.tensor_residual, 1e-12);
  }
}

TEST(DegeneracyAccumulation, KernelConstraint) {
  Rng rng(4);
  const model::CSMatrix j = model::random_structure(3, rng);
  const MatrixXd k = complex_span(j.matrix(), rng.normal_matrix(6, 1));
  const model::NTensor zero(j);
  EXPECT_EQ(degeneracy_accumulation(zero, {{DegeneracyConstraint::Kind::KernelContains, k}}).solution_dim, 6);
}

TEST(DegeneracyAccumulation, FiveGenericPencilsForceZero) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const model::CSMatrix j = model::random_structure(3, rng);
    std::vector<DegeneracyConstraint> cons;
    int prev = 18;
    for (int p = 0; p < 5; ++p) {
      cons.push_back({DegeneracyConstraint::Kind::ImageIn, complex_span(j.matrix(), rng.normal_matrix(6, 2))});
      const AccumulationVerdict v = degeneracy_accumulation(model::NTensor(j), cons);
      EXPECT_LE(v.solution_dim, prev);
      prev = v.solution_dim;
    }
    EXPECT_EQ(prev, 0);
  }
}

TEST(DegeneracyAccumulation, InconsistentSpecificationsThrow) {
  Rng rng(6);
  const model::CSMatrix j = model::random_structure(3, rng);
  const model::NTensor n = model::random_tensor(j, rng);
  const MatrixXd w = complex_span(j.matrix(), rng.normal_matrix(6, 2));
  // Generic tensor leaves the plane.
  EXPECT_THROW(degeneracy_accumulation(n, {{DegeneracyConstraint::Kind::ImageIn, w}}), Error);
  // Not J-invariant.
  EXPECT_THROW(degeneracy_accumulation(model::NTensor(j), {{DegeneracyConstraint::Kind::ImageIn, rng.normal_matrix(6, 4)}}),
               Error);
  // Wrong shape.
  EXPECT_THROW(degeneracy_accumulation(model::NTensor(j), {{DegeneracyConstraint::Kind::KernelContains, w}}), Error);
}
