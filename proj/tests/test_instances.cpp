#include <gtest/gtest.h>

#include "wold/decomp.hpp"
#include "wold/instances.hpp"
#include "wold/linalg.hpp"

using namespace wold;

namespace {

const CircleMeasure kTwoAtoms = CircleMeasure::atomic({{0.6, 1.0}, {2.9, 0.4}});

}  // namespace

TEST(BuildShift1v, ZeroMeasureGivesIsometry) {
  const OperatorModel t = build_shift_1v(CircleMeasure::zero(1), 8);
  EXPECT_LT(defect_operator(t).range.dim(), 1);
  EXPECT_LT(two_isometry_defect(t), 1e-14);
}

TEST(BuildShift1v, LebesgueWeights) {
  const OperatorModel t = build_shift_1v(CircleMeasure::lebesgue(1), 6);
  for (Index m = 0; m <= 6; ++m) EXPECT_NEAR(t.space()->gram()(m, m).real(), 1.0 + m, 1e-14);
}

TEST(BuildShift1v, DefectSmallForAtomicMeasures) {
  for (int caps : {8, 16, 32}) EXPECT_LT(two_isometry_defect(build_shift_1v(kTwoAtoms, caps)), 1e-12) << caps;
}

TEST(BuildPair2v, Examples) {
  const CircleMeasure leb = CircleMeasure::lebesgue(1);
  const OperatorPair p = build_pair_2v(leb, leb, 6, 6);
  const CommutingResiduals r = doubly_commuting_residual(p.first, p.second);
  EXPECT_LT(r.commutator, 1e-10);
  EXPECT_LT(r.double_commutator, 1e-10);

  const OperatorPair h = build_pair_2v(CircleMeasure::zero(1), CircleMeasure::zero(1), 5, 5);
  EXPECT_NEAR(restricted_norm(h.first.whitened(), core(h.first.space(), 0, 1)), 1, 1e-14);
  EXPECT_EQ(defect_operator(h.first).range.dim(), 0);
  EXPECT_EQ(defect_operator(h.second).range.dim(), 0);

  const OperatorPair a = build_pair_2v(CircleMeasure::point_mass(0.3), CircleMeasure::point_mass(2.0), 6, 6);
  EXPECT_LT(two_isometry_defect(a.first), 1e-9);
  EXPECT_LT(two_isometry_defect(a.second), 1e-9);
}

TEST(BuildPair2v, RejectsNonCommutingWeights) {
  Matrix w1 = Matrix::Zero(2, 2), w2 = Matrix::Constant(2, 2, 0.5);
  w1(0, 0) = 1;
  EXPECT_THROW(build_pair_2v(CircleMeasure(2, {{0.1, w1}}, Matrix()), CircleMeasure(2, {{0.5, w2}}, Matrix()), 4, 4),
               PreconditionError);
}

TEST(RandomUnitary, DeterministicAndUnitary) {
  const Matrix a = random_unitary(7, 99), b = random_unitary(7, 99), c = random_unitary(7, 100);
  EXPECT_EQ(a, b);
  EXPECT_GT(linalg::max_abs(a - c), 1e-3);
  EXPECT_LT(linalg::unitarity_defect(a), 1e-13);
}

TEST(Scramble, DeterministicAndResidualInvariant) {
  const OperatorModel t = build_shift_1v(kTwoAtoms, 12);
  const OperatorModel s1 = scramble(t, 5), s2 = scramble(t, 5);
  EXPECT_EQ(s1.matrix(), s2.matrix());
  EXPECT_EQ(s1.space()->gram(), s2.space()->gram());
  EXPECT_NEAR(two_isometry_defect(s1), two_isometry_defect(t), 1e-11);
  const Instance inst = single_instance(3, kTwoAtoms, 10, 17, false);
  const Instance sc = single_instance(3, kTwoAtoms, 10, 17, true);
  EXPECT_NEAR(two_isometry_defect(*sc.single), two_isometry_defect(*inst.single), 1e-11);
  const DefectOperator d0 = defect_operator(*inst.single), d1 = defect_operator(*sc.single);
  EXPECT_EQ(d0.range.dim(), d1.range.dim());
  EXPECT_NEAR(d0.worst_eigenvalue, d1.worst_eigenvalue, 1e-11);
}

TEST(Scramble, PairResidualsInvariant) {
  const OperatorPair p = build_pair_2v(CircleMeasure::point_mass(0.3), CircleMeasure::lebesgue(1), 5, 5);
  const OperatorPair s = scramble(p, 3);
  const CommutingResiduals a = doubly_commuting_residual(p.first, p.second);
  const CommutingResiduals b = doubly_commuting_residual(s.first, s.second);
  EXPECT_NEAR(a.commutator, b.commutator, 1e-11);
  EXPECT_NEAR(a.double_commutator, b.double_commutator, 1e-11);
  EXPECT_NEAR(two_isometry_defect(p.second), two_isometry_defect(s.second), 1e-11);
}

TEST(DirectSum, UnitaryPlusShiftHasStableRangeOfUnitaryDimension) {
  const OperatorModel t =
      direct_sum(std::vector<OperatorModel>{unitary_operator(random_unitary(3, 1)), build_shift_1v(kTwoAtoms, 8)});
  EXPECT_EQ(t.size(), 3 + 9);
  EXPECT_EQ(stable_range(t).dim(), 3);
}

TEST(SingleInstance, BlocksAreOrthogonalAndComplete) {
  const Instance inst = single_instance(4, kTwoAtoms, 10, 3, true);
  ASSERT_EQ(inst.blocks.size(), 2u);
  EXPECT_EQ(inst.blocks[0].dim(), 4);
  EXPECT_EQ(inst.blocks[1].dim(), 11);
  EXPECT_LT(subspace_overlap(inst.blocks[0], inst.blocks[1]), 1e-12);
  EXPECT_LT(two_isometry_defect(*inst.single), 1e-9);
}

TEST(QuadrupleInstance, KnownDims) {
  QuadrupleCaps caps{4, 5, 6, 7};
  const Instance inst = quadruple_instance(3, kTwoAtoms, CircleMeasure::point_mass(1.0), CircleMeasure::point_mass(2.0),
                                           CircleMeasure::lebesgue(1), caps, 11, true);
  ASSERT_EQ(inst.blocks.size(), 4u);
  EXPECT_EQ(inst.blocks[0].dim(), 3);
  EXPECT_EQ(inst.blocks[1].dim(), 7);
  EXPECT_EQ(inst.blocks[2].dim(), 8);
  EXPECT_EQ(inst.blocks[3].dim(), 30);
  EXPECT_LT(two_isometry_defect(inst.pair->first), 1e-9);
  EXPECT_LT(two_isometry_defect(inst.pair->second), 1e-9);
  const CommutingResiduals r = doubly_commuting_residual(inst.pair->first, inst.pair->second);
  EXPECT_LT(r.commutator, 1e-9);
  EXPECT_LT(r.double_commutator, 1e-9);
}

TEST(BilateralUnilateral, IsometricDoublyCommuting) {
  const OperatorPair p = bilateral_unilateral(3, 6);
  const CommutingResiduals r = doubly_commuting_residual(p.first, p.second);
  EXPECT_LT(r.commutator, 1e-14);
  EXPECT_LT(r.double_commutator, 1e-14);
  EXPECT_LT(linalg::unitarity_defect(p.first.whitened()), 1e-14);
}

TEST(BuildInstance, ValidatesSpecs) {
  InstanceSpec s{"x", "shift1v", {kTwoAtoms}, {3}, {}, 0};
  EXPECT_THROW(build_instance(s), std::invalid_argument);
  s.caps = {8};
  EXPECT_NO_THROW(build_instance(s));
  s.kind = "pair2v";
  EXPECT_THROW(build_instance(s), std::invalid_argument);
  s.kind = "nonsense";
  EXPECT_THROW(build_instance(s), std::invalid_argument);
  InstanceSpec u{"u", "direct_sum", {}, {}, {4}, 2};
  const Instance inst = build_instance(u);
  EXPECT_EQ(inst.single->size(), 4);
  EXPECT_EQ(inst.blocks[0].dim(), 4);
}
