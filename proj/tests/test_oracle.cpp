#include <gtest/gtest.h>

#include <random>

#include "wold/oracle.hpp"
#include "wold/space.hpp"

using namespace wold;

namespace {

PolyVector mono(Caps caps, int m, int n) { return PolyVector::monomial(caps, 1, m, n, Vector::Ones(1)); }

PolyVector random_poly(Caps caps, Index d, std::mt19937_64& rng) {
  std::normal_distribution<Real> n;
  Vector c(basis_size(caps, d));
  for (Index i = 0; i < c.size(); ++i) c(i) = Complex(n(rng), n(rng));
  return PolyVector(caps, d, c);
}

}  // namespace

TEST(Quadrature, ConstantHasUnitNorm) {
  const Caps caps{2, 2};
  const CircleMeasure mu = CircleMeasure::atomic({{0.2, 1.0}});
  EXPECT_NEAR(std::abs(quadrature_inner_product(mono(caps, 0, 0), mono(caps, 0, 0), mu, mu) - Complex(1)), 0, 1e-12);
}

TEST(Quadrature, ClassicalDirichletMixedMonomial) {
  const Caps caps{1, 1};
  const CircleMeasure leb = CircleMeasure::lebesgue(1);
  EXPECT_NEAR(std::abs(quadrature_inner_product(mono(caps, 1, 1), mono(caps, 1, 1), leb, leb) - Complex(4)), 0, 1e-6);
}

TEST(Quadrature, AtomCouplingOfDegreesTwoAndOne) {
  const Caps caps{2, 0};
  const CircleMeasure atom = CircleMeasure::point_mass(0);
  const Complex v = quadrature_inner_product(mono(caps, 2, 0), mono(caps, 1, 0), atom, CircleMeasure::zero(1));
  EXPECT_NEAR(std::abs(v - Complex(1)), 0, 1e-6);
}

TEST(Quadrature, TermsMatchClosedFormTerms) {
  std::mt19937_64 rng(8);
  Matrix w1 = Matrix::Identity(2, 2), w2 = Matrix::Identity(2, 2);
  w1(1, 1) = 0.4;
  w2(0, 0) = 1.7;
  const CircleMeasure m1(2, {{0.3, w1}, {2.5, w2}}, Matrix());
  const CircleMeasure m2(2, {{1.1, w2}}, Matrix::Identity(2, 2) * Complex(0.5));
  const GradedPolySpace s = build_space(m1, m2, 3, 3);
  const PolyVector f = random_poly(s.caps(), 2, rng), g = random_poly(s.caps(), 2, rng);
  const DirichletTerms exact = dirichlet_terms(s, f, g);
  const DirichletTerms quad = quadrature_terms(f, g, m1, m2);
  const Real scale = 1 + std::abs(exact.total());
  EXPECT_LT(std::abs(exact.hardy - quad.hardy) / scale, 1e-12);
  EXPECT_LT(std::abs(exact.d1 - quad.d1) / scale, 1e-8);
  EXPECT_LT(std::abs(exact.d2 - quad.d2) / scale, 1e-8);
  EXPECT_LT(std::abs(exact.d3 - quad.d3) / scale, 1e-8);
}

// Closed-form inner products agree with the defining integrals.
TEST(Quadrature, AgreesWithGramOnRandomInstances) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<Real> angle(0, 2 * M_PI), weight(0.2, 1.5);
  for (int trial = 0; trial < 4; ++trial) {
    const Index d = 1 + trial % 2;
    auto make = [&](int atoms) {
      std::vector<Atom> list;
      for (int a = 0; a < atoms; ++a) {
        Matrix w = Matrix::Zero(d, d);
        for (Index i = 0; i < d; ++i) w(i, i) = weight(rng);
        list.push_back({angle(rng), w});
      }
      return CircleMeasure(d, list, Matrix::Identity(d, d) * Complex(trial % 2 ? 0.3 : 0.0));
    };
    const CircleMeasure m1 = make(1 + trial % 3), m2 = make(3 - trial % 3);
    const GradedPolySpace s = build_space(m1, m2, 3 + trial % 3, 2 + trial % 2);
    const PolyVector f = random_poly(s.caps(), d, rng), g = random_poly(s.caps(), d, rng);
    const Complex exact = inner_product(s, f, g);
    const Complex quad = quadrature_inner_product(f, g, m1, m2);
    EXPECT_LT(std::abs(exact - quad) / (1 + std::abs(quad)), 1e-8) << "trial " << trial;
  }
}

TEST(Quadrature, ErrorDecreasesAtLeastQuadratically) {
  std::mt19937_64 rng(23);
  const CircleMeasure mu = CircleMeasure::atomic({{0.9, 1.0}, {3.3, 0.6}});
  for (int trial = 0; trial < 3; ++trial) {
    const GradedPolySpace s = build_space(mu, CircleMeasure::lebesgue(1), 3, 2);
    const PolyVector f = random_poly(s.caps(), 1, rng), g = random_poly(s.caps(), 1, rng);
    const Complex exact = inner_product(s, f, g);
    const Real e1 = std::abs(quadrature_inner_product(f, g, mu, CircleMeasure::lebesgue(1), {64, false}) - exact);
    const Real e2 = std::abs(quadrature_inner_product(f, g, mu, CircleMeasure::lebesgue(1), {128, false}) - exact);
    EXPECT_LT(e2, e1 / 3.5) << "trial " << trial;
  }
}

TEST(Quadrature, RejectsBadInput) {
  const CircleMeasure mu = CircleMeasure::lebesgue(1);
  EXPECT_THROW(quadrature_inner_product(mono({1, 1}, 0, 0), mono({2, 1}, 0, 0), mu, mu), std::invalid_argument);
  EXPECT_THROW(quadrature_inner_product(mono({1, 1}, 0, 0), mono({1, 1}, 0, 0), mu, mu, {65, true}),
               std::invalid_argument);
  EXPECT_THROW(quadrature_poisson(mu, 1.0), std::domain_error);
}
