#ifndef WOLD_ORACLE_HPP
#define WOLD_ORACLE_HPP

#include "wold/space.hpp"

namespace wold {

/// Brute-force evaluation of the defining integrals, independent of the
/// closed-form Gram blocks.
///
/// The Hardy term uses a torus grid that integrates the polynomial exactly.
/// Disc integrals use a polar midpoint rule with `grid` radial nodes; each
/// ring gets enough angular nodes to resolve the Poisson kernels of atoms
/// (more nodes near the boundary). Circle variables are evaluated on the
/// boundary itself, which for polynomials is the value of the radial limit.
struct QuadratureOptions {
  int grid = 512;
  bool richardson = true;  // combine grid and grid/2: (4 I_h - I_2h) / 3
};

Complex quadrature_inner_product(const PolyVector& f, const PolyVector& g, const CircleMeasure& mu1,
                                 const CircleMeasure& mu2, const QuadratureOptions& opt = {});

/// The four summands separately (same conventions as dirichlet_terms).
DirichletTerms quadrature_terms(const PolyVector& f, const PolyVector& g, const CircleMeasure& mu1,
                                const CircleMeasure& mu2, const QuadratureOptions& opt = {});

/// Exact atom contributions plus a midpoint Riemann sum of the density over
/// `grid` equally spaced angles. Requires |z| < 1.
Matrix quadrature_poisson(const CircleMeasure& mu, Complex z, int grid = 1024);

}  // namespace wold

#endif  // WOLD_ORACLE_HPP
