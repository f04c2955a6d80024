#ifndef WOLD_MEASURES_HPP
#define WOLD_MEASURES_HPP

#include <vector>

#include "wold/types.hpp"

namespace wold {

struct Atom {
  Real angle;     // radians, normalized to [0, 2*pi)
  Matrix weight;  // d x d Hermitian
};

/// Finite matrix-valued measure on the unit circle: finitely many atoms plus a
/// constant density with respect to normalized arc length.
///
/// Construction checks shapes, Hermitian symmetry and atom separation, and
/// clamps eigenvalues in [-Tolerances::psd, 0) to zero. Weights that are more
/// negative than that are kept so is_positive() can report them; every
/// builder downstream refuses non-positive measures.
class CircleMeasure {
 public:
  CircleMeasure() = default;
  CircleMeasure(Index dim, std::vector<Atom> atoms, Matrix density);

  static CircleMeasure zero(Index dim);
  /// Constant density scale * I.
  static CircleMeasure lebesgue(Index dim, Real scale = 1);
  /// Scalar point mass.
  static CircleMeasure point_mass(Real angle, Real weight = 1);
  /// Scalar atomic measure.
  static CircleMeasure atomic(const std::vector<std::pair<Real, Real>>& angle_weight);

  Index dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Matrix& density() const { return density_; }
  Matrix total_mass() const;

 private:
  Index dim_ = 0;
  std::vector<Atom> atoms_;
  Matrix density_;
};

/// Fourier coefficients for |n| <= K.
class FourierTable {
 public:
  FourierTable(const CircleMeasure& mu, int max_order);

  Index dim() const { return dim_; }
  int max_order() const { return max_order_; }
  const Matrix& operator()(int n) const { return coeffs_.at(static_cast<std::size_t>(n + max_order_)); }

 private:
  Index dim_;
  int max_order_;
  std::vector<Matrix> coeffs_;
};

struct PositivityReport {
  bool positive;
  Real worst_eigenvalue;  // smallest eigenvalue over all weights and the density
};

/// mu^(n) = integral of conj(x)^n d mu(x) = density [n == 0] + sum_j e^{-i n theta_j} W_j.
Matrix fourier_coefficient(const CircleMeasure& mu, int n);

/// Harmonic extension sum_j P(z, e^{i theta_j}) W_j + density. Requires |z| < 1.
Matrix poisson_integral(const CircleMeasure& mu, Complex z);

/// Poisson kernel (1 - |z|^2) / |e^{i theta} - z|^2.
Real poisson_kernel(Complex z, Real theta);

PositivityReport is_positive(const CircleMeasure& mu, Real tol = Tolerances{}.psd);

/// W -> U^H W U for every weight and the density. U must be unitary.
CircleMeasure conjugate(const CircleMeasure& mu, const Matrix& u, Real tol = Tolerances{}.unitary_input);

/// True when every weight (and density) of a commutes with every weight of b.
bool weights_commute(const CircleMeasure& a, const CircleMeasure& b, Real tol = Tolerances{}.commuting_weights);

/// Largest |a^(n) - b^(n)| entry over |n| <= K.
Real fourier_distance(const CircleMeasure& a, const CircleMeasure& b, int max_order);

}  // namespace wold

#endif  // WOLD_MEASURES_HPP
