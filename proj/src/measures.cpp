#include "wold/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wold/linalg.hpp"

namespace wold {

namespace {

constexpr Real kAtomSeparation = 1e-12;

Matrix clamp_if_tiny(const Matrix& w, Real tol) {
  Matrix h = linalg::hermitian_part(w);
  const Real lo = linalg::min_eigenvalue(h);
  if (lo < 0 && lo >= -tol) return linalg::clamp_psd(h);
  return h;
}

Real circular_gap(Real a, Real b) {
  const Real d = std::abs(a - b);
  return std::min(d, 2 * M_PI - d);
}

}  // namespace

CircleMeasure::CircleMeasure(Index dim, std::vector<Atom> atoms, Matrix density)
    : dim_(dim), atoms_(std::move(atoms)), density_(std::move(density)) {
  if (dim_ < 0) throw std::invalid_argument("CircleMeasure: negative dimension");
  if (density_.size() == 0) density_ = Matrix::Zero(dim_, dim_);
  if (density_.rows() != dim_ || density_.cols() != dim_)
    throw std::invalid_argument("CircleMeasure: density must be dim x dim");
  const Real herm_tol = 1e-12;
  if (linalg::hermitian_defect(density_) > herm_tol * std::max<Real>(1, linalg::max_abs(density_)))
    throw std::invalid_argument("CircleMeasure: density is not Hermitian");
  const Real psd_tol = Tolerances{}.psd;
  density_ = clamp_if_tiny(density_, psd_tol);
  for (auto& a : atoms_) {
    if (a.weight.rows() != dim_ || a.weight.cols() != dim_)
      throw std::invalid_argument("CircleMeasure: atom weight must be dim x dim");
    if (!std::isfinite(a.angle)) throw std::invalid_argument("CircleMeasure: non-finite atom angle");
    if (linalg::hermitian_defect(a.weight) > herm_tol * std::max<Real>(1, linalg::max_abs(a.weight)))
      throw std::invalid_argument("CircleMeasure: atom weight is not Hermitian");
    a.angle = linalg::wrap_angle(a.angle);
    a.weight = clamp_if_tiny(a.weight, psd_tol);
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.angle < y.angle; });
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& next = atoms_[(i + 1) % atoms_.size()];
    if (atoms_.size() > 1 && circular_gap(atoms_[i].angle, next.angle) <= kAtomSeparation) {
      std::ostringstream os;
      os << "CircleMeasure: atoms at angles " << atoms_[i].angle << " and " << next.angle
         << " are not separated";
      throw std::invalid_argument(os.str());
    }
  }
}

CircleMeasure CircleMeasure::zero(Index dim) { return CircleMeasure(dim, {}, Matrix::Zero(dim, dim)); }

CircleMeasure CircleMeasure::lebesgue(Index dim, Real scale) {
  return CircleMeasure(dim, {}, Matrix::Identity(dim, dim) * Complex(scale));
}

CircleMeasure CircleMeasure::point_mass(Real angle, Real weight) {
  return CircleMeasure(1, {Atom{angle, Matrix::Constant(1, 1, Complex(weight))}}, Matrix::Zero(1, 1));
}

CircleMeasure CircleMeasure::atomic(const std::vector<std::pair<Real, Real>>& angle_weight) {
  std::vector<Atom> atoms;
  for (auto [theta, w] : angle_weight) atoms.push_back(Atom{theta, Matrix::Constant(1, 1, Complex(w))});
  return CircleMeasure(1, std::move(atoms), Matrix::Zero(1, 1));
}

Matrix CircleMeasure::total_mass() const {
  Matrix m = density_;
  for (const auto& a : atoms_) m += a.weight;
  return m;
}

FourierTable::FourierTable(const CircleMeasure& mu, int max_order) : dim_(mu.dim()), max_order_(max_order) {
  if (max_order < 0) throw std::invalid_argument("FourierTable: negative order");
  coeffs_.resize(static_cast<std::size_t>(2 * max_order + 1));
  for (int n = 0; n <= max_order; ++n) {
    coeffs_[static_cast<std::size_t>(n + max_order)] = fourier_coefficient(mu, n);
    coeffs_[static_cast<std::size_t>(max_order - n)] = coeffs_[static_cast<std::size_t>(n + max_order)].adjoint();
  }
}

Matrix fourier_coefficient(const CircleMeasure& mu, int n) {
  Matrix c = (n == 0) ? mu.density() : Matrix::Zero(mu.dim(), mu.dim()).eval();
  for (const auto& a : mu.atoms()) c += std::polar(Real(1), -Real(n) * a.angle) * a.weight;
  return c;
}

Real poisson_kernel(Complex z, Real theta) {
  const Complex e = std::polar(Real(1), theta);
  return (1 - std::norm(z)) / std::norm(e - z);
}

Matrix poisson_integral(const CircleMeasure& mu, Complex z) {
  if (!(std::abs(z) < 1)) throw std::domain_error("poisson_integral: |z| must be < 1");
  Matrix p = mu.density();
  for (const auto& a : mu.atoms()) p += poisson_kernel(z, a.angle) * a.weight;
  return p;
}

PositivityReport is_positive(const CircleMeasure& mu, Real tol) {
  Real worst = mu.dim() > 0 ? linalg::min_eigenvalue(mu.density()) : Real(0);
  for (const auto& a : mu.atoms()) worst = std::min(worst, linalg::min_eigenvalue(a.weight));
  return {worst >= -tol, worst};
}

CircleMeasure conjugate(const CircleMeasure& mu, const Matrix& u, Real tol) {
  if (u.rows() != mu.dim() || u.cols() != mu.dim())
    throw std::invalid_argument("conjugate: unitary has the wrong shape");
  if (linalg::unitarity_defect(u) > tol) throw PreconditionError("conjugate: matrix is not unitary");
  std::vector<Atom> atoms;
  atoms.reserve(mu.atoms().size());
  for (const auto& a : mu.atoms()) atoms.push_back(Atom{a.angle, linalg::hermitian_part(u.adjoint() * a.weight * u)});
  return CircleMeasure(mu.dim(), std::move(atoms), linalg::hermitian_part(u.adjoint() * mu.density() * u));
}

bool weights_commute(const CircleMeasure& a, const CircleMeasure& b, Real tol) {
  if (a.dim() != b.dim()) return false;
  std::vector<const Matrix*> wa{&a.density()}, wb{&b.density()};
  for (const auto& x : a.atoms()) wa.push_back(&x.weight);
  for (const auto& x : b.atoms()) wb.push_back(&x.weight);
  for (const Matrix* x : wa)
    for (const Matrix* y : wb) {
      if (x->size() == 0) continue;
      const Real scale = 1 + x->norm() * y->norm();
      if (linalg::max_abs(*x * *y - *y * *x) > tol * scale) return false;
    }
  return true;
}

Real fourier_distance(const CircleMeasure& a, const CircleMeasure& b, int max_order) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fourier_distance: dimension mismatch");
  if (a.dim() == 0) return 0;
  Real worst = 0;
  for (int n = -max_order; n <= max_order; ++n)
    worst = std::max(worst, linalg::max_abs(fourier_coefficient(a, n) - fourier_coefficient(b, n)));
  return worst;
}

}  // namespace wold
