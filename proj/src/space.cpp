#include "wold/space.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

#include "wold/linalg.hpp"

namespace wold {

PolyVector::PolyVector(Caps caps, Index dim) : PolyVector(caps, dim, Vector::Zero(basis_size(caps, dim))) {}

PolyVector::PolyVector(Caps caps, Index dim, Vector coeffs) : caps_(caps), dim_(dim), coeffs_(std::move(coeffs)) {
  if (caps.n1 < 0 || caps.n2 < 0 || dim < 1) throw std::invalid_argument("PolyVector: bad caps or dimension");
  if (coeffs_.size() != basis_size(caps, dim)) throw std::invalid_argument("PolyVector: coefficient array has wrong size");
}

PolyVector PolyVector::monomial(Caps caps, Index dim, int m, int n, const Vector& a) {
  PolyVector v(caps, dim);
  v.at(m, n) = a;
  return v;
}

Index PolyVector::offset(int m, int n) const {
  if (m < 0 || n < 0 || m > caps_.n1 || n > caps_.n2) throw std::out_of_range("PolyVector: bidegree outside caps");
  return basis_index(caps_, dim_, m, n, 0);
}

Vector PolyVector::evaluate(Complex z1, Complex z2) const {
  Vector out = Vector::Zero(dim_);
  Complex p1 = 1;
  for (int m = 0; m <= caps_.n1; ++m, p1 *= z1) {
    Complex p = p1;
    for (int n = 0; n <= caps_.n2; ++n, p *= z2) out += p * at(m, n);
  }
  return out;
}

GradedPolySpace::GradedPolySpace(Caps caps, CircleMeasure mu1, CircleMeasure mu2, Matrix gram)
    : caps_(caps), mu1_(std::move(mu1)), mu2_(std::move(mu2)), gram_(std::move(gram)) {}

namespace {

Matrix block_from_tables(const FourierTable& f1, const FourierTable& f2, Index d, int m, int n, int p, int q,
                         NormTerm term) {
  Matrix b = Matrix::Zero(d, d);
  const bool same_m = (m == p), same_n = (n == q);
  const Real min1 = std::min(m, p), min2 = std::min(n, q);
  const bool all = term == NormTerm::all;
  if ((all || term == NormTerm::hardy) && same_m && same_n) b += Matrix::Identity(d, d);
  if ((all || term == NormTerm::d1) && same_n && min1 > 0) b += min1 * f1(fourier_argument(m, p));
  if ((all || term == NormTerm::d2) && same_m && min2 > 0) b += min2 * f2(fourier_argument(n, q));
  if ((all || term == NormTerm::d3) && min1 > 0 && min2 > 0)
    b += (min1 * min2) * (f1(fourier_argument(m, p)) * f2(fourier_argument(n, q)));
  return b;
}

void check_measures(const CircleMeasure& mu1, const CircleMeasure& mu2, const Tolerances& tol) {
  if (mu1.dim() != mu2.dim()) throw std::invalid_argument("build_space: measures have different dimensions");
  if (mu1.dim() < 1) throw std::invalid_argument("build_space: coefficient dimension must be positive");
  for (const auto* mu : {&mu1, &mu2}) {
    const auto rep = is_positive(*mu, tol.psd);
    if (!rep.positive) {
      std::ostringstream os;
      os << "build_space: measure is not positive (worst eigenvalue " << rep.worst_eigenvalue << ")";
      throw PreconditionError(os.str());
    }
  }
  if (mu1.dim() > 1 && !weights_commute(mu1, mu2, tol.commuting_weights))
    throw PreconditionError("build_space: weights of the two measures do not commute");
}

Matrix assemble(Caps caps, const CircleMeasure& mu1, const CircleMeasure& mu2, NormTerm term) {
  const Index d = mu1.dim();
  const FourierTable f1(mu1, caps.n1), f2(mu2, caps.n2);
  const Index size = basis_size(caps, d);
  Matrix g = Matrix::Zero(size, size);
  for (int p = 0; p <= caps.n1; ++p)
    for (int q = 0; q <= caps.n2; ++q)
      for (int m = 0; m <= caps.n1; ++m)
        for (int n = 0; n <= caps.n2; ++n)
          g.block(basis_index(caps, d, p, q, 0), basis_index(caps, d, m, n, 0), d, d) =
              block_from_tables(f1, f2, d, m, n, p, q, term);
  return g;
}

}  // namespace

Matrix gram_block(const CircleMeasure& mu1, const CircleMeasure& mu2, int m, int n, int p, int q, NormTerm term) {
  if (m < 0 || n < 0 || p < 0 || q < 0) throw std::invalid_argument("gram_block: negative degree");
  if (mu1.dim() != mu2.dim()) throw std::invalid_argument("gram_block: dimension mismatch");
  const FourierTable f1(mu1, std::max(m, p)), f2(mu2, std::max(n, q));
  return block_from_tables(f1, f2, mu1.dim(), m, n, p, q, term);
}

GradedPolySpace build_space(const CircleMeasure& mu1, const CircleMeasure& mu2, int n1, int n2,
                            const Tolerances& tol) {
  if (n1 < 0 || n2 < 0) throw std::invalid_argument("build_space: negative caps");
  check_measures(mu1, mu2, tol);
  const Caps caps{n1, n2};
  Matrix g = linalg::hermitian_part(assemble(caps, mu1, mu2, NormTerm::all));
  return GradedPolySpace(caps, mu1, mu2, std::move(g));
}

GradedPolySpace build_space_1v(const CircleMeasure& mu, int n, const Tolerances& tol) {
  return build_space(mu, CircleMeasure::zero(mu.dim()), n, 0, tol);
}

Matrix term_gram(const GradedPolySpace& space, NormTerm term) {
  return assemble(space.caps(), space.mu1(), space.mu2(), term);
}

Complex inner_product(const GradedPolySpace& space, const PolyVector& f, const PolyVector& g) {
  if (f.caps() != space.caps() || g.caps() != space.caps() || f.dim() != space.dim() || g.dim() != space.dim())
    throw std::invalid_argument("inner_product: polynomial shape does not match the space");
  return g.coeffs().dot(space.gram() * f.coeffs());
}

DirichletTerms dirichlet_terms(const GradedPolySpace& space, const PolyVector& f, const PolyVector& g) {
  if (f.caps() != space.caps() || g.caps() != space.caps())
    throw std::invalid_argument("dirichlet_terms: polynomial shape does not match the space");
  auto pair = [&](NormTerm t) { return g.coeffs().dot(term_gram(space, t) * f.coeffs()); };
  return {pair(NormTerm::hardy), pair(NormTerm::d1), pair(NormTerm::d2), pair(NormTerm::d3)};
}

Matrix shift_matrix(Caps caps, Index dim, int axis) {
  if (axis < 0 || axis > 1) throw std::invalid_argument("shift_matrix: axis must be 0 or 1");
  const Index size = basis_size(caps, dim);
  Matrix s = Matrix::Zero(size, size);
  for (int m = 0; m <= caps.n1; ++m)
    for (int n = 0; n <= caps.n2; ++n) {
      const int m2 = axis == 0 ? m + 1 : m;
      const int n2 = axis == 1 ? n + 1 : n;
      if (m2 > caps.n1 || n2 > caps.n2) continue;
      for (Index k = 0; k < dim; ++k) s(basis_index(caps, dim, m2, n2, k), basis_index(caps, dim, m, n, k)) = 1;
    }
  return s;
}

std::string gram_csv(const GradedPolySpace& space) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<Real>::max_digits10);
  const Matrix& g = space.gram();
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = 0; j < g.cols(); ++j) {
      if (j) os << ',';
      os << g(i, j).real() << ',' << g(i, j).imag();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace wold
