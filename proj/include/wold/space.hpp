#ifndef WOLD_SPACE_HPP
#define WOLD_SPACE_HPP

#include <array>
#include <string>

#include "wold/measures.hpp"

namespace wold {

/// Bidegree caps (N1, N2). One-variable objects use N2 = 0.
struct Caps {
  int n1 = 0;
  int n2 = 0;
  friend bool operator==(const Caps&, const Caps&) = default;
};

/// E-valued polynomial sum a_{m,n} z1^m z2^n, 0 <= m <= N1, 0 <= n <= N2,
/// coefficients stored lexicographically in (m, n, k).
class PolyVector {
 public:
  PolyVector(Caps caps, Index dim);
  PolyVector(Caps caps, Index dim, Vector coeffs);

  static PolyVector monomial(Caps caps, Index dim, int m, int n, const Vector& a);

  Caps caps() const { return caps_; }
  Index dim() const { return dim_; }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }

  auto at(int m, int n) { return coeffs_.segment(offset(m, n), dim_); }
  auto at(int m, int n) const { return coeffs_.segment(offset(m, n), dim_); }

  /// Value at (z1, z2).
  Vector evaluate(Complex z1, Complex z2) const;

 private:
  Index offset(int m, int n) const;

  Caps caps_;
  Index dim_;
  Vector coeffs_;
};

/// Basis position of coefficient k of z1^m z2^n.
inline Index basis_index(Caps caps, Index dim, int m, int n, Index k) {
  return (static_cast<Index>(m) * (caps.n2 + 1) + n) * dim + k;
}

inline Index basis_size(Caps caps, Index dim) {
  return static_cast<Index>(caps.n1 + 1) * (caps.n2 + 1) * dim;
}

/// Fourier argument used in the block coupling input degree `from` to output
/// degree `to`. Fixed against the quadrature oracle.
constexpr int fourier_argument(int from, int to) { return to - from; }

/// Truncated Dirichlet-type space over the bidisc with an explicit Gram
/// matrix in the monomial basis. Immutable after build_space().
class GradedPolySpace {
 public:
  GradedPolySpace(Caps caps, CircleMeasure mu1, CircleMeasure mu2, Matrix gram);

  Caps caps() const { return caps_; }
  Index dim() const { return mu1_.dim(); }
  Index size() const { return gram_.rows(); }
  const CircleMeasure& mu1() const { return mu1_; }
  const CircleMeasure& mu2() const { return mu2_; }
  const Matrix& gram() const { return gram_; }

 private:
  Caps caps_;
  CircleMeasure mu1_, mu2_;
  Matrix gram_;
};

/// Which summands of the norm a block includes.
enum class NormTerm { all, hardy, d1, d2, d3 };

/// Block B(m,n,p,q) with <f, g> = sum b_{p,q}^H B(m,n,p,q) a_{m,n}:
///   d_mp d_nq I + d_nq (m^p) mu1^(p-m) + d_mp (n^q) mu2^(q-n)
///   + (m^p)(n^q) mu1^(p-m) mu2^(q-n).
Matrix gram_block(const CircleMeasure& mu1, const CircleMeasure& mu2, int m, int n, int p, int q,
                  NormTerm term = NormTerm::all);

/// Assemble the Gram matrix of polynomials of bidegree <= (N1, N2). Requires
/// positive measures of equal dimension whose weights commute.
GradedPolySpace build_space(const CircleMeasure& mu1, const CircleMeasure& mu2, int n1, int n2,
                            const Tolerances& tol = {});

/// One-variable space D(mu): caps (N, 0), second measure zero.
GradedPolySpace build_space_1v(const CircleMeasure& mu, int n, const Tolerances& tol = {});

/// Gram matrix restricted to a single norm term.
Matrix term_gram(const GradedPolySpace& space, NormTerm term);

/// g^H G f.
Complex inner_product(const GradedPolySpace& space, const PolyVector& f, const PolyVector& g);

struct DirichletTerms {
  Complex hardy, d1, d2, d3;
  Complex total() const { return hardy + d1 + d2 + d3; }
};

/// The four summands of <f, g> separately.
DirichletTerms dirichlet_terms(const GradedPolySpace& space, const PolyVector& f, const PolyVector& g);

/// Coefficient matrix of multiplication by z1 (axis 0) or z2 (axis 1) on the
/// caps truncation; the top bidegree along that axis is dropped.
Matrix shift_matrix(Caps caps, Index dim, int axis);

/// Row-major "re,im" pairs, one line per row.
std::string gram_csv(const GradedPolySpace& space);

}  // namespace wold

#endif  // WOLD_SPACE_HPP
