#ifndef WOLD_LINALG_HPP
#define WOLD_LINALG_HPP

// Small dense helpers shared by every module. All of them accept Eigen
// expressions and return plain matrices.

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "wold/types.hpp"

namespace wold::linalg {

template <typename Derived>
Matrix hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / Real(2);
}

template <typename Derived>
Real hermitian_defect(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Largest entry modulus; 0 for an empty matrix.
template <typename Derived>
Real max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

struct Svd {
  Matrix u;       // thin, orthonormal columns
  RealVector s;   // descending
  Matrix v;
};

/// Thin SVD. The divide-and-conquer result is checked (||A V - U S|| and
/// orthonormality of U, V); on failure the one-sided Jacobi solver is used.
/// Eigen 3.4.0 BDCSVD returns wrong singular values on some matrices with
/// clustered spectra.
inline Svd svd(const Matrix& a) {
  const unsigned opts = Eigen::ComputeThinU | Eigen::ComputeThinV;
  Eigen::BDCSVD<Matrix> fast(a, opts);
  Svd out{fast.matrixU(), fast.singularValues(), fast.matrixV()};
  const Index k = out.s.size();
  if (k == 0) return out;
  const Real scale = std::max(out.s(0), a.cwiseAbs().maxCoeff());
  const Real bound = 1e-10 * std::sqrt(Real(std::max(a.rows(), a.cols())));
  const Matrix id = Matrix::Identity(k, k);
  const bool ok = (a * out.v - out.u * out.s.asDiagonal()).cwiseAbs().maxCoeff() <= bound * scale &&
                  (out.u.adjoint() * out.u - id).cwiseAbs().maxCoeff() <= bound &&
                  (out.v.adjoint() * out.v - id).cwiseAbs().maxCoeff() <= bound;
  if (ok) return out;
  Eigen::JacobiSVD<Matrix> slow(a, opts);
  return {slow.matrixU(), slow.singularValues(), slow.matrixV()};
}

/// Left singular vectors and singular values only. Checked by
/// ||A^H u_i|| = s_i, orthonormal U and the Frobenius sum, with the same
/// JacobiSVD fallback as svd().
inline std::pair<Matrix, RealVector> left_svd(const Matrix& a) {
  Eigen::BDCSVD<Matrix> fast(a, Eigen::ComputeThinU);
  Matrix u = fast.matrixU();
  RealVector s = fast.singularValues();
  const Index k = s.size();
  if (k == 0) return {u, s};
  const Real scale = std::max(s(0), a.cwiseAbs().maxCoeff());
  const Real bound = 1e-10 * std::sqrt(Real(std::max(a.rows(), a.cols())));
  const RealVector proj = (a.adjoint() * u).colwise().norm().transpose();
  const Real frob = a.norm();
  const bool ok = (proj - s).cwiseAbs().maxCoeff() <= bound * scale &&
                  (u.adjoint() * u - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <= bound &&
                  std::abs(s.norm() - frob) <= bound * std::max(frob, scale);
  if (ok) return {u, s};
  Eigen::JacobiSVD<Matrix> slow(a, Eigen::ComputeThinU);
  return {slow.matrixU(), slow.singularValues()};
}

/// Spectral norm from the largest eigenvalue of the smaller Gram matrix.
/// Zero for empty matrices.
template <typename Derived>
Real norm2(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  const Matrix a = m;
  const Matrix g = a.cols() <= a.rows() ? Matrix(a.adjoint() * a) : Matrix(a * a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(Real(0), es.eigenvalues().maxCoeff()));
}

/// Spectral norm of a Hermitian matrix via its eigenvalues.
template <typename Derived>
Real hermitian_norm2(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Derived>
Real min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Hermitian PSD square root; eigenvalues in [-psd_tol, 0) are clamped to 0.
/// Callers are expected to have rejected more negative spectra already.
template <typename Derived>
Matrix psd_sqrt(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  RealVector s = es.eigenvalues().cwiseMax(Real(0)).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

/// Clamp tiny negative eigenvalues of a Hermitian matrix to zero.
template <typename Derived>
Matrix clamp_psd(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0) return Matrix(m.rows(), m.cols());
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  if (es.eigenvalues()(0) >= 0) return hermitian_part(m);
  RealVector s = es.eigenvalues().cwiseMax(Real(0));
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

/// Orthonormal basis (Euclidean) of the column span, dropping singular values
/// below rel_tol * reference, where reference defaults to sigma_max.
template <typename Derived>
Matrix range_basis(const Eigen::MatrixBase<Derived>& m, Real rel_tol = 1e-8, Real reference = 0) {
  const Index n = m.rows();
  if (m.cols() == 0 || n == 0) return Matrix(n, 0);
  const auto [u, s] = left_svd(Matrix(m));
  if (s.size() == 0 || s(0) <= 0) return Matrix(n, 0);
  Index r = 0;
  const Real cut = rel_tol * (reference > 0 ? reference : s(0));
  while (r < s.size() && s(r) > cut) ++r;
  return u.leftCols(r);
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns q.
template <typename Derived>
Matrix complement_basis(const Eigen::MatrixBase<Derived>& q) {
  const Index n = q.rows();
  const Index r = q.cols();
  if (r == 0) return Matrix::Identity(n, n);
  if (r >= n) return Matrix(n, 0);
  Matrix a = q;
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix full = qr.householderQ() * Matrix::Identity(n, n);
  return full.rightCols(n - r);
}

template <typename Derived>
Real unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  if (u.cols() == 0) return 0;
  return hermitian_norm2(u.adjoint() * u - Matrix::Identity(u.cols(), u.cols()));
}

/// Wrap an angle into [0, 2*pi).
inline Real wrap_angle(Real theta) {
  const Real two_pi = 2 * M_PI;
  Real t = std::fmod(theta, two_pi);
  if (t < 0) t += two_pi;
  if (t >= two_pi) t = 0;
  return t;
}

}  // namespace wold::linalg

#endif  // WOLD_LINALG_HPP
