#include <algorithm>

#include "wold/linalg.hpp"
#include "wold/operators.hpp"

namespace wold {

Ambient::Ambient(Matrix gram, std::array<Levels, 2> levels, std::shared_ptr<const GradedPolySpace> source)
    : gram_(linalg::hermitian_part(gram)), levels_(std::move(levels)), source_(std::move(source)) {
  if (gram_.rows() != gram_.cols()) throw std::invalid_argument("Ambient: gram must be square");
  if (gram_.rows() > 0) {
    Eigen::LLT<Matrix> llt(gram_);
    if (llt.info() != Eigen::Success) throw PreconditionError("Ambient: gram is not positive definite");
    chol_ = llt.matrixL();
  } else {
    chol_ = Matrix(0, 0);
  }
  for (const auto& lv : levels_) {
    if (!lv.empty() && lv.size() != static_cast<std::size_t>(kMaxLevel))
      throw std::invalid_argument("Ambient: filtration must list every level");
    for (const auto& m : lv)
      if (m.rows() != gram_.rows()) throw std::invalid_argument("Ambient: filtration level has wrong height");
  }
  identity_ = Matrix::Identity(size(), size());
  unit_gram_ = gram_ == identity_;
  for (std::size_t axis = 0; axis < 2; ++axis)
    for (const auto& m : levels_[axis]) {
      if (m.cols() == 0 || size() == 0) {
        core_bases_[axis].push_back(Matrix(size(), 0));
        continue;
      }
      Eigen::ColPivHouseholderQR<Matrix> qr(whiten(m));
      qr.setThreshold(Tolerances{}.rank);
      const Index r = qr.rank();
      core_bases_[axis].push_back(Matrix(qr.householderQ()).leftCols(r));
    }
}

std::shared_ptr<const Ambient> Ambient::from_space(std::shared_ptr<const GradedPolySpace> space) {
  const Caps caps = space->caps();
  const Index d = space->dim();
  const Index n = space->size();
  std::array<Levels, 2> levels;
  auto graded = [&](int axis) {
    Levels lv;
    for (int k = 1; k <= kMaxLevel; ++k) {
      std::vector<Index> cols;
      for (int m = 0; m <= caps.n1; ++m)
        for (int q = 0; q <= caps.n2; ++q) {
          const int headroom = axis == 0 ? caps.n1 - m : caps.n2 - q;
          if (headroom < k) continue;
          for (Index c = 0; c < d; ++c) cols.push_back(basis_index(caps, d, m, q, c));
        }
      Matrix s = Matrix::Zero(n, static_cast<Index>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j) s(cols[j], static_cast<Index>(j)) = 1;
      lv.push_back(std::move(s));
    }
    return lv;
  };
  levels[0] = graded(0);
  if (caps.n2 > 0) levels[1] = graded(1);
  Matrix g = space->gram();
  return std::make_shared<const Ambient>(std::move(g), std::move(levels), std::move(space));
}

std::shared_ptr<const Ambient> Ambient::euclidean(Index n) {
  return std::make_shared<const Ambient>(Matrix::Identity(n, n));
}

Matrix Ambient::core_span(int axis, int level) const {
  if (axis < 0 || axis > 1) throw std::invalid_argument("core_span: axis must be 0 or 1");
  if (level <= 0 || !graded(axis)) return Matrix::Identity(size(), size());
  return levels(axis)[static_cast<std::size_t>(std::min(level, kMaxLevel) - 1)];
}

const Matrix& Ambient::core_basis(int axis, int level) const {
  if (axis < 0 || axis > 1) throw std::invalid_argument("core_basis: axis must be 0 or 1");
  if (level <= 0 || !graded(axis)) return identity_;
  return core_bases_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(std::min(level, kMaxLevel) - 1)];
}

Matrix Ambient::whiten(const Matrix& x) const { return unit_gram_ ? x : Matrix(chol_.adjoint() * x); }

Matrix Ambient::unwhiten(const Matrix& y) const {
  if (y.size() == 0) return Matrix(size(), y.cols());
  if (unit_gram_) return y;
  return chol_.adjoint().triangularView<Eigen::Upper>().solve(y);
}

Matrix Ambient::whiten_operator(const Matrix& t) const {
  if (t.size() == 0 || unit_gram_) return t;
  // L^H T L^{-H}
  Matrix right = chol_.triangularView<Eigen::Lower>().solve(t.adjoint()).adjoint();
  return chol_.adjoint() * right;
}

Matrix Ambient::unwhiten_operator(const Matrix& tw) const {
  if (tw.size() == 0 || unit_gram_) return tw;
  // L^{-H} Tw L^H
  Matrix left = chol_.adjoint().triangularView<Eigen::Upper>().solve(tw);
  return left * chol_.adjoint();
}

Subspace::Subspace(AmbientPtr ambient, Matrix whitened) : ambient_(std::move(ambient)), whitened_(std::move(whitened)) {
  if (!ambient_) throw std::invalid_argument("Subspace: null ambient");
  if (whitened_.rows() != ambient_->size()) throw std::invalid_argument("Subspace: basis has wrong height");
}

Subspace Subspace::span(AmbientPtr ambient, const Matrix& vectors, Real rank_tol) {
  Matrix w = ambient->whiten(vectors);
  return Subspace(ambient, linalg::range_basis(w, rank_tol));
}

Subspace Subspace::whole(AmbientPtr ambient) {
  const Index n = ambient->size();
  return Subspace(std::move(ambient), Matrix::Identity(n, n));
}

Subspace Subspace::zero(AmbientPtr ambient) {
  const Index n = ambient->size();
  return Subspace(std::move(ambient), Matrix(n, 0));
}

Matrix Subspace::basis() const { return ambient_->unwhiten(whitened_); }

Matrix Subspace::projector() const { return ambient_->unwhiten_operator(whitened_projector()); }

Subspace core(const AmbientPtr& ambient, int axis, int level) {
  return Subspace(ambient, ambient->core_basis(axis, level));
}

Subspace joint_core(const AmbientPtr& ambient, int level1, int level2) {
  return subspace_intersect(core(ambient, 0, level1), core(ambient, 1, level2));
}

namespace {

void require_same(const Subspace& a, const Subspace& b, const char* what) {
  if (a.ambient() != b.ambient() && a.ambient()->size() != b.ambient()->size())
    throw std::invalid_argument(std::string(what) + ": subspaces live in different ambients");
}

}  // namespace

Subspace subspace_intersect(const Subspace& a, const Subspace& b, Real tol) {
  require_same(a, b, "subspace_intersect");
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient());
  // Eigenvalues of P_A + P_B are 1 +- cos(principal angle).
  // Squared cosines come from the smaller Gram matrix of C = A^H B.
  const Matrix c = a.whitened().adjoint() * b.whitened();
  const bool b_side = c.cols() <= c.rows();
  const Matrix g = b_side ? Matrix(c.adjoint() * c) : Matrix(c * c.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  const Real cut = (1 - tol) * (1 - tol);
  const Index n = g.rows();
  Index k = 0;
  while (k < n && es.eigenvalues()(n - 1 - k) > cut) ++k;
  if (k == 0) return Subspace::zero(a.ambient());
  Matrix q = (b_side ? b.whitened() : a.whitened()) * es.eigenvectors().rightCols(k);
  // re-orthonormalize against rounding
  Eigen::HouseholderQR<Matrix> qr(q);
  Matrix basis = qr.householderQ() * Matrix::Identity(q.rows(), k);
  return Subspace(a.ambient(), std::move(basis));
}

Subspace subspace_sum(const Subspace& a, const Subspace& b, Real rank_tol) {
  require_same(a, b, "subspace_sum");
  Matrix joined(a.whitened().rows(), a.dim() + b.dim());
  joined << a.whitened(), b.whitened();
  return Subspace(a.ambient(), linalg::range_basis(joined, rank_tol));
}

Subspace orthocomplement(const Subspace& a) { return Subspace(a.ambient(), linalg::complement_basis(a.whitened())); }

Real subspace_distance(const Subspace& a, const Subspace& b) {
  require_same(a, b, "subspace_distance");
  return linalg::hermitian_norm2(a.whitened_projector() - b.whitened_projector());
}

Real subspace_overlap(const Subspace& a, const Subspace& b) {
  require_same(a, b, "subspace_overlap");
  return linalg::norm2(a.whitened().adjoint() * b.whitened());
}

}  // namespace wold
