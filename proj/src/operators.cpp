#include "wold/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wold/linalg.hpp"

namespace wold {

OperatorModel::OperatorModel(AmbientPtr space, Matrix matrix, int axis, int safe_core_margin)
    : space_(std::move(space)), matrix_(std::move(matrix)), axis_(axis), margin_(safe_core_margin) {
  validate();
  whitened_ = space_->whiten_operator(matrix_);
  norm_ = linalg::norm2(whitened_);
}

OperatorModel::OperatorModel(AmbientPtr space, Matrix matrix, Matrix whitened, int axis, int safe_core_margin)
    : space_(std::move(space)),
      matrix_(std::move(matrix)),
      whitened_(std::move(whitened)),
      axis_(axis),
      margin_(safe_core_margin) {
  validate();
  norm_ = linalg::norm2(whitened_);
}

void OperatorModel::validate() const {
  if (!space_) throw std::invalid_argument("OperatorModel: null ambient");
  if (matrix_.rows() != space_->size() || matrix_.cols() != space_->size())
    throw std::invalid_argument("OperatorModel: matrix shape does not match the ambient");
  if (axis_ < 0 || axis_ > 1) throw std::invalid_argument("OperatorModel: axis must be 0 or 1");
  if (margin_ < 0) throw std::invalid_argument("OperatorModel: negative safe-core margin");
}

OperatorModel OperatorModel::from_whitened(AmbientPtr space, Matrix whitened, int axis, int safe_core_margin) {
  if (!space) throw std::invalid_argument("OperatorModel: null ambient");
  Matrix m = space->unwhiten_operator(whitened);
  return OperatorModel(std::move(space), std::move(m), std::move(whitened), axis, safe_core_margin);
}

namespace {

void require_common(const OperatorModel& a, const OperatorModel& b, const char* what) {
  if (a.space() != b.space()) throw std::invalid_argument(std::string(what) + ": operators live on different ambients");
}

void require_on(const OperatorModel& t, const Subspace& s, const char* what) {
  if (t.space() != s.ambient()) throw std::invalid_argument(std::string(what) + ": subspace is not in the operator's ambient");
}

OperatorModel from_whitened(const AmbientPtr& space, Matrix w, int axis, int margin) {
  return OperatorModel::from_whitened(space, std::move(w), axis, margin);
}

}  // namespace

OperatorModel adjoint(const OperatorModel& t) {
  return from_whitened(t.space(), t.whitened().adjoint(), t.axis(), t.safe_core_margin());
}

OperatorModel compose(const OperatorModel& a, const OperatorModel& b) {
  require_common(a, b, "compose");
  return OperatorModel(a.space(), a.matrix() * b.matrix(), a.whitened() * b.whitened(), a.axis(),
                       a.safe_core_margin() + b.safe_core_margin());
}

OperatorModel identity_operator(const AmbientPtr& space) {
  return OperatorModel(space, Matrix::Identity(space->size(), space->size()), 0, 0);
}

Subspace apply(const OperatorModel& t, const Subspace& s, Real rank_tol) {
  require_on(t, s, "apply");
  return Subspace(s.ambient(), linalg::range_basis(t.whitened() * s.whitened(), rank_tol, t.norm()));
}

Subspace adjoint_kernel(const OperatorModel& t) { return orthocomplement(apply(t, Subspace::whole(t.space()))); }

Real restricted_norm(const Matrix& whitened_op, const Subspace& s) { return linalg::norm2(whitened_op * s.whitened()); }

Real reducing_residual(const OperatorModel& t, const Subspace& s) {
  require_on(t, s, "reducing_residual");
  const Matrix p = s.whitened_projector();
  return linalg::norm2(t.whitened() * p - p * t.whitened());
}

namespace {

AmbientPtr restricted_ambient(const Subspace& s) {
  const AmbientPtr& amb = s.ambient();
  const Matrix& q = s.whitened();
  std::array<Ambient::Levels, 2> levels;
  for (int axis = 0; axis < 2; ++axis) {
    if (!amb->graded(axis)) continue;
    for (int k = 1; k <= kMaxLevel; ++k) {
      const Subspace c = subspace_intersect(core(amb, axis, k), s);
      levels[static_cast<std::size_t>(axis)].push_back(q.adjoint() * c.whitened());
    }
  }
  return std::make_shared<const Ambient>(Matrix::Identity(s.dim(), s.dim()), std::move(levels));
}

}  // namespace

OperatorModel restrict_to(const OperatorModel& t, const Subspace& s) {
  require_on(t, s, "restrict_to");
  const Matrix& q = s.whitened();
  return OperatorModel(restricted_ambient(s), q.adjoint() * t.whitened() * q, t.axis(), t.safe_core_margin());
}

std::pair<OperatorModel, OperatorModel> restrict_pair(const OperatorModel& t1, const OperatorModel& t2,
                                                      const Subspace& s) {
  require_common(t1, t2, "restrict_pair");
  require_on(t1, s, "restrict_pair");
  const Matrix& q = s.whitened();
  AmbientPtr amb = restricted_ambient(s);
  return {OperatorModel(amb, q.adjoint() * t1.whitened() * q, t1.axis(), t1.safe_core_margin()),
          OperatorModel(amb, q.adjoint() * t2.whitened() * q, t2.axis(), t2.safe_core_margin())};
}

Matrix restricted_coordinates(const Subspace& s, const Subspace& inner) {
  if (s.ambient() != inner.ambient()) throw std::invalid_argument("restricted_coordinates: different ambients");
  return s.whitened().adjoint() * inner.whitened();
}

Real two_isometry_defect(const OperatorModel& t) {
  const Subspace c = core(t.space(), t.axis(), 2);
  if (c.dim() == 0) throw PreconditionError("two_isometry_defect: caps too small for a safe core");
  const Matrix a1 = t.whitened() * c.whitened();
  const Matrix a2 = t.whitened() * a1;
  const Matrix f = a2.adjoint() * a2 - Real(2) * (a1.adjoint() * a1) + Matrix::Identity(c.dim(), c.dim());
  return linalg::hermitian_norm2(f);
}

CommutingResiduals doubly_commuting_residual(const OperatorModel& t1, const OperatorModel& t2) {
  require_common(t1, t2, "doubly_commuting_residual");
  // each factor must act exactly once along its axis
  int level[2] = {0, 0};
  ++level[t1.axis()];
  ++level[t2.axis()];
  Subspace c = joint_core(t1.space(), level[0], level[1]);
  if (c.dim() == 0) throw PreconditionError("doubly_commuting_residual: caps too small for a safe core");
  const Matrix& a = t1.whitened();
  const Matrix& b = t2.whitened();
  const Matrix& q = c.whitened();
  return {linalg::norm2((a * b - b * a) * q), linalg::norm2((a.adjoint() * b - b * a.adjoint()) * q)};
}

DefectOperator defect_operator(const OperatorModel& t, const Tolerances& tol) {
  Subspace c = core(t.space(), t.axis(), 1);
  const Matrix& q = c.whitened();
  const Matrix a = t.whitened() * q;
  const Matrix form = linalg::hermitian_part(a.adjoint() * a - Matrix::Identity(c.dim(), c.dim()));
  if (c.dim() == 0) {
    return {from_whitened(t.space(), Matrix::Zero(t.size(), t.size()), t.axis(), t.safe_core_margin()),
            Subspace::zero(t.space()), RealVector(0), c, form, 0};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(form);
  const RealVector& ev = es.eigenvalues();
  const Real scale = std::max<Real>(1, linalg::max_abs(ev));
  if (ev(0) < -tol.psd * scale) {
    std::ostringstream os;
    os << "defect_operator: T*T - I has eigenvalue " << ev(0) << " (not a 2-isometry candidate)";
    throw PreconditionError(os.str());
  }
  // Eigenvalues inside the rounding band are zero, on either side.
  RealVector s(ev.size());
  for (Index i = 0; i < ev.size(); ++i) s(i) = ev(i) > tol.psd * scale ? std::sqrt(ev(i)) : Real(0);
  const Matrix& v = es.eigenvectors();
  const Matrix dw = q * (v * s.asDiagonal() * v.adjoint()) * q.adjoint();
  const Real smax = s.size() ? s.maxCoeff() : Real(0);
  std::vector<Index> keep;
  for (Index i = 0; i < s.size(); ++i)
    if (smax > 0 && s(i) > tol.rank * smax) keep.push_back(i);
  const Index r = static_cast<Index>(keep.size());
  Matrix range(t.size(), r);
  RealVector scales(r);
  for (Index j = 0; j < r; ++j) {
    range.col(j) = q * v.col(keep[static_cast<std::size_t>(j)]);
    scales(j) = s(keep[static_cast<std::size_t>(j)]);
  }
  return {from_whitened(t.space(), dw, t.axis(), t.safe_core_margin()), Subspace(t.space(), std::move(range)),
          std::move(scales), c, form, ev(0)};
}

LeftInverse left_inverse(const OperatorModel& t, const Tolerances& tol) {
  Subspace c = core(t.space(), t.axis(), 1);
  const Matrix& q = c.whitened();
  const Matrix a = t.whitened() * q;
  const Matrix m = linalg::hermitian_part(a.adjoint() * a);
  if (c.dim() == 0) return {from_whitened(t.space(), Matrix::Zero(t.size(), t.size()), t.axis(), 0), 1};
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const RealVector& ev = es.eigenvalues();
  const Real cond = ev(0) > 0 ? ev(ev.size() - 1) / ev(0) : std::numeric_limits<Real>::infinity();
  if (!(cond <= tol.condition)) {
    std::ostringstream os;
    os << "left_inverse: T*T is ill-conditioned on the core (condition " << cond << ")";
    throw PreconditionError(os.str());
  }
  const Matrix minv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  return {from_whitened(t.space(), q * minv * a.adjoint(), t.axis(), t.safe_core_margin()), cond};
}

WanderingProjection wandering_projection(const OperatorModel& t, const Tolerances& tol) {
  const LeftInverse li = left_inverse(t, tol);
  const Matrix pw = Matrix::Identity(t.size(), t.size()) - t.whitened() * li.l.whitened();
  Subspace range(t.space(), linalg::range_basis(pw, tol.rank, 1));  // pw is a projection
  return {from_whitened(t.space(), pw, t.axis(), 0), std::move(range)};
}

}  // namespace wold
