#ifndef WOLD_OPERATORS_HPP
#define WOLD_OPERATORS_HPP

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "wold/space.hpp"

namespace wold {

/// Finite-dimensional Hilbert space C^n with inner product <x, y> = y^H G x
/// and a truncation filtration.
///
/// The filtration records, for each coordinate operator (axis 0 and 1), the
/// nested cores core(axis, k), k = 1..kMaxLevel, on which k applications of
/// that operator are exact (no truncation). An axis without grading has
/// core(axis, k) equal to the whole space. Cores are stored as spanning
/// matrices in ambient coordinates.
///
/// Internally most work happens in whitened coordinates y = L^H x with
/// G = L L^H, where G-adjoints become conjugate transposes.
class Ambient {
 public:
  using Levels = std::vector<Matrix>;  // empty: ungraded

  explicit Ambient(Matrix gram, std::array<Levels, 2> levels = {},
                   std::shared_ptr<const GradedPolySpace> source = nullptr);

  /// Ambient of a graded space: core(0, k) = {m <= N1 - k}, core(1, k) = {n <= N2 - k};
  /// axis 1 is ungraded when N2 == 0.
  static std::shared_ptr<const Ambient> from_space(std::shared_ptr<const GradedPolySpace> space);
  /// Identity gram, ungraded.
  static std::shared_ptr<const Ambient> euclidean(Index n);

  Index size() const { return gram_.rows(); }
  const Matrix& gram() const { return gram_; }
  const Matrix& cholesky_factor() const { return chol_; }  // lower L, G = L L^H
  bool graded(int axis) const { return !levels_.at(static_cast<std::size_t>(axis)).empty(); }
  const Levels& levels(int axis) const { return levels_.at(static_cast<std::size_t>(axis)); }
  /// Spanning matrix of core(axis, level) in ambient coordinates.
  Matrix core_span(int axis, int level) const;
  /// Orthonormal whitened basis of core(axis, level), computed once.
  const Matrix& core_basis(int axis, int level) const;
  const std::shared_ptr<const GradedPolySpace>& source() const { return source_; }

  Matrix whiten(const Matrix& x) const;    // L^H x
  Matrix unwhiten(const Matrix& y) const;  // L^{-H} y
  Matrix whiten_operator(const Matrix& t) const;
  Matrix unwhiten_operator(const Matrix& tw) const;

 private:
  Matrix gram_;
  Matrix chol_;
  std::array<Levels, 2> levels_;
  std::array<Levels, 2> core_bases_;
  Matrix identity_;
  bool unit_gram_ = false;
  std::shared_ptr<const GradedPolySpace> source_;
};

using AmbientPtr = std::shared_ptr<const Ambient>;

/// Closed subspace given by a G-orthonormal basis.
class Subspace {
 public:
  /// `whitened` must have orthonormal columns (Euclidean) in whitened coordinates.
  Subspace(AmbientPtr ambient, Matrix whitened);

  static Subspace span(AmbientPtr ambient, const Matrix& vectors, Real rank_tol = Tolerances{}.rank);
  static Subspace whole(AmbientPtr ambient);
  static Subspace zero(AmbientPtr ambient);

  const AmbientPtr& ambient() const { return ambient_; }
  Index dim() const { return whitened_.cols(); }
  const Matrix& whitened() const { return whitened_; }
  /// G-orthonormal basis in ambient coordinates.
  Matrix basis() const;
  /// G-orthogonal projector in ambient coordinates.
  Matrix projector() const;
  Matrix whitened_projector() const { return whitened_ * whitened_.adjoint(); }

 private:
  AmbientPtr ambient_;
  Matrix whitened_;
};

Subspace core(const AmbientPtr& ambient, int axis, int level);
/// core(0, level1) intersected with core(1, level2).
Subspace joint_core(const AmbientPtr& ambient, int level1, int level2);

/// Span of the eigenvectors of P_A + P_B with eigenvalue above 2 - tol.
Subspace subspace_intersect(const Subspace& a, const Subspace& b, Real tol = Tolerances{}.intersection);
Subspace subspace_sum(const Subspace& a, const Subspace& b, Real rank_tol = Tolerances{}.rank);
Subspace orthocomplement(const Subspace& a);
/// Spectral-norm distance between the two orthogonal projectors.
Real subspace_distance(const Subspace& a, const Subspace& b);
/// Largest |<x, y>| over unit x in a, y in b.
Real subspace_overlap(const Subspace& a, const Subspace& b);

/// Square operator on an Ambient. `axis` selects the filtration axis that
/// describes where the operator is exact.
class OperatorModel {
 public:
  OperatorModel(AmbientPtr space, Matrix matrix, int axis = 0, int safe_core_margin = 2);

  const AmbientPtr& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  const Matrix& whitened() const { return whitened_; }
  Real norm() const { return norm_; }  // operator norm in the ambient inner product
  int axis() const { return axis_; }
  int safe_core_margin() const { return margin_; }
  Index size() const { return matrix_.rows(); }

  OperatorModel with_axis(int axis) const { return OperatorModel(space_, matrix_, whitened_, axis, margin_); }

  /// Operator given in whitened coordinates.
  static OperatorModel from_whitened(AmbientPtr space, Matrix whitened, int axis, int safe_core_margin);

 private:
  OperatorModel(AmbientPtr space, Matrix matrix, Matrix whitened, int axis, int safe_core_margin);
  void validate() const;
  friend OperatorModel compose(const OperatorModel& a, const OperatorModel& b);

  AmbientPtr space_;
  Matrix matrix_;
  Matrix whitened_;
  Real norm_;
  int axis_;
  int margin_;
};

/// T* = G^{-1} T^H G.
OperatorModel adjoint(const OperatorModel& t);
/// a * b; both must live on the same Ambient. Keeps a's axis.
OperatorModel compose(const OperatorModel& a, const OperatorModel& b);
OperatorModel identity_operator(const AmbientPtr& space);

Subspace apply(const OperatorModel& t, const Subspace& s, Real rank_tol = Tolerances{}.rank);
/// H minus T H, i.e. ker T*.
Subspace adjoint_kernel(const OperatorModel& t);
/// Operator norm (G-norm) of T restricted to s.
Real restricted_norm(const Matrix& whitened_op, const Subspace& s);
/// || T P - P T || in the G operator norm.
Real reducing_residual(const OperatorModel& t, const Subspace& s);

/// Compress T to s (a G-orthonormal basis becomes the standard basis of a new
/// Ambient with identity gram); the filtration is intersected with s.
OperatorModel restrict_to(const OperatorModel& t, const Subspace& s);
std::pair<OperatorModel, OperatorModel> restrict_pair(const OperatorModel& t1, const OperatorModel& t2,
                                                      const Subspace& s);
/// Coordinates of vectors of s (whitened) in the restricted Ambient produced by restrict_to.
Matrix restricted_coordinates(const Subspace& s, const Subspace& inner);

/// || T^2* T^2 - 2 T* T + I || on core(axis, 2), using exact pairings <Tx, Ty>.
Real two_isometry_defect(const OperatorModel& t);

struct CommutingResiduals {
  Real commutator;         // || T1 T2 - T2 T1 ||
  Real double_commutator;  // || T1* T2 - T2 T1* ||
};
/// Residuals on the joint safe core.
CommutingResiduals doubly_commuting_residual(const OperatorModel& t1, const OperatorModel& t2);

struct DefectOperator {
  OperatorModel d;     // (T*T - I)^{1/2} compressed to core(axis, 1)
  Subspace range;      // closure of D(H); columns are eigenvectors of D
  RealVector scales;   // eigenvalue of D on each range column
  Subspace core;       // core(axis, 1)
  Matrix form;         // T*T - I as a Hermitian matrix in core-orthonormal coordinates
  Real worst_eigenvalue;
};
DefectOperator defect_operator(const OperatorModel& t, const Tolerances& tol = {});

struct LeftInverse {
  OperatorModel l;  // (T*T)^{-1} T*, computed on core(axis, 1)
  Real condition;
};
LeftInverse left_inverse(const OperatorModel& t, const Tolerances& tol = {});

struct WanderingProjection {
  OperatorModel p;  // I - T L
  Subspace range;   // ker T*
};
WanderingProjection wandering_projection(const OperatorModel& t, const Tolerances& tol = {});

}  // namespace wold

#endif  // WOLD_OPERATORS_HPP
