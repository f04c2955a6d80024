#ifndef WOLD_DECOMP_HPP
#define WOLD_DECOMP_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wold/operators.hpp"

namespace wold {

/// Named check values in the order they were computed.
class ResidualTable {
 public:
  void set(const std::string& name, Real value);
  /// Throws ResidualError naming the first entry above `tol`.
  void require_below(Real tol, const std::string& context) const;
  Real max() const;
  std::optional<Real> get(const std::string& name) const;
  const std::vector<std::pair<std::string, Real>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, Real>> entries_;
};

/// Intersection of T^n(start) over n >= 0 (start defaults to the whole
/// ambient; T(start) must lie in start). Uses S_{2e} = T^e(S_e) and stops
/// when the dimension repeats; max_iter bounds the exponent, < 0 means
/// ambient dimension + 2.
Subspace stable_range(const OperatorModel& t, const std::optional<Subspace>& start = std::nullopt, int max_iter = -1,
                      Real rank_tol = Tolerances{}.rank);

/// Closed span of T^n(w), n >= 0.
Subspace krylov_span(const OperatorModel& t, const Subspace& w, Real rank_tol = Tolerances{}.rank);

/// Unitary on the defect space extending D x -> D T x.
struct TildeIsometry {
  DefectOperator defect;
  Matrix matrix;                  // r x r in the coordinates of defect.range
  Real least_squares_residual;    // || T~ Y - Y_T || / max(1, ||Y_T||)
  Real unitarity_residual;        // || T~^H T~ - I ||
  Index completed_dims;           // directions filled in by the completion
  /// D-coordinates (r x k) of the columns of a subspace inside core(axis, 1).
  Matrix coordinates(const Subspace& s) const;
};
TildeIsometry tilde_isometry(const OperatorModel& t, const Tolerances& tol = {});

/// Atoms (theta_j, W_j) with W_j the compression of the spectral projection of
/// T~ at e^{i theta_j} to `onto` (default ker T*), in the basis onto.whitened().
/// Requires T analytic and `onto` inside core(axis, 1).
CircleMeasure extract_measure(const OperatorModel& t, const std::optional<Subspace>& onto = std::nullopt,
                              const Tolerances& tol = {});

struct SingleWold {
  Subspace h0, h1;
  Subspace wandering;  // H minus TH
  OperatorModel unitary_part, analytic_part;
  CircleMeasure extracted;
  ResidualTable residuals;
};
SingleWold wold_single(const OperatorModel& t, const Tolerances& tol = {});

/// L, P = I - T L for one operator; reused by the norm identities.
struct Calculus {
  OperatorModel t;
  LeftInverse l;
  WanderingProjection p;
};
Calculus make_calculus(const OperatorModel& t, const Tolerances& tol = {});

/// |<x, x> - sum_k ||P L^k x||^2 - sum_{k>=1} ||D L^k x||^2|, x in ambient
/// coordinates. ||D y||^2 is evaluated as ||T y||^2 - ||y||^2.
Real check_norm_identity(const OperatorModel& t, const Vector& x, const Tolerances& tol = {});
Real check_norm_identity(const Calculus& calc, const Vector& x);

struct PairCalculus {
  Calculus c1, c2;
  Matrix p_whitened;  // P1 P2
};
PairCalculus make_pair_calculus(const OperatorModel& t1, const OperatorModel& t2, const Tolerances& tol = {});

/// The four double sums over L^{m,n} = L1^m L2^n.
struct TwoVariableSums {
  Real p = 0;     // sum_{m,n>=0} ||P L^{m,n} x||^2
  Real d1p2 = 0;  // sum_{m>=1,n>=0} ||D1 P2 L^{m,n} x||^2
  Real p1d2 = 0;  // sum_{m>=0,n>=1} ||P1 D2 L^{m,n} x||^2
  Real d = 0;     // sum_{m,n>=1} ||D1 D2 L^{m,n} x||^2
  Real total() const { return p + d1p2 + p1d2 + d; }
};
TwoVariableSums two_variable_sums(const PairCalculus& calc, const Vector& x);

Real check_two_variable_identity(const OperatorModel& t1, const OperatorModel& t2, const Vector& x,
                                 const Tolerances& tol = {});
Real check_two_variable_identity(const PairCalculus& calc, const Vector& x);

/// ker T1* intersected with ker T2*.
Subspace joint_wandering(const OperatorModel& t1, const OperatorModel& t2, const Tolerances& tol = {});

/// Coefficient space built from the measures extracted from (T1, T2) on
/// joint_wandering(T1, T2).
GradedPolySpace model_target(const OperatorModel& t1, const OperatorModel& t2, Caps caps, const Tolerances& tol = {});

/// x -> sum_{m,n} (P L1^m L2^n x) z1^m z2^n, coefficients expressed in the
/// basis joint_wandering(T1, T2).whitened().
struct CoefficientMap {
  Matrix matrix;  // target coefficients <- ambient coordinates
  std::shared_ptr<const GradedPolySpace> target;
  ResidualTable residuals;
};
CoefficientMap build_V(const OperatorModel& t1, const OperatorModel& t2, std::shared_ptr<const GradedPolySpace> target,
                       const Tolerances& tol = {});

struct QuadrupleDecomposition {
  Subspace h00, h10, h01, h11;
  Subspace e10, e01, e;
  std::array<std::pair<OperatorModel, OperatorModel>, 4> restrictions;  // order h00, h10, h01, h11
  CircleMeasure nu1, nu2, eta1, eta2;
  ResidualTable residuals;
  std::array<Index, 4> dims() const { return {h00.dim(), h10.dim(), h01.dim(), h11.dim()}; }
};
QuadrupleDecomposition wold_pair(const OperatorModel& t1, const OperatorModel& t2, const Tolerances& tol = {});

/// wold_pair for a doubly commuting pair of isometries; every extracted
/// measure must vanish.
QuadrupleDecomposition slocinski(const OperatorModel& v1, const OperatorModel& v2, const Tolerances& tol = {});

enum class Verdict { equal, not_equal, inconclusive };

struct Equivalence {
  Verdict verdict;
  std::optional<Matrix> unitary;  // b = conjugate(a, U)
  Real discrepancy;
};
Equivalence measures_equal_up_to_unitary(const CircleMeasure& a, const CircleMeasure& b, int max_order,
                                         Real tol = Tolerances{}.measure_match);

const char* to_string(Verdict v);

}  // namespace wold

#endif  // WOLD_DECOMP_HPP
