#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "wold/decomp.hpp"
#include "wold/linalg.hpp"

namespace wold {

void ResidualTable::set(const std::string& name, Real value) {
  for (auto& e : entries_)
    if (e.first == name) {
      e.second = value;
      return;
    }
  entries_.emplace_back(name, value);
}

void ResidualTable::require_below(Real tol, const std::string& context) const {
  for (const auto& [name, value] : entries_)
    if (!(value <= tol)) {
      std::ostringstream os;
      os << context << ": residual '" << name << "' = " << value << " exceeds " << tol;
      throw ResidualError(os.str());
    }
}

Real ResidualTable::max() const {
  Real m = 0;
  for (const auto& e : entries_) m = std::max(m, e.second);
  return m;
}

std::optional<Real> ResidualTable::get(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.first == name) return e.second;
  return std::nullopt;
}

Subspace stable_range(const OperatorModel& t, const std::optional<Subspace>& start, int max_iter, Real rank_tol) {
  Subspace s = start ? *start : Subspace::whole(t.space());
  if (s.ambient() != t.space()) throw std::invalid_argument("stable_range: start is not in the operator's ambient");
  const long limit = max_iter < 0 ? static_cast<long>(t.size()) + 2 : max_iter;
  // Ranges T^e(S) are nested, so dim T^e(S) == dim T^{2e}(S) means stable.
  // S_{2e} = (T^e)(S_e) with T^e built by squaring.
  if (s.dim() == 0) return s;
  if (limit < 1) throw ResidualError("stable_range: max_iter must allow one step");
  s = apply(t, s, rank_tol);
  long e = 1;
  OperatorModel power = t;
  Index prev = s.dim();
  while (s.dim() > 0) {
    const bool last = e >= limit;  // one confirming step past the limit
    Subspace next = apply(power, s, rank_tol);
    e *= 2;
    if (next.dim() == prev) return next;
    if (last) {
      std::ostringstream os;
      os << "stable_range: no stabilization within " << limit << " steps (dims " << prev << ", " << next.dim()
         << " at steps " << e / 2 << ", " << e << ")";
      throw ResidualError(os.str());
    }
    prev = next.dim();
    s = std::move(next);
    power = compose(power, power);
  }
  return s;
}

Subspace krylov_span(const OperatorModel& t, const Subspace& w, Real rank_tol) {
  if (w.ambient() != t.space()) throw std::invalid_argument("krylov_span: subspace is not in the operator's ambient");
  Subspace acc = w;
  Subspace layer = w;
  for (Index k = 0; k <= t.size(); ++k) {
    layer = apply(t, layer, rank_tol);
    if (layer.dim() == 0) break;
    Subspace next = subspace_sum(acc, layer, rank_tol);
    if (next.dim() == acc.dim()) break;
    acc = std::move(next);
  }
  return acc;
}

Matrix TildeIsometry::coordinates(const Subspace& s) const {
  return defect.scales.asDiagonal() * (defect.range.whitened().adjoint() * s.whitened());
}

TildeIsometry tilde_isometry(const OperatorModel& t, const Tolerances& tol) {
  TildeIsometry out{defect_operator(t, tol), Matrix(0, 0), 0, 0, 0};
  const Index r = out.defect.range.dim();
  if (r == 0) return out;

  const Matrix& q1 = out.defect.core.whitened();
  const Subspace c2 = core(t.space(), t.axis(), 2);
  const Matrix& q2 = c2.whitened();
  const Matrix tq2 = t.whitened() * q2;
  const Real leak = linalg::norm2(tq2 - q1 * (q1.adjoint() * tq2));
  if (leak > tol.rank * std::max<Real>(1, linalg::norm2(tq2)))
    throw PreconditionError("tilde_isometry: T does not map core(2) into core(1)");

  const Matrix y2 = out.coordinates(c2);
  const Matrix yt = out.defect.scales.asDiagonal() * (out.defect.range.whitened().adjoint() * tq2);
  if (y2.cols() == 0) throw PreconditionError("tilde_isometry: caps too small for a safe core");

  const linalg::Svd svd = linalg::svd(y2);
  const RealVector& sv = svd.s;
  Index rho = 0;
  while (rho < sv.size() && sv(0) > 0 && sv(rho) > tol.rank * sv(0)) ++rho;
  const Matrix u = svd.u.leftCols(rho);
  const Matrix image = yt * svd.v.leftCols(rho) * sv.head(rho).cwiseInverse().asDiagonal();
  Matrix tt = image * u.adjoint();
  out.least_squares_residual = linalg::norm2(tt * y2 - yt) / std::max<Real>(1, linalg::norm2(yt));
  if (out.least_squares_residual > tol.least_squares) {
    std::ostringstream os;
    os << "tilde_isometry: least-squares residual " << out.least_squares_residual << " (truncation too small)";
    throw ResidualError(os.str());
  }
  if (rho < r) {
    // map the unused directions onto the unused image directions
    const Matrix from = linalg::complement_basis(u);
    const Matrix to = linalg::complement_basis(linalg::range_basis(image, tol.rank));
    if (to.cols() != from.cols()) throw ResidualError("tilde_isometry: partial isometry has a rank-deficient image");
    tt += to * from.adjoint();
    out.completed_dims = r - rho;
  }
  out.matrix = std::move(tt);
  out.unitarity_residual = linalg::unitarity_defect(out.matrix);
  if (out.unitarity_residual > tol.unitarity) {
    std::ostringstream os;
    os << "tilde_isometry: unitarity residual " << out.unitarity_residual;
    throw ResidualError(os.str());
  }
  return out;
}

namespace {

CircleMeasure extract(const OperatorModel& t, const std::optional<Subspace>& onto, const Tolerances& tol,
                      bool check_analytic) {
  if (check_analytic && stable_range(t, std::nullopt, -1, tol.rank).dim() > 0)
    throw PreconditionError("extract_measure: operator has a unitary part (not analytic)");
  const Subspace e = onto ? *onto : adjoint_kernel(t);
  if (e.ambient() != t.space()) throw std::invalid_argument("extract_measure: subspace is not in the operator's ambient");
  const Index d = e.dim();
  if (d == 0) return CircleMeasure::zero(0);

  const Subspace c1 = core(t.space(), t.axis(), 1);
  const Real outside = linalg::norm2(e.whitened() - c1.whitened() * (c1.whitened().adjoint() * e.whitened()));
  if (outside > tol.rank) throw PreconditionError("extract_measure: wandering subspace is not inside the safe core");

  const TildeIsometry tt = tilde_isometry(t, tol);
  if (tt.matrix.rows() == 0) return CircleMeasure::zero(d);
  const Matrix ye = tt.coordinates(e);

  Eigen::ComplexSchur<Matrix> schur(tt.matrix);
  const Matrix& z = schur.matrixU();
  const Matrix& tri = schur.matrixT();
  const Index r = tri.rows();
  std::vector<Real> angle(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) angle[static_cast<std::size_t>(i)] = linalg::wrap_angle(std::arg(tri(i, i)));
  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return angle[static_cast<std::size_t>(a)] < angle[static_cast<std::size_t>(b)];
  });

  std::vector<std::vector<Index>> clusters;
  for (Index i : order) {
    if (!clusters.empty() &&
        angle[static_cast<std::size_t>(i)] - angle[static_cast<std::size_t>(clusters.back().back())] <= tol.cluster_angle)
      clusters.back().push_back(i);
    else
      clusters.push_back({i});
  }
  if (clusters.size() > 1) {
    const Real gap = 2 * M_PI - angle[static_cast<std::size_t>(clusters.back().back())] +
                     angle[static_cast<std::size_t>(clusters.front().front())];
    if (gap <= tol.cluster_angle) {
      clusters.front().insert(clusters.front().end(), clusters.back().begin(), clusters.back().end());
      clusters.pop_back();
    }
  }

  const Real scale = std::max<Real>(1, linalg::norm2(ye.adjoint() * ye));
  std::vector<Atom> atoms;
  for (const auto& cl : clusters) {
    Matrix zc(r, static_cast<Index>(cl.size()));
    Complex mean = 0;
    for (std::size_t j = 0; j < cl.size(); ++j) {
      zc.col(static_cast<Index>(j)) = z.col(cl[j]);
      mean += std::polar(Real(1), angle[static_cast<std::size_t>(cl[j])]);
    }
    const Matrix proj = zc.adjoint() * ye;
    Matrix w = linalg::hermitian_part(proj.adjoint() * proj);
    if (linalg::max_abs(w) <= 1e-13 * scale) continue;
    atoms.push_back(Atom{linalg::wrap_angle(std::arg(mean)), std::move(w)});
  }
  return CircleMeasure(d, std::move(atoms), Matrix::Zero(d, d));
}

Real orthogonality(const Subspace& a, const Subspace& b) { return subspace_overlap(a, b); }

}  // namespace

CircleMeasure extract_measure(const OperatorModel& t, const std::optional<Subspace>& onto, const Tolerances& tol) {
  return extract(t, onto, tol, true);
}

SingleWold wold_single(const OperatorModel& t, const Tolerances& tol) {
  const Real defect = two_isometry_defect(t);
  if (!(defect <= tol.two_isometry)) {
    std::ostringstream os;
    os << "wold_single: not a 2-isometry (defect " << defect << ")";
    throw PreconditionError(os.str());
  }
  Subspace h0 = stable_range(t, std::nullopt, -1, tol.rank);
  Subspace wandering = adjoint_kernel(t);
  Subspace h1 = krylov_span(t, wandering, tol.rank);

  ResidualTable res;
  res.set("two_isometry_defect", defect);
  res.set("orthogonality", orthogonality(h0, h1));
  const Index n = t.size();
  res.set("completeness", linalg::hermitian_norm2(h0.whitened_projector() + h1.whitened_projector() -
                                                  Matrix::Identity(n, n)));
  res.set("reducing", std::max(reducing_residual(t, h0), reducing_residual(t, h1)));
  const Matrix& q0 = h0.whitened();
  res.set("unitarity_h0", linalg::unitarity_defect(q0.adjoint() * t.whitened() * q0));
  Real wander = 0;
  if (wandering.dim() > 0) {
    Matrix v = wandering.whitened();
    for (Index k = 1; k <= n; ++k) {
      v = t.whitened() * v;
      if (v.norm() == 0) break;
      wander = std::max(wander, linalg::norm2(wandering.whitened().adjoint() * v));
    }
  }
  res.set("wandering", wander);
  res.require_below(tol.decomposition, "wold_single");

  OperatorModel unitary_part = restrict_to(t, h0);
  OperatorModel analytic_part = restrict_to(t, h1);
  CircleMeasure extracted = h1.dim() == 0 ? CircleMeasure::zero(0) : extract(analytic_part, std::nullopt, tol, false);
  return {std::move(h0), std::move(h1), std::move(wandering), std::move(unitary_part), std::move(analytic_part),
          std::move(extracted), std::move(res)};
}

Calculus make_calculus(const OperatorModel& t, const Tolerances& tol) {
  LeftInverse l = left_inverse(t, tol);
  WanderingProjection p = wandering_projection(t, tol);
  return {t, std::move(l), std::move(p)};
}

namespace {

void require_analytic(const OperatorModel& t, const Tolerances& tol, const char* what) {
  if (stable_range(t, std::nullopt, -1, tol.rank).dim() > 0)
    throw PreconditionError(std::string(what) + ": operator is not analytic");
}

}  // namespace

Real check_norm_identity(const OperatorModel& t, const Vector& x, const Tolerances& tol) {
  require_analytic(t, tol, "check_norm_identity");
  return check_norm_identity(make_calculus(t, tol), x);
}

Real check_norm_identity(const Calculus& calc, const Vector& x) {
  const Ambient& amb = *calc.t.space();
  if (x.size() != amb.size()) throw std::invalid_argument("check_norm_identity: vector has the wrong size");
  Vector v = amb.whiten(x);
  const Real total = v.squaredNorm();
  const Matrix& tw = calc.t.whitened();
  const Matrix& lw = calc.l.l.whitened();
  const Matrix& pw = calc.p.p.whitened();
  Real sum = 0;
  for (Index k = 0; k <= amb.size() + 1; ++k) {
    if (v.norm() <= 1e-15 * std::sqrt(total)) break;
    sum += (pw * v).squaredNorm();
    if (k >= 1) sum += (tw * v).squaredNorm() - v.squaredNorm();
    v = lw * v;
  }
  return std::abs(total - sum);
}

}  // namespace wold
