#include <cmath>
#include <random>
#include <sstream>

#include "wold/decomp.hpp"
#include "wold/linalg.hpp"

namespace wold {

PairCalculus make_pair_calculus(const OperatorModel& t1, const OperatorModel& t2, const Tolerances& tol) {
  if (t1.space() != t2.space()) throw std::invalid_argument("make_pair_calculus: operators live on different ambients");
  Calculus c1 = make_calculus(t1, tol);
  Calculus c2 = make_calculus(t2, tol);
  Matrix p = c1.p.p.whitened() * c2.p.p.whitened();
  return {std::move(c1), std::move(c2), std::move(p)};
}

TwoVariableSums two_variable_sums(const PairCalculus& calc, const Vector& x) {
  const Ambient& amb = *calc.c1.t.space();
  if (x.size() != amb.size()) throw std::invalid_argument("two_variable_sums: vector has the wrong size");
  const Matrix& t1 = calc.c1.t.whitened();
  const Matrix& t2 = calc.c2.t.whitened();
  const Matrix& l1 = calc.c1.l.l.whitened();
  const Matrix& l2 = calc.c2.l.l.whitened();
  const Matrix& p1 = calc.c1.p.p.whitened();
  const Matrix& p2 = calc.c2.p.p.whitened();
  const Vector xw = amb.whiten(x);
  const Real floor = 1e-15 * xw.norm();
  TwoVariableSums s;
  Vector row = xw;
  for (Index m = 0; m <= amb.size() + 1 && row.norm() > floor; ++m, row = l1 * row) {
    Vector y = row;
    for (Index n = 0; n <= amb.size() + 1 && y.norm() > floor; ++n, y = l2 * y) {
      s.p += (calc.p_whitened * y).squaredNorm();
      if (m >= 1) {
        const Vector w = p2 * y;
        s.d1p2 += (t1 * w).squaredNorm() - w.squaredNorm();
      }
      if (n >= 1) {
        const Vector w = p1 * y;
        s.p1d2 += (t2 * w).squaredNorm() - w.squaredNorm();
      }
      if (m >= 1 && n >= 1) {
        const Vector a = t1 * y;
        const Vector b = t2 * y;
        s.d += (t1 * b).squaredNorm() - a.squaredNorm() - b.squaredNorm() + y.squaredNorm();
      }
    }
  }
  return s;
}

Real check_two_variable_identity(const OperatorModel& t1, const OperatorModel& t2, const Vector& x,
                                 const Tolerances& tol) {
  for (const auto* t : {&t1, &t2})
    if (stable_range(*t, std::nullopt, -1, tol.rank).dim() > 0)
      throw PreconditionError("check_two_variable_identity: operator is not analytic");
  return check_two_variable_identity(make_pair_calculus(t1, t2, tol), x);
}

Real check_two_variable_identity(const PairCalculus& calc, const Vector& x) {
  const Vector xw = calc.c1.t.space()->whiten(x);
  return std::abs(xw.squaredNorm() - two_variable_sums(calc, x).total());
}

Subspace joint_wandering(const OperatorModel& t1, const OperatorModel& t2, const Tolerances& tol) {
  return subspace_intersect(adjoint_kernel(t1), adjoint_kernel(t2), tol.intersection);
}

GradedPolySpace model_target(const OperatorModel& t1, const OperatorModel& t2, Caps caps, const Tolerances& tol) {
  const Subspace e = joint_wandering(t1, t2, tol);
  const CircleMeasure eta1 = extract_measure(t1, e, tol);
  const CircleMeasure eta2 = extract_measure(t2, e, tol);
  // extracted weights commute only up to rounding
  Tolerances relaxed = tol;
  relaxed.commuting_weights = std::max(tol.commuting_weights, tol.rank);
  return build_space(eta1, eta2, caps.n1, caps.n2, relaxed);
}

CoefficientMap build_V(const OperatorModel& t1, const OperatorModel& t2, std::shared_ptr<const GradedPolySpace> target,
                       const Tolerances& tol) {
  if (!target) throw std::invalid_argument("build_V: null target");
  const AmbientPtr& amb = t1.space();
  const Subspace e = joint_wandering(t1, t2, tol);
  if (e.dim() != target->dim()) throw std::invalid_argument("build_V: target coefficient dimension does not match");
  const PairCalculus calc = make_pair_calculus(t1, t2, tol);
  const Caps caps = target->caps();
  const Index d = e.dim();
  const Index n = amb->size();

  Matrix vw(basis_size(caps, d), n);
  Matrix row = e.whitened().adjoint();
  for (int m = 0; m <= caps.n1; ++m, row = row * calc.c1.l.l.whitened()) {
    Matrix r = row;
    for (int q = 0; q <= caps.n2; ++q, r = r * calc.c2.l.l.whitened())
      vw.middleRows(basis_index(caps, d, m, q, 0), d) = r;
  }

  CoefficientMap out{vw * amb->cholesky_factor().adjoint(), target, {}};
  const Subspace c = joint_core(amb, 2, 2);
  if (c.dim() == 0) throw PreconditionError("build_V: caps too small for a safe core");
  const Matrix& q = c.whitened();
  const Matrix vq = vw * q;
  const Matrix& gt = target->gram();
  Eigen::LLT<Matrix> llt(gt);
  const Matrix lt = llt.matrixL();
  out.residuals.set("isometry",
                    linalg::hermitian_norm2(vq.adjoint() * gt * vq - Matrix::Identity(c.dim(), c.dim())));
  for (int axis = 0; axis < 2; ++axis) {
    const Matrix& tw = axis == 0 ? t1.whitened() : t2.whitened();
    const Matrix diff = vw * tw * q - shift_matrix(caps, d, axis) * vq;
    out.residuals.set(axis == 0 ? "intertwining_1" : "intertwining_2", linalg::norm2(lt.adjoint() * diff));
  }

  // norm terms of Vx against the double sums, on fixed pseudo-random core vectors
  const Matrix g_hardy = term_gram(*target, NormTerm::hardy);
  const Matrix g1 = term_gram(*target, NormTerm::d1);
  const Matrix g2 = term_gram(*target, NormTerm::d2);
  const Matrix g3 = term_gram(*target, NormTerm::d3);
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<Real> normal;
  Real worst[4] = {0, 0, 0, 0};
  for (int sample = 0; sample < 8; ++sample) {
    Vector coeff(c.dim());
    for (Index i = 0; i < coeff.size(); ++i) coeff(i) = Complex(normal(rng), normal(rng));
    Vector yw = q * coeff;
    yw /= yw.norm();
    const Vector x = amb->unwhiten(yw);
    const Vector a = vw * yw;
    const TwoVariableSums s = two_variable_sums(calc, x);
    const Real terms[4] = {a.dot(g_hardy * a).real(), a.dot(g1 * a).real(), a.dot(g2 * a).real(), a.dot(g3 * a).real()};
    const Real sums[4] = {s.p, s.d1p2, s.p1d2, s.d};
    for (int k = 0; k < 4; ++k) worst[k] = std::max(worst[k], std::abs(terms[k] - sums[k]));
  }
  out.residuals.set("hardy_term", worst[0]);
  out.residuals.set("d1_term", worst[1]);
  out.residuals.set("d2_term", worst[2]);
  out.residuals.set("d3_term", worst[3]);
  out.residuals.require_below(tol.coefficient_map, "build_V");
  return out;
}

namespace {

Subspace apply_power(const OperatorModel& t, Subspace s, int k, Real rank_tol) {
  for (int i = 0; i < k; ++i) s = apply(t, s, rank_tol);
  return s;
}

Real compressed_unitarity(const OperatorModel& t, const Subspace& s) {
  const Matrix& q = s.whitened();
  return linalg::unitarity_defect(q.adjoint() * t.whitened() * q);
}

Real commutator(const Matrix& a, const Matrix& b) { return linalg::norm2(a * b - b * a); }

CircleMeasure block_measure(const OperatorModel& t, const std::optional<Subspace>& onto, const Tolerances& tol) {
  if (t.size() == 0) return CircleMeasure::zero(0);
  return extract_measure(t, onto, tol);
}

}  // namespace

QuadrupleDecomposition wold_pair(const OperatorModel& t1, const OperatorModel& t2, const Tolerances& tol) {
  if (t1.space() != t2.space()) throw std::invalid_argument("wold_pair: operators live on different ambients");
  const Real def1 = two_isometry_defect(t1);
  const Real def2 = two_isometry_defect(t2);
  if (!(def1 <= tol.two_isometry) || !(def2 <= tol.two_isometry)) {
    std::ostringstream os;
    os << "wold_pair: not a pair of 2-isometries (defects " << def1 << ", " << def2 << ")";
    throw PreconditionError(os.str());
  }
  const CommutingResiduals dc = doubly_commuting_residual(t1, t2);
  if (!(dc.commutator <= tol.doubly_commuting) || !(dc.double_commutator <= tol.doubly_commuting)) {
    std::ostringstream os;
    os << "wold_pair: pair is not doubly commuting (residuals " << dc.commutator << ", " << dc.double_commutator
       << ")";
    throw PreconditionError(os.str());
  }
  const Real rt = tol.rank;
  const AmbientPtr& amb = t1.space();
  const OperatorModel t12 = compose(t1, t2);

  Subspace h00 = stable_range(t12, std::nullopt, -1, rt);
  const Subspace e1 = adjoint_kernel(t1);
  const Subspace e2 = adjoint_kernel(t2);
  Subspace e10 = stable_range(t2, e1, -1, rt);
  Subspace e01 = stable_range(t1, e2, -1, rt);
  Subspace e = subspace_intersect(e1, e2, tol.intersection);
  Subspace h10 = krylov_span(t1, e10, rt);
  Subspace h01 = krylov_span(t2, e01, rt);
  Subspace h11 = krylov_span(t1, krylov_span(t2, e, rt), rt);

  ResidualTable res;
  res.set("two_isometry_defect_1", def1);
  res.set("two_isometry_defect_2", def2);
  res.set("commutator", dc.commutator);
  res.set("double_commutator", dc.double_commutator);
  const std::array<const Subspace*, 4> blocks{&h00, &h10, &h01, &h11};
  Real orth = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) orth = std::max(orth, subspace_overlap(*blocks[i], *blocks[j]));
  res.set("orthogonality", orth);
  Matrix psum = Matrix::Zero(amb->size(), amb->size());
  for (const auto* b : blocks) psum += b->whitened_projector();
  res.set("completeness", linalg::hermitian_norm2(psum - Matrix::Identity(amb->size(), amb->size())));
  Real reducing = 0;
  for (const auto* b : blocks) reducing = std::max({reducing, reducing_residual(t1, *b), reducing_residual(t2, *b)});
  res.set("reducing", reducing);
  res.set("unitarity_t1_h00", compressed_unitarity(t1, h00));
  res.set("unitarity_t2_h00", compressed_unitarity(t2, h00));
  res.set("unitarity_t1_h01", compressed_unitarity(t1, h01));
  res.set("unitarity_t2_h10", compressed_unitarity(t2, h10));
  res.set("kernel_reducing", std::max(commutator(e1.whitened_projector(), t2.whitened()),
                                      commutator(e2.whitened_projector(), t1.whitened())));
  const Subspace s1 = stable_range(t1, std::nullopt, -1, rt);
  const Subspace s2 = stable_range(t2, std::nullopt, -1, rt);
  Real lemma = 0;
  for (int m = 0; m <= 2; ++m) {
    lemma = std::max(lemma, subspace_distance(apply_power(t1, e10, m, rt),
                                              subspace_intersect(apply_power(t1, e1, m, rt), s2, tol.intersection)));
    lemma = std::max(lemma, subspace_distance(apply_power(t2, e01, m, rt),
                                              subspace_intersect(apply_power(t2, e2, m, rt), s1, tol.intersection)));
  }
  res.set("kernel_intersection", lemma);
  res.require_below(tol.decomposition, "wold_pair");

  auto r00 = restrict_pair(t1, t2, h00);
  auto r10 = restrict_pair(t1, t2, h10);
  auto r01 = restrict_pair(t1, t2, h01);
  auto r11 = restrict_pair(t1, t2, h11);
  CircleMeasure nu1 = block_measure(r10.first, std::nullopt, tol);
  CircleMeasure nu2 = block_measure(r01.second, std::nullopt, tol);
  CircleMeasure eta1 = CircleMeasure::zero(0), eta2 = CircleMeasure::zero(0);
  if (h11.dim() > 0) {
    const Subspace er = joint_wandering(r11.first, r11.second, tol);
    eta1 = block_measure(r11.first, er, tol);
    eta2 = block_measure(r11.second, er, tol);
  }
  return {std::move(h00), std::move(h10), std::move(h01), std::move(h11), std::move(e10), std::move(e01),
          std::move(e), {std::move(r00), std::move(r10), std::move(r01), std::move(r11)}, std::move(nu1),
          std::move(nu2), std::move(eta1), std::move(eta2), std::move(res)};
}

QuadrupleDecomposition slocinski(const OperatorModel& v1, const OperatorModel& v2, const Tolerances& tol) {
  for (const auto* v : {&v1, &v2}) {
    const Subspace c = core(v->space(), v->axis(), 1);
    const Matrix a = v->whitened() * c.whitened();
    const Real defect = linalg::hermitian_norm2(a.adjoint() * a - Matrix::Identity(c.dim(), c.dim()));
    if (!(defect <= tol.isometric_input)) {
      std::ostringstream os;
      os << "slocinski: input is not an isometry (||V*V - I|| = " << defect << ")";
      throw PreconditionError(os.str());
    }
  }
  QuadrupleDecomposition q = wold_pair(v1, v2, tol);
  const std::array<std::pair<const char*, const CircleMeasure*>, 4> ms{
      {{"nu1", &q.nu1}, {"nu2", &q.nu2}, {"eta1", &q.eta1}, {"eta2", &q.eta2}}};
  for (const auto& [name, mu] : ms) {
    const Real mass = mu->dim() == 0 ? 0 : linalg::norm2(mu->total_mass());
    q.residuals.set(std::string("mass_") + name, mass);
    if (!(mass <= tol.zero_mass)) {
      std::ostringstream os;
      os << "slocinski: extracted measure " << name << " has mass " << mass << " (input not isometric)";
      throw ResidualError(os.str());
    }
  }
  return q;
}

}  // namespace wold
