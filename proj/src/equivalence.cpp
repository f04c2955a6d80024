#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>

#include "wold/decomp.hpp"
#include "wold/linalg.hpp"

namespace wold {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::equal:
      return "equal";
    case Verdict::not_equal:
      return "not_equal";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

// Traces of every word of length <= 3 in the two coefficient tables.
Real trace_battery(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  const std::size_t n = a.size();
  Real worst = 0;
  auto compare = [&](const Matrix& x, const Matrix& y) {
    const Complex tx = x.trace(), ty = y.trace();
    worst = std::max(worst, std::abs(tx - ty) / (1 + std::abs(tx)));
  };
  for (std::size_t i = 0; i < n; ++i) {
    compare(a[i], b[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const Matrix aij = a[i] * a[j];
      const Matrix bij = b[i] * b[j];
      compare(aij, bij);
      for (std::size_t k = 0; k < n; ++k) compare(aij * a[k], bij * b[k]);
    }
  }
  return worst;
}

Real table_distance(const std::vector<Matrix>& a, const std::vector<Matrix>& b, const Matrix& u) {
  Real worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Matrix diff = u.adjoint() * a[i] * u - b[i];
    worst = std::max(worst, linalg::max_abs(diff) / (1 + linalg::max_abs(a[i])));
  }
  return worst;
}

}  // namespace

Equivalence measures_equal_up_to_unitary(const CircleMeasure& a, const CircleMeasure& b, int max_order, Real tol) {
  if (a.dim() != b.dim()) throw std::invalid_argument("measures_equal_up_to_unitary: dimension mismatch");
  if (max_order < 0) throw std::invalid_argument("measures_equal_up_to_unitary: negative order");
  const Index d = a.dim();
  if (d == 0) return {Verdict::equal, Matrix(0, 0), 0};

  std::vector<Matrix> ta, tb;
  for (int n = -max_order; n <= max_order; ++n) {
    ta.push_back(fourier_coefficient(a, n));
    tb.push_back(fourier_coefficient(b, n));
  }
  if (d == 1) {
    const Real dist = table_distance(ta, tb, Matrix::Identity(1, 1));
    if (dist <= tol) return {Verdict::equal, Matrix::Identity(1, 1), dist};
    return {Verdict::not_equal, std::nullopt, dist};
  }

  const Real battery = trace_battery(ta, tb);
  if (battery > tol) return {Verdict::not_equal, std::nullopt, battery};

  const std::size_t zero = static_cast<std::size_t>(max_order);
  Eigen::SelfAdjointEigenSolver<Matrix> ea(linalg::hermitian_part(ta[zero]));
  Eigen::SelfAdjointEigenSolver<Matrix> eb(linalg::hermitian_part(tb[zero]));
  const Real spread = linalg::max_abs(ea.eigenvalues() - eb.eigenvalues());
  if (spread > tol * (1 + linalg::max_abs(ea.eigenvalues())))
    return {Verdict::not_equal, std::nullopt, spread};
  Real gap = std::numeric_limits<Real>::infinity();
  for (Index i = 1; i < d; ++i) gap = std::min(gap, ea.eigenvalues()(i) - ea.eigenvalues()(i - 1));
  if (gap <= tol) return {Verdict::inconclusive, std::nullopt, battery};

  // With a simple spectrum U = Ua Phi Ub^H; the phases follow from the
  // off-diagonal entries of the other coefficients.
  const Matrix& ua = ea.eigenvectors();
  const Matrix& ub = eb.eigenvectors();
  std::vector<Matrix> ra, rb;
  Real scale = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    ra.push_back(ua.adjoint() * ta[i] * ua);
    rb.push_back(ub.adjoint() * tb[i] * ub);
    scale = std::max(scale, linalg::max_abs(ra.back()));
  }
  std::vector<Complex> phase(static_cast<std::size_t>(d), Complex(0));
  for (Index root = 0; root < d; ++root) {
    if (phase[static_cast<std::size_t>(root)] != Complex(0)) continue;
    phase[static_cast<std::size_t>(root)] = 1;
    std::deque<Index> queue{root};
    while (!queue.empty()) {
      const Index i = queue.front();
      queue.pop_front();
      for (Index j = 0; j < d; ++j) {
        if (phase[static_cast<std::size_t>(j)] != Complex(0)) continue;
        // strongest coupling between i and j over all orders
        std::size_t best = 0;
        Real mag = 0;
        for (std::size_t k = 0; k < ra.size(); ++k)
          if (std::abs(ra[k](i, j)) > mag) {
            mag = std::abs(ra[k](i, j));
            best = k;
          }
        if (mag <= std::sqrt(tol) * std::max<Real>(1, scale)) continue;
        // rb(i,j) = conj(phi_i) ra(i,j) phi_j
        const Complex ratio = rb[best](i, j) / ra[best](i, j);
        const Complex pj = phase[static_cast<std::size_t>(i)] * ratio;
        phase[static_cast<std::size_t>(j)] = std::abs(pj) > 0 ? pj / std::abs(pj) : Complex(1);
        queue.push_back(j);
      }
    }
  }
  Matrix phi = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) phi(i, i) = phase[static_cast<std::size_t>(i)];
  Matrix u = ua * phi * ub.adjoint();
  const Real dist = table_distance(ta, tb, u);
  if (dist <= tol) return {Verdict::equal, std::move(u), dist};
  return {Verdict::not_equal, std::nullopt, dist};
}

}  // namespace wold
