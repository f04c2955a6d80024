#include "wold/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace wold {

namespace {

Real kernel(Complex z, Real theta) {
  const Complex e = std::polar(Real(1), theta);
  return (1 - std::norm(z)) / std::norm(e - z);
}

// Harmonic extension of a measure, evaluated from the kernel directly.
Matrix harmonic(const CircleMeasure& mu, Complex z) {
  Matrix p = mu.density();
  for (const auto& a : mu.atoms()) p += kernel(z, a.angle) * a.weight;
  return p;
}

// Integral over the unit disc against dA / pi with a polar midpoint rule.
// Rings near the boundary get more angular nodes so that Poisson kernels of
// atoms, whose width is about 1 - rho, are resolved.
template <typename Acc, typename Fn>
Acc disc_integral(int radial, int degree, Acc zero, Fn&& fn) {
  Acc sum = zero;
  const Real h = Real(1) / radial;
  for (int i = 0; i < radial; ++i) {
    const Real rho = (i + Real(0.5)) * h;
    const int nodes = std::max(4 * (degree + 2), static_cast<int>(std::ceil(40 / (1 - rho))));
    const Real w = 2 * rho * h / nodes;  // rho drho dphi / pi
    Acc ring = zero;
    for (int j = 0; j < nodes; ++j) {
      const Complex z = std::polar(rho, (j + Real(0.5)) * 2 * M_PI / nodes);
      ring += fn(z);
    }
    sum += w * ring;
  }
  return sum;
}

// Powers 1, z, ..., z^k.
Vector powers(Complex z, int k) {
  Vector p(k + 1);
  p(0) = 1;
  for (int a = 1; a <= k; ++a) p(a) = p(a - 1) * z;
  return p;
}

// Circle moments (1/M) sum_j w_j^a conj(w_j)^b on M equally spaced nodes.
Matrix circle_moments(int n, int nodes) {
  Matrix c = Matrix::Zero(n + 1, n + 1);
  for (int j = 0; j < nodes; ++j) {
    const Real t = 2 * M_PI * j / nodes;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) c(a, b) += std::polar(Real(1), (a - b) * t);
  }
  return c / Real(nodes);
}

struct Terms {
  Complex hardy, d1, d2, d3;
};

// Derivative coefficients as a (d * outer) x inner matrix: column j holds the
// coefficient of z^j of the derivative along the integrated variable, block
// row k the coefficient of the other variable's k-th power.
Matrix derivative_table(const PolyVector& p, int axis, bool mixed) {
  const Caps caps = p.caps();
  const Index d = p.dim();
  const int inner = axis == 0 ? caps.n1 : caps.n2;
  const int outer = (axis == 0 ? caps.n2 : caps.n1) + 1;
  Matrix t = Matrix::Zero(d * outer, inner);
  for (int k = 0; k < outer; ++k)
    for (int j = 1; j <= inner; ++j) {
      const int m = axis == 0 ? j : k, n = axis == 0 ? k : j;
      Real w = j;
      if (mixed) {
        if (k == 0) continue;
        w *= k;
      }
      t.block(k * d, j - 1, d, 1) = w * p.at(m, n);
    }
  return t;
}

// Reshape a stacked (d * outer) vector into a d x outer matrix.
Matrix columns(const Vector& v, Index d) { return Eigen::Map<const Matrix>(v.data(), d, v.size() / d); }

Terms evaluate(const PolyVector& f, const PolyVector& g, const CircleMeasure& mu1, const CircleMeasure& mu2,
               int radial) {
  const Caps caps = f.caps();
  const Index d = f.dim();
  const int n1 = caps.n1, n2 = caps.n2;
  const int degree = std::max(n1, n2);
  Terms out{};

  // Hardy term on a torus grid fine enough to be exact.
  {
    const int m1 = 2 * n1 + 2, m2 = 2 * n2 + 2;
    Complex s = 0;
    for (int a = 0; a < m1; ++a)
      for (int b = 0; b < m2; ++b) {
        const Complex z1 = std::polar(Real(1), 2 * M_PI * a / m1);
        const Complex z2 = std::polar(Real(1), 2 * M_PI * b / m2);
        s += g.evaluate(z1, z2).dot(f.evaluate(z1, z2));
      }
    out.hardy = s / Real(m1 * m2);
  }

  // D1 and D2: one variable over the disc, the other on the circle, where the
  // circle integral is the moment matrix of an exact equispaced rule.
  auto one_disc = [&](int axis, const CircleMeasure& mu) {
    const int inner = axis == 0 ? n1 : n2, outer = axis == 0 ? n2 : n1;
    const Matrix ft = derivative_table(f, axis, false), gt = derivative_table(g, axis, false);
    const Matrix cm = circle_moments(outer, 2 * outer + 2).transpose();
    return disc_integral(radial, degree, Complex(0), [&](Complex z) {
      const Vector pw = powers(z, inner - 1);
      const Matrix fv = columns(ft * pw, d), gv = columns(gt * pw, d);
      const Matrix pairing = gv.adjoint() * harmonic(mu, z) * fv;  // (q, n) entries
      return (pairing.array() * cm.array()).sum();
    });
  };
  if (n1 >= 1) out.d1 = one_disc(0, mu1);
  if (n2 >= 1) out.d2 = one_disc(1, mu2);

  // D3: both variables over the disc; the z2 integral is tabulated first as
  // A(n, q) = int P[mu2] z^n conj(z)^q, stored in block (q, n).
  if (n1 >= 1 && n2 >= 1) {
    const int k = n2 - 1;
    Matrix table = Matrix::Zero(d * (k + 1), d * (k + 1));
    {
      const Real h = Real(1) / radial;
      for (int i = 0; i < radial; ++i) {
        const Real rho = (i + Real(0.5)) * h;
        const int nodes = std::max(4 * (degree + 2), static_cast<int>(std::ceil(40 / (1 - rho))));
        const Real w = 2 * rho * h / nodes;
        for (int j = 0; j < nodes; ++j) {
          const Complex z = std::polar(rho, (j + Real(0.5)) * 2 * M_PI / nodes);
          const Matrix p = harmonic(mu2, z) * Complex(w);
          const Vector pw = powers(z, k);
          for (int q = 0; q <= k; ++q)
            for (int n = 0; n <= k; ++n) table.block(q * d, n * d, d, d) += (pw(n) * std::conj(pw(q))) * p;
        }
      }
    }
    // Mixed derivative coefficients: block row n-1 of column m-1 is m n a_{m,n}.
    const Matrix ft = derivative_table(f, 0, true).bottomRows(d * n2);
    const Matrix gt = derivative_table(g, 0, true).bottomRows(d * n2);
    out.d3 = disc_integral(radial, degree, Complex(0), [&](Complex z) {
      const Vector pw = powers(z, n1 - 1);
      const Vector u = table * (ft * pw);
      const Matrix gv = columns(gt * pw, d), uv = columns(u, d);
      return (gv.adjoint() * harmonic(mu1, z) * uv).trace();
    });
  }
  return out;
}

void check_inputs(const PolyVector& f, const PolyVector& g, const CircleMeasure& mu1, const CircleMeasure& mu2,
                  const QuadratureOptions& opt) {
  if (f.caps() != g.caps() || f.dim() != g.dim())
    throw std::invalid_argument("quadrature: polynomials have different shapes");
  if (mu1.dim() != f.dim() || mu2.dim() != f.dim())
    throw std::invalid_argument("quadrature: measure dimension does not match");
  if (opt.grid < 2 || (opt.richardson && opt.grid % 2 != 0))
    throw std::invalid_argument("quadrature: grid must be even and at least 2");
}

}  // namespace

DirichletTerms quadrature_terms(const PolyVector& f, const PolyVector& g, const CircleMeasure& mu1,
                                const CircleMeasure& mu2, const QuadratureOptions& opt) {
  check_inputs(f, g, mu1, mu2, opt);
  const Terms fine = evaluate(f, g, mu1, mu2, opt.grid);
  if (!opt.richardson) return {fine.hardy, fine.d1, fine.d2, fine.d3};
  const Terms coarse = evaluate(f, g, mu1, mu2, opt.grid / 2);
  auto rich = [](Complex a, Complex b) { return (Real(4) * a - b) / Real(3); };
  return {fine.hardy, rich(fine.d1, coarse.d1), rich(fine.d2, coarse.d2), rich(fine.d3, coarse.d3)};
}

Complex quadrature_inner_product(const PolyVector& f, const PolyVector& g, const CircleMeasure& mu1,
                                 const CircleMeasure& mu2, const QuadratureOptions& opt) {
  return quadrature_terms(f, g, mu1, mu2, opt).total();
}

Matrix quadrature_poisson(const CircleMeasure& mu, Complex z, int grid) {
  if (!(std::abs(z) < 1)) throw std::domain_error("quadrature_poisson: |z| must be < 1");
  if (grid < 1) throw std::invalid_argument("quadrature_poisson: grid must be positive");
  Matrix p = Matrix::Zero(mu.dim(), mu.dim());
  for (const auto& a : mu.atoms()) p += kernel(z, a.angle) * a.weight;
  Real mean = 0;
  for (int j = 0; j < grid; ++j) mean += kernel(z, (j + Real(0.5)) * 2 * M_PI / grid);
  p += (mean / grid) * mu.density();
  return p;
}

}  // namespace wold
