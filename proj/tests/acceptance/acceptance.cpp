// Acceptance suite: one PASS/FAIL line per criterion. Exit code 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wold/decomp.hpp"
#include "wold/instances.hpp"
#include "wold/linalg.hpp"
#include "wold/oracle.hpp"
#include "wold/space.hpp"

using namespace wold;

namespace {

// Tolerances and budgets.
constexpr Real kOracleTol = 1e-6;
constexpr double kOracleSeconds = 60;
constexpr Real kTwoIsometryTol = 1e-9;
constexpr Real kCommutingTol = 1e-9;
constexpr double kBidiscSeconds = 10;
constexpr Real kNormIdentityTol = 1e-8;
constexpr Real kToeplitzTol = 1e-9;
constexpr Real kProjectorTol = 1e-6;
constexpr Real kFourierTol = 1e-6;
constexpr int kFourierOrder = 8;
constexpr double kSingleCaseSeconds = 30;
constexpr Real kConvergenceRatio = 0.6;
constexpr Real kConvergenceFloor = 1e-12;  // errors at rounding level count as converged
constexpr Real kUnitarityTol = 1e-8;
constexpr double kPairSeconds = 120;
constexpr Index kPairMaxDim = 600;
constexpr Real kCoefficientMapTol = 1e-7;
constexpr Real kTermTol = 1e-8;
constexpr Real kZeroMassTol = 1e-8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) note << "failed: ";
      else note << "; ";
      note << what;
      pass = false;
    }
  }
};

std::string sci(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Vector random_unit(const Subspace& s, std::mt19937_64& rng) {
  std::normal_distribution<Real> n;
  Vector c(s.dim());
  for (Index i = 0; i < c.size(); ++i) c(i) = Complex(n(rng), n(rng));
  c /= c.norm();
  return s.ambient()->unwhiten(s.whitened() * c);
}

// Scalar measure with 1..max_atoms separated atoms and an optional density.
CircleMeasure random_scalar(std::mt19937_64& rng, int max_atoms, bool allow_density) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_real_distribution<Real> weight(0.2, 1.5), jitter(0, 0.5);
  const int k = count(rng);
  std::vector<std::pair<Real, Real>> atoms;
  const Real offset = jitter(rng);
  for (int i = 0; i < k; ++i) atoms.emplace_back(offset + 2 * M_PI * i / k + jitter(rng) / k, weight(rng));
  CircleMeasure mu = CircleMeasure::atomic(atoms);
  if (allow_density && std::bernoulli_distribution(0.5)(rng))
    return CircleMeasure(1, mu.atoms(), Matrix::Constant(1, 1, jitter(rng)));
  return mu;
}

// d x d measure with weights diagonal in the basis u, so two of them commute.
CircleMeasure random_matrix_measure(std::mt19937_64& rng, Index d, const Matrix& u, int max_atoms) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_real_distribution<Real> weight(0.1, 1.5), angle(0, 2 * M_PI);
  const int k = count(rng);
  const Real offset = angle(rng);
  std::vector<Atom> atoms;
  for (int i = 0; i < k; ++i) {
    RealVector diag(d);
    for (Index j = 0; j < d; ++j) diag(j) = weight(rng);
    atoms.push_back({linalg::wrap_angle(offset + 2 * M_PI * i / k), u * diag.cast<Complex>().asDiagonal() * u.adjoint()});
  }
  RealVector dens(d);
  for (Index j = 0; j < d; ++j) dens(j) = weight(rng) * 0.5;
  return CircleMeasure(d, atoms, u * dens.cast<Complex>().asDiagonal() * u.adjoint());
}

PolyVector random_poly(Caps caps, Index d, std::mt19937_64& rng) {
  std::normal_distribution<Real> n;
  Vector c(basis_size(caps, d));
  for (Index i = 0; i < c.size(); ++i) c(i) = Complex(n(rng), n(rng));
  return PolyVector(caps, d, c);
}

Outcome gram_vs_oracle() {
  Outcome o;
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> cap(1, 6);
  const auto t0 = Clock::now();
  Real worst = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Index d = 1 + trial % 2;
    const Matrix u = random_unitary(d, 50 + trial);
    const CircleMeasure m1 = random_matrix_measure(rng, d, u, 3), m2 = random_matrix_measure(rng, d, u, 3);
    const GradedPolySpace s = build_space(m1, m2, cap(rng), cap(rng));
    const PolyVector f = random_poly(s.caps(), d, rng), g = random_poly(s.caps(), d, rng);
    const Complex exact = inner_product(s, f, g);
    const Complex quad = quadrature_inner_product(f, g, m1, m2, {512, true});
    worst = std::max(worst, std::abs(exact - quad) / (1 + std::abs(quad)));
  }
  const double secs = seconds_since(t0);
  o.require(worst < kOracleTol, "relative error " + sci(worst));
  o.require(secs < kOracleSeconds, "runtime " + std::to_string(secs) + " s");
  o.note << (o.pass ? "" : " | ") << "25 instances, worst relative error " << sci(worst) << ", " << secs << " s";
  return o;
}

Outcome two_isometry_theorem() {
  Outcome o;
  std::mt19937_64 rng(1002);
  const auto t0 = Clock::now();
  Real defect = 0, comm = 0;
  Real defect_doubled = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const CircleMeasure m1 = random_scalar(rng, 3, true), m2 = random_scalar(rng, 3, true);
    for (int caps : {6, 12}) {
      const OperatorPair p = build_pair_2v(m1, m2, caps, caps);
      const Real dmax = std::max(two_isometry_defect(p.first), two_isometry_defect(p.second));
      const CommutingResiduals r = doubly_commuting_residual(p.first, p.second);
      Real& slot = caps == 6 ? defect : defect_doubled;
      slot = std::max(slot, dmax);
      comm = std::max({comm, r.commutator, r.double_commutator});
    }
  }
  const double secs = seconds_since(t0);
  o.require(defect < kTwoIsometryTol && defect_doubled < kTwoIsometryTol, "2-isometry defect");
  o.require(comm < kCommutingTol, "doubly commuting residual " + sci(comm));
  o.require(secs < kBidiscSeconds, "runtime");
  o.note << (o.pass ? "" : " | ") << "10 instances, defect " << sci(defect) << " (caps 6), " << sci(defect_doubled)
         << " (caps 12), commuting " << sci(comm) << ", " << secs << " s";
  return o;
}

Outcome norm_identities() {
  Outcome o;
  std::mt19937_64 rng(1003);
  Real one = 0, two = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const OperatorModel t = scramble(build_shift_1v(random_scalar(rng, 3, true), 16), 300 + trial);
    const Calculus calc = make_calculus(t);
    const Subspace c = core(t.space(), 0, 4);
    for (int i = 0; i < 50; ++i) one = std::max(one, check_norm_identity(calc, random_unit(c, rng)));

    const OperatorPair p = build_pair_2v(random_scalar(rng, 3, true), random_scalar(rng, 3, true), 8, 8);
    const PairCalculus pc = make_pair_calculus(p.first, p.second);
    const Subspace jc = joint_core(p.first.space(), 2, 2);
    for (int i = 0; i < 50; ++i) two = std::max(two, check_two_variable_identity(pc, random_unit(jc, rng)));
  }
  o.require(one < kNormIdentityTol, "one-variable residual " + sci(one));
  o.require(two < kNormIdentityTol, "two-variable residual " + sci(two));
  o.note << (o.pass ? "" : " | ") << "5+5 instances x 50 vectors, one-variable " << sci(one) << ", two-variable "
         << sci(two);
  return o;
}

Real toeplitz_residual(const CircleMeasure& mu, int n) {
  const OperatorModel t = build_shift_1v(mu, n);
  const DefectOperator d = defect_operator(t);
  const Matrix& l = t.space()->cholesky_factor();
  const Matrix form = l * d.d.whitened() * d.d.whitened() * l.adjoint();
  const Index dim = mu.dim();
  Matrix diff(dim * n, dim * n);
  for (int p = 0; p < n; ++p)
    for (int m = 0; m < n; ++m)
      diff.block(p * dim, m * dim, dim, dim) = form.block(p * dim, m * dim, dim, dim) - fourier_coefficient(mu, p - m);
  return linalg::norm2(diff);
}

Outcome toeplitz_recovery() {
  Outcome o;
  std::mt19937_64 rng(1004);
  Real worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const CircleMeasure mu = trial % 3 == 2 ? random_matrix_measure(rng, 2, random_unitary(2, trial), 3)
                                            : random_scalar(rng, 3, true);
    worst = std::max(worst, toeplitz_residual(mu, 12));
  }
  o.require(worst < kToeplitzTol, "residual " + sci(worst));
  o.note << (o.pass ? "" : " | ") << "10 instances, worst " << sci(worst);
  return o;
}

Outcome single_round_trip() {
  Outcome o;
  const std::vector<CircleMeasure> measures{
      CircleMeasure::atomic({{0.4, 1.0}, {2.6, 0.5}, {4.9, 1.3}}),
      CircleMeasure::point_mass(1.7, 0.8),
      CircleMeasure::atomic({{3.0, 0.6}, {5.5, 1.1}}),
  };
  const Index ks[] = {0, 2, 5};
  Real proj = 0, fourier = 0, unit = 0;
  double slowest = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto t0 = Clock::now();
    const Instance inst = single_instance(ks[i], measures[i], 32, 700 + i, true);
    const SingleWold w = wold_single(*inst.single);
    slowest = std::max(slowest, seconds_since(t0));
    o.require(w.h0.dim() == ks[i], "dim H0 " + std::to_string(w.h0.dim()) + " != " + std::to_string(ks[i]));
    if (w.h0.dim() == ks[i]) {
      proj = std::max({proj, subspace_distance(w.h0, inst.blocks[0]), subspace_distance(w.h1, inst.blocks[1])});
    }
    unit = std::max(unit, *w.residuals.get("unitarity_h0"));
    const Equivalence e = measures_equal_up_to_unitary(w.extracted, measures[i], kFourierOrder, kFourierTol);
    o.require(e.verdict == Verdict::equal, std::string("measure verdict ") + to_string(e.verdict));
    fourier = std::max(fourier, e.discrepancy);
  }
  o.require(proj < kProjectorTol, "projector error " + sci(proj));
  o.require(slowest < kSingleCaseSeconds, "runtime");
  o.note << (o.pass ? "" : " | ") << "k in {0,2,5}, caps 32, projector " << sci(proj) << ", Fourier " << sci(fourier)
         << ", unitarity " << sci(unit) << ", slowest " << slowest << " s";
  return o;
}

Outcome lebesgue_convergence() {
  Outcome o;
  const CircleMeasure leb = CircleMeasure::lebesgue(1);
  std::vector<Real> err;
  for (int caps : {16, 32, 64}) err.push_back(fourier_distance(extract_measure(build_shift_1v(leb, caps)), leb, kFourierOrder));
  for (std::size_t i = 1; i < err.size(); ++i)
    o.require(err[i] <= std::max(kConvergenceRatio * err[i - 1], kConvergenceFloor),
              "step " + std::to_string(i) + " " + sci(err[i - 1]) + " -> " + sci(err[i]));
  o.note << (o.pass ? "" : " | ") << "errors " << sci(err[0]) << ", " << sci(err[1]) << ", " << sci(err[2]);
  return o;
}

Outcome pair_quadruple() {
  Outcome o;
  struct Case {
    Index k00;
    CircleMeasure nu1, nu2, eta1, eta2;
    QuadrupleCaps caps;
  };
  Matrix w(2, 2);
  w << 1.0, 0.0, 0.0, 0.4;
  const std::vector<Case> cases{
      {4, CircleMeasure::atomic({{0.5, 1.0}, {3.5, 0.4}}), CircleMeasure::point_mass(2.2, 0.7),
       CircleMeasure::point_mass(1.1, 0.9), CircleMeasure::atomic({{4.0, 0.5}, {0.3, 1.2}}), {12, 12, 32, 32}},
      {2, CircleMeasure(2, {{1.3, w}}, Matrix()), CircleMeasure::zero(0), CircleMeasure::point_mass(5.0),
       CircleMeasure::point_mass(2.0, 0.3), {10, 10, 24, 24}},
      {4, CircleMeasure::atomic({{0.5, 1.0}, {3.5, 0.4}}), CircleMeasure::point_mass(2.2, 0.7),
       CircleMeasure::point_mass(1.1, 0.9), CircleMeasure::atomic({{4.0, 0.5}, {0.3, 1.2}}), {20, 20, 64, 64}},
  };
  Real proj = 0, unit = 0, fourier = 0;
  double slowest = 0;
  Index largest = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    const Instance inst = quadruple_instance(c.k00, c.nu1, c.nu2, c.eta1, c.eta2, c.caps, 900 + i, true);
    largest = std::max(largest, inst.ambient()->size());
    const auto t0 = Clock::now();
    const QuadrupleDecomposition q = wold_pair(inst.pair->first, inst.pair->second);
    slowest = std::max(slowest, seconds_since(t0));
    const std::array<const Subspace*, 4> got{&q.h00, &q.h10, &q.h01, &q.h11};
    for (std::size_t b = 0; b < 4; ++b) {
      o.require(got[b]->dim() == inst.blocks[b].dim(), "case " + std::to_string(i) + " block " + std::to_string(b) +
                                                          " dim " + std::to_string(got[b]->dim()));
      if (got[b]->dim() == inst.blocks[b].dim()) proj = std::max(proj, subspace_distance(*got[b], inst.blocks[b]));
    }
    for (const char* name : {"unitarity_t1_h00", "unitarity_t2_h00", "unitarity_t1_h01", "unitarity_t2_h10"})
      unit = std::max(unit, *q.residuals.get(name));
    const std::array<const CircleMeasure*, 4> got_m{&q.nu1, &q.nu2, &q.eta1, &q.eta2};
    const std::array<const CircleMeasure*, 4> want{&c.nu1, &c.nu2, &c.eta1, &c.eta2};
    for (std::size_t b = 0; b < 4; ++b) {
      if (want[b]->dim() == 0) {
        o.require(got_m[b]->dim() == 0, "case " + std::to_string(i) + " spurious measure " + std::to_string(b));
        continue;
      }
      const Equivalence e = measures_equal_up_to_unitary(*got_m[b], *want[b], kFourierOrder, kFourierTol);
      o.require(e.verdict == Verdict::equal,
                "case " + std::to_string(i) + " measure " + std::to_string(b) + " " + to_string(e.verdict));
      fourier = std::max(fourier, e.discrepancy);
    }
  }
  o.require(proj < kProjectorTol, "projector error " + sci(proj));
  o.require(unit < kUnitarityTol, "unitarity " + sci(unit));
  o.require(slowest < kPairSeconds, "runtime");
  o.require(largest <= kPairMaxDim, "instance too large");
  o.note << (o.pass ? "" : " | ") << cases.size() << " instances up to dim " << largest << ", projector " << sci(proj)
         << ", unitarity " << sci(unit) << ", Fourier " << sci(fourier) << ", slowest " << slowest << " s";
  return o;
}

Outcome v_map() {
  Outcome o;
  std::mt19937_64 rng(1008);
  Real map = 0, terms = 0;
  for (int trial = 0; trial < 3; ++trial) {
    const OperatorPair p = scramble(build_pair_2v(random_scalar(rng, 3, false), random_scalar(rng, 3, false), 16, 16),
                                    800 + trial);
    auto target = std::make_shared<const GradedPolySpace>(model_target(p.first, p.second, {16, 16}));
    Tolerances loose;
    loose.coefficient_map = 1;  // residuals are judged here
    const CoefficientMap v = build_V(p.first, p.second, target, loose);
    for (const char* name : {"isometry", "intertwining_1", "intertwining_2"}) map = std::max(map, *v.residuals.get(name));
    for (const char* name : {"d1_term", "d2_term", "d3_term"}) terms = std::max(terms, *v.residuals.get(name));
  }
  o.require(map < kCoefficientMapTol, "isometry/intertwining " + sci(map));
  o.require(terms < kTermTol, "term identities " + sci(terms));
  o.note << (o.pass ? "" : " | ") << "3 instances caps 16, isometry/intertwining " << sci(map) << ", terms "
         << sci(terms);
  return o;
}

Outcome slocinski_corollary() {
  Outcome o;
  struct Case {
    std::string name;
    OperatorPair pair;
    std::array<Index, 4> dims;
  };
  const Instance mixed = quadruple_instance(3, CircleMeasure::zero(1), CircleMeasure::zero(2), CircleMeasure::zero(1),
                                            CircleMeasure::zero(1), {6, 6, 10, 8}, 55, true);
  std::vector<Case> cases;
  cases.push_back({"bilateral x unilateral", bilateral_unilateral(4, 10), {0, 0, 44, 0}});
  cases.push_back({"bidisc", scramble(build_pair_2v(CircleMeasure::zero(1), CircleMeasure::zero(1), 7, 7), 56),
                   {0, 0, 0, 64}});
  cases.push_back({"four blocks", *mixed.pair,
                   {mixed.blocks[0].dim(), mixed.blocks[1].dim(), mixed.blocks[2].dim(), mixed.blocks[3].dim()}});
  Real mass = 0;
  for (const Case& c : cases) {
    const QuadrupleDecomposition q = slocinski(c.pair.first, c.pair.second);
    o.require(q.dims() == c.dims, c.name + " dims");
    for (const CircleMeasure* m : {&q.nu1, &q.nu2, &q.eta1, &q.eta2})
      if (m->dim() > 0) mass = std::max(mass, linalg::norm2(m->total_mass()));
  }
  o.require(mass < kZeroMassTol, "total mass " + sci(mass));
  o.note << (o.pass ? "" : " | ") << cases.size() << " instances, largest total mass " << sci(mass);
  return o;
}

template <class F>
bool rejects(F&& f) {
  try {
    f();
  } catch (const PreconditionError&) {
    return true;
  } catch (const std::invalid_argument&) {
    return true;
  }
  return false;
}

Outcome negative_controls() {
  Outcome o;
  Matrix jordan = Matrix::Zero(2, 2);
  jordan(1, 0) = 1;
  o.require(rejects([&] { wold_single(OperatorModel(Ambient::euclidean(2), jordan)); }), "Jordan block accepted");
  Matrix not_unitary = Matrix::Identity(2, 2);
  not_unitary(0, 1) = 0.5;
  Matrix w = Matrix::Identity(2, 2);
  o.require(rejects([&] { conjugate(CircleMeasure(2, {{0.3, w}}, Matrix()), not_unitary); }),
            "non-unitary conjugation accepted");
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Constant(2, 2, 0.5);
  a(0, 0) = 1;
  o.require(rejects([&] {
              build_pair_2v(CircleMeasure(2, {{0.1, a}}, Matrix()), CircleMeasure(2, {{0.9, b}}, Matrix()), 4, 4);
            }),
            "non-commuting measures accepted");
  o.note << (o.pass ? "" : " | ") << "3 rejections";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gram vs quadrature oracle", gram_vs_oracle},
      {"2-isometry and doubly commuting shifts", two_isometry_theorem},
      {"norm identities", norm_identities},
      {"Toeplitz recovery", toeplitz_recovery},
      {"single Wold round trip", single_round_trip},
      {"Lebesgue convergence", lebesgue_convergence},
      {"pair quadruple decomposition", pair_quadruple},
      {"V map", v_map},
      {"Slocinski quadruple", slocinski_corollary},
      {"negative controls", negative_controls},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %-40s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.note.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
