#ifndef WOLD_TYPES_HPP
#define WOLD_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wold {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Deepest exactness level tracked by a truncation filtration.
inline constexpr int kMaxLevel = 4;

/// Numerical thresholds. Every checker takes one of these; the defaults are
/// the values the test suites and the CLI run with.
struct Tolerances {
  Real psd = 1e-10;                 // negative eigenvalues above -psd are clamped
  Real rank = 1e-8;                 // singular values below rank * sigma_max are zero
  Real intersection = 1e-8;         // eigenvalue of P_A + P_B above 2 - intersection
  Real unitary_input = 1e-12;       // conjugation unitaries
  Real commuting_weights = 1e-12;   // operator-valued measure compatibility
  Real two_isometry = 1e-8;         // precondition of the decompositions
  Real doubly_commuting = 1e-8;
  Real isometric_input = 1e-10;     // Slocinski inputs
  Real decomposition = 1e-8;        // orthogonality/reducing/unitarity residuals
  Real least_squares = 1e-6;        // tilde isometry fit
  Real unitarity = 1e-8;            // tilde isometry after completion
  Real cluster_angle = 1e-7;        // radians
  Real condition = 1e10;            // left inverse
  Real coefficient_map = 1e-7;      // isometry/intertwining of V
  Real zero_mass = 1e-8;
  Real measure_match = 1e-6;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an input violates a documented precondition (not a 2-isometry,
/// not analytic, non-unitary conjugator, incompatible measures, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a computed residual exceeds its tolerance.
class ResidualError : public Error {
 public:
  using Error::Error;
};

}  // namespace wold

#endif  // WOLD_TYPES_HPP
