#ifndef WOLD_INSTANCES_HPP
#define WOLD_INSTANCES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wold/operators.hpp"

namespace wold {

using OperatorPair = std::pair<OperatorModel, OperatorModel>;

/// M_z on the caps-N truncation of D_E(mu).
OperatorModel build_shift_1v(const CircleMeasure& mu, int n, const Tolerances& tol = {});

/// (M_z1, M_z2) on the caps-(N1, N2) truncation of D^2_E(mu1, mu2).
OperatorPair build_pair_2v(const CircleMeasure& mu1, const CircleMeasure& mu2, int n1, int n2,
                           const Tolerances& tol = {});

/// Haar-like unitary: QR of a seeded complex Gaussian matrix with the
/// diagonal of R made positive.
Matrix random_unitary(Index n, std::uint64_t seed);

/// Unitary operator on C^n with the identity Gram matrix.
OperatorModel unitary_operator(const Matrix& u);

/// A copy of the ambient whose filtration axes are swapped.
AmbientPtr swap_axes(const AmbientPtr& ambient);
OperatorModel on_ambient(const OperatorModel& t, AmbientPtr ambient, int axis);

/// Block-diagonal sum. Parts without grading along an axis count as exact
/// along it.
AmbientPtr direct_sum(const std::vector<AmbientPtr>& parts);
OperatorModel direct_sum(const std::vector<OperatorModel>& parts);
OperatorPair direct_sum(const std::vector<OperatorPair>& parts);

/// Change of basis x' = Q^H x with Q = random_unitary(n, seed): gram, matrix
/// and filtration are conjugated together.
AmbientPtr scramble(const AmbientPtr& ambient, const Matrix& q);
OperatorModel scramble(const OperatorModel& t, std::uint64_t seed);
OperatorPair scramble(const OperatorPair& p, std::uint64_t seed);

/// A generated operator or pair together with the blocks it was built from.
struct Instance {
  std::string kind;
  std::optional<OperatorModel> single;
  std::optional<OperatorPair> pair;
  std::vector<Subspace> blocks;          // single: H0, H1; pair: H00, H10, H01, H11
  std::vector<CircleMeasure> measures;   // single: nu; pair: nu1, nu2, eta1, eta2
  AmbientPtr ambient() const { return single ? single->space() : pair->first.space(); }
};

/// U_k plus M_z(nu) at caps N, optionally scrambled with `seed`.
Instance single_instance(Index k, const CircleMeasure& nu, int n, std::uint64_t seed, bool scrambled);

struct QuadrupleCaps {
  int n1 = 8, n2 = 8;  // H11 bidisc block
  int n10 = 8;         // H10 one-variable block
  int n01 = 8;         // H01 one-variable block
};

/// H00 (k00 commuting unitaries) + D_{E10}(nu1) + D_{E01}(nu2) + D^2_E(eta1, eta2).
/// A measure of dimension 0 omits its block.
Instance quadruple_instance(Index k00, const CircleMeasure& nu1, const CircleMeasure& nu2, const CircleMeasure& eta1,
                            const CircleMeasure& eta2, QuadrupleCaps caps, std::uint64_t seed, bool scrambled);

/// Cyclic unitary shift on C^n tensor the Hardy shift truncated at N.
OperatorPair bilateral_unilateral(Index n, int caps);

/// Generator description, mirrored by the JSON schema.
struct InstanceSpec {
  std::string name;
  std::string kind;  // shift1v, pair2v, direct_sum, scrambled
  std::vector<CircleMeasure> measures;
  std::vector<int> caps;
  std::vector<Index> unitary_dims;
  std::uint64_t seed = 0;
};

/// Builds an instance; throws std::invalid_argument on malformed specs and
/// PreconditionError on incompatible measures.
Instance build_instance(const InstanceSpec& spec);

}  // namespace wold

#endif  // WOLD_INSTANCES_HPP
