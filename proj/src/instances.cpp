#include "wold/instances.hpp"

#include <random>
#include <sstream>

#include "wold/linalg.hpp"

namespace wold {

OperatorModel build_shift_1v(const CircleMeasure& mu, int n, const Tolerances& tol) {
  auto space = std::make_shared<const GradedPolySpace>(build_space_1v(mu, n, tol));
  const Caps caps = space->caps();
  const Index d = space->dim();
  return OperatorModel(Ambient::from_space(space), shift_matrix(caps, d, 0), 0);
}

OperatorPair build_pair_2v(const CircleMeasure& mu1, const CircleMeasure& mu2, int n1, int n2,
                           const Tolerances& tol) {
  if (n2 < 1) throw std::invalid_argument("build_pair_2v: second cap must be positive");
  auto space = std::make_shared<const GradedPolySpace>(build_space(mu1, mu2, n1, n2, tol));
  const Caps caps = space->caps();
  const Index d = space->dim();
  AmbientPtr amb = Ambient::from_space(space);
  return {OperatorModel(amb, shift_matrix(caps, d, 0), 0), OperatorModel(amb, shift_matrix(caps, d, 1), 1)};
}

Matrix random_unitary(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> normal;
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const Complex rjj = r(j, j);
    if (std::abs(rjj) > 0) q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

OperatorModel unitary_operator(const Matrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("unitary_operator: matrix must be square");
  return OperatorModel(Ambient::euclidean(u.rows()), u, 0);
}

AmbientPtr swap_axes(const AmbientPtr& ambient) {
  std::array<Ambient::Levels, 2> levels{ambient->levels(1), ambient->levels(0)};
  return std::make_shared<const Ambient>(ambient->gram(), std::move(levels), nullptr);
}

OperatorModel on_ambient(const OperatorModel& t, AmbientPtr ambient, int axis) {
  return OperatorModel(std::move(ambient), t.matrix(), axis, t.safe_core_margin());
}

AmbientPtr direct_sum(const std::vector<AmbientPtr>& parts) {
  Index n = 0;
  for (const auto& p : parts) n += p->size();
  Matrix g = Matrix::Zero(n, n);
  std::array<Ambient::Levels, 2> levels;
  for (int axis = 0; axis < 2; ++axis) {
    bool any = false;
    for (const auto& p : parts) any = any || p->graded(axis);
    if (!any) continue;
    for (int k = 1; k <= kMaxLevel; ++k) {
      Index cols = 0;
      for (const auto& p : parts) cols += p->graded(axis) ? p->levels(axis)[static_cast<std::size_t>(k - 1)].cols() : p->size();
      Matrix lv = Matrix::Zero(n, cols);
      Index r0 = 0, c0 = 0;
      for (const auto& p : parts) {
        const Matrix block = p->core_span(axis, k);
        lv.block(r0, c0, block.rows(), block.cols()) = block;
        r0 += block.rows();
        c0 += block.cols();
      }
      levels[static_cast<std::size_t>(axis)].push_back(std::move(lv));
    }
  }
  Index off = 0;
  for (const auto& p : parts) {
    g.block(off, off, p->size(), p->size()) = p->gram();
    off += p->size();
  }
  return std::make_shared<const Ambient>(std::move(g), std::move(levels), nullptr);
}

namespace {

int summed_axis(const std::vector<const OperatorModel*>& parts) {
  std::optional<int> axis;
  for (const auto* p : parts) {
    if (!p->space()->graded(p->axis())) continue;
    if (axis && *axis != p->axis()) throw std::invalid_argument("direct_sum: parts are graded along different axes");
    axis = p->axis();
  }
  return axis.value_or(parts.empty() ? 0 : parts.front()->axis());
}

Matrix block_diagonal(const std::vector<const OperatorModel*>& parts, Index n) {
  Matrix m = Matrix::Zero(n, n);
  Index off = 0;
  for (const auto* p : parts) {
    m.block(off, off, p->size(), p->size()) = p->matrix();
    off += p->size();
  }
  return m;
}

}  // namespace

OperatorModel direct_sum(const std::vector<OperatorModel>& parts) {
  if (parts.empty()) throw std::invalid_argument("direct_sum: no parts");
  std::vector<AmbientPtr> spaces;
  std::vector<const OperatorModel*> ptrs;
  for (const auto& p : parts) {
    spaces.push_back(p.space());
    ptrs.push_back(&p);
  }
  AmbientPtr amb = direct_sum(spaces);
  return OperatorModel(amb, block_diagonal(ptrs, amb->size()), summed_axis(ptrs));
}

OperatorPair direct_sum(const std::vector<OperatorPair>& parts) {
  if (parts.empty()) throw std::invalid_argument("direct_sum: no parts");
  std::vector<AmbientPtr> spaces;
  std::vector<const OperatorModel*> first, second;
  for (const auto& p : parts) {
    if (p.first.space() != p.second.space()) throw std::invalid_argument("direct_sum: pair members on different ambients");
    spaces.push_back(p.first.space());
    first.push_back(&p.first);
    second.push_back(&p.second);
  }
  AmbientPtr amb = direct_sum(spaces);
  return {OperatorModel(amb, block_diagonal(first, amb->size()), summed_axis(first)),
          OperatorModel(amb, block_diagonal(second, amb->size()), summed_axis(second))};
}

AmbientPtr scramble(const AmbientPtr& ambient, const Matrix& q) {
  std::array<Ambient::Levels, 2> levels;
  for (int axis = 0; axis < 2; ++axis)
    for (const auto& lv : ambient->levels(axis)) levels[static_cast<std::size_t>(axis)].push_back(q.adjoint() * lv);
  return std::make_shared<const Ambient>(linalg::hermitian_part(q.adjoint() * ambient->gram() * q), std::move(levels),
                                         nullptr);
}

OperatorModel scramble(const OperatorModel& t, std::uint64_t seed) {
  const Matrix q = random_unitary(t.size(), seed);
  return OperatorModel(scramble(t.space(), q), q.adjoint() * t.matrix() * q, t.axis(), t.safe_core_margin());
}

OperatorPair scramble(const OperatorPair& p, std::uint64_t seed) {
  const Matrix q = random_unitary(p.first.size(), seed);
  AmbientPtr amb = scramble(p.first.space(), q);
  return {OperatorModel(amb, q.adjoint() * p.first.matrix() * q, p.first.axis(), p.first.safe_core_margin()),
          OperatorModel(amb, q.adjoint() * p.second.matrix() * q, p.second.axis(), p.second.safe_core_margin())};
}

namespace {

constexpr std::uint64_t kScrambleSalt = 0x9e3779b97f4a7c15ULL;

// Coordinate blocks of the unscrambled sum, mapped through the scramble.
std::vector<Subspace> coordinate_blocks(const AmbientPtr& amb, const std::vector<Index>& sizes,
                                        const std::optional<Matrix>& q) {
  std::vector<Subspace> out;
  Index off = 0;
  const Index n = amb->size();
  for (Index s : sizes) {
    Matrix e = Matrix::Zero(n, s);
    e.block(off, 0, s, s).setIdentity();
    off += s;
    if (q) e = q->adjoint() * e;
    out.push_back(s == 0 ? Subspace::zero(amb) : Subspace::span(amb, e));
  }
  return out;
}

Matrix kron_identity(Index copies, const Matrix& u) {
  const Index e = u.rows();
  Matrix m = Matrix::Zero(copies * e, copies * e);
  for (Index i = 0; i < copies; ++i) m.block(i * e, i * e, e, e) = u;
  return m;
}

// A unitary on the coefficient space commuting with every weight of mu.
Matrix commuting_unitary(const CircleMeasure& mu, std::uint64_t seed) {
  const Index e = mu.dim();
  std::vector<const Matrix*> weights{&mu.density()};
  for (const auto& a : mu.atoms()) weights.push_back(&a.weight);
  bool scalar = true;
  for (const Matrix* w : weights) {
    const Complex c = e > 0 ? (*w)(0, 0) : Complex(0);
    scalar = scalar && linalg::max_abs(*w - c * Matrix::Identity(e, e)) <= 1e-14;
  }
  if (scalar) return random_unitary(e, seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> angle(0, 2 * M_PI);
  Matrix u = Matrix::Zero(e, e);
  for (Index i = 0; i < e; ++i) u(i, i) = std::polar(Real(1), angle(rng));
  for (const Matrix* w : weights)
    if (linalg::max_abs(u * *w - *w * u) > 1e-12)
      throw std::invalid_argument("quadruple_instance: block measure weights must be diagonal or scalar");
  return u;
}

}  // namespace

Instance single_instance(Index k, const CircleMeasure& nu, int n, std::uint64_t seed, bool scrambled) {
  std::vector<OperatorModel> parts;
  if (k > 0) parts.push_back(unitary_operator(random_unitary(k, seed)));
  const Index shift_size = nu.dim() > 0 ? (n + 1) * nu.dim() : 0;
  if (nu.dim() > 0) parts.push_back(build_shift_1v(nu, n));
  if (parts.empty()) throw std::invalid_argument("single_instance: empty instance");
  OperatorModel t = direct_sum(parts);
  std::optional<Matrix> q;
  if (scrambled) {
    q = random_unitary(t.size(), seed ^ kScrambleSalt);
    t = OperatorModel(scramble(t.space(), *q), q->adjoint() * t.matrix() * *q, t.axis());
  }
  Instance out;
  out.kind = scrambled ? "scrambled" : "direct_sum";
  out.blocks = coordinate_blocks(t.space(), {k, shift_size}, q);
  out.measures = {nu};
  out.single = std::move(t);
  return out;
}

Instance quadruple_instance(Index k00, const CircleMeasure& nu1, const CircleMeasure& nu2, const CircleMeasure& eta1,
                            const CircleMeasure& eta2, QuadrupleCaps caps, std::uint64_t seed, bool scrambled) {
  std::vector<OperatorPair> parts;
  std::vector<Index> sizes;
  if (k00 > 0) {
    const Matrix q = random_unitary(k00, seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<Real> angle(0, 2 * M_PI);
    Matrix a = Matrix::Zero(k00, k00), b = Matrix::Zero(k00, k00);
    for (Index i = 0; i < k00; ++i) {
      a(i, i) = std::polar(Real(1), angle(rng));
      b(i, i) = std::polar(Real(1), angle(rng));
    }
    AmbientPtr amb = Ambient::euclidean(k00);
    parts.emplace_back(OperatorModel(amb, q * a * q.adjoint(), 0), OperatorModel(amb, q * b * q.adjoint(), 1));
  }
  sizes.push_back(k00);
  if (nu1.dim() > 0) {
    const OperatorModel s = build_shift_1v(nu1, caps.n10);
    const Matrix v = kron_identity(caps.n10 + 1, commuting_unitary(nu1, seed + 2));
    parts.emplace_back(s, OperatorModel(s.space(), v, 1));
  }
  sizes.push_back(nu1.dim() > 0 ? (caps.n10 + 1) * nu1.dim() : 0);
  if (nu2.dim() > 0) {
    const OperatorModel s = build_shift_1v(nu2, caps.n01);
    AmbientPtr amb = swap_axes(s.space());
    const Matrix v = kron_identity(caps.n01 + 1, commuting_unitary(nu2, seed + 3));
    parts.emplace_back(OperatorModel(amb, v, 0), on_ambient(s, amb, 1));
  }
  sizes.push_back(nu2.dim() > 0 ? (caps.n01 + 1) * nu2.dim() : 0);
  if (eta1.dim() > 0 || eta2.dim() > 0) parts.push_back(build_pair_2v(eta1, eta2, caps.n1, caps.n2));
  sizes.push_back(eta1.dim() > 0 ? (caps.n1 + 1) * (caps.n2 + 1) * eta1.dim() : 0);
  if (parts.empty()) throw std::invalid_argument("quadruple_instance: every block is empty");

  OperatorPair p = direct_sum(parts);
  std::optional<Matrix> q;
  if (scrambled) {
    q = random_unitary(p.first.size(), seed ^ kScrambleSalt);
    AmbientPtr amb = scramble(p.first.space(), *q);
    p = {OperatorModel(amb, q->adjoint() * p.first.matrix() * *q, p.first.axis()),
         OperatorModel(amb, q->adjoint() * p.second.matrix() * *q, p.second.axis())};
  }
  Instance out;
  out.kind = scrambled ? "scrambled" : "direct_sum";
  out.blocks = coordinate_blocks(p.first.space(), sizes, q);
  out.measures = {nu1, nu2, eta1, eta2};
  out.pair = std::move(p);
  return out;
}

OperatorPair bilateral_unilateral(Index n, int caps) {
  if (n < 1 || caps < 1) throw std::invalid_argument("bilateral_unilateral: sizes must be positive");
  const Index w = caps + 1;
  const Index size = n * w;
  Matrix c = Matrix::Zero(size, size), s = Matrix::Zero(size, size);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < w; ++k) {
      c(((i + 1) % n) * w + k, i * w + k) = 1;
      if (k + 1 < w) s(i * w + k + 1, i * w + k) = 1;
    }
  std::array<Ambient::Levels, 2> levels;
  for (int lvl = 1; lvl <= kMaxLevel; ++lvl) {
    std::vector<Index> cols;
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k + lvl < w; ++k) cols.push_back(i * w + k);
    Matrix m = Matrix::Zero(size, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) m(cols[j], static_cast<Index>(j)) = 1;
    levels[1].push_back(std::move(m));
  }
  AmbientPtr amb = std::make_shared<const Ambient>(Matrix::Identity(size, size), std::move(levels));
  return {OperatorModel(amb, c, 0), OperatorModel(amb, s, 1)};
}

namespace {

int cap_at(const InstanceSpec& spec, std::size_t i, int fallback) {
  return i < spec.caps.size() ? spec.caps[i] : fallback;
}

}  // namespace

Instance build_instance(const InstanceSpec& spec) {
  for (int c : spec.caps)
    if (c < 4) {
      std::ostringstream os;
      os << "instance '" << spec.name << "': caps must be at least 4 (got " << c << ")";
      throw std::invalid_argument(os.str());
    }
  for (Index k : spec.unitary_dims)
    if (k < 0) throw std::invalid_argument("instance '" + spec.name + "': negative unitary dimension");
  const Index k = spec.unitary_dims.empty() ? 0 : spec.unitary_dims.front();
  const std::size_t nm = spec.measures.size();

  if (spec.kind == "shift1v") {
    if (nm != 1 || spec.caps.empty())
      throw std::invalid_argument("instance '" + spec.name + "': shift1v needs one measure and one cap");
    Instance out;
    out.kind = spec.kind;
    out.single = build_shift_1v(spec.measures[0], spec.caps[0]);
    out.blocks = {Subspace::zero(out.single->space()), Subspace::whole(out.single->space())};
    out.measures = {spec.measures[0]};
    return out;
  }
  if (spec.kind == "pair2v") {
    if (nm != 2 || spec.caps.size() < 2)
      throw std::invalid_argument("instance '" + spec.name + "': pair2v needs two measures and two caps");
    Instance out;
    out.kind = spec.kind;
    out.pair = build_pair_2v(spec.measures[0], spec.measures[1], spec.caps[0], spec.caps[1]);
    AmbientPtr amb = out.pair->first.space();
    out.blocks = {Subspace::zero(amb), Subspace::zero(amb), Subspace::zero(amb), Subspace::whole(amb)};
    out.measures = {CircleMeasure::zero(0), CircleMeasure::zero(0), spec.measures[0], spec.measures[1]};
    return out;
  }
  if (spec.kind == "direct_sum" || spec.kind == "scrambled") {
    const bool scrambled = spec.kind == "scrambled";
    if (nm <= 1) {
      const CircleMeasure nu = nm == 1 ? spec.measures[0] : CircleMeasure::zero(0);
      if (nm == 1 && spec.caps.empty())
        throw std::invalid_argument("instance '" + spec.name + "': a shift block needs a cap");
      Instance out = single_instance(k, nu, cap_at(spec, 0, 4), spec.seed, scrambled);
      out.kind = spec.kind;
      return out;
    }
    if (nm == 4) {
      if (spec.caps.size() != 2 && spec.caps.size() != 4)
        throw std::invalid_argument("instance '" + spec.name + "': four-block instances need 2 or 4 caps");
      QuadrupleCaps qc{spec.caps[0], spec.caps[1], cap_at(spec, 2, spec.caps[0]), cap_at(spec, 3, spec.caps[1])};
      Instance out = quadruple_instance(k, spec.measures[0], spec.measures[1], spec.measures[2], spec.measures[3], qc,
                                        spec.seed, scrambled);
      out.kind = spec.kind;
      return out;
    }
    throw std::invalid_argument("instance '" + spec.name + "': direct sums take 0, 1 or 4 measures");
  }
  throw std::invalid_argument("instance '" + spec.name + "': unknown kind '" + spec.kind + "'");
}

}  // namespace wold
