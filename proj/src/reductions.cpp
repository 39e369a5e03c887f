#include "sparsegeom/reductions.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

namespace sparsegeom {

namespace {

// One ordered product a_alpha * b_beta of the first-two-column expansion,
// with the complementary rows (p, q) of the (c, d) minor and the expansion
// sign.
struct ExpansionSlot {
  int alpha, beta, p, q, sign;
};

constexpr ExpansionSlot kSlots[12] = {
    {0, 1, 2, 3, +1}, {0, 2, 1, 3, -1}, {0, 3, 1, 2, +1},
    {1, 0, 2, 3, -1}, {1, 2, 0, 3, +1}, {1, 3, 0, 2, -1},
    {2, 0, 1, 3, +1}, {2, 1, 0, 3, -1}, {2, 3, 0, 1, +1},
    {3, 0, 1, 2, -1}, {3, 1, 0, 2, +1}, {3, 2, 0, 1, -1},
};

void require_dim4(VectorRef x) {
  if (x.size() != 4)
    fail(ErrorCode::DimensionNot4, "determinant lift needs points in R^4");
}

void validate_ksum(const KSumInstance& inst) {
  if (inst.k < 2 || inst.k > 6)
    fail(ErrorCode::InvalidArgument, "k-sum lifts support 2 <= k <= 6");
}

}  // namespace

// ------------------------------------------------------------------ k-sum --

LiftedInstance ksum_lift(const KSumInstance& inst, std::uint64_t seed) {
  validate_ksum(inst);
  const auto n = static_cast<Eigen::Index>(inst.numbers.size());
  const auto k = static_cast<Eigen::Index>(inst.k);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> slot_of(1, k);

  LiftedInstance lift;
  lift.seed = seed;
  Matrix pts = Matrix::Zero(k + 1, n);
  lift.slots.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    pts(0, i) = static_cast<double>(inst.numbers[static_cast<std::size_t>(i)]);
    const Eigen::Index slot = slot_of(rng);
    pts(slot, i) = 1.0;
    lift.slots.push_back(slot);
  }
  lift.points = PointSet(std::move(pts));
  lift.query = Vector::Constant(k + 1, 1.0 / static_cast<double>(k));
  lift.query(0) = 0.0;
  return lift;
}

std::optional<std::vector<std::size_t>> ksum_trial(const KSumInstance& inst,
                                                   double epsilon,
                                                   std::uint64_t seed,
                                                   const Tolerances& tols) {
  validate_ksum(inst);
  if (inst.numbers.size() < inst.k)
    fail(ErrorCode::TooFewPoints, "k-sum needs at least k numbers");

  const LiftedInstance lift = ksum_lift(inst, seed);
  const InducedFlatIndex idx =
      anif_build(lift.points, inst.k, epsilon, AnnBackend::Exact,
                 kDefaultStructureBudget, tols);
  const QueryResult res = anif_query(idx, lift.query, tols);

  if (!(res.distance < kKSumZeroTau)) return std::nullopt;
  if (res.witness_ids.size() != inst.k) return std::nullopt;
  std::int64_t sum = 0;
  for (std::size_t id : res.witness_ids) sum += inst.numbers[id];
  if (sum != 0) return std::nullopt;
  return res.witness_ids;
}

std::size_t ksum_default_trials(std::size_t k) {
  return static_cast<std::size_t>(
      8.0 * std::ceil(std::exp(static_cast<double>(k))));
}

std::optional<std::vector<std::size_t>> solve_ksum(const KSumInstance& inst,
                                                   double epsilon,
                                                   std::size_t trials,
                                                   std::uint64_t seed,
                                                   const Tolerances& tols) {
  if (trials == 0) trials = ksum_default_trials(inst.k);
  for (std::size_t t = 0; t < trials; ++t) {
    auto hit =
        ksum_trial(inst, epsilon, seed + kDefaultQuerySeed * (t + 1), tols);
    if (hit) return hit;
  }
  return std::nullopt;
}

// --------------------------------------------------- determinant as a dot --

Vector hopcroft_lift_u(VectorRef a, VectorRef b) {
  require_dim4(a);
  require_dim4(b);
  Vector u(24);
  for (int s = 0; s < 12; ++s) {
    const double prod = kSlots[s].sign * a(kSlots[s].alpha) * b(kSlots[s].beta);
    u(2 * s) = prod;
    u(2 * s + 1) = -prod;
  }
  return u;
}

Vector hopcroft_lift_v(VectorRef c, VectorRef d) {
  require_dim4(c);
  require_dim4(d);
  Vector v(24);
  for (int s = 0; s < 12; ++s) {
    v(2 * s) = c(kSlots[s].p) * d(kSlots[s].q);
    v(2 * s + 1) = c(kSlots[s].q) * d(kSlots[s].p);
  }
  return v;
}

// ------------------------------------------------------ affine degeneracy --

namespace {

// Smallest singular value of the difference matrix of the given points:
// zero exactly when the points fit inside a hyperplane (or lower).
double affine_sigma_min(const PointSet& P, const std::vector<std::size_t>& ids) {
  Matrix D(P.dim(), static_cast<Eigen::Index>(ids.size()) - 1);
  for (std::size_t j = 1; j < ids.size(); ++j)
    D.col(static_cast<Eigen::Index>(j - 1)) =
        P.col(static_cast<Eigen::Index>(ids[j])) -
        P.col(static_cast<Eigen::Index>(ids[0]));
  Eigen::JacobiSVD<Matrix> svd(D);
  return svd.singularValues().tail<1>()(0);
}

}  // namespace

DegeneracyReport detect_affine_degeneracy(const PointSet& P, double epsilon,
                                          AnnBackend backend,
                                          std::uint64_t seed,
                                          const Tolerances& tols) {
  const auto d = static_cast<std::size_t>(P.dim());
  const auto n = static_cast<std::size_t>(P.size());
  if (d < 2 || d > 6)
    fail(ErrorCode::InvalidArgument, "degeneracy detection supports 2 <= d <= 6");
  if (n < d + 1)
    fail(ErrorCode::TooFewPoints, "degeneracy needs at least d+1 points");

  const double spread =
      (P.data().rowwise().maxCoeff() - P.data().rowwise().minCoeff()).norm();
  DegeneracyReport report;
  if (spread <= tols.zero) {
    // Everything coincides; any d+1 of the points witness that.
    report.degenerate = true;
    for (std::size_t i = 0; i <= d; ++i) report.witness.push_back(i);
    return report;
  }
  const double threshold = tols.rank * spread;

  struct Sample {
    std::vector<std::size_t> ids;
    std::vector<char> contains;
    InducedFlatIndex idx;
  };

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coin(0, 1);
  const std::size_t rounds =
      8 * static_cast<std::size_t>(
              std::ceil(std::log2(static_cast<double>(n))));

  std::vector<Sample> samples;
  samples.reserve(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    Sample s;
    s.contains.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (coin(rng) == 1) {
        s.contains[i] = 1;
        s.ids.push_back(i);
      }
    if (s.ids.size() < d) continue;  // too thin to span any flat
    Matrix sub(P.dim(), static_cast<Eigen::Index>(s.ids.size()));
    for (std::size_t j = 0; j < s.ids.size(); ++j)
      sub.col(static_cast<Eigen::Index>(j)) =
          P.col(static_cast<Eigen::Index>(s.ids[j]));
    s.idx = anif_build(PointSet(std::move(sub)), d, epsilon, backend,
                       kDefaultStructureBudget, tols);
    samples.push_back(std::move(s));
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (const Sample& s : samples) {
      if (s.contains[i]) continue;
      const QueryResult res = anif_query(s.idx, P.col(static_cast<Eigen::Index>(i)), tols);
      if (!(res.distance < threshold)) continue;

      // Candidate hyperplane: the reported flat's points plus the query
      // point, padded with the lowest unused ids if the witness support is
      // short (a shorter support only makes the hull flatter).
      std::vector<std::size_t> cand;
      for (std::size_t local : res.witness_ids) cand.push_back(s.ids[local]);
      cand.push_back(i);
      std::sort(cand.begin(), cand.end());
      for (std::size_t next = 0; cand.size() < d + 1 && next < n; ++next)
        if (std::find(cand.begin(), cand.end(), next) == cand.end())
          cand.insert(std::lower_bound(cand.begin(), cand.end(), next), next);

      // Exact gate: only a genuinely flat candidate is ever reported.
      if (affine_sigma_min(P, cand) <= threshold) {
        report.degenerate = true;
        report.witness = std::move(cand);
        return report;
      }
    }
  }
  return report;
}

}  // namespace sparsegeom
