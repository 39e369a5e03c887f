#pragma once

// Executable reductions driven by the induced-flat structures: deciding
// k-sum through a randomized lift, rewriting 4x4 determinant tests as inner
// products (pairs of points become vectors whose orthogonality encodes
// four-point coplanarity with the origin), and detecting affine degeneracy
// of a point set with half-density samples.

#include "sparsegeom/book.hpp"
#include "sparsegeom/bouquet.hpp"
#include "sparsegeom/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sparsegeom {

// ------------------------------------------------------------------ k-sum --

// Decide whether k of the integers sum to zero.
struct KSumInstance {
  std::vector<std::int64_t> numbers;
  std::size_t k = 2;
};

// Lift of a k-sum instance into R^(k+1): column i carries numbers[i] in its
// first coordinate and a 1 in one uniformly random row of 1..k (the rest
// zero).  When the rows drawn for a zero-sum k-subset happen to be a
// permutation of 1..k, the average of its columns is exactly `query` =
// (0, 1/k, ..., 1/k), so the subset's induced flat passes through it.
struct LiftedInstance {
  PointSet points;
  Vector query;
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> slots;  // row of the 1 in each column, in 1..k
};

// Accept a candidate flat only below this distance; the integer re-check of
// the witness makes the exact value uncritical (no false positives either
// way).
inline constexpr double kKSumZeroTau = 1e-7;

// Deterministic given the seed.  Throws InvalidArgument unless 2 <= k <= 6.
LiftedInstance ksum_lift(const KSumInstance& inst, std::uint64_t seed);

// One lift plus one nearest-induced-flat query at (0, 1/k, ..., 1/k):
// returns the witness indices when the reported distance is below
// kKSumZeroTau, exactly k indices support it, and their numbers sum to zero
// in integer arithmetic; nullopt otherwise.  One-sided: a returned subset is
// always a genuine zero-sum k-subset.  Throws TooFewPoints (n < k).
std::optional<std::vector<std::size_t>> ksum_trial(
    const KSumInstance& inst, double epsilon, std::uint64_t seed,
    const Tolerances& tols = default_tols());

// 8 * ceil(e^k): enough independent lifts to catch a planted solution with
// probability >= 1 - e^-8 (each hits with probability k!/k^k >= e^-k).
std::size_t ksum_default_trials(std::size_t k);

// Repeated trials with per-trial seeds derived from (seed, trial index);
// first hit wins.  `trials` = 0 means ksum_default_trials(k).
std::optional<std::vector<std::size_t>> solve_ksum(
    const KSumInstance& inst, double epsilon, std::size_t trials = 0,
    std::uint64_t seed = kDefaultQuerySeed,
    const Tolerances& tols = default_tols());

// --------------------------------------------------- determinant as a dot --

// Lift of an ordered point pair in R^4 to R^24 such that
// <u(a, b), v(c, d)> = det[a b c d].  Expanding the determinant along its
// first two columns writes it as a sum over the 12 ordered products
// a_alpha * b_beta, each multiplied by the two products of the (c, d) minor
// on the complementary rows; every ordered product therefore occupies a
// (+x, -x) coordinate pair in u, matched in v by the complementary minor's
// two products.  Both lifts are bilinear in their arguments.  Throws
// DimensionNot4.
Vector hopcroft_lift_u(VectorRef a, VectorRef b);
Vector hopcroft_lift_v(VectorRef c, VectorRef d);

// ------------------------------------------------------ affine degeneracy --

struct DegeneracyReport {
  bool degenerate = false;
  // When degenerate: d+1 point ids whose affine hull is a hyperplane or
  // lower, verified by an exact rank test.  Empty otherwise.
  std::vector<std::size_t> witness;
};

// Decides whether some d+1 points lie on a common hyperplane.  Builds
// nearest-induced-flat structures (flats through d points) over 8*ceil(log2
// n) half-density samples of P and queries every point against every sample
// not containing it; a reported distance below rank-slack * spread flags a
// candidate, which is only reported after its d+1 points pass an exact
// smallest-singular-value rank test -- false positives are impossible.
// Misses are possible only when no sample separates a degenerate point from
// its d partners (probability about (1 - (d+1)/2^(d+1))^samples).
// Deterministic given the seed.  Throws InvalidArgument unless 2 <= d <= 6,
// TooFewPoints (n < d+1).
DegeneracyReport detect_affine_degeneracy(
    const PointSet& P, double epsilon = 0.5,
    AnnBackend backend = AnnBackend::Exact,
    std::uint64_t seed = kDefaultQuerySeed,
    const Tolerances& tols = default_tols());

}  // namespace sparsegeom
