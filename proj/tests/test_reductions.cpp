#include "doctest.h"

#include "oracles.hpp"
#include "sparsegeom/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

using namespace sparsegeom;

namespace {

// Seed whose lift assigns exactly the wanted rows (searched, not constructed,
// so the lift's own RNG path is exercised).
std::uint64_t seed_with_slots(const KSumInstance& inst,
                              const std::vector<Eigen::Index>& want) {
  for (std::uint64_t seed = 0; seed < 100000; ++seed) {
    if (ksum_lift(inst, seed).slots == want) return seed;
  }
  REQUIRE(false);
  return 0;
}

// Seed whose lift gives the chosen columns a full permutation of rows 1..k.
std::uint64_t seed_with_permutation(const KSumInstance& inst,
                                    const std::vector<std::size_t>& ids) {
  for (std::uint64_t seed = 0; seed < 100000; ++seed) {
    const LiftedInstance lift = ksum_lift(inst, seed);
    std::vector<Eigen::Index> rows;
    for (std::size_t id : ids) rows.push_back(lift.slots[id]);
    std::sort(rows.begin(), rows.end());
    bool perm = rows.size() == inst.k;
    for (std::size_t j = 0; perm && j < rows.size(); ++j)
      perm = rows[j] == static_cast<Eigen::Index>(j + 1);
    if (perm) return seed;
  }
  REQUIRE(false);
  return 0;
}

double det3(double a, double b, double c, double d, double e, double f,
            double g, double h, double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

// First-row cofactor expansion, independent of any library determinant.
double det4_cofactor(const Matrix& M) {
  double sum = 0.0;
  for (int j = 0; j < 4; ++j) {
    int c[3], t = 0;
    for (int x = 0; x < 4; ++x)
      if (x != j) c[t++] = x;
    const double minor =
        det3(M(1, c[0]), M(1, c[1]), M(1, c[2]), M(2, c[0]), M(2, c[1]),
             M(2, c[2]), M(3, c[0]), M(3, c[1]), M(3, c[2]));
    sum += (j % 2 == 0 ? 1.0 : -1.0) * M(0, j) * minor;
  }
  return sum;
}

double subset_sigma_min(const Matrix& P, const std::vector<std::size_t>& ids) {
  Matrix D(P.rows(), static_cast<Eigen::Index>(ids.size()) - 1);
  for (std::size_t j = 1; j < ids.size(); ++j)
    D.col(static_cast<Eigen::Index>(j - 1)) =
        P.col(static_cast<Eigen::Index>(ids[j])) -
        P.col(static_cast<Eigen::Index>(ids[0]));
  Eigen::JacobiSVD<Matrix> svd(D);
  return svd.singularValues().tail<1>()(0);
}

}  // namespace

TEST_CASE("k-sum lift: forced rows, invariants, permutation average") {
  KSumInstance two{{1, -1}, 2};
  const std::uint64_t s2 = seed_with_slots(two, {1, 2});
  const LiftedInstance l2 = ksum_lift(two, s2);
  CHECK(l2.points.col(0) == (Vector(3) << 1, 1, 0).finished());
  CHECK(l2.points.col(1) == (Vector(3) << -1, 0, 1).finished());
  CHECK(l2.query == (Vector(3) << 0, 0.5, 0.5).finished());
  CHECK(((l2.points.col(0) + l2.points.col(1)) / 2.0 - l2.query).norm() == 0.0);

  KSumInstance three{{4, -9, 5}, 3};
  const std::uint64_t s3 = seed_with_permutation(three, {0, 1, 2});
  const LiftedInstance l3 = ksum_lift(three, s3);
  const Vector avg =
      (l3.points.col(0) + l3.points.col(1) + l3.points.col(2)) / 3.0;
  CHECK((avg - l3.query).norm() <= 1e-15);

  // Structural invariants for arbitrary seeds.
  KSumInstance inst{{7, -3, 0, 12, -5, 9, 1}, 3};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const LiftedInstance lift = ksum_lift(inst, seed);
    CHECK(lift.points.dim() == 4);
    CHECK(lift.points.size() == 7);
    CHECK(lift.seed == seed);
    for (Eigen::Index i = 0; i < 7; ++i) {
      const Vector v = lift.points.col(i);
      CHECK(v(0) == static_cast<double>(inst.numbers[static_cast<std::size_t>(i)]));
      int ones = 0;
      for (Eigen::Index r = 1; r <= 3; ++r) {
        if (v(r) == 1.0) ++ones;
        else CHECK(v(r) == 0.0);
      }
      CHECK(ones == 1);
      CHECK(lift.slots[static_cast<std::size_t>(i)] >= 1);
      CHECK(lift.slots[static_cast<std::size_t>(i)] <= 3);
      CHECK(v(lift.slots[static_cast<std::size_t>(i)]) == 1.0);
    }
  }

  CHECK_THROWS_WITH_AS(ksum_lift(KSumInstance{{1, 2}, 1}, 0),
                       doctest::Contains("InvalidArgument"), GeomError);
  CHECK_THROWS_WITH_AS(ksum_lift(KSumInstance{{1, 2}, 7}, 0),
                       doctest::Contains("InvalidArgument"), GeomError);
}

TEST_CASE("k-sum trials: planted triple found, hit rate matches k!/k^k") {
  // Powers of two make every pair sum distinct, so {5, 11, -16} is the only
  // zero-sum triple.
  KSumInstance inst{{1, 2, 4, 8, 32, 64, 128, 256, 512, 5, 11, -16}, 3};
  const std::vector<std::size_t> planted{9, 10, 11};

  auto solved = solve_ksum(inst, 0.25);
  REQUIRE(solved.has_value());
  CHECK(*solved == planted);

  // A single trial succeeds exactly when the planted rows form a
  // permutation: 3!/3^3 = 6/27.
  int hits = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    auto hit = ksum_trial(inst, 0.25, 1000003ull * (t + 1));
    if (hit) {
      CHECK(*hit == planted);
      ++hits;
    }
  }
  const double p = 6.0 / 27.0;
  const double sigma = std::sqrt(p * (1.0 - p) / trials);
  CHECK(std::abs(hits / static_cast<double>(trials) - p) <= 3.0 * sigma);

  // All positive: nothing to find.
  KSumInstance positive{{3, 1, 4, 1, 5, 9, 2, 6}, 3};
  CHECK_FALSE(solve_ksum(positive, 0.25, 40).has_value());

  CHECK_THROWS_WITH_AS(ksum_trial(KSumInstance{{1, 2, 3}, 4}, 0.25, 0),
                       doctest::Contains("TooFewPoints"), GeomError);
}

TEST_CASE("k-sum with no solution: query stays clear of every induced flat") {
  // No three of these sum to zero (checked exhaustively below).
  KSumInstance inst{{-77, -76, -64, -53, -23, 14, 37, 57, 61, 77}, 3};
  const std::size_t n = inst.numbers.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        REQUIRE(inst.numbers[a] + inst.numbers[b] + inst.numbers[c] != 0);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const LiftedInstance lift = ksum_lift(inst, seed);

    // Exhaustive floor: the nearest induced flat keeps a healthy distance.
    double floor = oracles::kInf;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c) {
          Matrix S(4, 3);
          S.col(0) = lift.points.col(static_cast<Eigen::Index>(a));
          S.col(1) = lift.points.col(static_cast<Eigen::Index>(b));
          S.col(2) = lift.points.col(static_cast<Eigen::Index>(c));
          floor = std::min(floor, oracles::affine_hull_distance(S, lift.query));
        }
    CHECK(floor > 1e-7);

    const InducedFlatIndex idx = anif_build(lift.points, 3, 0.25);
    CHECK(anif_query(idx, lift.query).distance > 1e-7);
    CHECK_FALSE(ksum_trial(inst, 0.25, seed).has_value());
  }
}

TEST_CASE("determinant lift: inner product equals the 4x4 determinant") {
  Matrix E = Matrix::Identity(4, 4);
  CHECK(hopcroft_lift_u(E.col(0), E.col(1)).dot(
            hopcroft_lift_v(E.col(2), E.col(3))) == doctest::Approx(1.0));

  std::mt19937_64 rng(1234);
  for (int rep = 0; rep < 1000; ++rep) {
    Matrix M = oracles::random_points(rng, 4, 4, -2.0, 2.0);
    const double det = det4_cofactor(M);
    const double ip = hopcroft_lift_u(M.col(0), M.col(1))
                          .dot(hopcroft_lift_v(M.col(2), M.col(3)));
    CHECK(std::abs(ip - det) <= 1e-9 * std::max(1.0, std::abs(det)));
  }

  // A repeated column collapses the determinant and the inner product alike.
  for (int rep = 0; rep < 50; ++rep) {
    Matrix M = oracles::random_points(rng, 4, 3, -2.0, 2.0);
    const double ip = hopcroft_lift_u(M.col(0), M.col(1))
                          .dot(hopcroft_lift_v(M.col(2), M.col(0)));
    CHECK(std::abs(ip) <= 1e-12);
  }

  // Bilinearity, both as vectors and through the inner product.
  for (int rep = 0; rep < 200; ++rep) {
    const Vector a = oracles::random_vector(rng, 4);
    const Vector b = oracles::random_vector(rng, 4);
    const Vector b2 = oracles::random_vector(rng, 4);
    const Vector c = oracles::random_vector(rng, 4);
    const Vector d = oracles::random_vector(rng, 4);
    CHECK((hopcroft_lift_u(a, b + b2) - hopcroft_lift_u(a, b) -
           hopcroft_lift_u(a, b2))
              .norm() <= 1e-12);
    CHECK((hopcroft_lift_v(c + c, d) - 2.0 * hopcroft_lift_v(c, d)).norm() <=
          1e-12);
    const Vector v = hopcroft_lift_v(c, d);
    CHECK(std::abs(hopcroft_lift_u(a, b + b2).dot(v) -
                   hopcroft_lift_u(a, b).dot(v) -
                   hopcroft_lift_u(a, b2).dot(v)) <= 1e-9);
  }

  CHECK_THROWS_WITH_AS(hopcroft_lift_u(Vector::Ones(3), Vector::Ones(4)),
                       doctest::Contains("DimensionNot4"), GeomError);
  CHECK_THROWS_WITH_AS(hopcroft_lift_v(Vector::Ones(4), Vector::Ones(5)),
                       doctest::Contains("DimensionNot4"), GeomError);
}

TEST_CASE("affine degeneracy: planted hyperplanes found, clean sets stay clean") {
  std::mt19937_64 rng(20260815);

  // General position: validated exhaustively, then the detector must agree.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Matrix P = oracles::random_points(rng, 3, 12);
    const double spread =
        (P.rowwise().maxCoeff() - P.rowwise().minCoeff()).norm();
    double smin = oracles::kInf;
    for (std::size_t a = 0; a < 12; ++a)
      for (std::size_t b = a + 1; b < 12; ++b)
        for (std::size_t c = b + 1; c < 12; ++c)
          for (std::size_t d = c + 1; d < 12; ++d)
            smin = std::min(smin, subset_sigma_min(P, {a, b, c, d}));
    REQUIRE(smin > 1e-6 * spread);
    const DegeneracyReport rep =
        detect_affine_degeneracy(PointSet(P), 0.5, AnnBackend::Exact, seed);
    CHECK_FALSE(rep.degenerate);
    CHECK(rep.witness.empty());
  }

  // Planted: four points on a shared plane among random company.
  for (int inst = 0; inst < 10; ++inst) {
    Matrix P = oracles::random_points(rng, 3, 40);
    const std::vector<std::size_t> planted{5, 12, 23, 31};
    P.col(31) = P.col(5) + 0.3 * (P.col(12) - P.col(5)) +
                0.5 * (P.col(23) - P.col(5));
    const DegeneracyReport rep = detect_affine_degeneracy(
        PointSet(P), 0.5, AnnBackend::Exact, 1000 + inst);
    REQUIRE(rep.degenerate);
    REQUIRE(rep.witness.size() == 4);
    const double spread =
        (P.rowwise().maxCoeff() - P.rowwise().minCoeff()).norm();
    CHECK(subset_sigma_min(P, rep.witness) <= 1e-9 * spread);
    CHECK(rep.witness == planted);
  }

  // Exactly d+1 coplanar points.
  Matrix Q(3, 4);
  Q.col(0) = (Vector(3) << 0, 0, 0).finished();
  Q.col(1) = (Vector(3) << 1, 0, 1).finished();
  Q.col(2) = (Vector(3) << 0, 1, 1).finished();
  Q.col(3) = Q.col(1) + Q.col(2) - Q.col(0);
  const DegeneracyReport four = detect_affine_degeneracy(PointSet(Q));
  CHECK(four.degenerate);
  CHECK(four.witness == std::vector<std::size_t>{0, 1, 2, 3});

  // A duplicated point flattens every base through both copies.
  Matrix D = oracles::random_points(rng, 3, 31);
  D.col(30) = D.col(7);
  const DegeneracyReport dup = detect_affine_degeneracy(PointSet(D));
  REQUIRE(dup.degenerate);
  CHECK(std::find(dup.witness.begin(), dup.witness.end(), 7) !=
        dup.witness.end());
  CHECK(std::find(dup.witness.begin(), dup.witness.end(), 30) !=
        dup.witness.end());

  // All points identical.
  Matrix same = Matrix::Ones(3, 5);
  const DegeneracyReport flat = detect_affine_degeneracy(PointSet(same));
  CHECK(flat.degenerate);
  CHECK(flat.witness == std::vector<std::size_t>{0, 1, 2, 3});

  CHECK_THROWS_WITH_AS(
      detect_affine_degeneracy(PointSet(Matrix::Ones(3, 3))),
      doctest::Contains("TooFewPoints"), GeomError);
  CHECK_THROWS_WITH_AS(
      detect_affine_degeneracy(PointSet(Matrix::Ones(1, 5))),
      doctest::Contains("InvalidArgument"), GeomError);
  CHECK_THROWS_WITH_AS(
      detect_affine_degeneracy(PointSet(Matrix::Ones(7, 9))),
      doctest::Contains("InvalidArgument"), GeomError);
}
