#include "doctest.h"

#include "oracles.hpp"
#include "sparsegeom/ann.hpp"

#include <random>

using namespace sparsegeom;

TEST_CASE("ann: single point, duplicates, and tie-breaks") {
  Matrix one(2, 1);
  one << 3, 4;
  for (auto backend : {AnnBackend::Exact, AnnBackend::Tree}) {
    AnnIndex idx = ann_build(one, {0.5, backend});
    auto [id, d] = ann_query(idx, Vector::Zero(2));
    CHECK(id == 0);
    CHECK(d == doctest::Approx(5.0));
  }

  Matrix two(2, 2);
  two << 0, 10, 0, 0;
  AnnIndex idx = ann_build(two, {0.25, AnnBackend::Exact});
  auto [id, d] = ann_query(idx, (Vector(2) << 1, 0).finished());
  CHECK(id == 0);
  CHECK(d == doctest::Approx(1.0));

  // Equidistant query resolves to the lower id.
  auto [tid, td] = ann_query(idx, (Vector(2) << 5, 0).finished());
  CHECK(tid == 0);
  CHECK(td == doctest::Approx(5.0));

  // Duplicate points: either copy is a valid answer, distance exact.
  Matrix dup(2, 3);
  dup << 1, 1, 7, 2, 2, 2;
  for (auto backend : {AnnBackend::Exact, AnnBackend::Tree}) {
    AnnIndex di = ann_build(dup, {0.25, backend});
    auto [did, dd] = ann_query(di, (Vector(2) << 1, 0).finished());
    CHECK((did == 0 || did == 1));
    CHECK(dd == doctest::Approx(2.0));
  }
}

TEST_CASE("ann: build/query validation") {
  CHECK_THROWS_WITH_AS(ann_build(Matrix(3, 0), {0.25, AnnBackend::Exact}),
                       doctest::Contains("EmptySet"), GeomError);
  Matrix one = Matrix::Zero(3, 1);
  CHECK_THROWS_WITH_AS(ann_build(one, {0.0, AnnBackend::Exact}),
                       doctest::Contains("BadEpsilon"), GeomError);
  CHECK_THROWS_WITH_AS(ann_build(one, {8.5, AnnBackend::Tree}),
                       doctest::Contains("BadEpsilon"), GeomError);
  AnnIndex idx = ann_build(one, {0.25, AnnBackend::Exact});
  CHECK_THROWS_WITH_AS(ann_query(idx, Vector::Zero(2)),
                       doctest::Contains("DimensionMismatch"), GeomError);
}

TEST_CASE("ann: oracle sandwich over random draws") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> size_dist(1, 60);
  const double eps = 0.3;
  int draws = 0;
  while (draws < 10000) {
    int n = size_dist(rng);
    Matrix P = oracles::random_points(rng, 3, n);
    AnnIndex tree = ann_build(P, {eps, AnnBackend::Tree});
    AnnIndex exact = ann_build(P, {eps, AnnBackend::Exact});
    for (int t = 0; t < 25 && draws < 10000; ++t, ++draws) {
      Vector q = oracles::random_vector(rng, 3, -1.5, 1.5);
      auto [oid, od] = oracles::exact_nn(P, q);
      auto [eid, ed] = ann_query(exact, q);
      auto [tid, td] = ann_query(tree, q);
      CHECK(eid == oid);
      CHECK(ed == doctest::Approx(od));
      CHECK(td >= od - 1e-12);
      CHECK(td <= (1.0 + eps) * od + 1e-12);
      CHECK(td == doctest::Approx((q - P.col(static_cast<Eigen::Index>(tid)))
                                      .norm()));
    }
  }
}

TEST_CASE("ann: thousand-point tree instance within (1+eps) of exact") {
  std::mt19937_64 rng(42);
  Matrix P = oracles::random_points(rng, 3, 1000);
  const double eps = 0.25;
  AnnIndex tree = ann_build(P, {eps, AnnBackend::Tree});
  for (int t = 0; t < 1000; ++t) {
    Vector q = oracles::random_vector(rng, 3, -1.2, 1.2);
    auto [id, d] = ann_query(tree, q);
    auto [oid, od] = oracles::exact_nn(P, q);
    (void)oid;
    CHECK(id < 1000);
    CHECK(d >= od - 1e-12);
    CHECK(d <= (1.0 + eps) * od + 1e-12);
  }
}

TEST_CASE("ann: determinism of build and query") {
  std::mt19937_64 rng(43);
  Matrix P = oracles::random_points(rng, 4, 200);
  for (auto backend : {AnnBackend::Exact, AnnBackend::Tree}) {
    AnnIndex a = ann_build(P, {0.4, backend});
    AnnIndex b = ann_build(P, {0.4, backend});
    for (int t = 0; t < 200; ++t) {
      Vector q = oracles::random_vector(rng, 4, -2.0, 2.0);
      auto ra = ann_query(a, q);
      auto rb = ann_query(b, q);
      CHECK(ra.first == rb.first);
      CHECK(ra.second == rb.second);
    }
  }
}
