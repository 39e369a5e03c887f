#include "doctest.h"

#include "oracles.hpp"
#include "sparsegeom/geometry.hpp"

#include <cmath>
#include <random>

using namespace sparsegeom;

namespace {

Matrix cols2(std::initializer_list<std::initializer_list<double>> pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  const auto d = static_cast<Eigen::Index>(pts.begin()->size());
  Matrix M(d, n);
  Eigen::Index j = 0;
  for (const auto& p : pts) {
    Eigen::Index i = 0;
    for (double x : p) M(i++, j) = x;
    ++j;
  }
  return M;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

BaseSet base_of(const Matrix& members) {
  BaseSet B;
  B.members = members;
  B.ids.resize(static_cast<std::size_t>(members.cols()));
  for (std::size_t i = 0; i < B.ids.size(); ++i)
    B.ids[i] = static_cast<std::int64_t>(i);
  return B;
}

}  // namespace

TEST_CASE("orthonormal_frame: axis-aligned identity case") {
  BaseSet B = base_of(cols2({{0, 0, 0}}));
  CanonicalFrame F = orthonormal_frame(B, vec({1, 0, 0}), vec({0, 1, 0}));
  CHECK(F.flat_basis.cols() == 0);
  CHECK((F.ext1() - vec({1, 0, 0})).norm() == doctest::Approx(0.0));
  CHECK((F.ext2() - vec({0, 1, 0})).norm() == doctest::Approx(0.0));
  CHECK(F.complement_basis.cols() == 3);
}

TEST_CASE("orthonormal_frame: orthogonal input") {
  BaseSet B = base_of(cols2({{0, 0, 0}, {2, 0, 0}}));
  CanonicalFrame F = orthonormal_frame(B, vec({0, 3, 0}), vec({0, 0, 1}));
  CHECK((F.flat_basis.col(0) - vec({1, 0, 0})).norm() == doctest::Approx(0.0));
  CHECK((F.ext1() - vec({0, 1, 0})).norm() == doctest::Approx(0.0));
  CHECK(F.base_coords(0, 0) == 0.0);
  CHECK(F.base_coords(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("orthonormal_frame: random frames satisfy orthonormality and span") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 6;
    BaseSet B = base_of(oracles::random_points(rng, d, 3));
    CanonicalFrame F = orthonormal_frame(B, oracles::random_vector(rng, d),
                                         oracles::random_vector(rng, d));
    Matrix U(d, F.flat_basis.cols() + F.complement_basis.cols());
    U << F.flat_basis, F.complement_basis;
    CHECK(U.cols() == d);
    CHECK((U.transpose() * U - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <=
          1e-9);
    // Span: random vectors reconstruct from their coordinates.
    for (int t = 0; t < 4; ++t) {
      Vector v = oracles::random_vector(rng, d);
      CHECK((U * (U.transpose() * v) - v).norm() <= 1e-8);
    }
  }
}

TEST_CASE("orthonormal_frame: degenerate inputs rejected") {
  BaseSet collinear = base_of(cols2({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}));
  CHECK_THROWS_WITH_AS(
      orthonormal_frame(collinear, vec({0, 1, 0}), vec({0, 0, 1})),
      doctest::Contains("DegenerateBase"), GeomError);

  BaseSet B = base_of(cols2({{0, 0, 0}, {1, 0, 0}}));
  CHECK_THROWS_WITH_AS(orthonormal_frame(B, vec({0.5, 0, 0}), vec({0, 0, 1})),
                       doctest::Contains("DegenerateAux"), GeomError);
  CHECK_THROWS_WITH_AS(orthonormal_frame(B, vec({0, 1, 0}), vec({3, 2, 0})),
                       doctest::Contains("DegenerateAux"), GeomError);
}

TEST_CASE("frame_for_flat matches orthonormal_frame over the default aux") {
  std::mt19937_64 rng(12);
  BaseSet B = base_of(oracles::random_points(rng, 5, 3));
  auto [a1, a2] = default_aux(B);
  CanonicalFrame F1 = frame_for_flat(B);
  CanonicalFrame F2 = orthonormal_frame(B, a1, a2);
  CHECK((F1.ext1() - F2.ext1()).norm() <= 1e-12);
  CHECK((F1.ext2() - F2.ext2()).norm() <= 1e-12);
  CHECK((F1.flat_basis - F2.flat_basis).norm() <= 1e-12);
}

TEST_CASE("flat_distance: closed-form examples") {
  auto r = flat_distance(cols2({{0, 0}, {1, 0}}), vec({0.5, 2}));
  CHECK(r.distance == doctest::Approx(2.0));
  CHECK((r.projection - vec({0.5, 0})).norm() <= 1e-12);
  CHECK(r.coeffs(0) == doctest::Approx(0.5));
  CHECK(r.coeffs(1) == doctest::Approx(0.5));

  auto p = flat_distance(cols2({{1, 1}}), vec({4, 5}));
  CHECK(p.distance == doctest::Approx(5.0));
  CHECK((p.projection - vec({1, 1})).norm() == 0.0);
  CHECK(p.coeffs(0) == 1.0);

  CHECK_THROWS_WITH_AS(
      flat_distance(cols2({{0, 0}, {1, 0}, {2, 0}}), vec({0, 1})),
      doctest::Contains("DegenerateBase"), GeomError);
}

TEST_CASE("flat_distance: grid oracle on random instances") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    Matrix S = oracles::random_points(rng, 5, 3);
    Vector q = oracles::random_vector(rng, 5);
    auto r = flat_distance(S, q);
    double grid = oracles::grid_affine_min(S, q);
    CHECK(r.distance <= grid + 1e-12);  // least squares beats every grid point
    CHECK(r.distance == doctest::Approx(grid).epsilon(0).scale(0).epsilon(1e-3));
    CHECK(std::abs(r.coeffs.sum() - 1.0) <= 1e-9);
    CHECK((r.projection - S * r.coeffs).norm() <= 1e-9);
  }
}

TEST_CASE("linear_flat_distance: origin adjoined, unconstrained coefficients") {
  auto r = linear_flat_distance(cols2({{1, 0}}), vec({3, 4}));
  CHECK(r.distance == doctest::Approx(4.0));
  CHECK((r.projection - vec({3, 0})).norm() <= 1e-12);
  CHECK(r.coeffs(0) == doctest::Approx(3.0));

  auto full = linear_flat_distance(cols2({{1, 0}, {0, 1}}), vec({5, 7}));
  CHECK(full.distance == doctest::Approx(0.0));
  CHECK(full.coeffs(0) == doctest::Approx(5.0));
  CHECK(full.coeffs(1) == doctest::Approx(7.0));

  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 3; ++rep) {
    Matrix S = oracles::random_points(rng, 5, 2);
    Vector q = oracles::random_vector(rng, 5);
    auto g = linear_flat_distance(S, q);
    double grid = oracles::grid_linear_min(S, q);
    CHECK(g.distance <= grid + 1e-12);
    CHECK(g.distance == doctest::Approx(grid).epsilon(1e-3));
  }
}

TEST_CASE("simplex_distance: closed-form examples") {
  auto seg = simplex_distance(cols2({{0, 0}, {1, 0}}), {0, 1}, vec({2, 1}));
  CHECK(seg.distance == doctest::Approx(std::sqrt(2.0)));
  CHECK((seg.nearest - vec({1, 0})).norm() <= 1e-12);
  CHECK(seg.vertex_ids == std::vector<std::size_t>{1});

  auto tri = simplex_distance(cols2({{0, 0}, {1, 0}, {0, 1}}), {0, 1, 2},
                              vec({0.2, 0.2}));
  CHECK(tri.distance == doctest::Approx(0.0));
  CHECK(tri.barycentric.minCoeff() >= -1e-12);
  CHECK(tri.barycentric.sum() == doctest::Approx(1.0));
}

TEST_CASE("simplex_distance: barycentric grid oracle in R^4") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 6; ++rep) {
    Matrix S = oracles::random_points(rng, 4, 3);
    Vector q = oracles::random_vector(rng, 4, -2.0, 2.0);
    auto w = simplex_distance(S, {0, 1, 2}, q);
    double grid = oracles::grid_simplex_min(S, q);
    CHECK(w.distance <= grid + 1e-12);
    CHECK(w.distance == doctest::Approx(grid).epsilon(1e-3));
    // Witness invariants: convex reconstruction attains the distance.
    Vector x = Vector::Zero(4);
    for (std::size_t i = 0; i < w.vertex_ids.size(); ++i)
      x += w.barycentric(static_cast<Eigen::Index>(i)) *
           S.col(static_cast<Eigen::Index>(w.vertex_ids[i]));
    CHECK((x - w.nearest).norm() <= 1e-8);
    CHECK(w.barycentric.minCoeff() >= -1e-12);
    CHECK(w.barycentric.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("simplex_distance: degenerate vertex sets") {
  // Duplicates collapse to the same face.
  auto dup = simplex_distance(cols2({{0, 0}, {0, 0}, {1, 0}}), {0, 1, 2},
                              vec({2, 1}));
  CHECK(dup.distance == doctest::Approx(std::sqrt(2.0)));

  // Collinear triple: the hull is the segment between the extremes.
  auto col = simplex_distance(cols2({{0, 0}, {2, 0}, {1, 0}}), {0, 1, 2},
                              vec({1, 1}));
  CHECK(col.distance == doctest::Approx(1.0));
}

TEST_CASE("direction: complement coordinates of the residual") {
  BaseSet B = base_of(cols2({{0, 0}, {1, 0}}));
  CanonicalFrame F = frame_for_flat(B);
  CHECK(F.complement_basis.cols() == 1);

  Vector up = direction(F, vec({3, 4}));
  CHECK(up.size() == 1);
  // Ambient reconstruction is the unit residual (0, 1).
  CHECK((F.complement_basis * up - vec({0, 1})).norm() <= 1e-12);
  Vector down = direction(F, vec({3, -4}));
  CHECK((up + down).norm() <= 1e-12);  // reflection flips the direction

  CHECK_THROWS_WITH_AS(direction(F, vec({0.25, 0})), doctest::Contains("OnFlat"),
                       GeomError);

  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    BaseSet Br = base_of(oracles::random_points(rng, 6, 3));
    CanonicalFrame Fr = frame_for_flat(Br);
    Vector p = oracles::random_vector(rng, 6);
    Vector u = direction(Fr, p);
    CHECK(std::abs(u.norm() - 1.0) <= 1e-9);
    // The ambient residual is orthogonal to the flat basis.
    Vector amb = Fr.complement_basis * u;
    CHECK((Fr.flat_basis.transpose() * amb).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("trilaterate: closed-form cases") {
  // Circle meets the halfline at distance 5 (single-member base).
  BaseSet B1 = base_of(cols2({{0, 0}}));
  CanonicalFrame F1 = frame_for_flat(B1);
  auto g1 = trilaterate(F1, vec({5}));
  REQUIRE(g1.has_value());
  CHECK((*g1)(0) == doctest::Approx(5.0));

  // 3-4-5 triangle: x1 solves 9 - x1^2 = 25 - (x1-4)^2 -> x1 = 0, height 3.
  BaseSet B2 = base_of(cols2({{0, 0, 0}, {4, 0, 0}}));
  CanonicalFrame F2 = frame_for_flat(B2);
  auto g2 = trilaterate(F2, vec({3, 5}));
  REQUIRE(g2.has_value());
  CHECK((*g2)(0) == doctest::Approx(0.0));
  CHECK((*g2)(1) == doctest::Approx(3.0));

  // Triangle inequality violated: negative residual squared height.
  CHECK(!trilaterate(F2, vec({1, 10})).has_value());
}

TEST_CASE("trilaterate: inverts canonical coordinates on random points") {
  std::mt19937_64 rng(32);
  for (int rep = 0; rep < 200; ++rep) {
    BaseSet B = base_of(oracles::random_points(rng, 5, 3));
    CanonicalFrame F = frame_for_flat(B);
    Vector p = oracles::random_vector(rng, 5);
    Vector lengths(3);
    for (Eigen::Index i = 0; i < 3; ++i)
      lengths(i) = (p - B.members.col(i)).norm();
    auto g = trilaterate(F, lengths);
    REQUIRE(g.has_value());
    CHECK((*g - g_coords(F, p)).norm() <= 1e-7);
  }
}

TEST_CASE("base_angles: triangle examples") {
  BaseSet B = base_of(cols2({{0, 0}, {1, 0}}));
  CanonicalFrame F = frame_for_flat(B);

  Vector iso = base_angles(F, vec({0.5, 0.5}));
  CHECK(iso(0) == doctest::Approx(M_PI / 4));
  CHECK(iso(1) == doctest::Approx(M_PI / 4));

  Vector right = base_angles(F, vec({0.0, 1.0}));
  CHECK(right(1) == doctest::Approx(M_PI / 2));  // right angle at the origin
  CHECK(right(0) == doctest::Approx(M_PI / 4));

  CHECK_THROWS_WITH_AS(base_angles(F, vec({0.5, 1e-12})),
                       doctest::Contains("DegenerateSimplex"), GeomError);
}

TEST_CASE("base_angles: independent dihedral computation via facet normals") {
  std::mt19937_64 rng(33);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index m = 3;  // k = 4
    BaseSet B = base_of(oracles::random_points(rng, 6, m));
    CanonicalFrame F = frame_for_flat(B);
    Vector g(m);
    g.head(m - 1) = oracles::random_vector(rng, m - 1);
    g(m - 1) = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    Vector angles = base_angles(F, g);

    // Oracle: dihedral = pi - angle between outward facet normals in R^m.
    auto lift = [&](Eigen::Index i) {
      Vector v = Vector::Zero(m);
      v.head(m - 1) = F.base_coords.col(i);
      return v;
    };
    Vector n_base = Vector::Zero(m);
    n_base(m - 1) = -1.0;  // interior lies above the base facet
    for (Eigen::Index i = 0; i < m; ++i) {
      Matrix span(m, m - 1);
      Eigen::Index c = 0;
      Eigen::Index anchor = (i == 0) ? 1 : 0;
      for (Eigen::Index j = 0; j < m; ++j)
        if (j != i && j != anchor) span.col(c++) = lift(j) - lift(anchor);
      span.col(c) = g - lift(anchor);
      // Outward normal of the facet omitting base member i: orthogonal to the
      // facet, pointing away from the omitted member.
      Eigen::FullPivHouseholderQR<Matrix> qr(span);
      Matrix Q = qr.matrixQ();
      Vector n = Q.col(m - 1);
      if (n.dot(lift(i) - lift(anchor)) > 0) n = -n;
      double oracle = M_PI - std::acos(std::clamp(n.dot(n_base), -1.0, 1.0));
      CHECK(angles(i) == doctest::Approx(oracle).epsilon(1e-8));
    }
  }
}

TEST_CASE("orbit_point: quarter-circle parameterization") {
  Vector qb = vec({0.7});
  OrbitPoint o = orbit_point(qb, 5.0, 3.0);
  CHECK(o.g(1) == doctest::Approx(4.0));
  CHECK(o.h(1) == doctest::Approx(4.0));
  CHECK(o.h(2) == doctest::Approx(3.0));

  OrbitPoint top = orbit_point(qb, 5.0, 0.0);
  CHECK(top.g(1) == doctest::Approx(5.0));
  CHECK(top.h(2) == 0.0);

  OrbitPoint end = orbit_point(qb, 5.0, 5.0);
  CHECK(end.g(1) == doctest::Approx(0.0));

  CHECK_THROWS_WITH_AS(orbit_point(qb, 5.0, 5.1), doctest::Contains("OutOfRange"),
                       GeomError);
}

TEST_CASE("orbit monotonicity: distance to fixed halfflat points is "
          "nondecreasing in the orbit parameter") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int rep = 0; rep < 10000; ++rep) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 4);
    Vector qb = oracles::random_vector(rng, m - 1);
    double r = 0.1 + 3.0 * U(rng);
    double l1 = r * U(rng), l2 = r * U(rng);
    if (l1 > l2) std::swap(l1, l2);
    Vector p(m + 1);  // a halfflat point embedded in slab coordinates
    p.head(m - 1) = oracles::random_vector(rng, m - 1, -2.0, 2.0);
    p(m - 1) = 2.0 * U(rng);
    p(m) = 0.0;
    OrbitPoint a = orbit_point(qb, r, l1);
    OrbitPoint b = orbit_point(qb, r, l2);
    CHECK((a.h - p).norm() <= (b.h - p).norm() + 1e-9);
  }
}

TEST_CASE("projection preserves distance: complement view of a nested flat") {
  std::mt19937_64 rng(35);
  for (int rep = 0; rep < 2000; ++rep) {
    const Eigen::Index d = 6;
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 3);
    BaseSet B = base_of(oracles::random_points(rng, d, m));
    CanonicalFrame F = frame_for_flat(B);
    Vector p = oracles::random_vector(rng, d);
    Vector q = oracles::random_vector(rng, d);

    Matrix S(d, m + 1);
    S << B.members, p;
    double ambient;
    try {
      ambient = flat_distance(S, q).distance;
    } catch (const GeomError&) {
      continue;  // degenerate random draw
    }
    // In complement coordinates the flat through B and p becomes the line
    // spanned by p's direction; distances agree.
    Vector u = direction(F, p);
    Vector cq = complement_coords(F, q);
    double projected = (cq - cq.dot(u) * u).norm();
    CHECK(ambient == doctest::Approx(projected).epsilon(1e-8));
  }
}

TEST_CASE("base-angle dominance is equivalent to barycentric containment") {
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int tested = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 3);
    BaseSet B = base_of(oracles::random_points(rng, m + 2, m));
    CanonicalFrame F = frame_for_flat(B);
    Vector apex(m), z(m);
    apex.head(m - 1) = oracles::random_vector(rng, m - 1, -1.5, 1.5);
    apex(m - 1) = 0.05 + 2.0 * U(rng);
    z.head(m - 1) = oracles::random_vector(rng, m - 1, -1.5, 1.5);
    z(m - 1) = 2.0 * U(rng);

    Vector bary = gsimplex_barycentric(F, apex, z);
    double margin = bary.minCoeff();
    if (std::abs(margin) < 1e-9) continue;  // skip knife-edge draws
    bool contained = margin >= 0.0;
    Vector ap = base_angles(F, apex);
    Vector az = base_angles_unchecked(F, z);
    bool dominated = true;
    for (Eigen::Index i = 0; i < m; ++i)
      if (az(i) > ap(i) + 1e-9) dominated = false;
    CHECK(contained == dominated);
    ++tested;
  }
  CHECK(tested > 9000);
}

TEST_CASE("gsimplex_barycentric: vertices and interior") {
  BaseSet B = base_of(cols2({{0, 0}, {1, 0}}));
  CanonicalFrame F = frame_for_flat(B);
  Vector apex = vec({0.3, 1.0});

  Vector at_apex = gsimplex_barycentric(F, apex, apex);
  CHECK(at_apex(2) == doctest::Approx(1.0));
  CHECK(at_apex.head(2).cwiseAbs().maxCoeff() <= 1e-12);

  Vector inside = gsimplex_barycentric(F, apex, vec({0.4, 0.2}));
  CHECK(inside.minCoeff() > 0.0);
  CHECK(inside.sum() == doctest::Approx(1.0));
}

TEST_CASE("point_segment_distance: clamps to endpoints") {
  double t = -1;
  CHECK(point_segment_distance(vec({2, 1}), vec({0, 0}), vec({1, 0}), &t) ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(t == 1.0);
  CHECK(point_segment_distance(vec({0.5, 3}), vec({0, 0}), vec({1, 0})) ==
        doctest::Approx(3.0));
  // Degenerate segment is the point itself.
  CHECK(point_segment_distance(vec({3, 4}), vec({0, 0}), vec({0, 0})) ==
        doctest::Approx(5.0));

  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 200; ++rep) {
    Vector a = oracles::random_vector(rng, 4), b = oracles::random_vector(rng, 4);
    Vector q = oracles::random_vector(rng, 4, -2.0, 2.0);
    double d = point_segment_distance(q, a, b);
    double grid = oracles::kInf;
    for (double s = 0.0; s <= 1.0; s += 1e-4)
      grid = std::min(grid, (q - (a + s * (b - a))).norm());
    CHECK(d <= grid + 1e-12);
    CHECK(d == doctest::Approx(grid).epsilon(1e-4));
  }
}

TEST_CASE("affinely_independent_subset: drops dependent columns") {
  Matrix S = cols2({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}});
  auto keep = affinely_independent_subset(S);
  CHECK(keep == std::vector<Eigen::Index>{0, 1, 3});
}
