#include "sparsegeom/offline_segment.hpp"

#include "sparsegeom/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace sparsegeom {

namespace {

// Segment candidate scored exactly; tau reports the convex weights of the
// nearest point over (endpoint a, endpoint b).
QueryResult segment_result(VectorRef q, VectorRef a, std::size_t a_id,
                           VectorRef b, std::size_t b_id) {
  double t = 0.0;
  QueryResult r;
  r.variant = Variant::Segment;
  r.distance = point_segment_distance(q, a, b, &t);
  r.witness_ids = {std::min(a_id, b_id), std::max(a_id, b_id)};
  r.tau = {{a_id, 1.0 - t}, {b_id, t}};
  if (r.tau[0].first > r.tau[1].first) std::swap(r.tau[0], r.tau[1]);
  return r;
}

Vector unit_from_center(VectorRef center, double radius, VectorRef p,
                        const Tolerances& tols) {
  if (p.size() != center.size())
    fail(ErrorCode::DimensionMismatch, "point and center dimensions differ");
  if (!(radius > 0.0))
    fail(ErrorCode::InvalidArgument, "sphere radius must be positive");
  Vector diff = p - center;
  const double norm = diff.norm();
  if (norm <= tols.zero * radius)
    fail(ErrorCode::CoincidentWithQuery, "point sits on the sphere center");
  return diff / norm;
}

// Ids of the distinct columns, ascending; within a group of equal columns the
// lowest id represents the rest.  Each group of size >= 2 contributes its two
// lowest ids to `dup_pairs`.
std::vector<std::size_t> distinct_columns(
    const Matrix& pts,
    std::vector<std::pair<std::size_t, std::size_t>>* dup_pairs) {
  const auto n = static_cast<std::size_t>(pts.cols());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto col = [&](std::size_t i) { return pts.col(static_cast<Eigen::Index>(i)); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (Eigen::Index r = 0; r < pts.rows(); ++r) {
      const double x = col(a)(r), y = col(b)(r);
      if (x != y) return x < y;
    }
    return a < b;
  });
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && col(order[j]) == col(order[i])) ++j;
    reps.push_back(order[i]);
    if (dup_pairs != nullptr && j - i >= 2)
      dup_pairs->emplace_back(order[i], order[i + 1]);
    i = j;
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

}  // namespace

Vector spherical_project(VectorRef center, double radius, VectorRef p,
                         const Tolerances& tols) {
  return center + radius * unit_from_center(center, radius, p, tols);
}

Vector spherical_reflect(VectorRef center, double radius, VectorRef p,
                         const Tolerances& tols) {
  return center - radius * unit_from_center(center, radius, p, tols);
}

SphericalScene spherical_scene_build(const PointSet& P, VectorRef center,
                                     double radius, double epsilon,
                                     AnnBackend backend,
                                     const Tolerances& tols) {
  if (P.size() < 1) fail(ErrorCode::EmptySet, "no points to project");
  if (center.size() != P.dim())
    fail(ErrorCode::DimensionMismatch, "center and points dimensions differ");
  if (!(radius > 0.0))
    fail(ErrorCode::InvalidArgument, "sphere radius must be positive");

  SphericalScene scene;
  scene.center = center;
  scene.radius = radius;
  scene.back_map = distinct_columns(P.data(), nullptr);
  scene.projected.resize(P.dim(),
                         static_cast<Eigen::Index>(scene.back_map.size()));
  for (std::size_t j = 0; j < scene.back_map.size(); ++j)
    scene.projected.col(static_cast<Eigen::Index>(j)) = spherical_project(
        center, radius, P.col(static_cast<Eigen::Index>(scene.back_map[j])),
        tols);
  scene.ann = ann_build(scene.projected, AnnConfig{epsilon, backend});
  return scene;
}

QueryResult offline_nearest_segment(const PointSet& P, VectorRef q,
                                    double epsilon, AnnBackend backend,
                                    double radius, const Tolerances& tols) {
  if (P.size() < 2)
    fail(ErrorCode::TooFewPoints, "need at least two points to induce a segment");
  if (q.size() != P.dim())
    fail(ErrorCode::DimensionMismatch, "query and points dimensions differ");
  if (!(radius > 0.0))
    fail(ErrorCode::InvalidArgument, "sphere radius must be positive");

  auto col = [&](std::size_t i) { return P.col(static_cast<Eigen::Index>(i)); };

  // A data point on the sphere center cannot be projected, and any segment
  // hanging off it already attains the optimum: distance zero.
  for (std::size_t i = 0; i < static_cast<std::size_t>(P.size()); ++i)
    if ((col(i) - q).norm() <= tols.zero * radius) {
      const std::size_t j = i == 0 ? 1 : 0;
      return segment_result(q, col(i), i, col(j), j);
    }

  std::vector<std::pair<std::size_t, std::size_t>> dup_pairs;
  const std::vector<std::size_t> reps = distinct_columns(P.data(), &dup_pairs);
  SphericalScene scene =
      spherical_scene_build(P, q, radius, epsilon, backend, tols);

  std::optional<QueryResult> best;
  auto offer = [&](QueryResult r) {
    if (!best || better_result(r, *best)) best = std::move(r);
  };

  // Zero-length segments between duplicates stay in the candidate pool; they
  // score as plain point distances.
  for (const auto& [a, b] : dup_pairs)
    offer(segment_result(q, col(a), a, col(b), b));

  // The two distinct points closest to the query seed a fallback partner: if
  // a reflection lookup comes back with the queried point itself (every other
  // projection ties at the antipodal chord, or the lookup settled there), the
  // segment toward the closest other point is at least as good as any
  // partner sharing the queried point's ray.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t near1 = kNone, near2 = kNone;
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i : reps) {
    const double d = (col(i) - q).norm();
    if (near1 == kNone || d < d1) {
      near2 = near1, d2 = d1;
      near1 = i, d1 = d;
    } else if (near2 == kNone || d < d2) {
      near2 = i, d2 = d;
    }
  }

  for (std::size_t i : reps) {
    const Vector mirrored = spherical_reflect(q, radius, col(i), tols);
    const std::size_t hit = ann_query(scene.ann, mirrored).first;
    std::size_t mate = scene.back_map[hit];
    if (mate == i) mate = i == near1 ? near2 : near1;
    if (mate == kNone) continue;  // single distinct point: duplicates covered
    offer(segment_result(q, col(i), i, col(mate), mate));
  }

  if (!best) fail(ErrorCode::EmptySet, "no segment candidate scored");
  return *best;
}

}  // namespace sparsegeom
