#include "sparsegeom/star.hpp"

#include "sparsegeom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparsegeom {

// ---------------------------------------------------------------- uniform --

UniformStarIndex uniform_star_build(const PointSet& P, const Point& base,
                                    const AnnConfig& cfg,
                                    const Tolerances& tols) {
  if (P.size() == 0) fail(ErrorCode::EmptySet, "star needs members");
  UniformStarIndex idx;
  idx.base = base;
  idx.shifted.resize(P.dim(), P.size());
  idx.ids.resize(static_cast<std::size_t>(P.size()));
  for (Eigen::Index j = 0; j < P.size(); ++j) {
    Vector s = P.col(j) - base.coords;
    if (std::abs(s.norm() - 1.0) > tols.rank)
      fail(ErrorCode::NonUniformInput, "member not at distance 1 from base");
    idx.shifted.col(j) = s;
    idx.ids[static_cast<std::size_t>(j)] = static_cast<std::size_t>(j);
  }
  idx.ann = ann_build(idx.shifted, cfg);
  return idx;
}

namespace {

// Segment candidate scored exactly; tau reports the convex weights of the
// nearest point over (endpoint a, endpoint b).
QueryResult segment_result(VectorRef q, VectorRef a, std::size_t a_id,
                           VectorRef b, std::size_t b_id) {
  double t = 0.0;
  QueryResult r;
  r.variant = Variant::Segment;
  r.distance = point_segment_distance(q, a, b, &t);
  if (a_id == b_id) {
    r.witness_ids = {a_id};
    r.tau = {{a_id, 1.0}};
    return r;
  }
  r.witness_ids = {std::min(a_id, b_id), std::max(a_id, b_id)};
  r.tau = {{a_id, 1.0 - t}, {b_id, t}};
  if (r.tau[0].first > r.tau[1].first) std::swap(r.tau[0], r.tau[1]);
  return r;
}

QueryResult point_result(VectorRef q, VectorRef p, std::size_t id) {
  QueryResult r;
  r.variant = Variant::Segment;
  r.distance = (q - p).norm();
  r.witness_ids = {id};
  r.tau = {{id, 1.0}};
  return r;
}

}  // namespace

QueryResult uniform_star_query(const UniformStarIndex& idx, VectorRef q,
                               const Tolerances& tols) {
  Vector shifted_q = q - idx.base.coords;
  if (std::abs(shifted_q.norm() - 1.0) > tols.rank)
    fail(ErrorCode::NonUniformInput, "query not at distance 1 from base");
  auto [j, dist_shifted] = ann_query(idx.ann, shifted_q);
  (void)dist_shifted;
  QueryResult r = segment_result(q, idx.base.coords, idx.base.id,
                                 idx.shifted.col(static_cast<Eigen::Index>(j)) +
                                     idx.base.coords,
                                 idx.ids[j]);
  r.distance = std::min(r.distance, 1.0);
  return r;
}

// ----------------------------------------------------------------- prefix --

std::int32_t PrefixAnnIndex::build_node(const Matrix& points,
                                        const AnnConfig& cfg, std::int32_t lo,
                                        std::int32_t hi) {
  Node node;
  node.lo = lo;
  node.hi = hi;
  node.ann = ann_build(points.middleCols(lo, hi - lo), cfg);
  if (hi - lo > 1) {
    std::int32_t mid = lo + (hi - lo + 1) / 2;
    node.left = build_node(points, cfg, lo, mid);
    node.right = build_node(points, cfg, mid, hi);
  }
  nodes_.push_back(std::move(node));
  return static_cast<std::int32_t>(nodes_.size()) - 1;
}

PrefixAnnIndex PrefixAnnIndex::build(const Matrix& points,
                                     const AnnConfig& cfg) {
  if (points.cols() == 0) fail(ErrorCode::EmptySet, "cannot index zero points");
  PrefixAnnIndex idx;
  idx.n_ = points.cols();
  idx.root_ = idx.build_node(points, cfg, 0,
                             static_cast<std::int32_t>(points.cols()));
  return idx;
}

std::pair<std::size_t, double> PrefixAnnIndex::query(std::size_t i,
                                                     VectorRef q) const {
  if (i < 1 || i > static_cast<std::size_t>(n_))
    fail(ErrorCode::IndexOutOfRange, "prefix length outside [1, n]");
  std::size_t best_id = 0;
  double best = std::numeric_limits<double>::infinity();
  const std::int32_t want = static_cast<std::int32_t>(i);
  // Canonical decomposition of [0, i): take whole nodes that fit, recurse
  // into the boundary.
  std::vector<std::int32_t> stack = {root_};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (node.lo >= want) continue;
    if (node.hi <= want) {
      auto [id, d] = node.ann.query(q);
      std::size_t global = static_cast<std::size_t>(node.lo) + id;
      if (d < best || (d == best && global < best_id)) {
        best = d;
        best_id = global;
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return {best_id, best};
}

std::size_t PrefixAnnIndex::cover_size(std::size_t i) const {
  if (i < 1 || i > static_cast<std::size_t>(n_))
    fail(ErrorCode::IndexOutOfRange, "prefix length outside [1, n]");
  std::size_t count = 0;
  const std::int32_t want = static_cast<std::int32_t>(i);
  std::vector<std::int32_t> stack = {root_};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (node.lo >= want) continue;
    if (node.hi <= want) {
      ++count;
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return count;
}

// ------------------------------------------------------------------- star --

StarIndex star_build(const PointSet& P, const Point& center, double epsilon,
                     AnnBackend backend, const Tolerances& tols) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    fail(ErrorCode::BadEpsilon, "star queries need epsilon in (0, 1]");
  StarIndex idx;
  idx.center = center;
  idx.epsilon = epsilon;
  idx.backend = backend;

  std::vector<std::pair<double, std::size_t>> order;
  for (Eigen::Index j = 0; j < P.size(); ++j) {
    if (static_cast<std::size_t>(j) == center.id) continue;
    double r = (P.col(j) - center.coords).norm();
    if (r <= tols.zero) continue;  // coincident with the center
    order.emplace_back(r, static_cast<std::size_t>(j));
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  const Eigen::Index m = static_cast<Eigen::Index>(order.size());
  idx.ids.resize(order.size());
  idx.radii.resize(m);
  idx.members.resize(P.dim(), m);
  idx.dirs.resize(P.dim(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& [r, id] = order[static_cast<std::size_t>(j)];
    idx.ids[static_cast<std::size_t>(j)] = id;
    idx.radii(j) = r;
    idx.members.col(j) = P.col(static_cast<Eigen::Index>(id));
    idx.dirs.col(j) = (idx.members.col(j) - center.coords) / r;
  }
  if (m > 0) {
    AnnConfig quarter{epsilon / 4.0, backend};
    idx.prefix = PrefixAnnIndex::build(idx.dirs, quarter);
    idx.point_ann = ann_build(idx.members, quarter);
  }
  return idx;
}

namespace {

// Members reaching radius r = prefix of the sort order (radii decreasing).
std::size_t slice_count(const StarIndex& idx, double r) {
  const double* begin = idx.radii.data();
  const double* end = begin + idx.radii.size();
  return static_cast<std::size_t>(
      std::partition_point(begin, end, [&](double x) { return x >= r; }) -
      begin);
}

// Slice query returning the member's ordinal in the sorted order (the public
// wrapper converts to the original id).
std::pair<std::size_t, double> slice_ordinal_query(const StarIndex& idx,
                                                   VectorRef q, double r) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "slice radius must be > 0");
  std::size_t count = slice_count(idx, r);
  if (count == 0)
    fail(ErrorCode::EmptySlice, "no member reaches the slice radius");
  Vector tq = (q - idx.center.coords) / r;
  auto [j, d] = idx.prefix.query(count, tq);
  (void)d;
  Vector clipped =
      idx.center.coords + r * idx.dirs.col(static_cast<Eigen::Index>(j));
  return {j, (q - clipped).norm()};
}

}  // namespace

std::pair<std::size_t, double> sliced_star_query(const StarIndex& idx,
                                                 VectorRef q, double r) {
  auto [ordinal, dist] = slice_ordinal_query(idx, q, r);
  return {idx.ids[ordinal], dist};
}

QueryResult star_query(const StarIndex& idx, VectorRef q,
                       const Tolerances& tols) {
  const Vector& c = idx.center.coords;
  double r = (q - c).norm();
  if (idx.radii.size() == 0 || r <= tols.zero) return point_result(q, c, idx.center.id);

  // Candidate member ordinals: the plain point-ANN plus one per slice of the
  // radii grid.  Segments are then scored exactly.
  std::vector<std::size_t> cand;
  cand.push_back(idx.point_ann.query(q).first);
  const double eps = idx.epsilon;
  const std::size_t N =
      static_cast<std::size_t>(std::ceil(32.0 / (eps * eps)));
  const double step = (eps * eps / 16.0) * r;
  for (std::size_t i = 1; i <= N; ++i) {
    double ri = static_cast<double>(i) * step;
    if (ri > idx.radii(0)) break;
    cand.push_back(slice_ordinal_query(idx, q, ri).first);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  QueryResult best = point_result(q, c, idx.center.id);  // distance r fallback
  for (std::size_t j : cand) {
    QueryResult cur =
        segment_result(q, c, idx.center.id,
                       idx.members.col(static_cast<Eigen::Index>(j)),
                       idx.ids[j]);
    if (better_result(cur, best)) best = cur;
  }
  return best;
}

// ----------------------------------------------------------------- online --

OnlineSegmentIndex online_segment_build(PointSet P, double epsilon,
                                        AnnBackend backend,
                                        const Tolerances& tols) {
  if (P.size() < 2)
    fail(ErrorCode::TooFewPoints, "need at least two points for segments");
  OnlineSegmentIndex idx;
  idx.epsilon = epsilon;
  idx.points = std::move(P);
  idx.stars.reserve(static_cast<std::size_t>(idx.points.size()));
  for (Eigen::Index j = 0; j < idx.points.size(); ++j)
    idx.stars.push_back(
        star_build(idx.points, idx.points.point(static_cast<std::size_t>(j)),
                   epsilon, backend, tols));
  return idx;
}

QueryResult online_segment_query(const OnlineSegmentIndex& idx, VectorRef q,
                                 const Tolerances& tols) {
  QueryResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const StarIndex& star : idx.stars) {
    QueryResult cur = star_query(star, q, tols);
    if (better_result(cur, best)) best = std::move(cur);
  }
  return best;
}

}  // namespace sparsegeom
