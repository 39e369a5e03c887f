#pragma once

// (1+ε)-ANN over stars of segments: the uniform-radius star, prefix-ANN
// over sorted orders, sliced-star queries at a fixed radius, the general
// star query on a radii grid, and the online nearest-induced-segment
// structure that takes the best over one star per input point.

#include "sparsegeom/ann.hpp"
#include "sparsegeom/types.hpp"

#include <cstdint>
#include <vector>

namespace sparsegeom {

// ---------------------------------------------------------------- uniform --

// Star with all member points at distance exactly 1 from the base: ANN over
// the shifted set {p - b} answers segment queries directly.
struct UniformStarIndex {
  Point base;
  std::vector<std::size_t> ids;  // member ids, input order
  Matrix shifted;                // p - b, unit columns
  AnnIndex ann;
};

// Throws NonUniformInput unless every member is at distance 1 from base
// within tols.rank.
UniformStarIndex uniform_star_build(const PointSet& P, const Point& base,
                                    const AnnConfig& cfg,
                                    const Tolerances& tols = default_tols());

// Requires ‖q - base‖ = 1 within tols.rank.  Returns the capped segment
// distance min(dist(q, segment(b, a)), 1) for the ANN member a.
QueryResult uniform_star_query(const UniformStarIndex& idx, VectorRef q,
                               const Tolerances& tols = default_tols());

// ----------------------------------------------------------------- prefix --

// Balanced tree over the input order; every node carries an AnnIndex over
// its contiguous range, so any prefix decomposes into O(log n) indexed sets.
class PrefixAnnIndex {
 public:
  PrefixAnnIndex() = default;

  static PrefixAnnIndex build(const Matrix& points, const AnnConfig& cfg);

  // (1+ε)-ANN over the prefix {p_1, …, p_i} (1-based i).  Throws
  // IndexOutOfRange unless 1 ≤ i ≤ n.
  std::pair<std::size_t, double> query(std::size_t i, VectorRef q) const;

  Eigen::Index size() const { return n_; }

  // Number of canonical sets consulted for a prefix (test hook).
  std::size_t cover_size(std::size_t i) const;

 private:
  struct Node {
    std::int32_t lo = 0, hi = 0;
    std::int32_t left = -1, right = -1;
    AnnIndex ann;
  };
  std::int32_t build_node(const Matrix& points, const AnnConfig& cfg,
                          std::int32_t lo, std::int32_t hi);

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  Eigen::Index n_ = 0;
};

inline std::pair<std::size_t, double> prefix_ann_query(
    const PrefixAnnIndex& idx, std::size_t i, VectorRef q) {
  return idx.query(i, q);
}

// ------------------------------------------------------------------- star --

// General star around a center: members sorted by decreasing distance from
// the center (ties by id), unit directions indexed by a prefix-ANN built at
// ε/4, plus a plain (1+ε/4)-ANN over the member points.
struct StarIndex {
  Point center;
  double epsilon = 0.25;
  AnnBackend backend = AnnBackend::Exact;
  std::vector<std::size_t> ids;  // sorted member ids
  Vector radii;                  // decreasing member distances from center
  Matrix members;                // member positions in sorted order
  Matrix dirs;                   // unit directions (p - c)/‖p - c‖
  PrefixAnnIndex prefix;
  AnnIndex point_ann;
};

// ε ∈ (0, 1].  Members coincident with the center (within tols.zero) are
// dropped; they contribute nothing beyond the center itself.
StarIndex star_build(const PointSet& P, const Point& center, double epsilon,
                     AnnBackend backend,
                     const Tolerances& tols = default_tols());

// ANN among the points of the star clipped to the sphere of radius r around
// the center: {c + r·u_i : ‖p_i - c‖ ≥ r}.  Throws EmptySlice when no member
// reaches radius r.  Returns (original member id, exact distance to the
// clipped point).
std::pair<std::size_t, double> sliced_star_query(const StarIndex& idx,
                                                 VectorRef q, double r);

// (1+ε)-ANN to star(c, members): one point-ANN, then sliced queries on the
// radii grid r_i = i(ε²/16)r for i = 1..⌈32/ε²⌉; every candidate segment is
// scored exactly.
QueryResult star_query(const StarIndex& idx, VectorRef q,
                       const Tolerances& tols = default_tols());

// ----------------------------------------------------------------- online --

// One star per input point; queries reduce over all stars by
// (distance, witness ids).
struct OnlineSegmentIndex {
  PointSet points;
  double epsilon = 0.25;
  std::vector<StarIndex> stars;
};

// Throws TooFewPoints unless n ≥ 2.
OnlineSegmentIndex online_segment_build(PointSet P, double epsilon,
                                        AnnBackend backend = AnnBackend::Exact,
                                        const Tolerances& tols = default_tols());

QueryResult online_segment_query(const OnlineSegmentIndex& idx, VectorRef q,
                                 const Tolerances& tols = default_tols());

}  // namespace sparsegeom
