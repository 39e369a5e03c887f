#pragma once

// Nearest induced simplex over a fixed base ("book"): every off-flat point
// hangs one page, the simplex over the base plus that point.  In canonical
// halfflat coordinates page containment is componentwise dominance of base
// angles, so a layered range tree over the angle vectors reports the pages
// containing a canonical point as O(log^{k-1} n) disjoint canonical sets,
// each carrying a positive-bouquet ANN over exactly its members.  A
// randomized binary search over the critical values of the query's orbit
// then finds a near-optimal page; one book per (k-1)-subset plus an exact
// sweep of the lower-dimensional faces yields the nearest induced
// (k-1)-simplex (ANIS).

#include "sparsegeom/ann.hpp"
#include "sparsegeom/bouquet.hpp"
#include "sparsegeom/geometry.hpp"
#include "sparsegeom/types.hpp"

#include <cstdint>
#include <vector>

namespace sparsegeom {

// --------------------------------------------------------------- prism --

// Membership region of a base: queries whose projection onto the base flat
// lands strictly inside the base simplex (all barycentric weights > 1e-12).
struct Prism {
  BaseSet base;
};

bool prism_contains(const Prism& prism, VectorRef q,
                    const Tolerances& tols = default_tols());

// ---------------------------------------------------------------- book --

// Canonical node of the angle range tree: the pages hanging on `members`
// plus a positive-bouquet ANN over exactly those members.  The bouquet
// shares the book's frame; only the direction columns are per-node.
struct CanonicalSet {
  std::vector<std::size_t> members;  // original point ids, tree order
  std::vector<std::size_t> ords;     // matching kept-point ordinals
  PositiveBouquetIndex bouquet;
};

struct BookIndex {
  BaseSet base;
  CanonicalFrame frame;
  double epsilon = 0.25;
  AnnBackend backend = AnnBackend::Exact;

  std::vector<std::size_t> ids;       // kept point ids (off the base flat)
  std::vector<std::size_t> excluded;  // on-flat point ids (flat pages)
  Matrix points;   // ambient coordinates of kept points, column per ordinal
  Matrix gpoints;  // canonical halfflat coordinates, column per ordinal
  Matrix angles;   // base-angle vectors, column per ordinal
  Matrix dirs;     // unit directions in complement coordinates, per ordinal

  // Layered range tree: one layer per angle coordinate, segment-tree nodes
  // over that layer's sort order.  Inner payloads name next-layer trees,
  // last-layer payloads name canonical sets.  The two roots split the sign
  // classes of the canonical height; the mirrored negative tree stays empty
  // because halfflat coordinates are nonnegative by construction.
  struct Node {
    std::int32_t lo = 0, hi = 0;
    std::int32_t left = -1, right = -1;
    std::int32_t payload = -1;
  };
  struct Layer {
    std::vector<double> vals;         // this coordinate, ascending
    std::vector<std::size_t> order;   // sorted position -> kept ordinal
    std::vector<Node> nodes;
    std::int32_t root = -1;
  };
  std::vector<Layer> layers;
  std::vector<CanonicalSet> canon;
  std::int32_t tree_pos = -1;  // layer index; -1 when no kept points
  std::int32_t tree_neg = -1;
  std::size_t membership = 0;  // total canonical-set membership
};

// Builds the book for base B over P \ B: canonical coordinates, base
// angles, the angle range tree, and a positive-bouquet ANN per canonical
// node, built with the caller's epsilon.  Points on the base flat hang flat
// pages; they are excluded and recorded (every point of such a page is a
// convex combination of at most |B| of its vertices, so face sweeps cover
// them).  Throws DegenerateBase.
BookIndex book_build(const BaseSet& B, const PointSet& P, double epsilon,
                     AnnBackend backend = AnnBackend::Exact,
                     const Tolerances& tols = default_tols());

// Handles (indices into idx.canon) of disjoint canonical sets whose union
// is exactly the pages containing qpt, a canonical halfflat point with
// nonnegative height.
std::vector<std::int32_t> simplices_containing(
    const BookIndex& idx, VectorRef qpt,
    const Tolerances& tols = default_tols());

// Disjoint canonical sets covering the pages that contain p_low but not
// p_high, where p_high sits vertically above p_low (same flat coordinates,
// at least the same height).  Throws NotVerticallyAligned.
std::vector<std::int32_t> simplices_between(
    const BookIndex& idx, VectorRef p_low, VectorRef p_high,
    const Tolerances& tols = default_tols());

// Minimal x in [0, r] whose orbit point lies in the page of point p
// (containment is monotone along the orbit; bisection to tols.bisect_rel
// times r).  Returns +infinity when even the flat projection at x = r is
// outside the page -- impossible for queries inside the prism.  Throws
// QueryOutsidePrism / IndexOutOfRange.
double critical_value(const BookIndex& idx, VectorRef q, std::size_t p,
                      const Tolerances& tols = default_tols());

inline constexpr std::uint64_t kDefaultQuerySeed = 0x9e3779b97f4a7c15ull;

// Nearest page, within (1 + 2 eps) of the best page whose nearest point is
// interior: randomized binary search over the critical values of the orbit
// of q, scoring every ANN candidate by its exact simplex distance along the
// way; after 8 ceil(log2(n + 2)) iterations the surviving candidates are
// scanned exactly.  Deterministic given (idx, q, seed).  Throws
// QueryOutsidePrism / EmptySet.
QueryResult page_query(const BookIndex& idx, VectorRef q,
                       std::uint64_t seed = kDefaultQuerySeed,
                       const Tolerances& tols = default_tols());

// ---------------------------------------------------------------- anis --

// One book per lexicographic (k-1)-subset of P.  Affinely dependent bases
// are recorded and skipped: their pages are flat polytopes, already covered
// by the exact face sweep of anis_query.
struct InducedSimplexIndex {
  PointSet points;
  std::size_t k = 2;
  double epsilon = 0.25;
  AnnBackend backend = AnnBackend::Exact;
  std::vector<BookIndex> books;
  std::vector<std::vector<std::size_t>> degenerate_bases;
};

// Nearest induced (k-1)-simplex: convex hulls of k points of P.
// 2 <= k <= 5, n >= k; throws InstanceTooLarge when C(n, k-1) exceeds the
// budget.
InducedSimplexIndex anis_build(const PointSet& P, std::size_t k,
                               double epsilon,
                               AnnBackend backend = AnnBackend::Exact,
                               std::size_t budget = kDefaultStructureBudget,
                               const Tolerances& tols = default_tols());

// Minimum over an exact sweep of all faces on at most k-1 vertices and a
// page query in every book whose prism contains q.
QueryResult anis_query(const InducedSimplexIndex& idx, VectorRef q,
                       std::uint64_t seed = kDefaultQuerySeed,
                       const Tolerances& tols = default_tols());

}  // namespace sparsegeom
