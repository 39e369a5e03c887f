#pragma once

// ANN flat in a bouquet: all flats spanned by a fixed affinely independent
// base plus one more point.  In the coordinates of the base's orthogonal
// complement every such flat becomes a line through the origin, so a signed
// unit-direction ANN answers bouquet queries; the positive variant keeps one
// direction per point and measures distance to the halfflat on its side.
// Enumerating one bouquet per (k-1)-subset yields the nearest induced
// (k-1)-flat (ANIF) and, with the origin adjoined to every base, the nearest
// induced linear k-flat (ANLF).

#include "sparsegeom/ann.hpp"
#include "sparsegeom/geometry.hpp"
#include "sparsegeom/types.hpp"

#include <cstdint>
#include <vector>

namespace sparsegeom {

// ---------------------------------------------------------------- bouquet --

struct BouquetIndex {
  BaseSet base;
  CanonicalFrame frame;
  Matrix dirs;                        // unit directions, complement coords
  Matrix points;                      // ambient point per direction column
  std::vector<std::size_t> back_map;  // dirs column -> original point id
  std::vector<std::size_t> excluded;  // point ids lying on the base flat
  bool signed_pair = true;            // two directions per point
  AnnIndex ann;
  bool has_ann = false;
};

using PositiveBouquetIndex = BouquetIndex;  // one direction per point

// Points of P whose ids appear in B are skipped; other points within
// tols.rank of the base flat are excluded and recorded.  Throws
// DegenerateBase for affinely dependent bases, EmptySet when nothing remains
// to hang in the bouquet.
BouquetIndex bouquet_build(const BaseSet& B, const PointSet& P,
                           const AnnConfig& cfg,
                           const Tolerances& tols = default_tols());

PositiveBouquetIndex positive_bouquet_build(
    const BaseSet& B, const PointSet& P, const AnnConfig& cfg,
    const Tolerances& tols = default_tols());

// (1+ε)-ANN over the flats of the bouquet; the retrieved flat is scored by
// its exact distance.  Queries within tols.zero of the base flat return
// distance 0 with the base as witness (q lies on every flat of the bouquet).
// When on-flat points were excluded at build time, dist(q, F_B) is offered
// as an additional candidate so the flats they induce stay covered.
QueryResult bouquet_query(const BouquetIndex& idx, VectorRef q,
                          const Tolerances& tols = default_tols());

// As bouquet_query, but against the positive halfflats pF(B, p): when the
// complement projection of q has non-positive component along a retrieved
// direction, the nearest point lies on F_B itself.
QueryResult positive_bouquet_query(const PositiveBouquetIndex& idx, VectorRef q,
                                   const Tolerances& tols = default_tols());

// Exact distance from q to the positive halfflat spanned by the base of F
// and the direction u (unit, complement coordinates): clamp the component of
// q along u at zero, then project.
double halfflat_distance(const CanonicalFrame& F, VectorRef u, VectorRef q);

// ------------------------------------------------------------- enumeration --

// One bouquet per lexicographic (k-1)-subset of P.  Affinely dependent bases
// get no bouquet; their supersets are covered by an exact per-point scan at
// query time.
struct InducedFlatIndex {
  PointSet points;
  std::size_t k = 2;
  Variant variant = Variant::ANIF;
  std::vector<BouquetIndex> bouquets;
  std::vector<std::vector<std::size_t>> fallback_bases;
};

inline constexpr std::size_t kDefaultStructureBudget = 10'000'000;

// Nearest induced (k-1)-flat: flats spanned by k points of P.
// 2 <= k <= 6, n >= k; throws InstanceTooLarge when C(n, k-1) exceeds the
// budget.
InducedFlatIndex anif_build(const PointSet& P, std::size_t k, double epsilon,
                            AnnBackend backend = AnnBackend::Exact,
                            std::size_t budget = kDefaultStructureBudget,
                            const Tolerances& tols = default_tols());
QueryResult anif_query(const InducedFlatIndex& idx, VectorRef q,
                       const Tolerances& tols = default_tols());

// Nearest induced linear k-flat: spans of k points of P, i.e. the origin is
// adjoined to every base.  Witnesses and weights report data points only.
InducedFlatIndex anlf_build(const PointSet& P, std::size_t k, double epsilon,
                            AnnBackend backend = AnnBackend::Exact,
                            std::size_t budget = kDefaultStructureBudget,
                            const Tolerances& tols = default_tols());
QueryResult anlf_query(const InducedFlatIndex& idx, VectorRef q,
                       const Tolerances& tols = default_tols());

}  // namespace sparsegeom
