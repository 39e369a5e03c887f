#pragma once

// Single-shot 2(1+eps)-approximate nearest induced segment.  The query point
// becomes the center of a sphere and every data point is projected radially
// onto it.  The chord between one point's spherical reflection and another
// point's projection sandwiches the exact query-to-segment distance within a
// factor of two, so a single (1+eps)-ANN lookup per point over the projected
// set finds a near-optimal partner; every retrieved pair is re-scored by the
// exact segment distance.

#include "sparsegeom/ann.hpp"
#include "sparsegeom/types.hpp"

#include <cstddef>
#include <vector>

namespace sparsegeom {

// Radial projection of the distinct data points onto the sphere of radius
// `radius` around `center`, with an ANN index over the projected columns.
// `back_map[j]` is the data id that produced projected column j (duplicate
// points collapse onto their lowest id).  Every projected column sits on the
// sphere to within 1e-9 * radius.
struct SphericalScene {
  Vector center;
  double radius = 1.0;
  Matrix projected;
  std::vector<std::size_t> back_map;
  AnnIndex ann;
};

// Intersection of the ray from `center` through `p` with the sphere of
// radius `radius` around `center`: center + radius * (p - center) / |p -
// center|.  The reflection is the antipodal intersection, center - radius *
// (p - center) / |p - center|.  Throws CoincidentWithQuery when p lies
// within zero-slack * radius of the center.
Vector spherical_project(VectorRef center, double radius, VectorRef p,
                         const Tolerances& tols = default_tols());
Vector spherical_reflect(VectorRef center, double radius, VectorRef p,
                         const Tolerances& tols = default_tols());

// Deduplicates the points, projects the distinct ones, and indexes the
// projections.  Throws EmptySet on an empty input, InvalidArgument on a
// non-positive radius, DimensionMismatch, CoincidentWithQuery if a point
// sits on the center, and BadEpsilon via the ANN config.
SphericalScene spherical_scene_build(const PointSet& P, VectorRef center,
                                     double radius, double epsilon,
                                     AnnBackend backend = AnnBackend::Exact,
                                     const Tolerances& tols = default_tols());

// 2(1+eps)-approximate closest induced segment: one reflection lookup per
// distinct point, every retrieved pair scored exactly, best exact distance
// wins.  The sphere radius only rescales the projected set and never the
// answer; it is exposed precisely so that invariance can be checked.
// Throws TooFewPoints (n < 2), DimensionMismatch, InvalidArgument.
QueryResult offline_nearest_segment(const PointSet& P, VectorRef q,
                                    double epsilon,
                                    AnnBackend backend = AnnBackend::Exact,
                                    double radius = 1.0,
                                    const Tolerances& tols = default_tols());

}  // namespace sparsegeom
