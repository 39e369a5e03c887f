#pragma once

// Core geometry: orthonormal frames over base sequences, distances to
// induced flats / simplices, canonical coordinates (trilateration, orbit
// points, base angles).  Everything here is exact up to floating point; the
// approximate structures in the other headers are built on top of these.

#include "sparsegeom/types.hpp"

#include <optional>

namespace sparsegeom {

// Orthonormal coordinates attached to the flat F_B of a base sequence B with
// |B| = m points.  flat_basis spans F_B - origin (m-1 columns);
// complement_basis spans the orthogonal complement (d-m+1 columns), its
// first two columns being the auxiliary directions that extend the frame to
// the halfflat G (ext1) and the halfspace slab H (ext1, ext2).
struct CanonicalFrame {
  Vector origin;
  Matrix flat_basis;
  Matrix complement_basis;
  // Base members expressed in flat coordinates, one column each; column 0 is
  // always the zero vector (the origin is the first member).
  Matrix base_coords;

  Eigen::Index dim() const { return origin.size(); }
  Eigen::Index base_size() const { return base_coords.cols(); }
  auto ext1() const { return complement_basis.col(0); }
  auto ext2() const { return complement_basis.col(1); }
};

// Distance from a query to an affine (or linear) flat together with the
// projection and its combination coefficients over the spanning points.
struct FlatProjection {
  double distance = 0.0;
  Vector projection;
  Vector coeffs;
};

// Columns i of the result are S.col(i+1) - S.col(0).
Matrix affine_diffs(MatrixRef S);

// Smallest singular value; 0 for empty matrices.
double min_singular_value(MatrixRef M);

// Distance to the affine hull of the columns of S.  Coefficients sum to 1.
// Throws DegenerateBase when the columns are affinely dependent.
FlatProjection flat_distance(MatrixRef S, VectorRef q,
                             const Tolerances& tols = default_tols());

// Distance to span(S ∪ {0}); coefficients are unconstrained.  Rank-deficient
// S is allowed (least-squares solve still yields the minimizer).
FlatProjection linear_flat_distance(MatrixRef S, VectorRef q);

// Distance to the convex hull of the columns of S (at most 6 columns).
// `ids` labels the columns; the witness reports the face supporting the
// nearest point.  Handles duplicate and affinely dependent columns by face
// recursion.
SimplexWitness simplex_distance(MatrixRef S, const std::vector<std::size_t>& ids,
                                VectorRef q,
                                const Tolerances& tols = default_tols());

// Distance from q to the segment [a, b]; optionally reports the parameter
// t in [0, 1] of the nearest point a + t (b - a).
double point_segment_distance(VectorRef q, VectorRef a, VectorRef b,
                              double* t_out = nullptr);

// Builds the frame for base B extended by two auxiliary points off the flat
// (they fix the directions of the halfflat G and the slab H).  Modified
// Gram-Schmidt with re-orthogonalization over (B members, aux1, aux2) in that
// order; the rest of the complement is completed deterministically.
// Throws DegenerateBase / DegenerateAux.
CanonicalFrame orthonormal_frame(const BaseSet& B, VectorRef aux1,
                                 VectorRef aux2,
                                 const Tolerances& tols = default_tols());

// Frame without caller-chosen auxiliary points: the whole complement basis
// comes from the deterministic Householder completion of the flat basis, so
// ext1/ext2 are the first completion directions whenever they exist.  Works
// for complements of any dimension >= 1.
CanonicalFrame frame_for_flat(const BaseSet& B,
                              const Tolerances& tols = default_tols());

// Deterministic default auxiliary points: the first two directions of the
// orthogonal complement of F_B (Householder completion of the flat basis),
// offset from the base origin.  orthonormal_frame(B, default_aux(B)...) and
// frame_for_flat(B) agree.
std::pair<Vector, Vector> default_aux(const BaseSet& B,
                                      const Tolerances& tols = default_tols());

// Coordinates of x - origin in the flat basis (length m-1).
Vector flat_coords(const CanonicalFrame& F, VectorRef x);

// Coordinates of x - origin in the complement basis (length d-m+1).
Vector complement_coords(const CanonicalFrame& F, VectorRef x);

// Distance from x to the flat F_B.
double flat_height(const CanonicalFrame& F, VectorRef x);

// Canonical halfflat coordinates of x: (flat coordinates, distance to F_B),
// length m.  Every point maps here; points on opposite sides of the flat in
// the same vertical line coincide.
Vector g_coords(const CanonicalFrame& F, VectorRef x);

// Ambient position of a point given in halfflat coordinates (y, h):
// origin + flat_basis y + ext1 h.
Vector g_to_ambient(const CanonicalFrame& F, VectorRef g);

// Unit direction of x away from the flat, in complement coordinates.
// Throws OnFlat when x is within tols.zero of F_B.
Vector direction(const CanonicalFrame& F, VectorRef x,
                 const Tolerances& tols = default_tols());

// Position in halfflat coordinates of the point at the given distances from
// the base members (lengths[i] pairs with base member i).  Returns nullopt
// when the distances are not realizable (squared height below
// -tols.height_slack); squared heights in [-tols.height_slack, 0) clamp to 0.
std::optional<Vector> trilaterate(const CanonicalFrame& F, VectorRef lengths,
                                  const Tolerances& tols = default_tols());

// The two canonical positions of the orbit of a query at parameter `len`:
// g = (q_flat, sqrt(r^2 - len^2)) and h = (q_flat, sqrt(r^2 - len^2), len).
// Throws OutOfRange when len > r + tols.zero.
struct OrbitPoint {
  Vector g;
  Vector h;
};
OrbitPoint orbit_point(VectorRef q_flat, double r, double len,
                       const Tolerances& tols = default_tols());

// Base angles of the simplex with the given apex (halfflat coordinates,
// positive height): entry i is the dihedral angle between the facet omitting
// base member i and the base facet.  Containment between simplices over the
// same base is equivalent to componentwise angle dominance.  For |B| = 1 the
// angle degenerates to atan(height), which preserves the dominance order.
// Throws DegenerateSimplex when the apex lies within tols.rank of the flat.
Vector base_angles(const CanonicalFrame& F, VectorRef gpoint,
                   const Tolerances& tols = default_tols());

// Same with height 0 allowed (containment queries hit the closed interval
// [0, π]).
Vector base_angles_unchecked(const CanonicalFrame& F, VectorRef gpoint,
                             const Tolerances& tols = default_tols());

// Barycentric coordinates of a halfflat-coordinate point z with respect to
// the simplex with vertices (base members, apex); apex must have positive
// height.  Length m+1, ordered (base..., apex).
Vector gsimplex_barycentric(const CanonicalFrame& F, VectorRef apex,
                            VectorRef z);

// Greedy maximal affinely independent subset of the columns of S (indices,
// first column always kept).
std::vector<Eigen::Index> affinely_independent_subset(
    MatrixRef S, const Tolerances& tols = default_tols());

}  // namespace sparsegeom
