#include "sparsegeom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparsegeom {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateBase: return "DegenerateBase";
    case ErrorCode::DegenerateAux: return "DegenerateAux";
    case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::OnFlat: return "OnFlat";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::NonUniformInput: return "NonUniformInput";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptySlice: return "EmptySlice";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::NotVerticallyAligned: return "NotVerticallyAligned";
    case ErrorCode::QueryOutsidePrism: return "QueryOutsidePrism";
    case ErrorCode::CoincidentWithQuery: return "CoincidentWithQuery";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionNot4: return "DimensionNot4";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::SLR: return "slr";
    case Variant::ANLF: return "anlf";
    case Variant::AffineSLR: return "affine-slr";
    case Variant::ANIF: return "anif";
    case Variant::ConvexSLR: return "convex-slr";
    case Variant::ANIS: return "anis";
    case Variant::Segment: return "segment";
  }
  return "unknown";
}

Matrix affine_diffs(MatrixRef S) {
  Matrix D(S.rows(), S.cols() > 0 ? S.cols() - 1 : 0);
  for (Eigen::Index i = 1; i < S.cols(); ++i) D.col(i - 1) = S.col(i) - S.col(0);
  return D;
}

double min_singular_value(MatrixRef M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

FlatProjection flat_distance(MatrixRef S, VectorRef q, const Tolerances& tols) {
  if (S.cols() == 0) fail(ErrorCode::EmptySet, "flat_distance needs points");
  FlatProjection out;
  if (S.cols() == 1) {
    out.projection = S.col(0);
    out.coeffs = Vector::Ones(1);
    out.distance = (q - S.col(0)).norm();
    return out;
  }
  Matrix D = affine_diffs(S);
  if (min_singular_value(D) <= tols.rank)
    fail(ErrorCode::DegenerateBase, "affinely dependent spanning points");
  Vector x = D.colPivHouseholderQr().solve(q - S.col(0));
  out.projection = S.col(0) + D * x;
  out.coeffs.resize(S.cols());
  out.coeffs(0) = 1.0 - x.sum();
  out.coeffs.tail(S.cols() - 1) = x;
  out.distance = (q - out.projection).norm();
  return out;
}

FlatProjection linear_flat_distance(MatrixRef S, VectorRef q) {
  if (S.cols() == 0) fail(ErrorCode::EmptySet, "linear_flat_distance needs points");
  FlatProjection out;
  out.coeffs = S.colPivHouseholderQr().solve(q);
  out.projection = S * out.coeffs;
  out.distance = (q - out.projection).norm();
  return out;
}

double point_segment_distance(VectorRef q, VectorRef a, VectorRef b,
                              double* t_out) {
  Vector ab = b - a;
  double len2 = ab.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
  if (t_out) *t_out = t;
  return (q - (a + t * ab)).norm();
}

namespace {

// Recursive nearest-face search.  `sel` indexes into the deduplicated
// columns; ties resolve toward lexicographically smaller id sets.
SimplexWitness simplex_rec(const Matrix& S, const std::vector<std::size_t>& ids,
                           std::vector<Eigen::Index>& sel, VectorRef q,
                           const Tolerances& tols) {
  const Eigen::Index m = static_cast<Eigen::Index>(sel.size());
  if (m == 1) {
    SimplexWitness w;
    w.vertex_ids = {ids[static_cast<std::size_t>(sel[0])]};
    w.nearest = S.col(sel[0]);
    w.barycentric = Vector::Ones(1);
    w.distance = (q - w.nearest).norm();
    return w;
  }
  Matrix face(S.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) face.col(i) = S.col(sel[i]);

  Matrix D = affine_diffs(face);
  bool have_interior = false;
  SimplexWitness best;
  best.distance = std::numeric_limits<double>::infinity();
  if (min_singular_value(D) > tols.rank) {
    Vector x = D.colPivHouseholderQr().solve(q - face.col(0));
    Vector bary(m);
    bary(0) = 1.0 - x.sum();
    bary.tail(m - 1) = x;
    if (bary.minCoeff() >= -tols.face_slack) {
      best.nearest = face.col(0) + D * x;
      best.distance = (q - best.nearest).norm();
      best.barycentric = bary;
      best.vertex_ids.resize(static_cast<std::size_t>(m));
      for (Eigen::Index i = 0; i < m; ++i)
        best.vertex_ids[static_cast<std::size_t>(i)] =
            ids[static_cast<std::size_t>(sel[i])];
      have_interior = true;
    }
  }
  if (!have_interior) {
    // Projection falls outside (or the face is flat): the nearest point lies
    // on some facet, so recurse over all of them.
    for (Eigen::Index drop = 0; drop < m; ++drop) {
      std::vector<Eigen::Index> sub;
      sub.reserve(static_cast<std::size_t>(m) - 1);
      for (Eigen::Index i = 0; i < m; ++i)
        if (i != drop) sub.push_back(sel[i]);
      SimplexWitness w = simplex_rec(S, ids, sub, q, tols);
      if (w.distance < best.distance ||
          (w.distance == best.distance && w.vertex_ids < best.vertex_ids))
        best = std::move(w);
    }
  }
  return best;
}

}  // namespace

SimplexWitness simplex_distance(MatrixRef S, const std::vector<std::size_t>& ids,
                                VectorRef q, const Tolerances& tols) {
  if (S.cols() == 0) fail(ErrorCode::EmptySet, "simplex_distance needs points");
  if (ids.size() != static_cast<std::size_t>(S.cols()))
    fail(ErrorCode::InvalidArgument, "ids must label every column");
  if (S.cols() > 6)
    fail(ErrorCode::InvalidArgument, "simplex_distance supports at most 6 vertices");

  // Drop exact duplicates (they only repeat faces).
  std::vector<Eigen::Index> sel;
  for (Eigen::Index i = 0; i < S.cols(); ++i) {
    bool dup = false;
    for (Eigen::Index j : sel)
      if (S.col(i) == S.col(j)) { dup = true; break; }
    if (!dup) sel.push_back(i);
  }
  Matrix Sd(S.rows(), static_cast<Eigen::Index>(sel.size()));
  std::vector<std::size_t> idd(sel.size());
  for (std::size_t i = 0; i < sel.size(); ++i) {
    Sd.col(static_cast<Eigen::Index>(i)) = S.col(sel[i]);
    idd[i] = ids[static_cast<std::size_t>(sel[i])];
  }
  std::vector<Eigen::Index> all(sel.size());
  for (std::size_t i = 0; i < sel.size(); ++i)
    all[i] = static_cast<Eigen::Index>(i);
  SimplexWitness w = simplex_rec(Sd, idd, all, q, tols);

  // Canonical output order: ascending ids.
  std::vector<std::size_t> perm(w.vertex_ids.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return w.vertex_ids[a] < w.vertex_ids[b];
  });
  SimplexWitness out = w;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.vertex_ids[i] = w.vertex_ids[perm[i]];
    out.barycentric(static_cast<Eigen::Index>(i)) =
        w.barycentric(static_cast<Eigen::Index>(perm[i]));
  }
  return out;
}

namespace {

// Modified Gram-Schmidt step with one re-orthogonalization pass; returns the
// residual norm before normalization.
double mgs_append(std::vector<Vector>& Q, Vector v) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Vector& u : Q) v -= u.dot(v) * u;
  double n = v.norm();
  if (n > 0) Q.push_back(v / n);
  return n;
}

// Orthonormal completion of the span of Q to all of R^d (deterministic
// Householder QR of [Q | I]).
Matrix complete_basis(const std::vector<Vector>& Q, Eigen::Index d) {
  const Eigen::Index m = static_cast<Eigen::Index>(Q.size());
  Matrix A(d, m + d);
  for (Eigen::Index i = 0; i < m; ++i) A.col(i) = Q[static_cast<std::size_t>(i)];
  A.rightCols(d) = Matrix::Identity(d, d);
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Qfull = qr.householderQ() * Matrix::Identity(d, d);
  return Qfull.rightCols(d - m);
}

std::vector<Vector> flat_mgs(const BaseSet& B, const Tolerances& tols) {
  if (B.size() < 1) fail(ErrorCode::EmptySet, "base needs at least one member");
  if (B.size() >= 2) {
    Matrix D = affine_diffs(B.members);
    if (min_singular_value(D) <= tols.rank)
      fail(ErrorCode::DegenerateBase, "base members affinely dependent");
  }
  std::vector<Vector> Q;
  for (Eigen::Index i = 1; i < B.size(); ++i) {
    double n = mgs_append(Q, B.members.col(i) - B.members.col(0));
    if (n <= tols.rank)
      fail(ErrorCode::DegenerateBase, "base members affinely dependent");
  }
  return Q;
}

}  // namespace

namespace {

CanonicalFrame assemble_frame(const BaseSet& B, const std::vector<Vector>& Q,
                              const Matrix& complement) {
  const Eigen::Index d = B.dim();
  const Eigen::Index m = B.size();
  CanonicalFrame F;
  F.origin = B.members.col(0);
  F.flat_basis.resize(d, m - 1);
  for (Eigen::Index i = 0; i < m - 1; ++i)
    F.flat_basis.col(i) = Q[static_cast<std::size_t>(i)];
  F.complement_basis = complement;
  F.base_coords.resize(m - 1, m);
  for (Eigen::Index i = 0; i < m; ++i)
    F.base_coords.col(i) =
        F.flat_basis.transpose() * (B.members.col(i) - F.origin);
  return F;
}

}  // namespace

CanonicalFrame orthonormal_frame(const BaseSet& B, VectorRef aux1,
                                 VectorRef aux2, const Tolerances& tols) {
  const Eigen::Index d = B.dim();
  const Eigen::Index m = B.size();
  std::vector<Vector> flat = flat_mgs(B, tols);
  if (d < m + 1)
    fail(ErrorCode::InvalidArgument,
         "ambient dimension too small for two auxiliary directions");
  std::vector<Vector> Q = flat;
  if (mgs_append(Q, aux1 - B.members.col(0)) <= tols.rank)
    fail(ErrorCode::DegenerateAux, "aux1 lies on the base flat");
  if (mgs_append(Q, aux2 - B.members.col(0)) <= tols.rank)
    fail(ErrorCode::DegenerateAux, "aux2 lies on the flat of base and aux1");

  Matrix complement(d, d - m + 1);
  complement.col(0) = Q[static_cast<std::size_t>(m - 1)];
  complement.col(1) = Q[static_cast<std::size_t>(m)];
  if (d - m + 1 > 2) complement.rightCols(d - m - 1) = complete_basis(Q, d);
  return assemble_frame(B, flat, complement);
}

CanonicalFrame frame_for_flat(const BaseSet& B, const Tolerances& tols) {
  const Eigen::Index d = B.dim();
  const Eigen::Index m = B.size();
  if (m > d)
    fail(ErrorCode::InvalidArgument, "base larger than ambient dimension");
  std::vector<Vector> flat = flat_mgs(B, tols);
  return assemble_frame(B, flat, complete_basis(flat, d));
}

std::pair<Vector, Vector> default_aux(const BaseSet& B, const Tolerances& tols) {
  if (B.dim() < B.size() + 1)
    fail(ErrorCode::InvalidArgument,
         "ambient dimension too small for two auxiliary directions");
  std::vector<Vector> Q = flat_mgs(B, tols);
  Matrix comp = complete_basis(Q, B.dim());
  Vector b = B.members.col(0);
  return {b + comp.col(0), b + comp.col(1)};
}

Vector flat_coords(const CanonicalFrame& F, VectorRef x) {
  return F.flat_basis.transpose() * (x - F.origin);
}

Vector complement_coords(const CanonicalFrame& F, VectorRef x) {
  return F.complement_basis.transpose() * (x - F.origin);
}

double flat_height(const CanonicalFrame& F, VectorRef x) {
  Vector r = x - F.origin;
  return (r - F.flat_basis * (F.flat_basis.transpose() * r)).norm();
}

Vector g_coords(const CanonicalFrame& F, VectorRef x) {
  const Eigen::Index m = F.base_size();
  Vector g(m);
  g.head(m - 1) = flat_coords(F, x);
  g(m - 1) = flat_height(F, x);
  return g;
}

Vector g_to_ambient(const CanonicalFrame& F, VectorRef g) {
  const Eigen::Index m = F.base_size();
  return F.origin + F.flat_basis * g.head(m - 1) + F.ext1() * g(m - 1);
}

Vector direction(const CanonicalFrame& F, VectorRef x, const Tolerances& tols) {
  Vector r = x - F.origin;
  Vector resid = r - F.flat_basis * (F.flat_basis.transpose() * r);
  double n = resid.norm();
  if (n <= tols.zero) fail(ErrorCode::OnFlat, "point lies on the base flat");
  return F.complement_basis.transpose() * (resid / n);
}

std::optional<Vector> trilaterate(const CanonicalFrame& F, VectorRef lengths,
                                  const Tolerances& tols) {
  const Eigen::Index m = F.base_size();
  if (lengths.size() != m)
    fail(ErrorCode::InvalidArgument, "need one length per base member");
  if ((lengths.array() < 0).any())
    fail(ErrorCode::InvalidArgument, "lengths must be nonnegative");

  // With a_1 = 0, differencing |y - a_i|^2 + h^2 = l_i^2 against the first
  // equation gives 2 a_i . y = l_1^2 - l_i^2 + |a_i|^2.
  Vector y(m - 1);
  if (m > 1) {
    Matrix A(m - 1, m - 1);
    Vector rhs(m - 1);
    for (Eigen::Index i = 1; i < m; ++i) {
      A.row(i - 1) = 2.0 * F.base_coords.col(i).transpose();
      rhs(i - 1) = lengths(0) * lengths(0) - lengths(i) * lengths(i) +
                   F.base_coords.col(i).squaredNorm();
    }
    y = A.colPivHouseholderQr().solve(rhs);
  }
  double h2 = lengths(0) * lengths(0) - y.squaredNorm();
  if (h2 < -tols.height_slack) return std::nullopt;
  Vector g(m);
  g.head(m - 1) = y;
  g(m - 1) = h2 > 0 ? std::sqrt(h2) : 0.0;
  return g;
}

OrbitPoint orbit_point(VectorRef q_flat, double r, double len,
                       const Tolerances& tols) {
  if (r < 0) fail(ErrorCode::InvalidArgument, "radius must be nonnegative");
  if (len < 0 || len > r + tols.zero)
    fail(ErrorCode::OutOfRange, "orbit parameter outside [0, r]");
  double s2 = std::max(r * r - len * len, 0.0);
  double s = std::sqrt(s2);
  OrbitPoint o;
  o.g.resize(q_flat.size() + 1);
  o.g.head(q_flat.size()) = q_flat;
  o.g(q_flat.size()) = s;
  o.h.resize(q_flat.size() + 2);
  o.h.head(q_flat.size()) = q_flat;
  o.h(q_flat.size()) = s;
  o.h(q_flat.size() + 1) = len;
  return o;
}

namespace {

Vector base_angles_impl(const CanonicalFrame& F, VectorRef gpoint,
                        bool check_height, const Tolerances& tols) {
  const Eigen::Index m = F.base_size();
  if (gpoint.size() != m)
    fail(ErrorCode::InvalidArgument, "expected halfflat coordinates");
  const double h = gpoint(m - 1);
  if (check_height && h < tols.rank)
    fail(ErrorCode::DegenerateSimplex, "apex within tolerance of the base flat");

  Vector angles(m);
  if (m == 1) {
    // Single-member base: the simplex is the vertical segment [0, h]; the
    // monotone surrogate atan(h) plays the role of the dihedral angle.
    angles(0) = std::atan(h);
    return angles;
  }
  // Work in halfflat coordinates; base members lift to height 0.
  auto lift = [&](Eigen::Index i) {
    Vector v = Vector::Zero(m);
    v.head(m - 1) = F.base_coords.col(i);
    return v;
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    // Ridge through all base members except i; measure the dihedral angle
    // along it between the base facet and the facet through the apex.
    std::vector<Vector> ridge;
    Vector anchor;
    bool have_anchor = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      if (!have_anchor) {
        anchor = lift(j);
        have_anchor = true;
      } else {
        mgs_append(ridge, lift(j) - anchor);
      }
    }
    auto perp = [&](Vector v) {
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& u : ridge) v -= u.dot(v) * u;
      return v;
    };
    Vector u = perp(lift(i) - anchor);
    double un = u.norm();
    if (un <= tols.rank)
      fail(ErrorCode::DegenerateBase, "base members affinely dependent");
    u /= un;
    Vector w = perp(gpoint - anchor);
    double wn = w.norm();
    if (wn <= tols.zero) {
      angles(i) = 0.0;  // apex on the ridge itself
      continue;
    }
    w /= wn;
    double c = std::clamp(u.dot(w), -1.0, 1.0);
    angles(i) = std::acos(c);
  }
  return angles;
}

}  // namespace

Vector base_angles(const CanonicalFrame& F, VectorRef gpoint,
                   const Tolerances& tols) {
  return base_angles_impl(F, gpoint, /*check_height=*/true, tols);
}

Vector base_angles_unchecked(const CanonicalFrame& F, VectorRef gpoint,
                             const Tolerances& tols) {
  return base_angles_impl(F, gpoint, /*check_height=*/false, tols);
}

Vector gsimplex_barycentric(const CanonicalFrame& F, VectorRef apex,
                            VectorRef z) {
  const Eigen::Index m = F.base_size();
  if (apex.size() != m || z.size() != m)
    fail(ErrorCode::InvalidArgument, "expected halfflat coordinates");
  // Vertices: base members at height 0, then the apex.  Full-dimensional in
  // halfflat coordinates whenever the apex height is nonzero.
  Matrix A(m, m);
  for (Eigen::Index i = 1; i < m; ++i) {
    A.col(i - 1).head(m - 1) = F.base_coords.col(i) - F.base_coords.col(0);
    A.col(i - 1)(m - 1) = 0.0;
  }
  A.col(m - 1).head(m - 1) = apex.head(m - 1) - F.base_coords.col(0);
  A.col(m - 1)(m - 1) = apex(m - 1);
  Vector rhs(m);
  rhs.head(m - 1) = z.head(m - 1) - F.base_coords.col(0);
  rhs(m - 1) = z(m - 1);
  Vector x = A.colPivHouseholderQr().solve(rhs);
  Vector bary(m + 1);
  bary(0) = 1.0 - x.sum();
  bary.tail(m) = x;
  return bary;
}

std::vector<Eigen::Index> affinely_independent_subset(MatrixRef S,
                                                      const Tolerances& tols) {
  std::vector<Eigen::Index> keep;
  if (S.cols() == 0) return keep;
  keep.push_back(0);
  std::vector<Vector> Q;
  for (Eigen::Index i = 1; i < S.cols(); ++i) {
    Vector v = S.col(i) - S.col(0);
    std::vector<Vector> trial = Q;
    if (mgs_append(trial, v) > tols.rank) {
      Q = std::move(trial);
      keep.push_back(i);
    }
  }
  return keep;
}

}  // namespace sparsegeom
