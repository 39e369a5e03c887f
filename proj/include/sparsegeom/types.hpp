#pragma once

// Shared types for the sparsegeom library: point sets, query results,
// centralized tolerances and error codes.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sparsegeom {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatX<double>;
using Vector = VecX<double>;
using MatrixRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;

inline constexpr const char* kLibraryVersion = "0.1.0";

// All geometric tolerances in one place.  `rank` guards rank / degeneracy
// decisions (smallest singular values, orthonormality residuals); `zero`
// guards directional zero tests (is a residual direction meaningful at all).
struct Tolerances {
  double rank = 1e-9;
  double zero = 1e-12;
  // Barycentric slack: faces accept coordinates down to -face_slack in the
  // recursive nearest-simplex computation, containment queries use the looser
  // containment_slack (closed-simplex membership).
  double face_slack = 1e-12;
  double containment_slack = 1e-10;
  // trilateration clamps squared heights in [-height_slack, 0) to zero.
  double height_slack = 1e-9;
  // relative bisection tolerance for critical values along an orbit.
  double bisect_rel = 1e-10;
};

inline const Tolerances& default_tols() {
  static const Tolerances t;
  return t;
}

enum class ErrorCode {
  DegenerateBase,
  DegenerateAux,
  DegenerateSimplex,
  OnFlat,
  OutOfRange,
  EmptySet,
  BadEpsilon,
  NonUniformInput,
  IndexOutOfRange,
  EmptySlice,
  TooFewPoints,
  InstanceTooLarge,
  NotVerticallyAligned,
  QueryOutsidePrism,
  CoincidentWithQuery,
  DimensionMismatch,
  DimensionNot4,
  ParseError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode c);

class GeomError : public std::runtime_error {
 public:
  GeomError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw GeomError(code, what);
}

// A point with its identity in the owning set.
struct Point {
  Vector coords;
  std::size_t id = 0;
};

// Immutable set of points, stored column-wise (dim x size).  Ids are the
// column positions.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(Matrix pts) : pts_(std::move(pts)) {
    if (pts_.rows() < 1) fail(ErrorCode::InvalidArgument, "points need dim >= 1");
    if (!pts_.allFinite())
      fail(ErrorCode::InvalidArgument, "points must be finite");
  }

  Eigen::Index dim() const { return pts_.rows(); }
  Eigen::Index size() const { return pts_.cols(); }
  const Matrix& data() const { return pts_; }
  auto col(Eigen::Index i) const { return pts_.col(i); }
  Point point(std::size_t i) const {
    return Point{pts_.col(static_cast<Eigen::Index>(i)),
                 static_cast<std::size_t>(i)};
  }

 private:
  Matrix pts_;
};

// Base sequences may contain the adjoined origin (linear variants); it gets
// this sentinel id and never appears in reported witnesses.
inline constexpr std::int64_t kOriginId = -1;

// Ordered base sequence spanning a flat.  `members` column i pairs with
// `ids[i]`; ids refer to the owning PointSet except for kOriginId.
struct BaseSet {
  Matrix members;
  std::vector<std::int64_t> ids;

  Eigen::Index size() const { return members.cols(); }
  Eigen::Index dim() const { return members.rows(); }
};

enum class Variant {
  SLR,
  ANLF,
  AffineSLR,
  ANIF,
  ConvexSLR,
  ANIS,
  Segment,
};

const char* variant_name(Variant v);

// Combination weights (point id, coefficient) describing the reported
// nearest combination.  Affine/convex variants sum to one; convex weights
// are nonnegative up to slack; linear weights are unconstrained.
using Tau = std::vector<std::pair<std::size_t, double>>;

struct QueryResult {
  Variant variant = Variant::SLR;
  double distance = 0.0;
  std::vector<std::size_t> witness_ids;  // sorted ascending
  Tau tau;
};

// Tie-break order used everywhere a best candidate is kept: smaller distance
// first, then lexicographically smaller witness id list.
inline bool better_result(const QueryResult& a, const QueryResult& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.witness_ids < b.witness_ids;
}

struct SimplexWitness {
  std::vector<std::size_t> vertex_ids;  // support of the nearest face
  Vector nearest;                       // nearest point of the simplex
  Vector barycentric;                   // aligned with vertex_ids, sums to 1
  double distance = 0.0;
};

}  // namespace sparsegeom
