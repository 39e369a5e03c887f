#include "sparsegeom/bouquet.hpp"

#include <algorithm>
#include <limits>

namespace sparsegeom {

namespace {

// Least-squares projection onto the affine hull of the columns of S.  Unlike
// flat_distance this never rejects dependent columns: a rank-deficient hull
// is simply a lower-dimensional flat and the residual is still its exact
// distance, which is what the degenerate-base fallback needs.
FlatProjection robust_flat(MatrixRef S, VectorRef q) {
  FlatProjection out;
  if (S.cols() == 1) {
    out.projection = S.col(0);
    out.coeffs = Vector::Ones(1);
    out.distance = (q - S.col(0)).norm();
    return out;
  }
  Matrix D = affine_diffs(S);
  Vector x = D.colPivHouseholderQr().solve(q - S.col(0));
  out.projection = S.col(0) + D * x;
  out.coeffs.resize(S.cols());
  out.coeffs(0) = 1.0 - x.sum();
  out.coeffs.tail(S.cols() - 1) = x;
  out.distance = (q - out.projection).norm();
  return out;
}

// QueryResult for the affine hull of the labelled columns of S, scored
// exactly.  Synthetic labels below zero (the adjoined origin) are dropped
// from the witness and the weights; the remaining weights still reconstruct
// the nearest point because the origin contributes nothing.
QueryResult flat_result(Variant v, MatrixRef S,
                        const std::vector<std::int64_t>& ids, VectorRef q) {
  FlatProjection fp = robust_flat(S, q);
  QueryResult r;
  r.variant = v;
  r.distance = fp.distance;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0) continue;
    r.tau.emplace_back(static_cast<std::size_t>(ids[i]),
                       fp.coeffs(static_cast<Eigen::Index>(i)));
  }
  std::sort(r.tau.begin(), r.tau.end());
  for (const auto& [id, w] : r.tau) {
    (void)w;
    r.witness_ids.push_back(id);
  }
  return r;
}

BouquetIndex build_impl(const BaseSet& B, const PointSet& P,
                        const AnnConfig& cfg, bool signed_pair,
                        const Tolerances& tols) {
  BouquetIndex idx;
  idx.base = B;
  idx.frame = frame_for_flat(B, tols);
  idx.signed_pair = signed_pair;

  const Eigen::Index c = idx.frame.complement_basis.cols();
  std::vector<Vector> kept;
  std::vector<Eigen::Index> kept_src;
  for (Eigen::Index j = 0; j < P.size(); ++j) {
    const std::size_t id = static_cast<std::size_t>(j);
    bool in_base = false;
    for (std::int64_t bid : B.ids)
      if (bid >= 0 && static_cast<std::size_t>(bid) == id) in_base = true;
    if (in_base) continue;
    if (flat_height(idx.frame, P.col(j)) < tols.rank) {
      idx.excluded.push_back(id);
      continue;
    }
    kept.push_back(direction(idx.frame, P.col(j), tols));
    kept_src.push_back(j);
    idx.back_map.push_back(id);
    if (signed_pair) {
      kept.push_back(-kept.back());
      kept_src.push_back(j);
      idx.back_map.push_back(id);
    }
  }
  if (kept.empty() && idx.excluded.empty())
    fail(ErrorCode::EmptySet, "bouquet needs points besides the base");

  idx.dirs.resize(c, static_cast<Eigen::Index>(kept.size()));
  idx.points.resize(P.dim(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    idx.dirs.col(static_cast<Eigen::Index>(i)) = kept[i];
    idx.points.col(static_cast<Eigen::Index>(i)) = P.col(kept_src[i]);
  }
  if (!kept.empty()) {
    idx.ann = ann_build(idx.dirs, cfg);
    idx.has_ann = true;
  }
  return idx;
}

// Base flat itself as a candidate, witnessed by the base plus the lowest
// excluded point: the flats induced by excluded points all coincide with
// F_B, so the extra point carries weight zero.
QueryResult base_flat_result(const BouquetIndex& idx, VectorRef q) {
  const std::size_t extra =
      *std::min_element(idx.excluded.begin(), idx.excluded.end());
  QueryResult r =
      flat_result(Variant::ANIF, idx.base.members, idx.base.ids, q);
  r.witness_ids.push_back(extra);
  r.tau.emplace_back(extra, 0.0);
  std::sort(r.witness_ids.begin(), r.witness_ids.end());
  std::sort(r.tau.begin(), r.tau.end());
  return r;
}

// Distance 0: q lies on F_B and hence on every flat of the bouquet.
QueryResult on_flat_result(const BouquetIndex& idx, VectorRef q) {
  return flat_result(Variant::ANIF, idx.base.members, idx.base.ids, q);
}

}  // namespace

BouquetIndex bouquet_build(const BaseSet& B, const PointSet& P,
                           const AnnConfig& cfg, const Tolerances& tols) {
  return build_impl(B, P, cfg, true, tols);
}

PositiveBouquetIndex positive_bouquet_build(const BaseSet& B, const PointSet& P,
                                            const AnnConfig& cfg,
                                            const Tolerances& tols) {
  return build_impl(B, P, cfg, false, tols);
}

namespace {

// Exact score of the flat induced by the base and direction column j.
QueryResult member_flat_result(const BouquetIndex& idx, Eigen::Index j,
                               VectorRef q) {
  Matrix S(idx.base.members.rows(), idx.base.members.cols() + 1);
  S.leftCols(idx.base.members.cols()) = idx.base.members;
  S.col(S.cols() - 1) = idx.points.col(j);
  std::vector<std::int64_t> ids = idx.base.ids;
  ids.push_back(
      static_cast<std::int64_t>(idx.back_map[static_cast<std::size_t>(j)]));
  return flat_result(Variant::ANIF, S, ids, q);
}

// As above against the positive halfflat: with the query on the non-positive
// side of the direction, the nearest point falls back to F_B and the member
// keeps weight zero.
QueryResult member_halfflat_result(const BouquetIndex& idx, Eigen::Index j,
                                   VectorRef q) {
  Vector cq = complement_coords(idx.frame, q);
  if (cq.dot(idx.dirs.col(j)) > 0.0)
    return member_flat_result(idx, j, q);
  QueryResult r =
      flat_result(Variant::ANIF, idx.base.members, idx.base.ids, q);
  const std::size_t pid = idx.back_map[static_cast<std::size_t>(j)];
  r.witness_ids.push_back(pid);
  r.tau.emplace_back(pid, 0.0);
  std::sort(r.witness_ids.begin(), r.witness_ids.end());
  std::sort(r.tau.begin(), r.tau.end());
  return r;
}

}  // namespace

QueryResult bouquet_query(const BouquetIndex& idx, VectorRef q,
                          const Tolerances& tols) {
  if (flat_height(idx.frame, q) <= tols.zero) return on_flat_result(idx, q);

  QueryResult best;
  best.distance = std::numeric_limits<double>::infinity();
  if (idx.has_ann) {
    Vector u = direction(idx.frame, q, tols);
    auto [j, d] = idx.ann.query(u);
    (void)d;
    best = member_flat_result(idx, static_cast<Eigen::Index>(j), q);
  }
  if (!idx.excluded.empty()) {
    QueryResult alt = base_flat_result(idx, q);
    if (better_result(alt, best)) best = alt;
  }
  return best;
}

QueryResult positive_bouquet_query(const PositiveBouquetIndex& idx, VectorRef q,
                                   const Tolerances& tols) {
  if (flat_height(idx.frame, q) <= tols.zero) return on_flat_result(idx, q);

  QueryResult best;
  best.distance = std::numeric_limits<double>::infinity();
  if (idx.has_ann) {
    Vector u = direction(idx.frame, q, tols);
    auto [j, d] = idx.ann.query(u);
    (void)d;
    best = member_halfflat_result(idx, static_cast<Eigen::Index>(j), q);
  }
  if (!idx.excluded.empty()) {
    QueryResult alt = base_flat_result(idx, q);
    if (better_result(alt, best)) best = alt;
  }
  return best;
}

double halfflat_distance(const CanonicalFrame& F, VectorRef u, VectorRef q) {
  Vector cq = complement_coords(F, q);
  const double along = cq.dot(u);
  if (along <= 0.0) return cq.norm();
  return (cq - along * u).norm();
}

// ------------------------------------------------------------- enumeration --

namespace {

// C(n, m), saturating just above the cap instead of overflowing.
std::size_t binomial_capped(std::size_t n, std::size_t m, std::size_t cap) {
  if (m > n) return 0;
  m = std::min(m, n - m);
  unsigned long long r = 1;
  for (std::size_t i = 1; i <= m; ++i) {
    const unsigned long long f = n - m + i;
    if (r > std::numeric_limits<unsigned long long>::max() / f) return cap + 1;
    r = r * f / i;  // exact: a running product of binomials stays integral
    if (r > cap) return cap + 1;
  }
  return static_cast<std::size_t>(r);
}

template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (idx[i] != i + n - k) break;
      if (i == 0) return;
    }
    ++idx[i];
    for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

InducedFlatIndex family_build(const PointSet& P, std::size_t k, double epsilon,
                              AnnBackend backend, std::size_t budget,
                              bool adjoin_origin, const Tolerances& tols) {
  if (k < 2 || k > 6)
    fail(ErrorCode::InvalidArgument, "flat families support 2 <= k <= 6");
  if (static_cast<std::size_t>(P.size()) < k)
    fail(ErrorCode::TooFewPoints, "need at least k points");

  const std::size_t n = static_cast<std::size_t>(P.size());
  if (binomial_capped(n, k - 1, budget) > budget)
    fail(ErrorCode::InstanceTooLarge,
         "base-subset count exceeds the structure budget");

  InducedFlatIndex idx;
  idx.points = P;
  idx.k = k;
  idx.variant = adjoin_origin ? Variant::ANLF : Variant::ANIF;
  const AnnConfig cfg{epsilon, backend};

  const Eigen::Index d = P.dim();
  for_each_subset(n, k - 1, [&](const std::vector<std::size_t>& sub) {
    BaseSet B;
    B.members.resize(d, static_cast<Eigen::Index>(k - 1) + (adjoin_origin ? 1 : 0));
    for (std::size_t i = 0; i < k - 1; ++i) {
      B.members.col(static_cast<Eigen::Index>(i)) =
          P.col(static_cast<Eigen::Index>(sub[i]));
      B.ids.push_back(static_cast<std::int64_t>(sub[i]));
    }
    if (adjoin_origin) {
      B.members.col(B.members.cols() - 1).setZero();
      B.ids.push_back(kOriginId);
    }
    try {
      idx.bouquets.push_back(bouquet_build(B, P, cfg, tols));
    } catch (const GeomError& e) {
      if (e.code() == ErrorCode::DegenerateBase) {
        idx.fallback_bases.push_back(sub);
      } else {
        throw;
      }
    }
  });
  return idx;
}

QueryResult family_query(const InducedFlatIndex& idx, VectorRef q,
                         const Tolerances& tols) {
  QueryResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const BouquetIndex& b : idx.bouquets) {
    QueryResult cur = bouquet_query(b, q, tols);
    if (better_result(cur, best)) best = cur;
  }
  // Affinely dependent bases: every flat they induce, scored exactly.
  const bool origin = idx.variant == Variant::ANLF;
  const Eigen::Index d = idx.points.dim();
  const Eigen::Index m = static_cast<Eigen::Index>(idx.k - 1) + (origin ? 1 : 0);
  for (const std::vector<std::size_t>& sub : idx.fallback_bases) {
    Matrix S(d, m + 1);
    std::vector<std::int64_t> ids;
    for (std::size_t i = 0; i < sub.size(); ++i) {
      S.col(static_cast<Eigen::Index>(i)) =
          idx.points.col(static_cast<Eigen::Index>(sub[i]));
      ids.push_back(static_cast<std::int64_t>(sub[i]));
    }
    if (origin) {
      S.col(m - 1).setZero();
      ids.push_back(kOriginId);
    }
    ids.push_back(0);
    for (Eigen::Index p = 0; p < idx.points.size(); ++p) {
      if (std::find(sub.begin(), sub.end(), static_cast<std::size_t>(p)) !=
          sub.end())
        continue;
      S.col(m) = idx.points.col(p);
      ids.back() = static_cast<std::int64_t>(p);
      QueryResult cur = flat_result(idx.variant, S, ids, q);
      if (better_result(cur, best)) best = cur;
    }
  }
  best.variant = idx.variant;
  return best;
}

}  // namespace

InducedFlatIndex anif_build(const PointSet& P, std::size_t k, double epsilon,
                            AnnBackend backend, std::size_t budget,
                            const Tolerances& tols) {
  return family_build(P, k, epsilon, backend, budget, false, tols);
}

QueryResult anif_query(const InducedFlatIndex& idx, VectorRef q,
                       const Tolerances& tols) {
  return family_query(idx, q, tols);
}

InducedFlatIndex anlf_build(const PointSet& P, std::size_t k, double epsilon,
                            AnnBackend backend, std::size_t budget,
                            const Tolerances& tols) {
  return family_build(P, k, epsilon, backend, budget, true, tols);
}

QueryResult anlf_query(const InducedFlatIndex& idx, VectorRef q,
                       const Tolerances& tols) {
  return family_query(idx, q, tols);
}

}  // namespace sparsegeom
