#include "sparsegeom/book.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace sparsegeom {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

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

bool in_prism(const BaseSet& B, VectorRef q, const Tolerances& tols) {
  // A single-point base spans no directions: everything projects onto the
  // point itself, so its prism is the whole space.
  if (B.size() == 1) return true;
  const FlatProjection fp = flat_distance(B.members, q, tols);
  return fp.coeffs.minCoeff() > tols.face_slack;
}

// Exact result for the page hanging on kept ordinal `ord`.
QueryResult page_result(const BookIndex& idx, std::size_t ord, VectorRef q,
                        const Tolerances& tols) {
  const Eigen::Index m = idx.base.size();
  Matrix S(idx.base.members.rows(), m + 1);
  S.leftCols(m) = idx.base.members;
  S.col(m) = idx.points.col(static_cast<Eigen::Index>(ord));
  std::vector<std::size_t> vids;
  vids.reserve(static_cast<std::size_t>(m) + 1);
  for (std::int64_t id : idx.base.ids)
    vids.push_back(static_cast<std::size_t>(id));
  vids.push_back(idx.ids[ord]);
  const SimplexWitness w = simplex_distance(S, vids, q, tols);
  QueryResult r;
  r.variant = Variant::ANIS;
  r.distance = w.distance;
  r.witness_ids = vids;
  std::sort(r.witness_ids.begin(), r.witness_ids.end());
  for (std::size_t i = 0; i < w.vertex_ids.size(); ++i)
    r.tau.emplace_back(w.vertex_ids[i],
                       w.barycentric(static_cast<Eigen::Index>(i)));
  std::sort(r.tau.begin(), r.tau.end());
  return r;
}

// Canonical set over the kept ordinals [ords, ords + count): member ids in
// tree order plus a positive bouquet sharing the book's frame.
std::int32_t build_canonical(BookIndex& idx, const std::size_t* ords,
                             std::size_t count) {
  CanonicalSet cs;
  cs.ords.assign(ords, ords + count);
  cs.members.reserve(count);
  PositiveBouquetIndex& b = cs.bouquet;
  b.base = idx.base;
  b.frame = idx.frame;
  b.signed_pair = false;
  b.dirs.resize(idx.dirs.rows(), static_cast<Eigen::Index>(count));
  b.points.resize(idx.points.rows(), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const auto o = static_cast<Eigen::Index>(ords[i]);
    cs.members.push_back(idx.ids[ords[i]]);
    b.back_map.push_back(idx.ids[ords[i]]);
    b.dirs.col(static_cast<Eigen::Index>(i)) = idx.dirs.col(o);
    b.points.col(static_cast<Eigen::Index>(i)) = idx.points.col(o);
  }
  b.ann = ann_build(b.dirs, AnnConfig{idx.epsilon, idx.backend});
  b.has_ann = true;
  idx.membership += count;
  idx.canon.push_back(std::move(cs));
  return static_cast<std::int32_t>(idx.canon.size() - 1);
}

// Segment tree of one layer over `members` (kept ordinals), sorted by angle
// coordinate `depth`; inner payloads are next-layer trees over the node's
// members, last-layer payloads are canonical sets.  Returns the layer index
// or -1 when there are no members.
std::int32_t build_layer(BookIndex& idx, Eigen::Index depth,
                         std::vector<std::size_t> members) {
  if (members.empty()) return -1;
  const Eigen::Index dims = idx.base.size();
  std::sort(members.begin(), members.end(),
            [&](std::size_t a, std::size_t b) {
              const double va = idx.angles(depth, static_cast<Eigen::Index>(a));
              const double vb = idx.angles(depth, static_cast<Eigen::Index>(b));
              if (va != vb) return va < vb;
              return idx.ids[a] < idx.ids[b];
            });
  BookIndex::Layer layer;
  layer.order = members;
  layer.vals.reserve(members.size());
  for (std::size_t o : members)
    layer.vals.push_back(idx.angles(depth, static_cast<Eigen::Index>(o)));

  const std::function<std::int32_t(std::int32_t, std::int32_t)> make =
      [&](std::int32_t lo, std::int32_t hi) -> std::int32_t {
    BookIndex::Node node;
    node.lo = lo;
    node.hi = hi;
    if (depth + 1 < dims) {
      node.payload = build_layer(
          idx, depth + 1,
          std::vector<std::size_t>(members.begin() + lo, members.begin() + hi));
    } else {
      node.payload = build_canonical(idx, members.data() + lo,
                                     static_cast<std::size_t>(hi - lo));
    }
    if (hi - lo >= 2) {
      const std::int32_t mid = lo + (hi - lo + 1) / 2;
      node.left = make(lo, mid);
      node.right = make(mid, hi);
    }
    layer.nodes.push_back(node);
    return static_cast<std::int32_t>(layer.nodes.size() - 1);
  };
  layer.root = make(0, static_cast<std::int32_t>(members.size()));
  idx.layers.push_back(std::move(layer));
  return static_cast<std::int32_t>(idx.layers.size() - 1);
}

// Canonical decomposition of the half-open angle box given by lows/ups
// (entries of ups may be +infinity) over the layered tree rooted at layer
// `li`.  Appends disjoint canonical-set handles to out.
void collect_box(const BookIndex& idx, std::int32_t li, Eigen::Index depth,
                 const Vector& lows, const Vector& ups,
                 std::vector<std::int32_t>& out) {
  if (li < 0) return;
  const BookIndex::Layer& layer = idx.layers[static_cast<std::size_t>(li)];
  const auto sz = static_cast<std::int32_t>(layer.vals.size());
  const auto lb = static_cast<std::int32_t>(
      std::lower_bound(layer.vals.begin(), layer.vals.end(), lows(depth)) -
      layer.vals.begin());
  const auto ub =
      std::isinf(ups(depth))
          ? sz
          : static_cast<std::int32_t>(std::lower_bound(layer.vals.begin(),
                                                       layer.vals.end(),
                                                       ups(depth)) -
                                      layer.vals.begin());
  if (lb >= ub) return;
  const Eigen::Index dims = idx.base.size();
  const std::function<void(std::int32_t)> walk = [&](std::int32_t ni) {
    const BookIndex::Node& node = layer.nodes[static_cast<std::size_t>(ni)];
    if (node.hi <= lb || node.lo >= ub) return;
    if (lb <= node.lo && node.hi <= ub) {
      if (depth + 1 < dims) {
        collect_box(idx, node.payload, depth + 1, lows, ups, out);
      } else {
        out.push_back(node.payload);
      }
      return;
    }
    if (node.left >= 0) {
      walk(node.left);
      walk(node.right);
    }
  };
  walk(layer.root);
}

// Minimal orbit parameter whose canonical point lies in the page of kept
// ordinal `ord` (monotone along the orbit), bisected to tols.bisect_rel * r;
// +infinity when even the flat projection stays outside.
double critical_of(const BookIndex& idx, const Vector& q_flat, double r,
                   std::size_t ord, const Tolerances& tols) {
  const auto apex = idx.gpoints.col(static_cast<Eigen::Index>(ord));
  const auto inside = [&](double x) {
    const Vector g = orbit_point(q_flat, r, x, tols).g;
    return gsimplex_barycentric(idx.frame, apex, g).minCoeff() >=
           -tols.containment_slack;
  };
  if (inside(0.0)) return 0.0;
  if (!inside(r)) return kInfinity;
  double lo = 0.0;
  double hi = r;
  while (hi - lo > tols.bisect_rel * r) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

bool prism_contains(const Prism& prism, VectorRef q, const Tolerances& tols) {
  return in_prism(prism.base, q, tols);
}

BookIndex book_build(const BaseSet& B, const PointSet& P, double epsilon,
                     AnnBackend backend, const Tolerances& tols) {
  BookIndex idx;
  idx.base = B;
  idx.frame = frame_for_flat(B, tols);
  idx.epsilon = epsilon;
  idx.backend = backend;

  for (Eigen::Index j = 0; j < P.size(); ++j) {
    const std::size_t id = static_cast<std::size_t>(j);
    bool in_base = false;
    for (std::int64_t bid : B.ids)
      if (bid >= 0 && static_cast<std::size_t>(bid) == id) in_base = true;
    if (in_base) continue;
    if (flat_height(idx.frame, P.col(j)) <= tols.rank) {
      idx.excluded.push_back(id);
    } else {
      idx.ids.push_back(id);
    }
  }

  const auto m = static_cast<Eigen::Index>(idx.ids.size());
  idx.points.resize(P.dim(), m);
  idx.gpoints.resize(B.size(), m);
  idx.angles.resize(B.size(), m);
  idx.dirs.resize(P.dim() - B.size() + 1, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto col = P.col(static_cast<Eigen::Index>(idx.ids[i]));
    idx.points.col(i) = col;
    idx.gpoints.col(i) = g_coords(idx.frame, col);
    idx.angles.col(i) = base_angles(idx.frame, idx.gpoints.col(i), tols);
    idx.dirs.col(i) = direction(idx.frame, col, tols);
  }

  std::vector<std::size_t> ords(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < ords.size(); ++i) ords[i] = i;
  idx.tree_pos = build_layer(idx, 0, std::move(ords));
  // Halfflat coordinates never go below the base flat, so the mirrored tree
  // of the opposite sign class has no members.
  idx.tree_neg = build_layer(idx, 0, {});
  return idx;
}

std::vector<std::int32_t> simplices_containing(const BookIndex& idx,
                                               VectorRef qpt,
                                               const Tolerances& tols) {
  std::vector<std::int32_t> out;
  if (idx.tree_pos < 0) return out;
  const Vector a = base_angles_unchecked(idx.frame, qpt, tols);
  const Vector ups = Vector::Constant(a.size(), kInfinity);
  collect_box(idx, idx.tree_pos, 0, a, ups, out);
  // The negative tree would answer mirrored queries; it is empty by
  // construction, so only the positive tree is consulted.
  return out;
}

std::vector<std::int32_t> simplices_between(const BookIndex& idx,
                                            VectorRef p_low, VectorRef p_high,
                                            const Tolerances& tols) {
  const Eigen::Index m = idx.base.size();
  if (p_low.size() != m || p_high.size() != m)
    fail(ErrorCode::DimensionMismatch,
         "canonical points need one coordinate per base member");
  for (Eigen::Index j = 0; j + 1 < m; ++j)
    if (std::abs(p_low(j) - p_high(j)) > tols.height_slack)
      fail(ErrorCode::NotVerticallyAligned,
           "the points must share their flat coordinates");
  if (p_high(m - 1) < p_low(m - 1) - tols.height_slack)
    fail(ErrorCode::NotVerticallyAligned,
         "the second point must not lie below the first");

  std::vector<std::int32_t> out;
  if (idx.tree_pos < 0) return out;
  const Vector a = base_angles_unchecked(idx.frame, p_low, tols);
  const Vector ahigh = base_angles_unchecked(idx.frame, p_high, tols);
  // Pages containing p_low but not p_high dominate a but miss a' = ahigh in
  // at least one coordinate; splitting on the first miss gives one half-open
  // box per coordinate, pairwise disjoint by the pivot.  Coordinates before
  // the pivot must clear both thresholds: off the prism's vertical lines the
  // upper angles need not dominate the lower ones.
  for (Eigen::Index i = 0; i < m; ++i) {
    Vector lows(m);
    Vector ups = Vector::Constant(m, kInfinity);
    for (Eigen::Index j = 0; j < m; ++j)
      lows(j) = j < i ? std::max(a(j), ahigh(j)) : a(j);
    ups(i) = ahigh(i);
    collect_box(idx, idx.tree_pos, 0, lows, ups, out);
  }
  return out;
}

double critical_value(const BookIndex& idx, VectorRef q, std::size_t p,
                      const Tolerances& tols) {
  if (!in_prism(idx.base, q, tols))
    fail(ErrorCode::QueryOutsidePrism,
         "query projects outside the base simplex");
  const auto it = std::find(idx.ids.begin(), idx.ids.end(), p);
  if (it == idx.ids.end())
    fail(ErrorCode::IndexOutOfRange, "no page hangs on that point id");
  const auto ord = static_cast<std::size_t>(it - idx.ids.begin());
  return critical_of(idx, flat_coords(idx.frame, q),
                     flat_height(idx.frame, q), ord, tols);
}

QueryResult page_query(const BookIndex& idx, VectorRef q, std::uint64_t seed,
                       const Tolerances& tols) {
  if (!in_prism(idx.base, q, tols))
    fail(ErrorCode::QueryOutsidePrism,
         "query projects outside the base simplex");
  if (idx.ids.empty()) fail(ErrorCode::EmptySet, "book has no pages");

  std::optional<QueryResult> best;
  const auto offer = [&](std::size_t ord) {
    QueryResult res = page_result(idx, ord, q, tols);
    if (!best || better_result(res, *best)) best = std::move(res);
  };

  const double r = flat_height(idx.frame, q);
  if (r <= tols.zero) {
    // q lies inside the base simplex itself, hence on every page.
    offer(0);
    return *best;
  }

  const Vector qf = flat_coords(idx.frame, q);
  const Vector u = direction(idx.frame, q, tols);
  const auto orbit_g = [&](double x) { return orbit_point(qf, r, x, tols).g; };

  // ANN over one batch of canonical sets: offers every retrieved page and
  // reports the smallest halfflat distance seen.
  const auto probe = [&](const std::vector<std::int32_t>& handles) {
    double tau = kInfinity;
    for (std::int32_t h : handles) {
      const CanonicalSet& cs = idx.canon[static_cast<std::size_t>(h)];
      const auto [j, chord] = cs.bouquet.ann.query(u);
      (void)chord;
      const std::size_t ord = cs.ords[j];
      tau = std::min(tau, halfflat_distance(
                              idx.frame,
                              idx.dirs.col(static_cast<Eigen::Index>(ord)), q));
      offer(ord);
    }
    return tau;
  };

  std::mt19937_64 rng(seed);
  double alpha = 0.0;
  double beta = r;
  const int cap = 8 * static_cast<int>(std::ceil(std::log2(
                          static_cast<double>(idx.ids.size()) + 2.0)));
  bool capped = true;
  for (int it = 0; it < cap; ++it) {
    const auto window =
        simplices_between(idx, orbit_g(beta), orbit_g(alpha), tols);
    std::size_t total = 0;
    for (std::int32_t h : window)
      total += idx.canon[static_cast<std::size_t>(h)].members.size();
    if (total == 0) {
      capped = false;
      break;
    }
    std::size_t t =
        std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
    std::size_t pick = 0;
    for (std::int32_t h : window) {
      const CanonicalSet& cs = idx.canon[static_cast<std::size_t>(h)];
      if (t < cs.ords.size()) {
        pick = cs.ords[t];
        break;
      }
      t -= cs.ords.size();
    }
    double gamma = critical_of(idx, qf, r, pick, tols);
    offer(pick);
    if (!std::isfinite(gamma)) continue;  // unreachable for prism queries
    gamma = std::clamp(gamma, alpha, beta);
    const double tau = probe(simplices_containing(idx, orbit_g(gamma), tols));
    if (tau < gamma) {
      beta = gamma;
    } else {
      alpha = gamma;
    }
  }
  if (capped) {
    // Iteration budget exhausted: resolve the surviving window exactly.
    for (std::int32_t h :
         simplices_between(idx, orbit_g(beta), orbit_g(alpha), tols))
      for (std::size_t ord : idx.canon[static_cast<std::size_t>(h)].ords)
        offer(ord);
  }
  probe(simplices_containing(idx, orbit_g(beta), tols));
  if (!best)  // no orbit point hit any page: score everything
    for (std::size_t ord = 0; ord < idx.ids.size(); ++ord) offer(ord);
  return *best;
}

InducedSimplexIndex anis_build(const PointSet& P, std::size_t k,
                               double epsilon, AnnBackend backend,
                               std::size_t budget, const Tolerances& tols) {
  if (k < 2 || k > 5)
    fail(ErrorCode::InvalidArgument, "simplex families support 2 <= k <= 5");
  const auto n = static_cast<std::size_t>(P.size());
  if (n < k) fail(ErrorCode::TooFewPoints, "need at least k points");
  if (binomial_capped(n, k - 1, budget) > budget)
    fail(ErrorCode::InstanceTooLarge,
         "too many bases for the structure budget");

  InducedSimplexIndex idx;
  idx.points = P;
  idx.k = k;
  idx.epsilon = epsilon;
  idx.backend = backend;
  const Eigen::Index d = P.dim();
  for_each_subset(n, k - 1, [&](const std::vector<std::size_t>& sub) {
    BaseSet B;
    B.members.resize(d, static_cast<Eigen::Index>(sub.size()));
    for (std::size_t i = 0; i < sub.size(); ++i) {
      B.members.col(static_cast<Eigen::Index>(i)) =
          P.col(static_cast<Eigen::Index>(sub[i]));
      B.ids.push_back(static_cast<std::int64_t>(sub[i]));
    }
    try {
      idx.books.push_back(book_build(B, P, epsilon, backend, tols));
    } catch (const GeomError& e) {
      if (e.code() != ErrorCode::DegenerateBase) throw;
      idx.degenerate_bases.push_back(sub);
    }
  });
  return idx;
}

QueryResult anis_query(const InducedSimplexIndex& idx, VectorRef q,
                       std::uint64_t seed, const Tolerances& tols) {
  const auto n = static_cast<std::size_t>(idx.points.size());
  std::optional<QueryResult> best;
  const auto fold = [&](QueryResult res) {
    if (!best || better_result(res, *best)) best = std::move(res);
  };

  // Exact sweep of all faces on at most k-1 vertices.  This also covers
  // every page over an affinely dependent base and every flat page of an
  // on-flat point: such pages are flat polytopes, so each of their points is
  // a convex combination of at most k-1 vertices.
  const Eigen::Index d = idx.points.dim();
  for (std::size_t s = 1; s < idx.k; ++s) {
    for_each_subset(n, s, [&](const std::vector<std::size_t>& sub) {
      Matrix S(d, static_cast<Eigen::Index>(sub.size()));
      for (std::size_t i = 0; i < sub.size(); ++i)
        S.col(static_cast<Eigen::Index>(i)) =
            idx.points.col(static_cast<Eigen::Index>(sub[i]));
      const SimplexWitness w = simplex_distance(S, sub, q, tols);
      QueryResult res;
      res.variant = Variant::ANIS;
      res.distance = w.distance;
      res.witness_ids = sub;
      for (std::size_t i = 0; i < w.vertex_ids.size(); ++i)
        res.tau.emplace_back(w.vertex_ids[i],
                             w.barycentric(static_cast<Eigen::Index>(i)));
      std::sort(res.tau.begin(), res.tau.end());
      fold(std::move(res));
    });
  }

  // Page queries in every book whose prism holds q; the nearest simplex with
  // an interior nearest point is reachable through one of them.
  std::uint64_t salt = 0;
  for (const BookIndex& book : idx.books) {
    ++salt;
    if (book.ids.empty()) continue;
    if (!in_prism(book.base, q, tols)) continue;
    fold(page_query(book, q, seed + kDefaultQuerySeed * salt, tols));
  }
  return *best;  // the single-vertex sweep always offers a candidate
}

}  // namespace sparsegeom
