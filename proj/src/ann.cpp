#include "sparsegeom/ann.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sparsegeom {

namespace {
constexpr std::int32_t kLeafSize = 8;
}

std::int32_t AnnIndex::build_node(std::int32_t lo, std::int32_t hi) {
  Node node;
  node.lo = lo;
  node.hi = hi;
  Vector blo = pts_.col(perm_[static_cast<std::size_t>(lo)]);
  Vector bhi = blo;
  for (std::int32_t i = lo + 1; i < hi; ++i) {
    const auto c = pts_.col(perm_[static_cast<std::size_t>(i)]);
    blo = blo.cwiseMin(c);
    bhi = bhi.cwiseMax(c);
  }

  Eigen::Index axis;
  double extent = (bhi - blo).maxCoeff(&axis);
  if (hi - lo > kLeafSize && extent > 0.0) {
    double mn = blo(axis), mx = bhi(axis);
    double split = 0.5 * (mn + mx);
    if (!(split > mn)) split = mx;  // guard against rounding collapse
    auto begin = perm_.begin() + lo, end = perm_.begin() + hi;
    auto mid = std::stable_partition(begin, end, [&](std::int32_t j) {
      return pts_(axis, j) < split;
    });
    std::int32_t cut = static_cast<std::int32_t>(mid - perm_.begin());
    if (cut > lo && cut < hi) {
      node.axis = static_cast<int>(axis);
      node.split = split;
      node.left = build_node(lo, cut);
      node.right = build_node(cut, hi);
    }
  }
  nodes_.push_back(node);
  box_lo_.push_back(std::move(blo));
  box_hi_.push_back(std::move(bhi));
  return static_cast<std::int32_t>(nodes_.size()) - 1;
}

AnnIndex ann_build(Matrix points, const AnnConfig& cfg) {
  if (points.cols() == 0) fail(ErrorCode::EmptySet, "cannot index zero points");
  if (!(cfg.epsilon > 0.0) || cfg.epsilon > 8.0)
    fail(ErrorCode::BadEpsilon, "epsilon must lie in (0, 8]");
  AnnIndex idx;
  idx.pts_ = std::move(points);
  idx.cfg_ = cfg;
  if (cfg.backend == AnnBackend::Tree) {
    idx.prune_factor_ = (1.0 + cfg.epsilon) * (1.0 + cfg.epsilon);
    idx.perm_.resize(static_cast<std::size_t>(idx.pts_.cols()));
    std::iota(idx.perm_.begin(), idx.perm_.end(), 0);
    idx.root_ = idx.build_node(0, static_cast<std::int32_t>(idx.pts_.cols()));
  }
  return idx;
}

namespace {

double box_dist2(const Vector& lo, const Vector& hi, VectorRef q) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    double d = std::max({lo(i) - q(i), q(i) - hi(i), 0.0});
    s += d * d;
  }
  return s;
}

}  // namespace

void AnnIndex::search(std::int32_t n, VectorRef q, double& best_d2,
                      std::size_t& best_id) const {
  const Node& node = nodes_[static_cast<std::size_t>(n)];
  if (node.axis < 0) {
    for (std::int32_t i = node.lo; i < node.hi; ++i) {
      std::int32_t j = perm_[static_cast<std::size_t>(i)];
      double d2 = (q - pts_.col(j)).squaredNorm();
      if (d2 < best_d2 ||
          (d2 == best_d2 && static_cast<std::size_t>(j) < best_id)) {
        best_d2 = d2;
        best_id = static_cast<std::size_t>(j);
      }
    }
    return;
  }
  std::int32_t first = node.left, second = node.right;
  if (q(node.axis) >= node.split) std::swap(first, second);
  for (std::int32_t child : {first, second}) {
    double bd2 = box_dist2(box_lo_[static_cast<std::size_t>(child)],
                           box_hi_[static_cast<std::size_t>(child)], q);
    // Skip subtrees that cannot improve on best/(1+ε).
    if (bd2 * prune_factor_ >= best_d2) continue;
    search(child, q, best_d2, best_id);
  }
}

std::pair<std::size_t, double> AnnIndex::query(VectorRef q) const {
  if (pts_.cols() == 0) fail(ErrorCode::EmptySet, "empty index");
  if (q.size() != pts_.rows())
    fail(ErrorCode::DimensionMismatch, "query dimension differs from index");
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_id = 0;
  if (cfg_.backend == AnnBackend::Exact) {
    for (Eigen::Index j = 0; j < pts_.cols(); ++j) {
      double d2 = (q - pts_.col(j)).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best_id = static_cast<std::size_t>(j);
      }
    }
  } else {
    search(root_, q, best_d2, best_id);
  }
  return {best_id, std::sqrt(best_d2)};
}

}  // namespace sparsegeom
