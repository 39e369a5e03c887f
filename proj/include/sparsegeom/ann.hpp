#pragma once

// Pluggable (1+ε)-approximate nearest neighbor backend.  Exact is a linear
// scan with lowest-id tie-break (the oracle); Tree is a kd-tree with
// shrink-to-fit midpoint splits and (1+ε) box-distance pruning, so the
// reported distance always lands in [exact, (1+ε)·exact].

#include "sparsegeom/types.hpp"

#include <cstdint>
#include <vector>

namespace sparsegeom {

enum class AnnBackend { Exact, Tree };

struct AnnConfig {
  double epsilon = 0.25;  // in (0, 8]
  AnnBackend backend = AnnBackend::Exact;
};

class AnnIndex {
 public:
  AnnIndex() = default;

  Eigen::Index size() const { return pts_.cols(); }
  Eigen::Index dim() const { return pts_.rows(); }
  const Matrix& points() const { return pts_; }
  const AnnConfig& config() const { return cfg_; }

  // (id, distance) of a (1+ε)-approximate nearest point.
  std::pair<std::size_t, double> query(VectorRef q) const;

  friend AnnIndex ann_build(Matrix points, const AnnConfig& cfg);

 private:
  struct Node {
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::int32_t left = -1, right = -1;
    std::int32_t lo = 0, hi = 0;  // leaf range into perm_
  };

  std::int32_t build_node(std::int32_t lo, std::int32_t hi);
  void search(std::int32_t node, VectorRef q, double& best_d2,
              std::size_t& best_id) const;

  Matrix pts_;
  AnnConfig cfg_;
  double prune_factor_ = 1.0;  // (1+ε)^2 applied to squared box distances
  std::vector<std::int32_t> perm_;
  std::vector<Node> nodes_;
  std::vector<Vector> box_lo_, box_hi_;
  std::int32_t root_ = -1;
};

// Immutable index over the columns of `points`; deterministic given the
// input order and config.  Throws EmptySet / BadEpsilon.
AnnIndex ann_build(Matrix points, const AnnConfig& cfg);

inline std::pair<std::size_t, double> ann_query(const AnnIndex& idx,
                                                VectorRef q) {
  return idx.query(q);
}

}  // namespace sparsegeom
