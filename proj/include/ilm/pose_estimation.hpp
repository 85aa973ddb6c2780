#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "ilm/geometry.hpp"

namespace ilm {

enum class Estimator { DLT, Kabsch };

const char* to_string(Estimator e);

/// Matched (body frame, world frame) point pairs feeding pose estimation.
struct PointPairSet {
  std::vector<Eigen::Vector2d> body;
  std::vector<Eigen::Vector2d> world;

  int size() const { return static_cast<int>(body.size()); }
};

struct PoseEstimate {
  Pose2d pose;
  double residual_rms = 0.0;  // RMS of post-fit pair distances, meters
  Estimator method = Estimator::Kabsch;
};

/// Direct linear transformation: stacks rows (x_b, -y_b, 1, 0) and
/// (y_b, x_b, 0, 1) per pair into A m = b, solves least squares, and reads
/// theta = atan2(m2, m1), t = (m3, m4). The (m1, m2) pair is not forced onto
/// the unit circle; only the angle is extracted. Needs >= 2 pairs and a
/// full-rank system; all-coincident body points throw DegenerateGeometry.
PoseEstimate estimate_pose_dlt(const PointPairSet& pairs);

/// Kabsch: centroids subtracted, 2x2 cross-covariance H = sum q_b q_w^T
/// decomposed by SVD, R = V U^T with the reflection fix (negate V's second
/// column when det is -1), t aligns the centroids. Returned rotation always
/// has determinant +1. Throws DegenerateGeometry when the rotation is
/// unobservable (all body or all world points coincident).
PoseEstimate estimate_pose_kabsch(const PointPairSet& pairs);

PoseEstimate estimate_pose(Estimator method, const PointPairSet& pairs);

/// RMS of ||world_i - pose * body_i|| over the pairs.
double pair_rms(const Pose2d& pose, const PointPairSet& pairs);

}  // namespace ilm
