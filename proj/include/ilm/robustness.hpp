#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "ilm/registration.hpp"

namespace ilm {

struct OutlierConfig {
  double error_threshold = 0.5;   // mean matching error that triggers dropping, m
  int min_landmarks = 6;          // "more than 5": below this, flag instead of refine
  int ransac_iterations = 50;     // exhaustive over 2-subsets while C(n,2) fits
  double inlier_threshold = 0.3;  // post-transform distance bound, m
  static constexpr int kMinSample = 2;  // a 2D rigid transform needs 2 pairs
};

struct RansacResult {
  Pose2d pose;
  std::vector<bool> inlier_mask;
};

/// Consensus search over 2-pair samples: fit the exact rigid transform,
/// count pairs within inlier_threshold, keep the largest consensus (ties go
/// to the lower inlier RMS, then the earlier sample), refit on the consensus
/// with Kabsch. Deterministic given the seed; all C(n,2) samples are
/// enumerated in order whenever that count fits the iteration budget.
/// Throws DegenerateGeometry when no sample yields a consensus of >= 2.
RansacResult ransac_pose(std::span<const Eigen::Vector2d> body,
                         std::span<const Eigen::Vector2d> world, const OutlierConfig& cfg,
                         std::uint64_t seed);

/// The outlier dropping gate: results whose mean matching error is within
/// error_threshold pass through unchanged; frames with fewer than
/// min_landmarks observations come back flagged low-confidence; otherwise
/// RANSAC locates the outliers among the current correspondences, the pose
/// is refit on the inliers, and the observations are re-matched at the
/// refined pose.
RegistrationResult drop_outliers(const ObservationSet& obs, const RegistrationResult& result,
                                 const FieldMap& map, const OutlierConfig& cfg,
                                 std::uint64_t seed);

struct HypothesisSet {
  std::vector<Pose2d> poses;
  int min_landmarks = 6;             // frames must carry more than 5 landmarks
  double max_error_threshold = 0.5;  // max matching error gate, m

  /// Six poses evenly spaced along the y = -width/2 touch line of the x < 0
  /// half, facing the field (theta = +pi/2).
  static HypothesisSet default_for_map(const FieldMap& map);
};

/// Multi-hypothesis start-of-game localization: takes the first frame with
/// more than 5 landmarks, runs ILM from every hypothesis pose, discards
/// results whose max matching error reaches the threshold, and returns the
/// pose with the smallest mean matching error (ties: lowest hypothesis
/// index). Throws GlobalInitFailure when no frame qualifies or every
/// hypothesis is discarded. On a symmetric field the returned pose may be
/// the 180-degree twin of the true one; the map cannot distinguish them.
Pose2d global_localize(std::span<const ObservationSet> frames, const FieldMap& map,
                       const HypothesisSet& hyp, const RegistrationConfig& cfg = {});

}  // namespace ilm
