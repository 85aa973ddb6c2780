#pragma once

#include <Eigen/Core>

#include <vector>

#include "ilm/assignment.hpp"
#include "ilm/field_map.hpp"
#include "ilm/pose_estimation.hpp"

namespace ilm {

/// Body-frame landmark detections for one camera frame. truth_id carries the
/// generating landmark id when the set comes from the simulator (-1
/// otherwise); the localization algorithms never read it — it exists so
/// experiments can score correspondence correctness.
struct ObservationSet {
  std::vector<Eigen::Vector2d> points;
  std::vector<LandmarkClass> classes;
  std::vector<int> truth_ids;

  int size() const { return static_cast<int>(points.size()); }
  void push_back(const Eigen::Vector2d& p, LandmarkClass c, int truth_id = -1) {
    points.push_back(p);
    classes.push_back(c);
    truth_ids.push_back(truth_id);
  }
};

struct RegistrationConfig {
  int max_iteration = 4;
  double convergence_tol_pos = 1e-6;  // meters
  double convergence_tol_ang = 1e-6;  // radians
  Estimator estimator = Estimator::Kabsch;
  MatchStrategy strategy = MatchStrategy::ParallelBest;
};

struct RegistrationResult {
  Pose2d pose;
  Matching matching;  // correspondences at the final pose; errors re-evaluated there
  int iterations = 0;
  bool converged = false;
  double mean_matching_error = 0.0;
  double max_matching_error = 0.0;
  std::vector<double> iteration_mean_errors;  // matching error trace, one per iteration
  bool low_confidence = false;  // set by outlier handling when it cannot refine
};

/// Iterative landmark matching: project the observations into the world with
/// the current pose, match them one-to-one against the map, re-estimate the
/// pose from the matched pairs, and repeat until the pose change drops below
/// the tolerances or max_iteration is reached. Throws InsufficientLandmarks
/// for fewer than 2 observations and propagates DegenerateGeometry from the
/// estimator.
RegistrationResult ilm_localize(const ObservationSet& obs, const Pose2d& initial,
                                const FieldMap& map, const RegistrationConfig& cfg = {});

/// Point-to-point ICP baseline: class-agnostic independent nearest-landmark
/// correspondences (several observations may share one landmark), pose
/// re-estimated with Kabsch each iteration.
RegistrationResult icp_localize(const ObservationSet& obs, const Pose2d& initial,
                                const FieldMap& map, const RegistrationConfig& cfg = {});

/// True iff the correspondences equal the generating ground truth exactly
/// (every observation matched to its own truth_id).
bool matches_ground_truth(const Matching& m, const ObservationSet& obs);

}  // namespace ilm
