#include "ilm/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ilm/errors.hpp"

namespace ilm {

namespace {

// Pair distances of the matching evaluated under `pose`; the result the
// outlier gate and global localization thresholds act on.
void evaluate_matching(RegistrationResult& result, const ObservationSet& obs,
                       const FieldMap& map) {
  double sum = 0.0, max = 0.0;
  for (const auto& [oi, lm_id] : result.matching.correspondences) {
    const double d = (map.by_id(lm_id).position - result.pose * obs.points[oi]).norm();
    sum += d;
    max = std::max(max, d);
  }
  const auto n = result.matching.correspondences.size();
  result.mean_matching_error = n ? sum / static_cast<double>(n) : 0.0;
  result.max_matching_error = max;
  result.matching.mean_error = result.mean_matching_error;
  result.matching.max_error = result.max_matching_error;
}

PointPairSet pairs_from_matching(const Matching& m, const ObservationSet& obs,
                                 const FieldMap& map) {
  PointPairSet pairs;
  for (const auto& [oi, lm_id] : m.correspondences) {
    pairs.body.push_back(obs.points[oi]);
    pairs.world.push_back(map.by_id(lm_id).position);
  }
  return pairs;
}

}  // namespace

bool matches_ground_truth(const Matching& m, const ObservationSet& obs) {
  if (static_cast<int>(m.correspondences.size()) != obs.size()) return false;
  return std::all_of(m.correspondences.begin(), m.correspondences.end(),
                     [&](const std::pair<int, int>& c) {
                       return obs.truth_ids[c.first] == c.second;
                     });
}

RegistrationResult ilm_localize(const ObservationSet& obs, const Pose2d& initial,
                                const FieldMap& map, const RegistrationConfig& cfg) {
  if (obs.size() < 2)
    throw InsufficientLandmarks("ilm_localize needs at least 2 observations, got " +
                                std::to_string(obs.size()));
  if (cfg.max_iteration < 1) throw std::invalid_argument("max_iteration must be >= 1");

  RegistrationResult result;
  Pose2d pose = initial;
  for (int iter = 1; iter <= cfg.max_iteration; ++iter) {
    const std::vector<Eigen::Vector2d> guess_world = transform_to_world(pose, obs.points);
    result.matching = match_landmarks(guess_world, obs.classes, map, cfg.strategy);
    result.iteration_mean_errors.push_back(result.matching.mean_error);

    const PointPairSet pairs = pairs_from_matching(result.matching, obs, map);
    if (pairs.size() < 2)
      throw InsufficientLandmarks("ilm_localize: matching kept fewer than 2 pairs");
    const PoseEstimate est = estimate_pose(cfg.estimator, pairs);

    const PoseDeltad delta = pose_error(est.pose, pose);
    pose = est.pose;
    result.iterations = iter;
    if (delta.position <= cfg.convergence_tol_pos &&
        delta.orientation <= cfg.convergence_tol_ang) {
      result.converged = true;
      break;
    }
  }
  result.pose = pose;
  evaluate_matching(result, obs, map);
  return result;
}

RegistrationResult icp_localize(const ObservationSet& obs, const Pose2d& initial,
                                const FieldMap& map, const RegistrationConfig& cfg) {
  if (obs.size() < 2)
    throw InsufficientLandmarks("icp_localize needs at least 2 observations, got " +
                                std::to_string(obs.size()));
  if (cfg.max_iteration < 1) throw std::invalid_argument("max_iteration must be >= 1");

  RegistrationResult result;
  Pose2d pose = initial;
  for (int iter = 1; iter <= cfg.max_iteration; ++iter) {
    result.matching = Matching{};
    result.matching.strategy_used = MatchStrategy::Identical;  // NN ignores classes
    for (int oi = 0; oi < obs.size(); ++oi) {
      const Eigen::Vector2d guess = pose * obs.points[oi];
      double best = std::numeric_limits<double>::infinity();
      int best_id = -1;
      for (const auto& lm : map.landmarks()) {
        const double d = (lm.position - guess).norm();
        if (d < best) {
          best = d;
          best_id = lm.id;
        }
      }
      result.matching.correspondences.emplace_back(oi, best_id);
    }

    const PointPairSet pairs = pairs_from_matching(result.matching, obs, map);
    double nn_sum = 0.0;
    for (int i = 0; i < pairs.size(); ++i)
      nn_sum += (pairs.world[i] - pose * pairs.body[i]).norm();
    result.iteration_mean_errors.push_back(nn_sum / pairs.size());
    const PoseEstimate est = estimate_pose_kabsch(pairs);

    const PoseDeltad delta = pose_error(est.pose, pose);
    pose = est.pose;
    result.iterations = iter;
    if (delta.position <= cfg.convergence_tol_pos &&
        delta.orientation <= cfg.convergence_tol_ang) {
      result.converged = true;
      break;
    }
  }
  result.pose = pose;
  evaluate_matching(result, obs, map);
  return result;
}

}  // namespace ilm
