#include "ilm/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ilm/errors.hpp"
#include "ilm/random.hpp"

namespace ilm {

namespace {

// Exact rigid transform through two pairs: rotation from the segment
// directions, translation from the first pair.
bool fit_two_pairs(const Eigen::Vector2d& b0, const Eigen::Vector2d& b1,
                   const Eigen::Vector2d& w0, const Eigen::Vector2d& w1, Pose2d* out) {
  const Eigen::Vector2d db = b1 - b0, dw = w1 - w0;
  if (db.norm() < 1e-12) return false;
  const double theta = std::atan2(dw.y(), dw.x()) - std::atan2(db.y(), db.x());
  const Eigen::Vector2d t = w0 - rotation_matrix(theta) * b0;
  *out = Pose2d(t.x(), t.y(), theta);
  return true;
}

}  // namespace

RansacResult ransac_pose(std::span<const Eigen::Vector2d> body,
                         std::span<const Eigen::Vector2d> world, const OutlierConfig& cfg,
                         std::uint64_t seed) {
  const int n = static_cast<int>(body.size());
  if (static_cast<int>(world.size()) != n)
    throw std::invalid_argument("ransac_pose: body/world length mismatch");
  if (n < OutlierConfig::kMinSample)
    throw InsufficientLandmarks("ransac_pose needs at least 2 pairs");

  // Candidate 2-subsets, lexicographic when exhaustive fits the budget.
  std::vector<std::pair<int, int>> samples;
  const long n_subsets = static_cast<long>(n) * (n - 1) / 2;
  if (n_subsets <= cfg.ransac_iterations) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) samples.emplace_back(i, j);
  } else {
    Rng rng(seed);
    samples.reserve(cfg.ransac_iterations);
    for (int k = 0; k < cfg.ransac_iterations; ++k) {
      const int i = static_cast<int>(rng.uniform_int(n));
      int j = static_cast<int>(rng.uniform_int(n - 1));
      if (j >= i) ++j;
      samples.emplace_back(std::min(i, j), std::max(i, j));
    }
  }

  int best_count = 0;
  double best_rms = std::numeric_limits<double>::infinity();
  std::vector<bool> best_mask;
  std::vector<bool> mask(n);
  for (const auto& [i, j] : samples) {
    Pose2d model;
    if (!fit_two_pairs(body[i], body[j], world[i], world[j], &model)) continue;
    int count = 0;
    double ss = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d = (world[k] - model * body[k]).norm();
      mask[k] = d < cfg.inlier_threshold;
      if (mask[k]) {
        ++count;
        ss += d * d;
      }
    }
    const double rms = count ? std::sqrt(ss / count) : 0.0;
    if (count > best_count || (count == best_count && rms < best_rms)) {
      best_count = count;
      best_rms = rms;
      best_mask = mask;
    }
  }
  if (best_count < 2) throw DegenerateGeometry("ransac_pose: no consensus of size >= 2");

  PointPairSet inliers;
  for (int k = 0; k < n; ++k)
    if (best_mask[k]) {
      inliers.body.push_back(body[k]);
      inliers.world.push_back(world[k]);
    }
  return {estimate_pose_kabsch(inliers).pose, std::move(best_mask)};
}

RegistrationResult drop_outliers(const ObservationSet& obs, const RegistrationResult& result,
                                 const FieldMap& map, const OutlierConfig& cfg,
                                 std::uint64_t seed) {
  if (result.mean_matching_error <= cfg.error_threshold) return result;

  if (obs.size() < cfg.min_landmarks) {
    RegistrationResult flagged = result;
    flagged.low_confidence = true;
    return flagged;
  }

  std::vector<Eigen::Vector2d> body, world;
  for (const auto& [oi, lm_id] : result.matching.correspondences) {
    body.push_back(obs.points[oi]);
    world.push_back(map.by_id(lm_id).position);
  }
  const RansacResult refined = ransac_pose(body, world, cfg, seed);

  RegistrationResult out = result;
  out.pose = refined.pose;
  const std::vector<Eigen::Vector2d> guess_world = transform_to_world(refined.pose, obs.points);
  out.matching = match_landmarks(guess_world, obs.classes, map,
                                 result.matching.strategy_used);
  double sum = 0.0, max = 0.0;
  for (const auto& [oi, lm_id] : out.matching.correspondences) {
    const double d = (map.by_id(lm_id).position - out.pose * obs.points[oi]).norm();
    sum += d;
    max = std::max(max, d);
  }
  const auto n = out.matching.correspondences.size();
  out.mean_matching_error = n ? sum / static_cast<double>(n) : 0.0;
  out.max_matching_error = max;
  out.matching.mean_error = out.mean_matching_error;
  out.matching.max_error = out.max_matching_error;
  return out;
}

HypothesisSet HypothesisSet::default_for_map(const FieldMap& map) {
  HypothesisSet hyp;
  const double half_l = map.field_length() / 2.0;
  const double y = -map.field_width() / 2.0;
  const int count = 6;
  for (int i = 0; i < count; ++i) {
    const double x = -half_l + (i + 0.5) * half_l / count;  // own half: x < 0
    hyp.poses.emplace_back(x, y, std::numbers::pi / 2.0);   // facing the field
  }
  return hyp;
}

Pose2d global_localize(std::span<const ObservationSet> frames, const FieldMap& map,
                       const HypothesisSet& hyp, const RegistrationConfig& cfg) {
  if (frames.empty()) throw GlobalInitFailure("global_localize: no frames");
  if (hyp.poses.empty()) throw std::invalid_argument("global_localize: empty hypothesis set");

  const ObservationSet* frame = nullptr;
  for (const auto& f : frames)
    if (f.size() >= hyp.min_landmarks) {
      frame = &f;
      break;
    }
  if (!frame)
    throw GlobalInitFailure("global_localize: no frame with more than " +
                            std::to_string(hyp.min_landmarks - 1) + " landmarks");

  bool found = false;
  double best_mean = std::numeric_limits<double>::infinity();
  Pose2d best;
  for (const auto& start : hyp.poses) {
    RegistrationResult r;
    try {
      r = ilm_localize(*frame, start, map, cfg);
    } catch (const DegenerateGeometry&) {
      continue;
    }
    if (r.max_matching_error >= hyp.max_error_threshold) continue;
    if (r.mean_matching_error < best_mean) {  // strict <: earlier hypothesis wins ties
      best_mean = r.mean_matching_error;
      best = r.pose;
      found = true;
    }
  }
  if (!found)
    throw GlobalInitFailure("global_localize: every hypothesis exceeded the error threshold");
  return best;
}

}  // namespace ilm
