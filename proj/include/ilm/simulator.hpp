#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "ilm/field_map.hpp"
#include "ilm/fusion.hpp"
#include "ilm/registration.hpp"

namespace ilm {

/// FOV- and range-limited landmark sensor with uniform position noise and
/// optional class flips. fov defaults to 110 degrees; max_range is a
/// configuration default, not a claim about the real camera — matching-rate
/// results are sensitive to it.
struct SensorModel {
  double fov = 110.0 * std::numbers::pi / 180.0;  // radians, full cone
  double max_range = 9.0;                         // meters
  double misclassification_rate = 0.0;            // probability per landmark
  double obs_noise_width = 0.0;                   // uniform +-width per axis, m
};

/// Landmarks visible from `pose`: within max_range and |bearing| <= fov/2,
/// returned in body coordinates (map order) with uniform noise of
/// +-obs_noise_width per axis and the class flipped to a random other class
/// with misclassification_rate. truth_ids keep the generating landmark ids.
/// Noise streams are derived per (seed, landmark id), so visibility changes
/// never reshuffle the noise of unrelated landmarks.
ObservationSet visible_landmarks(const Pose2d& pose, const FieldMap& map,
                                 const SensorModel& sensor, std::uint64_t seed);

/// n poses uniform over the field rectangle x (-pi, pi]; deterministic per seed.
std::vector<Pose2d> sample_poses(int n, const FieldMap& map, std::uint64_t seed);

struct TrajectorySpec {
  std::vector<Eigen::Vector2d> waypoints;  // piecewise-linear path, world frame
  double speed = 0.3;                      // m/s along the path
  double turn_rate = 1.5;                  // rad/s while turning in place at vertices
  double dt = 0.01;                        // s per frame
  double odom_pos_noise = 0.02;            // uniform +- per step, m
  double odom_ang_noise = 0.02;            // uniform +- per step, rad
};

/// Rectangle through the four corners of one goal area (closed loop),
/// the trajectory used by the error-statistics runs.
TrajectorySpec rect_goal_box_spec(const FieldMap& map);

struct SimFrame {
  double time = 0.0;
  Pose2d true_pose;
  ObservationSet observations;
  ControlInput control;  // noisy velocity toward the next frame
};

/// Constant-speed motion along the waypoints with heading along the travel
/// direction; at each vertex the robot turns in place at turn_rate to the
/// next segment's heading (an instantaneous heading jump would be
/// untrackable by any real filter). Each frame carries sensor observations
/// and the noisy control that moves it to the next frame: the exact
/// inverse-dynamics velocity plus the per-step pose perturbation (uniform
/// +-odom_pos_noise meters, +-odom_ang_noise radians) divided by dt.
/// Integrating the noise-free controls through predict_state reproduces the
/// true poses.
std::vector<SimFrame> generate_trajectory(const TrajectorySpec& spec, const FieldMap& map,
                                          const SensorModel& sensor, std::uint64_t seed);

}  // namespace ilm
