#include "ilm/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "ilm/errors.hpp"
#include "ilm/random.hpp"

namespace ilm {

ObservationSet visible_landmarks(const Pose2d& pose, const FieldMap& map,
                                 const SensorModel& sensor, std::uint64_t seed) {
  if (!(sensor.fov > 0.0 && sensor.fov <= 2 * std::numbers::pi))
    throw std::invalid_argument("sensor fov out of (0, 2*pi]");
  if (!(sensor.max_range > 0.0)) throw std::invalid_argument("sensor max_range must be > 0");
  if (sensor.misclassification_rate < 0.0 || sensor.misclassification_rate > 1.0)
    throw std::invalid_argument("misclassification_rate out of [0, 1]");

  const Pose2d world_to_body = pose.inverse();
  ObservationSet obs;
  for (const auto& lm : map.landmarks()) {
    const Eigen::Vector2d body = world_to_body * lm.position;
    if (body.norm() > sensor.max_range) continue;
    if (std::abs(std::atan2(body.y(), body.x())) > sensor.fov / 2.0) continue;

    Rng rng(seed_mix(seed, static_cast<std::uint64_t>(lm.id)));
    const double w = sensor.obs_noise_width;
    const Eigen::Vector2d noisy(body.x() + rng.uniform(-w, w), body.y() + rng.uniform(-w, w));
    LandmarkClass cls = lm.cls;
    if (rng.uniform01() < sensor.misclassification_rate) {
      // Flip to one of the other three classes.
      const int shift = 1 + static_cast<int>(rng.uniform_int(kNumLandmarkClasses - 1));
      cls = static_cast<LandmarkClass>((static_cast<int>(cls) + shift) % kNumLandmarkClasses);
    }
    obs.push_back(noisy, cls, lm.id);
  }
  return obs;
}

std::vector<Pose2d> sample_poses(int n, const FieldMap& map, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_poses: n must be >= 0");
  std::vector<Pose2d> poses;
  poses.reserve(n);
  Rng rng(seed);
  const double hl = map.field_length() / 2.0, hw = map.field_width() / 2.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(-hl, hl);
    const double y = rng.uniform(-hw, hw);
    const double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    poses.emplace_back(x, y, theta);
  }
  return poses;
}

TrajectorySpec rect_goal_box_spec(const FieldMap& map) {
  // Goal area of the x < 0 goal, proportions of the default layout.
  const double hl = map.field_length() / 2.0;
  const double depth = map.field_length() / 14.0;       // E scaled
  const double half_w = 2.0 * map.field_width() / 9.0;  // F/2 scaled
  TrajectorySpec spec;
  spec.waypoints = {{-hl, -half_w},
                    {-hl + depth, -half_w},
                    {-hl + depth, half_w},
                    {-hl, half_w},
                    {-hl, -half_w}};
  return spec;
}

namespace {

// Timed motion phase: either travel along a segment at constant speed or
// turn in place at a vertex.
struct MotionPhase {
  double duration;
  Eigen::Vector2d start;
  Eigen::Vector2d dir;     // unit direction; zero for turn phases
  double speed;            // 0 for turn phases
  double theta0, dtheta;   // heading interpolation over the phase
};

}  // namespace

std::vector<SimFrame> generate_trajectory(const TrajectorySpec& spec, const FieldMap& map,
                                          const SensorModel& sensor, std::uint64_t seed) {
  if (spec.waypoints.size() < 2)
    throw ValidationError("trajectory needs at least 2 waypoints");
  if (!(spec.dt > 0.0) || !(spec.speed > 0.0) || !(spec.turn_rate > 0.0))
    throw ValidationError("trajectory dt, speed and turn_rate must be > 0");

  std::vector<MotionPhase> phases;
  double heading = 0.0;
  for (std::size_t i = 0; i + 1 < spec.waypoints.size(); ++i) {
    if (!map.in_field(spec.waypoints[i]) || !map.in_field(spec.waypoints[i + 1]))
      throw ValidationError("trajectory waypoint outside the field");
    const Eigen::Vector2d delta = spec.waypoints[i + 1] - spec.waypoints[i];
    const double len = delta.norm();
    if (len < 1e-12)
      throw ValidationError("zero-length trajectory segment at waypoint " + std::to_string(i));
    const Eigen::Vector2d dir = delta / len;
    const double seg_heading = std::atan2(dir.y(), dir.x());
    if (i > 0) {
      const double turn = wrap_angle(seg_heading - heading);
      if (std::abs(turn) > 1e-12)
        phases.push_back({std::abs(turn) / spec.turn_rate, spec.waypoints[i],
                          Eigen::Vector2d::Zero(), 0.0, heading, turn});
    }
    phases.push_back({len / spec.speed, spec.waypoints[i], dir, spec.speed, seg_heading, 0.0});
    heading = seg_heading;
  }

  double total_time = 0.0;
  for (const auto& ph : phases) total_time += ph.duration;

  auto pose_at = [&](double t) {
    t = std::min(std::max(t, 0.0), total_time);
    std::size_t i = 0;
    while (i + 1 < phases.size() && t > phases[i].duration) t -= phases[i++].duration;
    const MotionPhase& ph = phases[i];
    const double tau = std::min(t, ph.duration);
    const Eigen::Vector2d p = ph.start + ph.speed * tau * ph.dir;
    const double frac = ph.duration > 0 ? tau / ph.duration : 1.0;
    return Pose2d(p.x(), p.y(), ph.theta0 + frac * ph.dtheta);
  };

  const int n_steps = static_cast<int>(std::ceil(total_time / spec.dt));
  std::vector<SimFrame> frames(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) {
    SimFrame& fr = frames[k];
    fr.time = k * spec.dt;
    fr.true_pose = pose_at(k * spec.dt);
    fr.observations =
        visible_landmarks(fr.true_pose, map, sensor, seed_mix(seed, 0x6f6273, k));
  }

  // Controls: exact inverse dynamics toward the next frame, perturbed by the
  // per-step pose noise (world frame) converted back to body velocity.
  for (int k = 0; k < n_steps; ++k) {
    const Pose2d& a = frames[k].true_pose;
    const Pose2d& b = frames[k + 1].true_pose;
    Rng rng(seed_mix(seed, 0x6f646f6d, k));
    const double nx = rng.uniform(-spec.odom_pos_noise, spec.odom_pos_noise);
    const double ny = rng.uniform(-spec.odom_pos_noise, spec.odom_pos_noise);
    const double nt = rng.uniform(-spec.odom_ang_noise, spec.odom_ang_noise);
    const Eigen::Vector2d dp =
        b.translation() - a.translation() + Eigen::Vector2d(nx, ny);
    const Eigen::Vector2d v_body = a.rotation().transpose() * dp / spec.dt;
    frames[k].control = {v_body.x(), v_body.y(),
                         (wrap_angle(b.theta() - a.theta()) + nt) / spec.dt};
  }
  return frames;
}

}  // namespace ilm
