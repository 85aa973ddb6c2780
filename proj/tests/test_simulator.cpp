#include "ilm/simulator.hpp"

#include <doctest.h>

#include "ilm/errors.hpp"
#include "ilm/random.hpp"

using namespace ilm;

TEST_SUITE("simulator") {

TEST_CASE("visible_landmarks: facing a landmark 1 m away, zero noise") {
  std::vector<Landmark> lms = {
      {0, LandmarkClass::Corner, {1, 0}},
      {1, LandmarkClass::Cross, {-6, 0}},  // directly behind
      {2, LandmarkClass::Corner, {6, 4}},
      {3, LandmarkClass::Corner, {-6, -4}},
  };
  const FieldMap map(std::move(lms), 14, 9);
  const ObservationSet obs = visible_landmarks(Pose2d(0, 0, 0), map, SensorModel{}, 1);

  REQUIRE(obs.size() >= 1);
  CHECK(obs.truth_ids[0] == 0);
  CHECK((obs.points[0] - Eigen::Vector2d(1, 0)).norm() < 1e-12);
  CHECK(obs.classes[0] == LandmarkClass::Corner);
  // The landmark behind the robot is outside the 110-degree cone.
  for (const int id : obs.truth_ids) CHECK(id != 1);
}

TEST_CASE("visible_landmarks: noise respects the stated bound") {
  const FieldMap map = generate_default_map();
  SensorModel sensor;
  sensor.obs_noise_width = 0.5;
  SensorModel exact;
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose2d pose(rng.uniform(-6, 6), rng.uniform(-4, 4),
                      rng.uniform(-std::numbers::pi, std::numbers::pi));
    const ObservationSet noisy = visible_landmarks(pose, map, sensor, trial);
    const ObservationSet clean = visible_landmarks(pose, map, exact, trial);
    REQUIRE(noisy.size() == clean.size());
    for (int i = 0; i < noisy.size(); ++i) {
      CHECK(std::abs(noisy.points[i].x() - clean.points[i].x()) <= 0.5);
      CHECK(std::abs(noisy.points[i].y() - clean.points[i].y()) <= 0.5);
    }
  }
}

TEST_CASE("visible_landmarks: misclassification flips to another class") {
  const FieldMap map = generate_default_map();
  SensorModel sensor;
  sensor.misclassification_rate = 1.0;  // every class flips
  const ObservationSet obs = visible_landmarks(Pose2d(1, 1, 0), map, sensor, 5);
  REQUIRE(obs.size() > 0);
  for (int i = 0; i < obs.size(); ++i)
    CHECK(obs.classes[i] != map.by_id(obs.truth_ids[i]).cls);
}

TEST_CASE("sample_poses: bounds, determinism, empty") {
  const FieldMap map = generate_default_map();
  CHECK(sample_poses(0, map, 1).empty());
  const auto a = sample_poses(200, map, 42);
  const auto b = sample_poses(200, map, 42);
  REQUIRE(a.size() == 200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i].x()) <= 7.0);
    CHECK(std::abs(a[i].y()) <= 4.5);
    CHECK(a[i].theta() <= std::numbers::pi);
    CHECK(a[i].theta() > -std::numbers::pi);
    CHECK(a[i].x() == b[i].x());
    CHECK(a[i].theta() == b[i].theta());
  }
}

TEST_CASE("trajectory: coincident waypoints rejected") {
  const FieldMap map = generate_default_map();
  TrajectorySpec spec;
  spec.waypoints = {{0, 0}, {0, 0}};
  CHECK_THROWS_AS(generate_trajectory(spec, map, SensorModel{}, 1), ValidationError);
}

TEST_CASE("trajectory: waypoint outside the field rejected") {
  const FieldMap map = generate_default_map();
  TrajectorySpec spec;
  spec.waypoints = {{0, 0}, {20, 0}};
  CHECK_THROWS_AS(generate_trajectory(spec, map, SensorModel{}, 1), ValidationError);
}

TEST_CASE("trajectory: goal-box rectangle closes the loop") {
  const FieldMap map = generate_default_map();
  TrajectorySpec spec = rect_goal_box_spec(map);
  spec.odom_pos_noise = 0.0;
  spec.odom_ang_noise = 0.0;
  const auto frames = generate_trajectory(spec, map, SensorModel{}, 3);
  REQUIRE(frames.size() > 10);
  const Eigen::Vector2d start(frames.front().true_pose.x(), frames.front().true_pose.y());
  const Eigen::Vector2d end(frames.back().true_pose.x(), frames.back().true_pose.y());
  CHECK((end - start).norm() < spec.speed * spec.dt + 1e-9);
}

TEST_CASE("trajectory: zero-noise dead reckoning reproduces the true poses") {
  const FieldMap map = generate_default_map();
  TrajectorySpec spec = rect_goal_box_spec(map);
  spec.odom_pos_noise = 0.0;
  spec.odom_ang_noise = 0.0;
  spec.speed = 0.5;
  const auto frames = generate_trajectory(spec, map, SensorModel{}, 7);

  Pose2d x = frames[0].true_pose;
  for (std::size_t k = 1; k < frames.size(); ++k) {
    x = predict_state(x, frames[k - 1].control, spec.dt);
    CHECK(pose_error(x, frames[k].true_pose).position < 1e-9);
    CHECK(pose_error(x, frames[k].true_pose).orientation < 1e-9);
  }
}

TEST_CASE("trajectory: determinism per seed, difference across seeds") {
  const FieldMap map = generate_default_map();
  TrajectorySpec spec = rect_goal_box_spec(map);
  spec.speed = 1.0;
  SensorModel sensor;
  sensor.obs_noise_width = 0.5;
  const auto a = generate_trajectory(spec, map, sensor, 9);
  const auto b = generate_trajectory(spec, map, sensor, 9);
  const auto c = generate_trajectory(spec, map, sensor, 10);
  REQUIRE(a.size() == b.size());
  bool any_diff = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].control.v_f == b[k].control.v_f);
    REQUIRE(a[k].observations.size() == b[k].observations.size());
    for (int i = 0; i < a[k].observations.size(); ++i)
      CHECK(a[k].observations.points[i] == b[k].observations.points[i]);
    if (k < c.size() && a[k].control.v_f != c[k].control.v_f) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("trajectory: observations stay within the noise bound of visibility") {
  const FieldMap map = generate_default_map();
  TrajectorySpec spec = rect_goal_box_spec(map);
  spec.speed = 2.0;  // keep the test short
  SensorModel sensor;
  sensor.obs_noise_width = 0.5;
  const auto frames = generate_trajectory(spec, map, sensor, 21);
  SensorModel exact;
  for (const auto& fr : frames) {
    const ObservationSet clean = visible_landmarks(fr.true_pose, map, exact, 0);
    REQUIRE(fr.observations.size() == clean.size());
    for (int i = 0; i < clean.size(); ++i)
      CHECK((fr.observations.points[i] - clean.points[i]).lpNorm<Eigen::Infinity>() <=
            0.5 + 1e-12);
  }
}

}  // TEST_SUITE
