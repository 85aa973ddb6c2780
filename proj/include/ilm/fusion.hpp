#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "ilm/geometry.hpp"

namespace ilm {

/// Body-frame velocity command/measurement: forward, lateral, angular.
struct ControlInput {
  double v_f = 0.0;    // m/s
  double v_s = 0.0;    // m/s
  double omega = 0.0;  // rad/s
};

/// Per-axis noise magnitudes for the filters: process noise is applied per
/// prediction step, measurement noise describes the pose measurement.
struct NoiseModel {
  Eigen::Vector3d process_std{0.0, 0.0, 0.0};      // (m, m, rad) per step
  Eigen::Vector3d measurement_std{0.1, 0.1, 0.05};  // (m, m, rad)
};

/// Discrete unicycle-with-sideslip update: the body velocity is rotated into
/// the world by the current heading and integrated over dt; heading is
/// renormalized. Noise-free; callers add their own sampled noise.
Pose2d predict_state(const Pose2d& x, const ControlInput& u, double dt);

/// Jacobian of predict_state with respect to the state at (x, u, dt):
/// identity plus the heading derivative of the rotated velocity, times dt.
Eigen::Matrix3d dynamics_jacobian(const Pose2d& x, const ControlInput& u, double dt);

/// N_eff = 1 / sum(w^2). Weights must be normalized to 1 within 1e-9.
double effective_sample_size(const Eigen::VectorXd& weights);

/// Single-offset stratified resampling: n_draws indices (defaults to the
/// weight count) whose per-index copy counts satisfy
/// floor(N*w_i) <= count_i <= ceil(N*w_i). Deterministic given the seed.
std::vector<int> systematic_resample(const Eigen::VectorXd& weights, std::uint64_t seed,
                                     int n_draws = -1);

struct ParticleSet {
  std::vector<Pose2d> particles;
  Eigen::VectorXd weights;  // normalized; kept summing to 1 by every step

  int size() const { return static_cast<int>(particles.size()); }

  /// n particles Gaussian-scattered around center with uniform weights.
  static ParticleSet around(const Pose2d& center, int n, const Eigen::Vector3d& spread_std,
                            std::uint64_t seed);
};

struct PfStepResult {
  ParticleSet particles;
  Pose2d estimate;  // weighted mean, circular in heading
  bool resampled = false;
  bool diverged = false;  // all weights underflowed; reset to uniform
};

/// One particle filter step: propagate every particle through predict_state
/// plus sampled Gaussian process noise (independent per-particle streams
/// derived from the seed, so parallel execution cannot change results); if a
/// measurement is present, multiply weights by an independent-Gaussian
/// likelihood on (dx, dy, wrapped dtheta) and normalize; resample
/// systematically iff N_eff < N/2. Without a measurement the step is pure
/// prediction: weights and resampling state are untouched.
PfStepResult pf_step(const ParticleSet& ps, const ControlInput& u,
                     const std::optional<Pose2d>& z, double dt, const NoiseModel& noise,
                     std::uint64_t seed);

struct EkfState {
  Pose2d mean;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
};

/// EKF with the dynamics above and direct pose measurement (H = I). The
/// innovation heading is wrapped; the covariance update uses the Joseph
/// form, keeping the posterior symmetric PSD. Throws on a singular
/// innovation covariance.
EkfState ekf_step(const EkfState& state, const ControlInput& u,
                  const std::optional<Pose2d>& z, double dt, const NoiseModel& noise);

}  // namespace ilm
