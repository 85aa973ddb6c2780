#include "ilm/fusion.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "ilm/errors.hpp"
#include "ilm/random.hpp"

namespace ilm {

Pose2d predict_state(const Pose2d& x, const ControlInput& u, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("predict_state: dt must be > 0");
  const double c = std::cos(x.theta()), s = std::sin(x.theta());
  return Pose2d(x.x() + dt * (c * u.v_f - s * u.v_s),
                x.y() + dt * (s * u.v_f + c * u.v_s),
                x.theta() + dt * u.omega);
}

Eigen::Matrix3d dynamics_jacobian(const Pose2d& x, const ControlInput& u, double dt) {
  const double c = std::cos(x.theta()), s = std::sin(x.theta());
  Eigen::Matrix3d f = Eigen::Matrix3d::Identity();
  f(0, 2) = dt * (-s * u.v_f - c * u.v_s);
  f(1, 2) = dt * (c * u.v_f - s * u.v_s);
  return f;
}

namespace {

void require_normalized(const Eigen::VectorXd& w) {
  if (w.size() < 1) throw std::invalid_argument("empty weight vector");
  if (w.minCoeff() < 0.0) throw std::invalid_argument("negative weight");
  if (std::abs(w.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("weights not normalized (sum = " + std::to_string(w.sum()) + ")");
}

}  // namespace

double effective_sample_size(const Eigen::VectorXd& weights) {
  require_normalized(weights);
  return 1.0 / weights.squaredNorm();
}

std::vector<int> systematic_resample(const Eigen::VectorXd& weights, std::uint64_t seed,
                                     int n_draws) {
  require_normalized(weights);
  const int n = n_draws > 0 ? n_draws : static_cast<int>(weights.size());
  Rng rng(seed);
  const double offset = rng.uniform01();

  std::vector<int> indices(n);
  double cumulative = weights(0);
  int j = 0;
  for (int k = 0; k < n; ++k) {
    const double point = (offset + k) / n;
    while (point >= cumulative && j + 1 < weights.size()) cumulative += weights(++j);
    indices[k] = j;
  }
  return indices;
}

ParticleSet ParticleSet::around(const Pose2d& center, int n, const Eigen::Vector3d& spread_std,
                                std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("particle count must be >= 1");
  ParticleSet ps;
  ps.particles.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(seed_mix(seed, i));
    ps.particles.emplace_back(center.x() + rng.normal(0.0, spread_std.x()),
                              center.y() + rng.normal(0.0, spread_std.y()),
                              center.theta() + rng.normal(0.0, spread_std.z()));
  }
  ps.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  return ps;
}

PfStepResult pf_step(const ParticleSet& ps, const ControlInput& u,
                     const std::optional<Pose2d>& z, double dt, const NoiseModel& noise,
                     std::uint64_t seed) {
  const int n = ps.size();
  if (n < 1) throw std::invalid_argument("pf_step: empty particle set");

  PfStepResult out;
  out.particles.particles.resize(n);
  out.particles.weights = ps.weights;

  // Prediction: per-particle counter-based noise streams keep the result
  // independent of evaluation order.
  for (int i = 0; i < n; ++i) {
    Rng rng(seed_mix(seed, 0x70726564, i));
    const Pose2d p = predict_state(ps.particles[i], u, dt);
    out.particles.particles[i] =
        Pose2d(p.x() + rng.normal(0.0, noise.process_std.x()),
               p.y() + rng.normal(0.0, noise.process_std.y()),
               p.theta() + rng.normal(0.0, noise.process_std.z()));
  }

  if (z) {
    const double sx = std::max(noise.measurement_std.x(), 1e-12);
    const double sy = std::max(noise.measurement_std.y(), 1e-12);
    const double st = std::max(noise.measurement_std.z(), 1e-12);
    Eigen::VectorXd& w = out.particles.weights;
    for (int i = 0; i < n; ++i) {
      const Pose2d& p = out.particles.particles[i];
      const double dx = (z->x() - p.x()) / sx;
      const double dy = (z->y() - p.y()) / sy;
      const double dth = wrap_angle(z->theta() - p.theta()) / st;
      w(i) *= std::exp(-0.5 * (dx * dx + dy * dy + dth * dth));
    }
    const double sum = w.sum();
    if (!(sum > 0.0) || !std::isfinite(sum)) {
      w.setConstant(1.0 / n);
      out.diverged = true;
    } else {
      w /= sum;
    }

    if (effective_sample_size(w) < n / 2.0) {
      const std::vector<int> idx = systematic_resample(w, seed_mix(seed, 0x72657331));
      std::vector<Pose2d> resampled;
      resampled.reserve(n);
      for (const int i : idx) resampled.push_back(out.particles.particles[i]);
      out.particles.particles = std::move(resampled);
      w.setConstant(1.0 / n);
      out.resampled = true;
    }
  }

  // Weighted estimate with a circular heading mean.
  double x = 0.0, y = 0.0, sc = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wi = out.particles.weights(i);
    x += wi * out.particles.particles[i].x();
    y += wi * out.particles.particles[i].y();
    sc += wi * std::cos(out.particles.particles[i].theta());
    ss += wi * std::sin(out.particles.particles[i].theta());
  }
  out.estimate = Pose2d(x, y, std::atan2(ss, sc));
  return out;
}

EkfState ekf_step(const EkfState& state, const ControlInput& u,
                  const std::optional<Pose2d>& z, double dt, const NoiseModel& noise) {
  const Eigen::Matrix3d q = noise.process_std.array().square().matrix().asDiagonal();
  const Eigen::Matrix3d f = dynamics_jacobian(state.mean, u, dt);

  EkfState pred;
  pred.mean = predict_state(state.mean, u, dt);
  pred.cov = f * state.cov * f.transpose() + q;

  if (!z) return pred;

  const Eigen::Matrix3d r = noise.measurement_std.array().square().matrix().asDiagonal();
  const Eigen::Matrix3d s = pred.cov + r;  // H = I
  Eigen::FullPivLU<Eigen::Matrix3d> lu(s);
  if (!lu.isInvertible()) throw Error("ekf_step: singular innovation covariance");

  const Eigen::Matrix3d k = pred.cov * lu.inverse();
  const Eigen::Vector3d innovation(z->x() - pred.mean.x(), z->y() - pred.mean.y(),
                                   wrap_angle(z->theta() - pred.mean.theta()));
  const Eigen::Vector3d dx = k * innovation;

  EkfState post;
  post.mean = Pose2d(pred.mean.x() + dx(0), pred.mean.y() + dx(1), pred.mean.theta() + dx(2));
  const Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - k;
  post.cov = ikh * pred.cov * ikh.transpose() + k * r * k.transpose();
  return post;
}

}  // namespace ilm
