#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ilm {

/// Wraps an angle to the half-open interval (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar angle) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar a = std::fmod(angle + pi, Scalar(2) * pi);
  if (a <= Scalar(0)) a += Scalar(2) * pi;
  return a - pi;
}

/// Planar rigid-body pose: translation (x, y) in meters plus heading theta
/// in radians. theta is normalized to (-pi, pi] at construction and every
/// component is checked finite, so no NaN/Inf ever escapes an operation.
template <typename Scalar>
class Pose2 {
 public:
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
  using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

  Pose2() : x_(0), y_(0), theta_(0) {}

  Pose2(Scalar x, Scalar y, Scalar theta) : x_(x), y_(y), theta_(wrap_angle(theta)) {
    if (!(std::isfinite(x_) && std::isfinite(y_) && std::isfinite(theta_)))
      throw std::invalid_argument("Pose2: non-finite component");
  }

  Pose2(const Vector2& t, Scalar theta) : Pose2(t.x(), t.y(), theta) {}

  static Pose2 Identity() { return Pose2(); }

  Scalar x() const { return x_; }
  Scalar y() const { return y_; }
  Scalar theta() const { return theta_; }

  Vector2 translation() const { return Vector2(x_, y_); }

  Matrix2 rotation() const {
    const Scalar c = std::cos(theta_), s = std::sin(theta_);
    Matrix2 r;
    r << c, -s, s, c;
    return r;
  }

  /// Maps a body-frame point into the world frame: R(theta) * p + t.
  Vector2 operator*(const Vector2& p_body) const {
    const Scalar c = std::cos(theta_), s = std::sin(theta_);
    return Vector2(c * p_body.x() - s * p_body.y() + x_,
                   s * p_body.x() + c * p_body.y() + y_);
  }

  /// Pose composition: (this * rhs) * p == this * (rhs * p).
  Pose2 operator*(const Pose2& rhs) const {
    const Vector2 t = (*this) * rhs.translation();
    return Pose2(t.x(), t.y(), theta_ + rhs.theta_);
  }

  Pose2 inverse() const {
    const Scalar c = std::cos(theta_), s = std::sin(theta_);
    return Pose2(-(c * x_ + s * y_), -(-s * x_ + c * y_), -theta_);
  }

 private:
  Scalar x_, y_, theta_;
};

using Pose2d = Pose2<double>;

/// The 2x2 rotation matrix [[cos, -sin], [sin, cos]].
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> rotation_matrix(Scalar theta) {
  const Scalar c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix<Scalar, 2, 2> r;
  r << c, -s, s, c;
  return r;
}

/// Element-wise body-to-world transform; length and order preserved.
template <typename Scalar>
std::vector<Eigen::Matrix<Scalar, 2, 1>> transform_to_world(
    const Pose2<Scalar>& pose, const std::vector<Eigen::Matrix<Scalar, 2, 1>>& pts_body) {
  std::vector<Eigen::Matrix<Scalar, 2, 1>> out;
  out.reserve(pts_body.size());
  for (const auto& p : pts_body) out.push_back(pose * p);
  return out;
}

/// Scalar pose-error metric: Euclidean translation distance plus the
/// absolute wrapped heading difference in [0, pi].
template <typename Scalar>
struct PoseDelta {
  Scalar position;
  Scalar orientation;
};

template <typename Scalar>
PoseDelta<Scalar> pose_error(const Pose2<Scalar>& a, const Pose2<Scalar>& b) {
  return {(a.translation() - b.translation()).norm(),
          std::abs(wrap_angle(a.theta() - b.theta()))};
}

using PoseDeltad = PoseDelta<double>;

}  // namespace ilm
