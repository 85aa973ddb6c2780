#include "ilm/pose_estimation.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

#include "ilm/errors.hpp"

namespace ilm {

const char* to_string(Estimator e) {
  return e == Estimator::DLT ? "dlt" : "kabsch";
}

namespace {

void check_pairs(const PointPairSet& pairs) {
  if (pairs.body.size() != pairs.world.size())
    throw std::invalid_argument("point pair set: body/world length mismatch");
  if (pairs.size() < 2)
    throw InsufficientLandmarks("pose estimation needs at least 2 point pairs, got " +
                                std::to_string(pairs.size()));
  for (const auto& p : pairs.body)
    if (!p.allFinite()) throw std::invalid_argument("non-finite body point");
  for (const auto& p : pairs.world)
    if (!p.allFinite()) throw std::invalid_argument("non-finite world point");
}

// Largest distance of a point from the set's centroid; zero spread means
// the rotation is unobservable.
double spread(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, (p - centroid).norm());
  return s;
}

}  // namespace

double pair_rms(const Pose2d& pose, const PointPairSet& pairs) {
  double ss = 0.0;
  for (int i = 0; i < pairs.size(); ++i)
    ss += (pairs.world[i] - pose * pairs.body[i]).squaredNorm();
  return std::sqrt(ss / pairs.size());
}

PoseEstimate estimate_pose_dlt(const PointPairSet& pairs) {
  check_pairs(pairs);
  const int n = pairs.size();

  Eigen::MatrixXd a(2 * n, 4);
  Eigen::VectorXd b(2 * n);
  for (int i = 0; i < n; ++i) {
    const auto& pb = pairs.body[i];
    const auto& pw = pairs.world[i];
    a.row(2 * i) << pb.x(), -pb.y(), 1.0, 0.0;
    a.row(2 * i + 1) << pb.y(), pb.x(), 0.0, 1.0;
    b(2 * i) = pw.x();
    b(2 * i + 1) = pw.y();
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 4)
    throw DegenerateGeometry("dlt: rank-deficient system (coincident body points)");
  const Eigen::Vector4d m = qr.solve(b);

  const double theta = std::atan2(m(1), m(0));
  PoseEstimate est;
  est.pose = Pose2d(m(2), m(3), theta);
  est.residual_rms = pair_rms(est.pose, pairs);
  est.method = Estimator::DLT;
  return est;
}

PoseEstimate estimate_pose_kabsch(const PointPairSet& pairs) {
  check_pairs(pairs);
  const int n = pairs.size();

  Eigen::Vector2d bc = Eigen::Vector2d::Zero(), wc = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) {
    bc += pairs.body[i];
    wc += pairs.world[i];
  }
  bc /= n;
  wc /= n;

  if (spread(pairs.body) < 1e-12 || spread(pairs.world) < 1e-12)
    throw DegenerateGeometry("kabsch: coincident points, rotation unobservable");

  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i)
    h += (pairs.body[i] - bc) * (pairs.world[i] - wc).transpose();

  Eigen::JacobiSVD<Eigen::Matrix2d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d u = svd.matrixU();
  Eigen::Matrix2d v = svd.matrixV();
  Eigen::Matrix2d r = v * u.transpose();
  if (r.determinant() < 0) {
    v.col(1) = -v.col(1);
    r = v * u.transpose();
  }

  const double theta = std::atan2(r(1, 0), r(0, 0));
  const Eigen::Vector2d t = wc - r * bc;
  PoseEstimate est;
  est.pose = Pose2d(t.x(), t.y(), theta);
  est.residual_rms = pair_rms(est.pose, pairs);
  est.method = Estimator::Kabsch;
  return est;
}

PoseEstimate estimate_pose(Estimator method, const PointPairSet& pairs) {
  return method == Estimator::DLT ? estimate_pose_dlt(pairs) : estimate_pose_kabsch(pairs);
}

}  // namespace ilm
