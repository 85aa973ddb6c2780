#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "ilm/errors.hpp"
#include "ilm/geometry.hpp"

namespace ilm {

/// Landmark taxonomy of the soccer field: line corners (L), T-intersections
/// (T), crosses/marks (X) and goal posts (G).
enum class LandmarkClass : int {
  Corner = 0,
  TIntersection = 1,
  Cross = 2,
  GoalPost = 3,
};

inline constexpr int kNumLandmarkClasses = 4;

char landmark_class_code(LandmarkClass c);
LandmarkClass landmark_class_from_code(char code);

struct Landmark {
  int id = 0;
  LandmarkClass cls = LandmarkClass::Corner;
  Eigen::Vector2d position{0.0, 0.0};  // world frame, meters
};

/// The a-priori landmark map. Immutable after construction; construction
/// validates unique ids, a minimum of 4 landmarks, and in-bounds positions.
/// 180-degree rotational symmetry is checked separately (is_symmetric) and
/// reported as a warning by loaders, never an error: custom test maps may
/// legitimately be asymmetric.
class FieldMap {
 public:
  FieldMap(std::vector<Landmark> landmarks, double field_length, double field_width);

  const std::vector<Landmark>& landmarks() const { return landmarks_; }
  double field_length() const { return field_length_; }
  double field_width() const { return field_width_; }

  const Landmark& by_id(int id) const;
  std::vector<int> indices_of_class(LandmarkClass c) const;
  bool has_class(LandmarkClass c) const;

  /// True iff for every landmark at p with class c there is one at -p
  /// (about the field center) with the same class.
  bool is_symmetric(double tol = 1e-9) const;

  /// Pose of equal appearance on a symmetric field: rotate 180 degrees
  /// about the center.
  Pose2d symmetric_twin(const Pose2d& pose) const {
    return Pose2d(-pose.x(), -pose.y(), pose.theta() + std::numbers::pi);
  }

  bool in_field(const Eigen::Vector2d& p, double margin = 0.0) const {
    return std::abs(p.x()) <= field_length_ / 2 + margin &&
           std::abs(p.y()) <= field_width_ / 2 + margin;
  }

 private:
  std::vector<Landmark> landmarks_;
  double field_length_;
  double field_width_;
};

/// Deterministic default map derived from the RoboCup Humanoid AdultSize
/// line layout, scaled to (field_length, field_width). Corners of the field,
/// goal area and penalty area are class L; junctions of area lines with the
/// goal line and of the halfway line with the touch lines are T; center
/// mark, penalty marks and center-circle/halfway intersections are X; the
/// four goal posts are G. Symmetric under 180-degree rotation by
/// construction.
FieldMap generate_default_map(double field_length = 14.0, double field_width = 9.0);

/// Loads the documented text format (see docs/formats.md). Throws ParseError
/// for malformed files and ValidationError (naming the offending landmark
/// ids) for invariant violations. Asymmetry is reported through
/// *symmetry_warning when the pointer is non-null.
FieldMap load_map(const std::string& path, bool* symmetry_warning = nullptr);

void save_map(const FieldMap& map, const std::string& path);

}  // namespace ilm
