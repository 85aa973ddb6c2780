#include "ilm/field_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ilm/text_io.hpp"

namespace ilm {

char landmark_class_code(LandmarkClass c) {
  switch (c) {
    case LandmarkClass::Corner: return 'L';
    case LandmarkClass::TIntersection: return 'T';
    case LandmarkClass::Cross: return 'X';
    case LandmarkClass::GoalPost: return 'G';
  }
  throw ValidationError("unknown landmark class");
}

LandmarkClass landmark_class_from_code(char code) {
  switch (code) {
    case 'L': return LandmarkClass::Corner;
    case 'T': return LandmarkClass::TIntersection;
    case 'X': return LandmarkClass::Cross;
    case 'G': return LandmarkClass::GoalPost;
  }
  throw ValidationError(std::string("unknown landmark class code '") + code + "'");
}

FieldMap::FieldMap(std::vector<Landmark> landmarks, double field_length, double field_width)
    : landmarks_(std::move(landmarks)), field_length_(field_length), field_width_(field_width) {
  if (field_length_ <= 0 || field_width_ <= 0)
    throw ValidationError("field dimensions must be positive");
  if (landmarks_.size() < 4)
    throw ValidationError("map needs at least 4 landmarks, got " +
                          std::to_string(landmarks_.size()));
  std::set<int> seen;
  for (const auto& lm : landmarks_) {
    if (!seen.insert(lm.id).second)
      throw ValidationError("duplicate landmark id " + std::to_string(lm.id));
    if (!lm.position.allFinite())
      throw ValidationError("landmark " + std::to_string(lm.id) + " has non-finite position");
    // Landmarks sit on or near the lines; allow a margin of half the border strip.
    if (!in_field(lm.position, 1.0))
      throw ValidationError("landmark " + std::to_string(lm.id) + " outside field bounds");
  }
}

const Landmark& FieldMap::by_id(int id) const {
  for (const auto& lm : landmarks_)
    if (lm.id == id) return lm;
  throw ValidationError("no landmark with id " + std::to_string(id));
}

std::vector<int> FieldMap::indices_of_class(LandmarkClass c) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(landmarks_.size()); ++i)
    if (landmarks_[i].cls == c) out.push_back(i);
  return out;
}

bool FieldMap::has_class(LandmarkClass c) const {
  return std::any_of(landmarks_.begin(), landmarks_.end(),
                     [c](const Landmark& lm) { return lm.cls == c; });
}

bool FieldMap::is_symmetric(double tol) const {
  for (const auto& lm : landmarks_) {
    const Eigen::Vector2d mirrored = -lm.position;
    const bool found = std::any_of(
        landmarks_.begin(), landmarks_.end(), [&](const Landmark& other) {
          return other.cls == lm.cls && (other.position - mirrored).norm() <= tol;
        });
    if (!found) return false;
  }
  return true;
}

FieldMap generate_default_map(double field_length, double field_width) {
  if (field_length <= 0 || field_width <= 0)
    throw ValidationError("field dimensions must be positive");

  // AdultSize reference layout (14 x 9), scaled linearly per axis.
  const double sx = field_length / 14.0;
  const double sy = field_width / 9.0;
  const double half_l = field_length / 2.0;
  const double half_w = field_width / 2.0;
  const double goal_area_depth = 1.0 * sx;       // E
  const double goal_area_half_w = 2.0 * sy;      // F/2
  const double penalty_depth = 3.0 * sx;         // J
  const double penalty_half_w = 3.0 * sy;        // K/2
  const double penalty_mark = 2.1 * sx;          // G
  const double circle_radius = 1.5 * sy;         // H/2
  const double goal_half_w = 1.3 * sy;           // D/2

  std::vector<Landmark> lms;
  int id = 0;
  auto add = [&](LandmarkClass cls, double x, double y) {
    lms.push_back({id++, cls, {x, y}});
  };

  const double sides[2] = {-1.0, 1.0};
  // Corners: field, goal area fronts, penalty area fronts.
  for (double s : sides)
    for (double t : sides) add(LandmarkClass::Corner, s * half_l, t * half_w);
  for (double s : sides)
    for (double t : sides)
      add(LandmarkClass::Corner, s * (half_l - goal_area_depth), t * goal_area_half_w);
  for (double s : sides)
    for (double t : sides)
      add(LandmarkClass::Corner, s * (half_l - penalty_depth), t * penalty_half_w);
  // T junctions: area lines meeting the goal lines; halfway line at the touch lines.
  for (double s : sides)
    for (double t : sides) add(LandmarkClass::TIntersection, s * half_l, t * goal_area_half_w);
  for (double s : sides)
    for (double t : sides) add(LandmarkClass::TIntersection, s * half_l, t * penalty_half_w);
  for (double t : sides) add(LandmarkClass::TIntersection, 0.0, t * half_w);
  // Crosses: center mark, penalty marks, center circle on the halfway line.
  add(LandmarkClass::Cross, 0.0, 0.0);
  for (double s : sides) add(LandmarkClass::Cross, s * (half_l - penalty_mark), 0.0);
  for (double t : sides) add(LandmarkClass::Cross, 0.0, t * circle_radius);
  // Goal posts on the goal lines.
  for (double s : sides)
    for (double t : sides) add(LandmarkClass::GoalPost, s * half_l, t * goal_half_w);

  return FieldMap(std::move(lms), field_length, field_width);
}

namespace {

// First whitespace-separated token and the rest of the line.
std::pair<std::string, std::string> split_first(const std::string& line) {
  std::istringstream ss(line);
  std::string head;
  ss >> head;
  std::string rest;
  std::getline(ss, rest);
  return {head, rest};
}

}  // namespace

FieldMap load_map(const std::string& path, bool* symmetry_warning) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open map file: " + path);

  int version = -1;
  double field_length = -1, field_width = -1;
  long declared = -1;
  std::vector<Landmark> lms;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto [head, rest] = split_first(line);
    if (head.empty() || head[0] == '#') continue;
    std::istringstream ss(rest);
    if (head == "version") {
      if (!(ss >> version) || version != 1)
        throw ParseError("unsupported or missing map schema version", lineno);
    } else if (head == "field_length") {
      if (!(ss >> field_length)) throw ParseError("bad field_length", lineno);
    } else if (head == "field_width") {
      if (!(ss >> field_width)) throw ParseError("bad field_width", lineno);
    } else if (head == "landmarks") {
      if (!(ss >> declared)) throw ParseError("bad landmark count", lineno);
    } else {
      // Landmark row: <id> <class> <x> <y>
      Landmark lm;
      char code;
      std::istringstream row(line);
      if (!(row >> lm.id >> code >> lm.position.x() >> lm.position.y()))
        throw ParseError("malformed landmark row", lineno);
      try {
        lm.cls = landmark_class_from_code(code);
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), lineno);
      }
      lms.push_back(lm);
    }
  }
  if (version != 1) throw ParseError("map file missing version header: " + path);
  if (field_length <= 0 || field_width <= 0)
    throw ParseError("map file missing field dimensions: " + path);
  if (declared >= 0 && declared != static_cast<long>(lms.size()))
    throw ParseError("map declares " + std::to_string(declared) + " landmarks but has " +
                     std::to_string(lms.size()));
  if (lms.empty()) throw ValidationError("map has empty landmark list: " + path);

  FieldMap map(std::move(lms), field_length, field_width);
  if (symmetry_warning) *symmetry_warning = !map.is_symmetric();
  return map;
}

void save_map(const FieldMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write map file: " + path);
  out << "# landmark field map\n";
  out << "version 1\n";
  out << "field_length " << format_double(map.field_length()) << "\n";
  out << "field_width " << format_double(map.field_width()) << "\n";
  out << "landmarks " << map.landmarks().size() << "\n";
  for (const auto& lm : map.landmarks()) {
    out << lm.id << " " << landmark_class_code(lm.cls) << " "
        << format_double(lm.position.x()) << " " << format_double(lm.position.y()) << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace ilm
