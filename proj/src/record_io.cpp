#include "ilm/record_io.hpp"

#include <fstream>

#include <json.hpp>

#include "ilm/errors.hpp"

namespace ilm {

using nlohmann::json;

void write_frames(const std::string& path, const std::vector<SimFrame>& frames) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write record file: " + path);
  out << json{{"record", "frames"}, {"version", 1}}.dump() << "\n";
  for (const auto& fr : frames) {
    json obs = json::array();
    for (int i = 0; i < fr.observations.size(); ++i) {
      obs.push_back({fr.observations.points[i].x(), fr.observations.points[i].y(),
                     std::string(1, landmark_class_code(fr.observations.classes[i])),
                     fr.observations.truth_ids[i]});
    }
    const json line = {
        {"t", fr.time},
        {"pose", {fr.true_pose.x(), fr.true_pose.y(), fr.true_pose.theta()}},
        {"u", {fr.control.v_f, fr.control.v_s, fr.control.omega}},
        {"obs", obs},
    };
    out << line.dump() << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

std::vector<SimFrame> read_frames(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open record file: " + path);

  std::vector<SimFrame> frames;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad record line: ") + e.what(), lineno);
    }
    try {
      if (!header_seen) {
        if (j.value("record", "") != "frames" || j.value("version", 0) != 1)
          throw ParseError("not a version-1 frame record file", lineno);
        header_seen = true;
        continue;
      }
      SimFrame fr;
      fr.time = j.at("t").get<double>();
      const auto& pose = j.at("pose");
      fr.true_pose = Pose2d(pose.at(0).get<double>(), pose.at(1).get<double>(),
                            pose.at(2).get<double>());
      const auto& u = j.at("u");
      fr.control = {u.at(0).get<double>(), u.at(1).get<double>(), u.at(2).get<double>()};
      for (const auto& o : j.at("obs")) {
        const std::string code = o.at(2).get<std::string>();
        if (code.size() != 1) throw ParseError("bad landmark class code", lineno);
        fr.observations.push_back({o.at(0).get<double>(), o.at(1).get<double>()},
                                  landmark_class_from_code(code[0]),
                                  o.at(3).get<int>());
      }
      frames.push_back(std::move(fr));
    } catch (const json::exception& e) {
      throw ParseError(std::string("incomplete record line: ") + e.what(), lineno);
    }
  }
  if (!header_seen) throw ParseError("missing record header: " + path);
  if (frames.empty()) throw ParseError("no frames in record file: " + path);
  return frames;
}

}  // namespace ilm
