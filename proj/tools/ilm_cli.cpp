// Command-line front end: experiments, trajectory runs, map tools, replay.
// Every experiment writes deterministic result artifacts (CSV + summary.json,
// byte-identical for a fixed config+seed at any --threads) plus separate
// *timing* files that carry wall-clock measurements and are excluded from
// that guarantee. Formats are documented in docs/formats.md.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ilm/errors.hpp"
#include "ilm/experiments.hpp"
#include "ilm/parallel.hpp"
#include "ilm/random.hpp"
#include "ilm/record_io.hpp"
#include "ilm/text_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ilm;

namespace {

// ---------------------------------------------------------------------------
// Run configuration: config file merged under explicit flags (flags win).
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string map_path;
  SensorModel sensor;
  RegistrationConfig reg;
  OutlierConfig outlier;
  PipelineConfig pipeline;  // carries reg/outlier copies for trajectory runs
  std::vector<Pose2d> hypotheses;
  TrajectorySpec trajectory;
  int laps = 1;
};

void reject_unknown(const json& obj, const std::vector<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("config: unknown key \"" + key + "\" in " + where);
  }
}

Eigen::Vector3d vec3(const json& a, const std::string& where) {
  if (!a.is_array() || a.size() != 3)
    throw ValidationError("config: " + where + " must be an array of 3 numbers");
  return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("config file " + path + ": " + e.what());
  }
  reject_unknown(j, {"map", "sensor", "registration", "outlier", "filter", "amcl",
                     "hypotheses", "trajectory"},
                 "top level");

  if (j.contains("map")) cfg.map_path = j["map"].get<std::string>();
  if (j.contains("sensor")) {
    const json& s = j["sensor"];
    reject_unknown(s, {"fov_deg", "max_range", "misclassification_rate", "obs_noise_width"},
                   "sensor");
    if (s.contains("fov_deg"))
      cfg.sensor.fov = s["fov_deg"].get<double>() * std::numbers::pi / 180.0;
    if (s.contains("max_range")) cfg.sensor.max_range = s["max_range"].get<double>();
    if (s.contains("misclassification_rate"))
      cfg.sensor.misclassification_rate = s["misclassification_rate"].get<double>();
    if (s.contains("obs_noise_width"))
      cfg.sensor.obs_noise_width = s["obs_noise_width"].get<double>();
  }
  if (j.contains("registration")) {
    const json& r = j["registration"];
    reject_unknown(
        r, {"max_iteration", "convergence_tol_pos", "convergence_tol_ang", "estimator",
            "strategy"},
        "registration");
    if (r.contains("max_iteration")) cfg.reg.max_iteration = r["max_iteration"].get<int>();
    if (r.contains("convergence_tol_pos"))
      cfg.reg.convergence_tol_pos = r["convergence_tol_pos"].get<double>();
    if (r.contains("convergence_tol_ang"))
      cfg.reg.convergence_tol_ang = r["convergence_tol_ang"].get<double>();
    if (r.contains("estimator")) {
      const std::string e = r["estimator"].get<std::string>();
      if (e == "dlt") cfg.reg.estimator = Estimator::DLT;
      else if (e == "kabsch") cfg.reg.estimator = Estimator::Kabsch;
      else throw ValidationError("config: estimator must be dlt|kabsch");
    }
    if (r.contains("strategy")) {
      const std::string s = r["strategy"].get<std::string>();
      if (s == "separate") cfg.reg.strategy = MatchStrategy::Separate;
      else if (s == "identical") cfg.reg.strategy = MatchStrategy::Identical;
      else if (s == "parallel-best") cfg.reg.strategy = MatchStrategy::ParallelBest;
      else throw ValidationError("config: strategy must be separate|identical|parallel-best");
    }
  }
  if (j.contains("outlier")) {
    const json& o = j["outlier"];
    reject_unknown(o, {"error_threshold", "min_landmarks", "ransac_iterations",
                       "inlier_threshold"},
                   "outlier");
    if (o.contains("error_threshold"))
      cfg.outlier.error_threshold = o["error_threshold"].get<double>();
    if (o.contains("min_landmarks")) cfg.outlier.min_landmarks = o["min_landmarks"].get<int>();
    if (o.contains("ransac_iterations"))
      cfg.outlier.ransac_iterations = o["ransac_iterations"].get<int>();
    if (o.contains("inlier_threshold"))
      cfg.outlier.inlier_threshold = o["inlier_threshold"].get<double>();
  }
  if (j.contains("filter")) {
    const json& f = j["filter"];
    reject_unknown(f, {"particles", "process_std", "measurement_std"}, "filter");
    if (f.contains("particles")) cfg.pipeline.pf_particles = f["particles"].get<int>();
    if (f.contains("process_std"))
      cfg.pipeline.noise.process_std = vec3(f["process_std"], "filter.process_std");
    if (f.contains("measurement_std"))
      cfg.pipeline.noise.measurement_std = vec3(f["measurement_std"], "filter.measurement_std");
  }
  if (j.contains("amcl")) {
    const json& a = j["amcl"];
    reject_unknown(a, {"particles", "alpha_slow", "alpha_fast", "sensor_std"}, "amcl");
    if (a.contains("particles")) cfg.pipeline.amcl.particle_count = a["particles"].get<int>();
    if (a.contains("alpha_slow")) cfg.pipeline.amcl.alpha_slow = a["alpha_slow"].get<double>();
    if (a.contains("alpha_fast")) cfg.pipeline.amcl.alpha_fast = a["alpha_fast"].get<double>();
    if (a.contains("sensor_std")) cfg.pipeline.amcl.sensor_std = a["sensor_std"].get<double>();
  }
  if (j.contains("hypotheses")) {
    cfg.hypotheses.clear();
    for (const auto& h : j["hypotheses"]) {
      const Eigen::Vector3d v = vec3(h, "hypotheses entry");
      cfg.hypotheses.emplace_back(v.x(), v.y(), v.z());
    }
  }
  if (j.contains("trajectory")) {
    const json& t = j["trajectory"];
    reject_unknown(t, {"speed", "dt", "odom_pos_noise", "odom_ang_noise", "laps"},
                   "trajectory");
    if (t.contains("speed")) cfg.trajectory.speed = t["speed"].get<double>();
    if (t.contains("dt")) cfg.trajectory.dt = t["dt"].get<double>();
    if (t.contains("odom_pos_noise"))
      cfg.trajectory.odom_pos_noise = t["odom_pos_noise"].get<double>();
    if (t.contains("odom_ang_noise"))
      cfg.trajectory.odom_ang_noise = t["odom_ang_noise"].get<double>();
    if (t.contains("laps")) cfg.laps = t["laps"].get<int>();
  }
}

// Canonical serialization of the effective configuration; hashed into every
// summary so an archived (summary, seed) pair identifies the run.
json config_json(const RunConfig& cfg) {
  return {
      {"map", cfg.map_path},
      {"sensor",
       {{"fov_deg", cfg.sensor.fov * 180.0 / std::numbers::pi},
        {"max_range", cfg.sensor.max_range},
        {"misclassification_rate", cfg.sensor.misclassification_rate},
        {"obs_noise_width", cfg.sensor.obs_noise_width}}},
      {"registration",
       {{"max_iteration", cfg.reg.max_iteration},
        {"convergence_tol_pos", cfg.reg.convergence_tol_pos},
        {"convergence_tol_ang", cfg.reg.convergence_tol_ang},
        {"estimator", to_string(cfg.reg.estimator)},
        {"strategy", to_string(cfg.reg.strategy)}}},
      {"outlier",
       {{"error_threshold", cfg.outlier.error_threshold},
        {"min_landmarks", cfg.outlier.min_landmarks},
        {"ransac_iterations", cfg.outlier.ransac_iterations},
        {"inlier_threshold", cfg.outlier.inlier_threshold}}},
      {"filter",
       {{"particles", cfg.pipeline.pf_particles},
        {"process_std", {cfg.pipeline.noise.process_std.x(), cfg.pipeline.noise.process_std.y(),
                         cfg.pipeline.noise.process_std.z()}},
        {"measurement_std",
         {cfg.pipeline.noise.measurement_std.x(), cfg.pipeline.noise.measurement_std.y(),
          cfg.pipeline.noise.measurement_std.z()}}}},
      {"amcl",
       {{"particles", cfg.pipeline.amcl.particle_count},
        {"alpha_slow", cfg.pipeline.amcl.alpha_slow},
        {"alpha_fast", cfg.pipeline.amcl.alpha_fast},
        {"sensor_std", cfg.pipeline.amcl.sensor_std}}},
      {"trajectory",
       {{"speed", cfg.trajectory.speed},
        {"dt", cfg.trajectory.dt},
        {"odom_pos_noise", cfg.trajectory.odom_pos_noise},
        {"odom_ang_noise", cfg.trajectory.odom_ang_noise},
        {"laps", cfg.laps}}},
  };
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

FieldMap load_configured_map(const RunConfig& cfg) {
  if (cfg.map_path.empty()) return generate_default_map();
  bool warn = false;
  FieldMap map = load_map(cfg.map_path, &warn);
  if (warn)
    std::cerr << "warning: map " << cfg.map_path
              << " is not symmetric under 180-degree rotation\n";
  return map;
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write output file: " + path.string());
  return out;
}

void write_summary(const fs::path& dir, const std::string& experiment, const RunConfig& cfg,
                   std::uint64_t seed, const json& metrics) {
  const std::string canon = config_json(cfg).dump();
  const json summary = {{"experiment", experiment},
                        {"config_hash", fnv1a(canon)},
                        {"seed", seed},
                        {"metrics", metrics}};
  auto out = open_out(dir / "summary.json");
  out << summary.dump(2) << "\n";
}

void write_timing(const fs::path& dir, const json& timing) {
  auto out = open_out(dir / "timing.json");
  out << timing.dump(2) << "\n";
}

std::string fmt(double v) { return format_double(v); }

MatchStrategy parse_strategy(const std::string& s) {
  if (s == "separate") return MatchStrategy::Separate;
  if (s == "identical") return MatchStrategy::Identical;
  if (s == "parallel-best") return MatchStrategy::ParallelBest;
  throw ValidationError("--strategy must be separate|identical|parallel-best");
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

struct CommonArgs {
  std::string map_path;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware default
  bool full_scale = false;
};

RunConfig make_config(const CommonArgs& common) {
  RunConfig cfg;
  if (!common.config_path.empty()) apply_config_file(cfg, common.config_path);
  if (!common.map_path.empty()) cfg.map_path = common.map_path;  // flag wins
  cfg.pipeline.reg = cfg.reg;
  cfg.pipeline.outlier = cfg.outlier;
  return cfg;
}

int threads_of(const CommonArgs& c) { return c.threads > 0 ? c.threads : hardware_threads(); }

fs::path ensure_out_dir(const CommonArgs& c) {
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

void cmd_map_generate(const std::string& out_path, double length, double width) {
  save_map(generate_default_map(length, width), out_path);
  std::cout << "wrote " << out_path << "\n";
}

void cmd_map_validate(const std::string& path) {
  bool warn = false;
  const FieldMap map = load_map(path, &warn);
  std::cout << "map ok: " << map.landmarks().size() << " landmarks, "
            << fmt(map.field_length()) << " x " << fmt(map.field_width()) << " m"
            << (warn ? " (warning: not 180-degree symmetric)" : "") << "\n";
}

void cmd_bench(const CommonArgs& common, int samples) {
  const RunConfig cfg = make_config(common);
  const FieldMap map = load_configured_map(cfg);
  if (samples <= 0) throw ValidationError("--samples must be > 0");
  const fs::path dir = ensure_out_dir(common);

  const BenchResult r = bench_lap_solvers(samples, map, cfg.sensor, common.seed);
  const std::vector<BenchRecord> est = bench_estimators(samples, map, cfg.sensor, common.seed);

  {
    auto out = open_out(dir / "bench_check.csv");
    out << "instance,optimal_cost\n";
    for (int i = 0; i < r.instances; ++i)
      out << i << "," << fmt(r.instance_costs[i]) << "\n";
  }
  {
    auto out = open_out(dir / "bench_timing.csv");
    out << "method,samples,mean_ms,median_ms,p99_ms\n";
    for (const auto& rec : r.records)
      out << rec.method << "," << rec.samples << "," << fmt(rec.mean_ms) << ","
          << fmt(rec.median_ms) << "," << fmt(rec.p99_ms) << "\n";
    for (const auto& rec : est)
      out << rec.method << "," << rec.samples << "," << fmt(rec.mean_ms) << ","
          << fmt(rec.median_ms) << "," << fmt(rec.p99_ms) << "\n";
  }
  double checksum = 0.0;
  for (const double c : r.instance_costs) checksum += c;
  write_summary(dir, "bench", cfg, common.seed,
                {{"instances", r.instances}, {"cost_sum", checksum}});
  json timing = json::object();
  for (const auto& rec : r.records)
    timing[rec.method] = {{"mean_ms", rec.mean_ms}, {"median_ms", rec.median_ms},
                          {"p99_ms", rec.p99_ms}};
  for (const auto& rec : est)
    timing[rec.method] = {{"mean_ms", rec.mean_ms}, {"median_ms", rec.median_ms},
                          {"p99_ms", rec.p99_ms}};
  write_timing(dir, timing);
  std::cout << "bench: " << r.instances << " instances, all solvers agree\n";
}

void cmd_heatmap(const CommonArgs& common, const std::string& method, int max_iter,
                 double resolution, double tx, double ty, double ttheta, bool with_noise,
                 const std::string& strategy_flag) {
  const RunConfig cfg = make_config(common);
  const FieldMap map = load_configured_map(cfg);
  if (max_iter < 1) throw ValidationError("--max-iter must be >= 1");
  const RegMethod m = method == "icp" ? RegMethod::ICP : RegMethod::ILM;
  if (method != "icp" && method != "ilm")
    throw ValidationError("--method must be ilm|icp");
  if (m == RegMethod::ICP && !strategy_flag.empty())
    throw ValidationError("--strategy conflicts with --method icp (ICP is class-agnostic)");
  const MatchStrategy strategy =
      strategy_flag.empty() ? cfg.reg.strategy : parse_strategy(strategy_flag);
  SensorModel sensor = cfg.sensor;
  if (!with_noise) {
    sensor.obs_noise_width = 0.0;
    sensor.misclassification_rate = 0.0;
  }
  const double res = resolution > 0 ? resolution : (common.full_scale ? 0.1 : 0.25);
  const fs::path dir = ensure_out_dir(common);

  const HeatmapGrid grid = heatmap(Pose2d(tx, ty, ttheta), m, max_iter, map, sensor,
                                   common.seed, res, threads_of(common), strategy);
  {
    auto out = open_out(dir / "heatmap.csv");
    out << "x,y,correct,final_error,iterations\n";
    for (const auto& c : grid.cells)
      out << fmt(c.x) << "," << fmt(c.y) << "," << (c.correct ? 1 : 0) << ","
          << fmt(c.final_error) << "," << c.iterations << "\n";
  }
  write_summary(dir, "heatmap", cfg, common.seed,
                {{"method", to_string(m)},
                 {"max_iter", max_iter},
                 {"resolution", res},
                 {"true_pose", {tx, ty, ttheta}},
                 {"cells", grid.cells.size()},
                 {"coverage", grid.coverage}});
  std::cout << "heatmap: " << to_string(m) << " budget " << max_iter << " coverage "
            << grid.coverage << "\n";
}

void cmd_rates(const CommonArgs& common, const std::string& method, int samples, int max_iter,
               std::vector<double> pos_offsets, std::vector<double> ang_offsets,
               const std::string& strategy_flag) {
  const RunConfig cfg = make_config(common);
  const FieldMap map = load_configured_map(cfg);
  if (samples <= 0) throw ValidationError("--samples must be > 0");
  const RegMethod m = method == "icp" ? RegMethod::ICP : RegMethod::ILM;
  if (method != "icp" && method != "ilm")
    throw ValidationError("--method must be ilm|icp");
  if (m == RegMethod::ICP && !strategy_flag.empty())
    throw ValidationError("--strategy conflicts with --method icp (ICP is class-agnostic)");
  const MatchStrategy strategy =
      strategy_flag.empty() ? cfg.reg.strategy : parse_strategy(strategy_flag);
  if (pos_offsets.empty()) pos_offsets = {0.0, 0.5, 1.0, 2.0, 3.0, 5.0};
  if (ang_offsets.empty()) ang_offsets = {0.0, 0.25, 0.5, 1.0, 2.0};
  const fs::path dir = ensure_out_dir(common);

  const auto rows = matching_rate_surfaces(m, samples, pos_offsets, ang_offsets, map,
                                           cfg.sensor, common.seed, max_iter,
                                           threads_of(common), strategy);
  {
    auto out = open_out(dir / "rates.csv");
    out << "pos_offset,ang_offset,rate\n";
    for (const auto& r : rows)
      out << fmt(r.pos_offset) << "," << fmt(r.ang_offset) << "," << fmt(r.rate) << "\n";
  }
  const double rand_theta_rate = random_orientation_rate(
      Pose2d(1, 1, 0), m, samples, map, cfg.sensor, common.seed, max_iter,
      threads_of(common), strategy);
  write_summary(dir, "rates", cfg, common.seed,
                {{"method", to_string(m)},
                 {"max_iter", max_iter},
                 {"pose_samples", samples},
                 {"random_orientation_rate_at_1_1_0", rand_theta_rate}});
  std::cout << "rates: " << rows.size() << " offset pairs; random-orientation rate at "
            << "(1,1,0): " << rand_theta_rate << "\n";
}

void cmd_noise_sweep(const CommonArgs& common, int samples, std::vector<double> widths) {
  const RunConfig cfg = make_config(common);
  const FieldMap map = load_configured_map(cfg);
  if (samples <= 0) throw ValidationError("--samples must be > 0");
  if (widths.empty()) widths = {0.1, 0.2, 0.3, 0.4, 0.5};
  const fs::path dir = ensure_out_dir(common);

  const auto rows =
      sweep_pose_noise(widths, samples, map, cfg.sensor, common.seed, threads_of(common));
  {
    auto out = open_out(dir / "noise_sweep.csv");
    out << "width,method,mean_pos_error,mean_ang_error\n";
    for (const auto& r : rows)
      out << fmt(r.width) << "," << to_string(r.method) << "," << fmt(r.mean_pos_error)
          << "," << fmt(r.mean_ang_error) << "\n";
  }
  write_summary(dir, "noise_sweep", cfg, common.seed,
                {{"poses", samples}, {"widths", widths}});
  std::cout << "noise sweep: " << widths.size() << " widths x " << samples << " poses\n";
}

void run_pipeline_and_write(const CommonArgs& common, const RunConfig& cfg,
                            const FieldMap& map, const std::string& method,
                            const std::vector<SimFrame>& frames, const char* experiment) {
  const auto m = pipeline_from_string(method);
  if (!m) throw ValidationError("--method must be ilm+pf|ilm|dr|amcl");
  const fs::path dir = ensure_out_dir(common);

  const TrajectoryRunResult r = run_trajectory(*m, frames, map, cfg.pipeline, common.seed);
  {
    auto out = open_out(dir / "estimates.csv");
    out << "frame,time,true_x,true_y,true_theta,est_x,est_y,est_theta,pos_error,ang_error\n";
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const PoseDeltad e = pose_error(r.estimates[k], frames[k].true_pose);
      out << k << "," << fmt(frames[k].time) << "," << fmt(frames[k].true_pose.x()) << ","
          << fmt(frames[k].true_pose.y()) << "," << fmt(frames[k].true_pose.theta()) << ","
          << fmt(r.estimates[k].x()) << "," << fmt(r.estimates[k].y()) << ","
          << fmt(r.estimates[k].theta()) << "," << fmt(e.position) << ","
          << fmt(e.orientation) << "\n";
    }
  }
  write_summary(dir, experiment, cfg, common.seed,
                {{"method", method},
                 {"frames", frames.size()},
                 {"pos_rmse_m", r.pos_rmse},
                 {"pos_min_m", r.pos_min},
                 {"pos_max_m", r.pos_max},
                 {"ang_rmse_rad", r.ang_rmse},
                 {"ang_rmse_deg", r.ang_rmse * 180.0 / std::numbers::pi},
                 {"ang_min_rad", r.ang_min},
                 {"ang_max_rad", r.ang_max},
                 {"measurement_dropouts", r.measurement_dropouts}});
  write_timing(ensure_out_dir(common), {{"mean_frame_ms", r.mean_frame_ms}});
  std::cout << experiment << " " << method << ": pos RMSE " << r.pos_rmse << " m, ang RMSE "
            << r.ang_rmse * 180.0 / std::numbers::pi << " deg, mean frame "
            << r.mean_frame_ms << " ms\n";
}

void cmd_trajectory(const CommonArgs& common, const std::string& method,
                    const std::string& spec_name, const std::string& record_path,
                    const std::string& strategy_override) {
  RunConfig cfg = make_config(common);
  if (!strategy_override.empty()) {
    // ICP-style class-agnostic pipelines have no matching strategy to pick.
    if (method == "amcl" || method == "dr")
      throw ValidationError("--strategy applies only to ILM pipelines (" + method +
                            " is class-agnostic)");
    if (strategy_override == "separate") cfg.reg.strategy = MatchStrategy::Separate;
    else if (strategy_override == "identical") cfg.reg.strategy = MatchStrategy::Identical;
    else if (strategy_override == "parallel-best")
      cfg.reg.strategy = MatchStrategy::ParallelBest;
    else throw ValidationError("--strategy must be separate|identical|parallel-best");
    cfg.pipeline.reg = cfg.reg;
  }
  const FieldMap map = load_configured_map(cfg);
  if (spec_name != "rect") throw ValidationError("--spec must be rect");

  TrajectorySpec spec = rect_goal_box_spec(map);
  spec.speed = cfg.trajectory.speed;
  spec.dt = cfg.trajectory.dt;
  spec.odom_pos_noise = cfg.trajectory.odom_pos_noise;
  spec.odom_ang_noise = cfg.trajectory.odom_ang_noise;
  for (int lap = 1; lap < cfg.laps; ++lap) {
    const auto base = rect_goal_box_spec(map).waypoints;
    spec.waypoints.insert(spec.waypoints.end(), base.begin() + 1, base.end());
  }

  const auto frames = generate_trajectory(spec, map, cfg.sensor, common.seed);
  if (!record_path.empty()) write_frames(record_path, frames);
  run_pipeline_and_write(common, cfg, map, method, frames, "trajectory");
}

void cmd_replay(const CommonArgs& common, const std::string& records,
                const std::string& method) {
  const RunConfig cfg = make_config(common);
  const FieldMap map = load_configured_map(cfg);
  const auto frames = read_frames(records);
  run_pipeline_and_write(common, cfg, map, method, frames, "replay");
}

void cmd_global_init(const CommonArgs& common, double tx, double ty, double ttheta,
                     bool use_truth_flags) {
  const RunConfig cfg = make_config(common);
  const FieldMap map = load_configured_map(cfg);
  HypothesisSet hyp = HypothesisSet::default_for_map(map);
  if (!cfg.hypotheses.empty()) hyp.poses = cfg.hypotheses;

  const Pose2d truth = use_truth_flags ? Pose2d(tx, ty, ttheta) : hyp.poses.front();
  std::vector<ObservationSet> frames;
  for (int k = 0; k < 3; ++k)
    frames.push_back(visible_landmarks(truth, map, cfg.sensor, seed_mix(common.seed, k)));

  const fs::path dir = ensure_out_dir(common);
  json metrics;
  try {
    const Pose2d found = global_localize(frames, map, hyp, cfg.reg);
    const PoseDeltad direct = pose_error(found, truth);
    const PoseDeltad twin = pose_error(found, map.symmetric_twin(truth));
    metrics = {{"true_pose", {truth.x(), truth.y(), truth.theta()}},
               {"chosen_pose", {found.x(), found.y(), found.theta()}},
               {"pos_error_m", direct.position},
               {"ang_error_rad", direct.orientation},
               {"twin_pos_error_m", twin.position},
               {"twin_ang_error_rad", twin.orientation},
               {"resolved", direct.position < 0.5 || twin.position < 0.5}};
    std::cout << "global-init: pose (" << found.x() << ", " << found.y() << ", "
              << found.theta() << "), error " << direct.position << " m (twin "
              << twin.position << " m)\n";
  } catch (const GlobalInitFailure& e) {
    metrics = {{"true_pose", {truth.x(), truth.y(), truth.theta()}},
               {"failure", e.what()},
               {"resolved", false}};
    std::cout << "global-init failed: " << e.what() << "\n";
  }
  write_summary(dir, "global_init", cfg, common.seed, metrics);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landmark-based 2D localization toolkit: iterative landmark matching, "
               "exact assignment solvers, robust pose estimation, filter fusion, and a "
               "deterministic simulation/benchmark harness"};
  app.require_subcommand(1);

  CommonArgs common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--map", common.map_path, "Field map file (default: built-in map)");
    sub->add_option("--config", common.config_path, "JSON run configuration file");
    sub->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    sub->add_option("--threads", common.threads,
                    "Worker threads (default: hardware concurrency)");
    sub->add_flag("--full-scale", common.full_scale,
                  "Paper-scale sample counts instead of desk-scale defaults");
  };

  // map tools
  auto* map_cmd = app.add_subcommand("map", "Generate or validate field map files");
  map_cmd->require_subcommand(1);
  auto* map_gen = map_cmd->add_subcommand("generate", "Write the default generated map");
  std::string map_out = "field_map.txt";
  double gen_length = 14.0, gen_width = 9.0;
  map_gen->add_option("--out", map_out, "Output map path")->capture_default_str();
  map_gen->add_option("--length", gen_length, "Field length, m")->capture_default_str();
  map_gen->add_option("--width", gen_width, "Field width, m")->capture_default_str();
  auto* map_val = map_cmd->add_subcommand("validate", "Validate a map file");
  std::string map_in;
  map_val->add_option("--map", map_in, "Map file to validate")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Time the three LAP solvers on matching instances");
  int bench_samples = -1;
  bench->add_option("--samples", bench_samples, "Matching instances (default 10000)");
  add_common(bench);

  // heatmap
  auto* heat = app.add_subcommand("heatmap", "Correct-matching heatmap over initial guesses");
  std::string heat_method = "ilm";
  int heat_iter = 8;
  double heat_res = -1.0, heat_tx = 1.0, heat_ty = 1.0, heat_tth = 0.0;
  bool heat_noise = false;
  heat->add_option("--method", heat_method, "ilm|icp")->capture_default_str();
  heat->add_option("--max-iter", heat_iter, "Iteration budget")->capture_default_str();
  heat->add_option("--resolution", heat_res, "Grid resolution, m (default 0.25)");
  heat->add_option("--true-x", heat_tx, "True pose x")->capture_default_str();
  heat->add_option("--true-y", heat_ty, "True pose y")->capture_default_str();
  heat->add_option("--true-theta", heat_tth, "True pose theta")->capture_default_str();
  heat->add_flag("--noise", heat_noise, "Keep configured observation noise active");
  std::string heat_strategy;
  heat->add_option("--strategy", heat_strategy,
                   "Matching strategy for ILM (separate|identical|parallel-best)");
  add_common(heat);

  // rates
  auto* rates = app.add_subcommand("rates", "Correct-matching rate vs initial-guess offsets");
  std::string rates_method = "ilm";
  int rates_samples = -1, rates_iter = 8;
  std::vector<double> rates_pos, rates_ang;
  rates->add_option("--method", rates_method, "ilm|icp")->capture_default_str();
  rates->add_option("--samples", rates_samples, "True-pose samples (default 300)");
  rates->add_option("--max-iter", rates_iter, "Iteration budget")->capture_default_str();
  rates->add_option("--pos-offsets", rates_pos, "Initial position offsets, m");
  rates->add_option("--ang-offsets", rates_ang, "Initial orientation offsets, rad");
  std::string rates_strategy;
  rates->add_option("--strategy", rates_strategy,
                    "Matching strategy for ILM (separate|identical|parallel-best)");
  add_common(rates);

  // noise-sweep
  auto* sweep = app.add_subcommand("noise-sweep", "DLT vs Kabsch error under uniform noise");
  int sweep_samples = -1;
  std::vector<double> sweep_widths;
  sweep->add_option("--samples", sweep_samples, "Poses per width (default 10000)");
  sweep->add_option("--widths", sweep_widths, "Noise half-widths, m");
  add_common(sweep);

  // trajectory
  auto* traj = app.add_subcommand("trajectory", "Run a localization pipeline along a trajectory");
  std::string traj_method = "ilm+pf", traj_spec = "rect", traj_record;
  std::string traj_strategy;
  traj->add_option("--method", traj_method, "ilm+pf|ilm|dr|amcl")->capture_default_str();
  traj->add_option("--spec", traj_spec, "Trajectory spec name")->capture_default_str();
  traj->add_option("--record", traj_record, "Export the simulated frames to this file");
  traj->add_option("--strategy", traj_strategy,
                   "Matching strategy override (separate|identical|parallel-best)");
  add_common(traj);

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run a pipeline over an exported record file");
  std::string replay_records, replay_method = "ilm+pf";
  replay->add_option("--records", replay_records, "Frame record file")->required();
  replay->add_option("--method", replay_method, "ilm+pf|ilm|dr|amcl")->capture_default_str();
  add_common(replay);

  // global-init
  auto* ginit = app.add_subcommand("global-init", "Multi-hypothesis start-of-game localization");
  double gi_tx = 0, gi_ty = 0, gi_tth = 0;
  auto* gi_x = ginit->add_option("--true-x", gi_tx, "True pose x");
  ginit->add_option("--true-y", gi_ty, "True pose y");
  ginit->add_option("--true-theta", gi_tth, "True pose theta");
  add_common(ginit);

  CLI11_PARSE(app, argc, argv);

  try {
    if (map_gen->parsed()) {
      cmd_map_generate(map_out, gen_length, gen_width);
    } else if (map_val->parsed()) {
      cmd_map_validate(map_in);
    } else if (bench->parsed()) {
      if (bench_samples < 0) bench_samples = common.full_scale ? 100000 : 10000;
      cmd_bench(common, bench_samples);
    } else if (heat->parsed()) {
      cmd_heatmap(common, heat_method, heat_iter, heat_res, heat_tx, heat_ty, heat_tth,
                  heat_noise, heat_strategy);
    } else if (rates->parsed()) {
      if (rates_samples < 0) rates_samples = common.full_scale ? 3000 : 300;
      cmd_rates(common, rates_method, rates_samples, rates_iter, rates_pos, rates_ang,
                rates_strategy);
    } else if (sweep->parsed()) {
      if (sweep_samples < 0) sweep_samples = common.full_scale ? 100000 : 10000;
      cmd_noise_sweep(common, sweep_samples, sweep_widths);
    } else if (traj->parsed()) {
      cmd_trajectory(common, traj_method, traj_spec, traj_record, traj_strategy);
    } else if (replay->parsed()) {
      cmd_replay(common, replay_records, replay_method);
    } else if (ginit->parsed()) {
      cmd_global_init(common, gi_tx, gi_ty, gi_tth, gi_x->count() > 0);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
