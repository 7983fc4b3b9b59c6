#include "kinevent/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kinevent {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty()) {
    throw std::invalid_argument("config key '" + key + "': not a number: '" + value + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument("config key '" + key + "': not an integer: '" + value + "'");
  }
  return out;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

template <typename Getter>
Setter real(Getter g) {
  return [g](PipelineConfig& c, const std::string& k, const std::string& v) {
    g(c) = parse_double(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"fps", real([](PipelineConfig& c) -> double& { return c.fps; })},
      {"max_track_gap_frames",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.max_track_gap_frames = parse_int(k, v);
       }},
      {"w", [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.w = parse_int(k, v);
       }},
      {"v_theta_floor", real([](PipelineConfig& c) -> double& { return c.v_theta_floor; })},
      {"position_noise_scale",
       real([](PipelineConfig& c) -> double& { return c.smoothing.position_noise_scale; })},
      {"velocity_noise_scale",
       real([](PipelineConfig& c) -> double& { return c.smoothing.velocity_noise_scale; })},
      {"v_orient_min", real([](PipelineConfig& c) -> double& { return c.geometry.v_orient_min; })},
      {"default_vehicle_width",
       real([](PipelineConfig& c) -> double& { return c.geometry.default_vehicle_width; })},
      {"a_theta_trigger",
       real([](PipelineConfig& c) -> double& { return c.detector.a_theta_trigger; })},
      {"a_theta_border",
       real([](PipelineConfig& c) -> double& { return c.detector.a_theta_border; })},
      {"v_turn_min", real([](PipelineConfig& c) -> double& { return c.detector.v_turn_min; })},
      {"t_turn_min", real([](PipelineConfig& c) -> double& { return c.detector.t_turn_min; })},
      {"theta_min", real([](PipelineConfig& c) -> double& { return c.detector.theta_min; })},
      {"theta_max", real([](PipelineConfig& c) -> double& { return c.detector.theta_max; })},
      {"a_r_trigger", real([](PipelineConfig& c) -> double& { return c.detector.a_r_trigger; })},
      {"a_r_border", real([](PipelineConfig& c) -> double& { return c.detector.a_r_border; })},
      {"t_linear_min", real([](PipelineConfig& c) -> double& { return c.detector.t_linear_min; })},
      {"v_stop_max", real([](PipelineConfig& c) -> double& { return c.detector.v_stop_max; })},
      {"v_move_min", real([](PipelineConfig& c) -> double& { return c.detector.v_move_min; })},
      {"collision_horizon",
       real([](PipelineConfig& c) -> double& { return c.collision.horizon_s; })},
      {"collision_step", real([](PipelineConfig& c) -> double& { return c.collision.step_s; })},
  };
  return table;
}

}  // namespace

KinematicsParams PipelineConfig::kinematics() const {
  return {w.value_or(default_window_half_width(fps)), v_theta_floor};
}

void PipelineConfig::validate() const {
  if (!(fps > 0.0)) throw std::invalid_argument("fps must be positive");
  if (max_track_gap_frames < 0) throw std::invalid_argument("max_track_gap_frames must be >= 0");
  if (w && *w < 1) throw std::invalid_argument("w must be >= 1");
  if (!(smoothing.position_noise_scale > 0.0 && smoothing.velocity_noise_scale > 0.0)) {
    throw std::invalid_argument("noise scales must be positive");
  }
  if (!(geometry.default_vehicle_width > 0.0)) {
    throw std::invalid_argument("default_vehicle_width must be positive");
  }
  if (!(collision.horizon_s > 0.0 && collision.step_s > 0.0)) {
    throw std::invalid_argument("collision_horizon and collision_step must be positive");
  }
  detector.validate();
}

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
    it->second(config, key, value);
  }
  config.validate();
  return config;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in);
}

std::string format_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "fps = " << num(c.fps) << "\n"
      << "max_track_gap_frames = " << c.max_track_gap_frames << "\n"
      << "w = " << c.kinematics().w << "\n"
      << "v_theta_floor = " << num(c.v_theta_floor) << "\n"
      << "position_noise_scale = " << num(c.smoothing.position_noise_scale) << "\n"
      << "velocity_noise_scale = " << num(c.smoothing.velocity_noise_scale) << "\n"
      << "v_orient_min = " << num(c.geometry.v_orient_min) << "\n"
      << "default_vehicle_width = " << num(c.geometry.default_vehicle_width) << "\n"
      << "a_theta_trigger = " << num(c.detector.a_theta_trigger) << "\n"
      << "a_theta_border = " << num(c.detector.a_theta_border) << "\n"
      << "v_turn_min = " << num(c.detector.v_turn_min) << "\n"
      << "t_turn_min = " << num(c.detector.t_turn_min) << "\n"
      << "theta_min = " << num(c.detector.theta_min) << "\n"
      << "theta_max = " << num(c.detector.theta_max) << "\n"
      << "a_r_trigger = " << num(c.detector.a_r_trigger) << "\n"
      << "a_r_border = " << num(c.detector.a_r_border) << "\n"
      << "t_linear_min = " << num(c.detector.t_linear_min) << "\n"
      << "v_stop_max = " << num(c.detector.v_stop_max) << "\n"
      << "v_move_min = " << num(c.detector.v_move_min) << "\n"
      << "collision_horizon = " << num(c.collision.horizon_s) << "\n"
      << "collision_step = " << num(c.collision.step_s) << "\n";
  return out.str();
}

}  // namespace kinevent
