#include "kinevent/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace kinevent {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& field, const char* name) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != field.size() || !std::isfinite(v)) {
    throw InputError(std::string("bad ") + name + " '" + field + "'");
  }
  return v;
}

std::int64_t to_int(const std::string& field, const char* name) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(field, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != field.size()) {
    throw InputError(std::string("bad ") + name + " '" + field + "'");
  }
  return v;
}

Polygon parse_contour_text(const std::string& text) {
  Polygon poly;
  for (const auto& pair : split(text, ';')) {
    const auto xy = split(trim(pair), ':');
    if (xy.size() != 2) throw InputError("bad contour vertex '" + pair + "'");
    poly.emplace_back(to_double(trim(xy[0]), "contour x"), to_double(trim(xy[1]), "contour y"));
  }
  return poly;
}

TrackPoint parse_csv_record(const std::string& line) {
  auto fields = split(line, ',');
  if (fields.size() != 8 && fields.size() != 9) {
    throw InputError("expected 8 or 9 comma-separated fields, got " +
                     std::to_string(fields.size()));
  }
  for (auto& f : fields) f = trim(f);
  TrackPoint p;
  p.frame_index = to_int(fields[0], "frame");
  p.track_id = to_int(fields[1], "track_id");
  const auto cls = vehicle_class_from_string(fields[2]);
  if (!cls) throw InputError("unknown class '" + fields[2] + "'");
  p.class_label = *cls;
  p.confidence = to_double(fields[3], "confidence");
  p.bbox = {to_double(fields[4], "left"), to_double(fields[5], "top"),
            to_double(fields[6], "width"), to_double(fields[7], "height")};
  if (fields.size() == 9) {
    const std::string prefix = "contour=";
    if (fields[8].rfind(prefix, 0) != 0) throw InputError("ninth field must start with contour=");
    p.contour = parse_contour_text(fields[8].substr(prefix.size()));
  }
  return p;
}

TrackPoint parse_json_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  TrackPoint p;
  try {
    p.frame_index = j.at("frame").get<std::int64_t>();
    p.track_id = j.at("track_id").get<std::int64_t>();
    const auto name = j.at("class").get<std::string>();
    const auto cls = vehicle_class_from_string(name);
    if (!cls) throw InputError("unknown class '" + name + "'");
    p.class_label = *cls;
    p.confidence = j.at("confidence").get<double>();
    p.bbox = {j.at("left").get<double>(), j.at("top").get<double>(), j.at("width").get<double>(),
              j.at("height").get<double>()};
    if (j.contains("contour") && !j["contour"].is_null()) {
      Polygon poly;
      for (const auto& v : j["contour"]) poly.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      p.contour = std::move(poly);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad record: ") + e.what());
  }
  return p;
}

void check_record(const TrackPoint& p) {
  if (p.frame_index < 0) throw InputError("negative frame index");
  if (!(p.bbox.width > 0.0) || !(p.bbox.height > 0.0)) {
    throw InputError("box width and height must be positive");
  }
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
    throw InputError("confidence outside [0, 1]");
  }
  if (p.contour) {
    if (p.contour->size() < 3) throw InputError("contour needs at least 3 vertices");
    if (!is_simple_polygon(*p.contour)) throw InputError("contour is self-intersecting");
  }
}

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return true;
  }
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <int R, int C>
Eigen::Matrix<double, R, C> matrix_from_json(const json& j, const char* name) {
  Eigen::Matrix<double, R, C> m;
  if (!j.is_array() || j.size() != R) {
    throw InputError(std::string(name) + " must have " + std::to_string(R) + " rows");
  }
  for (int r = 0; r < R; ++r) {
    if (!j[r].is_array() || j[r].size() != C) {
      throw InputError(std::string(name) + " must have " + std::to_string(C) + " columns");
    }
    for (int c = 0; c < C; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

template <int R, int C>
json matrix_to_json(const Eigen::Matrix<double, R, C>& m) {
  json out = json::array();
  for (int r = 0; r < R; ++r) {
    json row = json::array();
    for (int c = 0; c < C; ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Vec2 vec2_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 2) throw InputError(std::string(name) + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<LineSegment> segments_from_json(const json& j) {
  std::vector<LineSegment> out;
  for (const auto& s : j) {
    // Either [[x0, y0], [x1, y1]] or [x0, y0, x1, y1].
    if (s.size() == 4) {
      out.push_back({{s[0].get<double>(), s[1].get<double>()}, {s[2].get<double>(), s[3].get<double>()}});
    } else {
      out.push_back({vec2_from_json(s.at(0), "segment end"), vec2_from_json(s.at(1), "segment end")});
    }
  }
  return out;
}

std::optional<ScaleReference> scale_from_json(const json& j) {
  const bool seg = j.contains("scale_segment");
  const bool h = j.contains("camera_height_m");
  if (seg && h) throw InputError("give either scale_segment or camera_height_m, not both");
  if (seg) {
    const auto& s = j["scale_segment"];
    return GroundSegmentRef{vec2_from_json(s.at("a"), "scale_segment.a"),
                            vec2_from_json(s.at("b"), "scale_segment.b"),
                            s.at("meters").get<double>()};
  }
  if (h) return CameraHeightRef{j["camera_height_m"].get<double>()};
  return std::nullopt;
}

Vec2 finite_vp(const HomogeneousPoint& p, const char* name) {
  if (p.at_infinity()) {
    throw GeometryError(GeometryErrc::at_infinity,
                        std::string(name) + " vanishing point lies at infinity");
  }
  return p.point();
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

VehicleScript vehicle_from_json(const json& j, std::vector<EventRecord>& events) {
  VehicleScript v;
  const auto id = j.at("track_id").get<std::int64_t>();
  const auto cls = vehicle_class_from_string(j.value("class", std::string("car")));
  if (!cls) throw InputError("unknown vehicle class");
  const double length = j.value("length", 4.5);
  const double width = j.value("width", 1.8);
  const double height = j.value("height", 1.5);
  if (j.contains("waypoints")) {
    v.track_id = id;
    v.class_label = *cls;
    v.length = length;
    v.width = width;
    v.height = height;
    for (const auto& w : j["waypoints"]) {
      v.waypoints.push_back({w.at(0).get<double>(), {w.at(1).get<double>(), w.at(2).get<double>()}});
    }
    return v;
  }
  const auto& m = j.at("maneuvers");
  ManeuverBuilder b(id, vec2_from_json(m.at("start"), "start"), m.value("heading_deg", 0.0),
                    m.value("t0", 0.0), m.value("speed", 0.0));
  b.dimensions(length, width, height).vehicle_class(*cls);
  for (const auto& step : m.at("steps")) {
    if (step.contains("cruise")) {
      b.cruise(step["cruise"].get<double>());
    } else if (step.contains("turn")) {
      b.turn(step["turn"].get<double>(), step.at("radius").get<double>());
    } else if (step.contains("change_speed")) {
      b.change_speed(step["change_speed"].get<double>(), step.at("duration").get<double>());
    } else if (step.contains("wait")) {
      b.wait(step["wait"].get<double>());
    } else {
      throw InputError("unknown manoeuvre step " + step.dump());
    }
  }
  events.insert(events.end(), b.events().begin(), b.events().end());
  return b.script();
}

}  // namespace

bool is_simple_polygon(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((poly[i] - poly[(i + 1) % n]).norm() == 0.0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex (no folding back).
        const std::size_t a = (i == 0 && j == n - 1) ? j : i;
        const Vec2& p = poly[a];
        const Vec2& q = poly[(a + 1) % n];
        const Vec2& r = poly[(a + 2) % n];
        if (orient(p, q, r) == 0.0 && (r - q).dot(p - q) > 0.0) return false;
        continue;
      }
      if (segments_touch(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

std::vector<TrackPoint> parse_tracks(std::istream& in, double fps) {
  if (!(fps > 0.0)) throw InputError("fps must be positive");
  std::vector<TrackPoint> out;
  std::vector<int> line_of;
  std::vector<std::string> errors;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t.rfind("frame", 0) == 0) continue;
    try {
      TrackPoint p = t[0] == '{' ? parse_json_record(t) : parse_csv_record(t);
      check_record(p);
      p.time_s = static_cast<double>(p.frame_index) / fps;
      out.push_back(std::move(p));
      line_of.push_back(lineno);
    } catch (const InputError& e) {
      errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }

  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(out[a].track_id, out[a].frame_index) <
           std::tie(out[b].track_id, out[b].frame_index);
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& a = out[order[k - 1]];
    const auto& b = out[order[k]];
    if (a.track_id == b.track_id && a.frame_index == b.frame_index) {
      errors.push_back("lines " + std::to_string(line_of[order[k - 1]]) + " and " +
                       std::to_string(line_of[order[k]]) + ": duplicate (track " +
                       std::to_string(a.track_id) + ", frame " + std::to_string(a.frame_index) +
                       ")");
    }
  }
  if (!errors.empty()) {
    std::string msg = "malformed track input:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw InputError(msg);
  }
  std::vector<TrackPoint> sorted;
  sorted.reserve(out.size());
  for (std::size_t i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

void write_tracks_csv(std::ostream& out, std::span<const TrackPoint> tracks) {
  out << "frame,track_id,class,confidence,left,top,width,height,contour\n";
  const auto flags = out.flags();
  const auto prec = out.precision(10);
  for (const auto& p : tracks) {
    out << p.frame_index << ',' << p.track_id << ',' << to_string(p.class_label) << ','
        << p.confidence << ',' << p.bbox.left << ',' << p.bbox.top << ',' << p.bbox.width << ','
        << p.bbox.height;
    if (p.contour) {
      out << ",contour=";
      for (std::size_t i = 0; i < p.contour->size(); ++i) {
        if (i) out << ';';
        out << (*p.contour)[i].x() << ':' << (*p.contour)[i].y();
      }
    }
    out << '\n';
  }
  out.precision(prec);
  out.flags(flags);
}

json event_to_json(const EventRecord& e) {
  json j = {{"type", std::string(to_string(e.type))},
            {"track_id", e.track_id},
            {"t_start_s", e.t_s},
            {"t_end_s", e.t_e},
            {"theta_deg", nullable(e.theta_deg)},
            {"v_start_mps", nullable(e.v_start)},
            {"v_end_mps", nullable(e.v_end)},
            {"score", e.score}};
  if (!e.video_id.empty()) j["video_id"] = e.video_id;
  return j;
}

EventRecord event_from_json(const json& j) {
  EventRecord e;
  try {
    const auto name = j.at("type").get<std::string>();
    const auto type = event_type_from_string(name);
    if (!type) throw InputError("unknown event type '" + name + "'");
    e.type = *type;
    e.track_id = j.value("track_id", std::int64_t{0});
    e.t_s = j.at("t_start_s").get<double>();
    e.t_e = j.at("t_end_s").get<double>();
    e.theta_deg = optional_number(j, "theta_deg");
    e.v_start = optional_number(j, "v_start_mps");
    e.v_end = optional_number(j, "v_end_mps");
    e.score = j.value("score", 1.0);
    e.video_id = j.value("video_id", std::string());
  } catch (const json::exception& ex) {
    throw InputError(std::string("bad event record: ") + ex.what());
  }
  return e;
}

void write_events_jsonl(std::ostream& out, std::span<const EventRecord> events) {
  for (const auto& e : events) out << event_to_json(e).dump() << '\n';
}

template <typename T, typename F>
std::vector<T> read_jsonl(std::istream& in, F convert) {
  std::vector<T> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(convert(json::parse(line)));
    } catch (const std::exception& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<EventRecord> read_events_jsonl(std::istream& in) {
  return read_jsonl<EventRecord>(in, [](const json& j) { return event_from_json(j); });
}

void write_collisions_jsonl(std::ostream& out, std::span<const CollisionAlert> alerts) {
  for (const auto& a : alerts) {
    json j = {{"t_s", a.t_s},
              {"track_a", a.track_a},
              {"track_b", a.track_b},
              {"horizon_s", a.horizon_s},
              {"predicted_overlap", true},
              {"min_distance_now_m", a.min_distance_now}};
    out << j.dump() << '\n';
  }
}

void write_pair_distances_csv(std::ostream& out, std::span<const PairDistance> distances) {
  out << "t_s,track_a,track_b,distance_m\n";
  for (const auto& d : distances) {
    out << d.t_s << ',' << d.track_a << ',' << d.track_b << ',' << d.distance_m << '\n';
  }
}

json annotation_to_json(const GroundTruthEvent& g) {
  json frames = json::array();
  for (const auto& [f, b] : g.frames) {
    frames.push_back({{"frame", f}, {"left", b.left}, {"top", b.top}, {"width", b.width},
                      {"height", b.height}});
  }
  return {{"video_id", g.video_id},   {"type", std::string(to_string(g.type))},
          {"t_start_s", g.t_s},       {"t_end_s", g.t_e},
          {"frames", std::move(frames)}};
}

GroundTruthEvent annotation_from_json(const json& j) {
  GroundTruthEvent g;
  try {
    g.video_id = j.value("video_id", std::string());
    const auto name = j.at("type").get<std::string>();
    const auto type = event_type_from_string(name);
    if (!type) throw InputError("unknown event type '" + name + "'");
    g.type = *type;
    g.t_s = j.at("t_start_s").get<double>();
    g.t_e = j.at("t_end_s").get<double>();
    if (!(g.t_e > g.t_s)) throw InputError("annotation must have t_end_s > t_start_s");
    if (j.contains("frames")) {
      for (const auto& f : j["frames"]) {
        const auto idx = f.at("frame").get<std::int64_t>();
        if (g.frames.count(idx)) throw InputError("annotation repeats frame " + std::to_string(idx));
        g.frames[idx] = {f.at("left").get<double>(), f.at("top").get<double>(),
                         f.at("width").get<double>(), f.at("height").get<double>()};
      }
    }
  } catch (const json::exception& ex) {
    throw InputError(std::string("bad annotation: ") + ex.what());
  }
  return g;
}

void write_annotations_jsonl(std::ostream& out, std::span<const GroundTruthEvent> gts) {
  for (const auto& g : gts) out << annotation_to_json(g).dump() << '\n';
}

std::vector<GroundTruthEvent> read_annotations_jsonl(std::istream& in) {
  return read_jsonl<GroundTruthEvent>(in, [](const json& j) { return annotation_from_json(j); });
}

CameraModel camera_from_json(const json& j) {
  try {
    const auto& sz = j.at("image_size");
    const ImageSize size{sz.at(0).get<int>(), sz.at(1).get<int>()};
    const auto scale = scale_from_json(j);

    const int forms = static_cast<int>(j.contains("P")) + static_cast<int>(j.contains("K")) +
                      static_cast<int>(j.contains("vp_u")) +
                      static_cast<int>(j.contains("parallel_lines"));
    if (forms != 1) {
      throw InputError("calibration needs exactly one of P, K/R/t, vp_u/vp_v, parallel_lines");
    }
    if (j.contains("P")) {
      auto cam = CameraModel::from_projection(matrix_from_json<3, 4>(j["P"], "P"), size);
      return scale ? apply_scale_reference(cam, *scale) : cam;
    }
    if (j.contains("K")) {
      const auto& tj = j.at("t");
      if (!tj.is_array() || tj.size() != 3) throw InputError("t must have 3 entries");
      const Vec3 t(tj[0].get<double>(), tj[1].get<double>(), tj[2].get<double>());
      auto cam = CameraModel::from_krt(matrix_from_json<3, 3>(j["K"], "K"),
                                       matrix_from_json<3, 3>(j.at("R"), "R"), t, size);
      return scale ? apply_scale_reference(cam, *scale) : cam;
    }
    if (!scale) throw InputError("vanishing-point calibration needs a scale reference");
    if (j.contains("vp_u")) {
      return camera_from_vanishing_points(vec2_from_json(j["vp_u"], "vp_u"),
                                          vec2_from_json(j.at("vp_v"), "vp_v"), size, *scale);
    }
    const auto& lines = j["parallel_lines"];
    const auto su = segments_from_json(lines.at("u"));
    const auto sv = segments_from_json(lines.at("v"));
    if (su.size() < 2 || sv.size() < 2) throw InputError("each line group needs >= 2 segments");
    return camera_from_vanishing_points(finite_vp(estimate_vanishing_point(su), "u"),
                                        finite_vp(estimate_vanishing_point(sv), "v"), size,
                                        *scale);
  } catch (const json::exception& e) {
    throw InputError(std::string("bad calibration: ") + e.what());
  }
}

json camera_to_json(const CameraModel& camera) {
  return {{"K", matrix_to_json<3, 3>(camera.K())},
          {"R", matrix_to_json<3, 3>(camera.R())},
          {"t", vec_json(camera.t())},
          {"camera_height_m", camera.height_m()},
          {"image_size", {camera.image_size().width, camera.image_size().height}}};
}

SyntheticScenario scenario_from_json(const json& j) {
  try {
    SyntheticScenario s{camera_from_json(j.at("calibration"))};
    s.fps = j.value("fps", 30.0);
    s.noise_px = j.value("noise_px", 0.0);
    s.emit_contours = j.value("emit_contours", true);
    for (const auto& v : j.at("vehicles")) s.vehicles.push_back(vehicle_from_json(v, s.expected_events));
    if (j.contains("expected_events")) {
      for (const auto& e : j["expected_events"]) s.expected_events.push_back(event_from_json(e));
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("bad scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("bad scenario: ") + e.what());
  }
}

std::vector<VideoTimeline> timelines_from_json(const json& j) {
  std::vector<VideoTimeline> out;
  for (const auto& t : j) {
    VideoTimeline tl;
    tl.video_id = t.value("video_id", std::string());
    tl.fps = t.value("fps", 30.0);
    tl.n_frames = t.at("n_frames").get<std::int64_t>();
    if (!(tl.fps > 0.0) || tl.n_frames < 0) throw InputError("bad timeline for " + tl.video_id);
    out.push_back(tl);
  }
  return out;
}

json report_to_json(const MetricsReport& report) {
  json types = json::array();
  for (const auto& m : report.per_type) {
    types.push_back({{"type", std::string(to_string(m.type))},
                     {"n_true", m.n_true},
                     {"n_detections", m.n_detections},
                     {"n_matched", m.n_matched},
                     {"n_missed", m.n_missed},
                     {"n_false_alarms", m.n_false_alarms},
                     {"p_miss", m.p_miss},
                     {"zero_support", m.zero_support},
                     {"r_fa_per_min", m.r_fa},
                     {"t_fa", nullable(m.t_fa)},
                     {"t_fa_undefined", !m.t_fa.has_value()}});
  }
  json det = json::object();
  for (const auto& [type, samples] : report.det) {
    json arr = json::array();
    for (const auto& s : samples) {
      arr.push_back({{"threshold", std::isfinite(s.threshold) ? json(s.threshold) : json(nullptr)},
                     {"p_miss", s.p_miss},
                     {"r_fa_per_min", s.r_fa},
                     {"t_fa", nullable(s.t_fa)}});
    }
    det[std::string(to_string(type))] = std::move(arr);
  }
  return {{"per_type", std::move(types)}, {"mean_p_miss", report.mean_p_miss}, {"det", std::move(det)}};
}

void write_det_csv(std::ostream& out, const MetricsReport& report) {
  out << "type,threshold,p_miss,r_fa,t_fa\n";
  const auto prec = out.precision(17);
  for (const auto& [type, samples] : report.det) {
    for (const auto& s : samples) {
      out << to_string(type) << ',';
      if (std::isfinite(s.threshold)) out << s.threshold;
      out << ',' << s.p_miss << ',' << s.r_fa << ',';
      if (s.t_fa) out << *s.t_fa;
      out << '\n';
    }
  }
  out.precision(prec);
}

std::map<EventType, std::vector<DetSample>> read_det_csv(std::istream& in) {
  std::map<EventType, std::vector<DetSample>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line.rfind("type,", 0) == 0) continue;
    const auto f = split(trim(line), ',');
    try {
      if (f.size() != 5) throw InputError("expected 5 fields");
      const auto type = event_type_from_string(f[0]);
      if (!type) throw InputError("unknown event type '" + f[0] + "'");
      DetSample s;
      s.threshold = f[1].empty() ? std::numeric_limits<double>::infinity()
                                 : to_double(f[1], "threshold");
      s.p_miss = to_double(f[2], "p_miss");
      s.r_fa = to_double(f[3], "r_fa");
      if (!f[4].empty()) s.t_fa = to_double(f[4], "t_fa");
      out[*type].push_back(s);
    } catch (const InputError& e) {
      throw InputError("DET CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string det_plot_svg(const std::map<EventType, std::vector<DetSample>>& curves,
                         bool time_based) {
  constexpr double W = 640, H = 480, M = 60;
  static const std::map<EventType, const char*> colors = {
      {EventType::turn_left, "#1f77b4"}, {EventType::turn_right, "#ff7f0e"},
      {EventType::u_turn, "#2ca02c"},    {EventType::start, "#d62728"},
      {EventType::stop, "#9467bd"}};
  double x_max = 0.0;
  for (const auto& [type, samples] : curves) {
    for (const auto& s : samples) x_max = std::max(x_max, time_based ? s.t_fa.value_or(0.0) : s.r_fa);
  }
  if (!(x_max > 0.0)) x_max = 1.0;
  auto px = [&](double x) { return M + (W - 2 * M) * x / x_max; };
  auto py = [&](double y) { return H - M - (H - 2 * M) * y; };

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\"" << H - M
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
      << (time_based ? "T_fa" : "R_fa (per minute)") << "</text>\n";
  svg << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2
      << ")\" text-anchor=\"middle\">P_miss</text>\n";
  svg << "<text x=\"" << W - M << "\" y=\"" << H - M + 15 << "\" text-anchor=\"end\">"
      << x_max << "</text>\n";
  svg << "<text x=\"" << M - 5 << "\" y=\"" << M + 5 << "\" text-anchor=\"end\">1</text>\n";
  int legend = 0;
  for (const auto& [type, samples] : curves) {
    const char* color = colors.at(type);
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& s : samples) {
      svg << px(time_based ? s.t_fa.value_or(0.0) : s.r_fa) << ',' << py(s.p_miss) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << W - M - 100 << "\" y=\"" << M + 18 * legend << "\" fill=\"" << color
        << "\">" << to_string(type) << "</text>\n";
    ++legend;
  }
  svg << "</svg>\n";
  return svg.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace kinevent
