#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "kinevent/collision.hpp"
#include "kinevent/evaluation.hpp"
#include "kinevent/synthetic.hpp"

namespace kinevent {

/// Reads detections, one per line, either CSV
///   frame,track_id,class,confidence,left,top,width,height[,contour=x0:y0;x1:y1;...]
/// or a JSON object with the same field names (contour as [[x, y], ...]).
/// Blank lines, `#` comments and a CSV header starting with "frame" are skipped.
/// Output is ordered by (track_id, frame_index). Every malformed line is reported, with
/// its line number, in one InputError.
std::vector<TrackPoint> parse_tracks(std::istream& in, double fps);

void write_tracks_csv(std::ostream& out, std::span<const TrackPoint> tracks);

/// True when the closed polygon has no two non-adjacent edges that touch.
bool is_simple_polygon(const Polygon& poly);

nlohmann::json event_to_json(const EventRecord& e);
EventRecord event_from_json(const nlohmann::json& j);
void write_events_jsonl(std::ostream& out, std::span<const EventRecord> events);
std::vector<EventRecord> read_events_jsonl(std::istream& in);

void write_collisions_jsonl(std::ostream& out, std::span<const CollisionAlert> alerts);
void write_pair_distances_csv(std::ostream& out, std::span<const PairDistance> distances);

nlohmann::json annotation_to_json(const GroundTruthEvent& g);
GroundTruthEvent annotation_from_json(const nlohmann::json& j);
void write_annotations_jsonl(std::ostream& out, std::span<const GroundTruthEvent> gts);
std::vector<GroundTruthEvent> read_annotations_jsonl(std::istream& in);

/// Calibration file: one of P / K,R,t / vp_u,vp_v / parallel_lines, an optional scale
/// reference (scale_segment or camera_height_m; required for the vanishing-point forms)
/// and image_size [width, height].
CameraModel camera_from_json(const nlohmann::json& j);
/// K, R, t, image_size and camera_height_m; round-trips through camera_from_json.
nlohmann::json camera_to_json(const CameraModel& camera);

/// Scenario file: calibration, fps, noise_px, emit_contours and vehicles given either as
/// explicit waypoints [[t, x, y], ...] or as a manoeuvre program.
SyntheticScenario scenario_from_json(const nlohmann::json& j);

std::vector<VideoTimeline> timelines_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const MetricsReport& report);
/// type,threshold,p_miss,r_fa,t_fa with empty fields for +inf thresholds and absent T_fa.
void write_det_csv(std::ostream& out, const MetricsReport& report);
std::map<EventType, std::vector<DetSample>> read_det_csv(std::istream& in);

/// P_miss against R_fa (or T_fa when `time_based`), one polyline per event type.
std::string det_plot_svg(const std::map<EventType, std::vector<DetSample>>& curves,
                         bool time_based = false);

nlohmann::json read_json_file(const std::string& path);

}  // namespace kinevent
