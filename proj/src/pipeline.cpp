#include "kinevent/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <tuple>

namespace kinevent {

namespace {

bool event_before(const EventRecord& a, const EventRecord& b) {
  return std::tie(a.track_id, a.t_e, a.t_s, a.type) < std::tie(b.track_id, b.t_e, b.t_s, b.type);
}

// Kinematics and event detection on one contiguous run of observations.
void process_run(const PipelineConfig& config, std::int64_t track_id,
                 std::span<const GroundObservation> run, SegmentResult& out) {
  if (run.empty()) return;
  auto states = estimate_states(run, config.fps, config.kinematics());
  if (run.size() >= 2) {
    auto turns = detect_turning(states, config.detector, track_id);
    auto linear = detect_linear(states, config.detector, track_id);
    out.events.insert(out.events.end(), turns.begin(), turns.end());
    out.events.insert(out.events.end(), linear.begin(), linear.end());
  }
  out.observations.insert(out.observations.end(), run.begin(), run.end());
  out.states.insert(out.states.end(), states.begin(), states.end());
  const auto warmup = static_cast<std::size_t>(config.kinematics().w);
  for (std::size_t i = 0; i < run.size(); ++i) out.settled.push_back(i >= warmup);
}

std::vector<CollisionAlert> run_collisions(const PipelineConfig& config,
                                           const std::vector<SegmentResult>& segments,
                                           std::vector<PairDistance>* distances) {
  std::map<std::int64_t, std::vector<GroundObservation>> by_frame;
  for (const auto& seg : segments) {
    for (std::size_t i = 0; i < seg.observations.size(); ++i) {
      if (seg.settled[i]) by_frame[seg.observations[i].frame_index].push_back(seg.observations[i]);
    }
  }
  CollisionMonitor monitor(config.collision);
  std::vector<CollisionAlert> alerts;
  for (auto& [frame, obs] : by_frame) {
    std::sort(obs.begin(), obs.end(), [](const GroundObservation& a, const GroundObservation& b) {
      return a.track_id < b.track_id;
    });
    auto found = monitor.update(obs, distances);
    alerts.insert(alerts.end(), found.begin(), found.end());
  }
  return alerts;
}

PipelineResult assemble(const PipelineConfig& config, std::vector<SegmentResult>& segments,
                        bool record_distances) {
  PipelineResult result;
  for (auto& seg : segments) {
    result.events.insert(result.events.end(), seg.events.begin(), seg.events.end());
  }
  std::stable_sort(result.events.begin(), result.events.end(), event_before);
  result.collisions =
      run_collisions(config, segments, record_distances ? &result.pair_distances : nullptr);
  return result;
}

}  // namespace

std::vector<TrackSegment> split_tracks(std::span<const TrackPoint> tracks, int max_gap_frames) {
  std::map<std::int64_t, std::vector<TrackPoint>> grouped;
  for (const auto& p : tracks) grouped[p.track_id].push_back(p);

  std::vector<TrackSegment> out;
  for (auto& [id, points] : grouped) {
    std::stable_sort(points.begin(), points.end(), [](const TrackPoint& a, const TrackPoint& b) {
      return a.frame_index < b.frame_index;
    });
    TrackSegment current{id, {}};
    for (auto& p : points) {
      if (!current.points.empty()) {
        const std::int64_t prev = current.points.back().frame_index;
        if (p.frame_index == prev) {
          throw InputError("duplicate detection for track " + std::to_string(id) + " frame " +
                           std::to_string(prev));
        }
        if (p.frame_index - prev - 1 > max_gap_frames) {
          out.push_back(std::move(current));
          current = TrackSegment{id, {}};
        }
      }
      current.points.push_back(std::move(p));
    }
    if (!current.points.empty()) out.push_back(std::move(current));
  }
  return out;
}

SegmentResult process_segment(const PipelineConfig& config, const CameraModel& camera,
                              const TrackSegment& segment) {
  SegmentResult out;
  if (segment.points.empty()) return out;
  const auto smoothed = smooth_track(segment.points, config.fps, config.smoothing);

  OrientationState orientation;
  std::vector<GroundObservation> run;
  for (const auto& s : smoothed) {
    const TrackPoint& src = segment.points[s.source_index];
    const Polygon* contour = (!s.interpolated && src.contour) ? &*src.contour : nullptr;
    try {
      GroundObservation o = make_observation(camera, s, contour, orientation, config.fps,
                                             config.geometry);
      o.track_id = segment.track_id;
      run.push_back(std::move(o));
    } catch (const GeometryError&) {
      // A frame we cannot place on the ground breaks the kinematic windows.
      process_run(config, segment.track_id, run, out);
      run.clear();
    }
  }
  process_run(config, segment.track_id, run, out);
  std::stable_sort(out.events.begin(), out.events.end(), event_before);
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& config, const CameraModel& camera,
                            std::span<const TrackPoint> tracks, const PipelineOptions& options) {
  config.validate();
  const auto segments = split_tracks(tracks, config.max_track_gap_frames);
  std::vector<SegmentResult> results(segments.size());
  const auto n = static_cast<std::ptrdiff_t>(segments.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) if (options.parallel && n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[static_cast<std::size_t>(i)] =
          process_segment(config, camera, segments[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(kinevent_pipeline_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return assemble(config, results, options.record_distances);
}

PipelineResult run_pipeline_serial(const PipelineConfig& config, const CameraModel& camera,
                                   std::span<const TrackPoint> tracks) {
  config.validate();
  const auto segments = split_tracks(tracks, config.max_track_gap_frames);
  std::vector<SegmentResult> results;
  results.reserve(segments.size());
  for (const auto& seg : segments) results.push_back(process_segment(config, camera, seg));
  return assemble(config, results, false);
}

}  // namespace kinevent
