#pragma once

#include <span>

#include "kinevent/collision.hpp"
#include "kinevent/config.hpp"
#include "kinevent/event_detection.hpp"

namespace kinevent {

/// Consecutive points of one track with no gap longer than the configured limit.
struct TrackSegment {
  std::int64_t track_id = 0;
  std::vector<TrackPoint> points;  // strictly increasing frame_index
};

/// Groups by track id, orders by frame and splits wherever more than `max_gap_frames`
/// frames are missing. Segments are ordered by (track_id, first frame).
/// Throws InputError on duplicate (track_id, frame_index).
std::vector<TrackSegment> split_tracks(std::span<const TrackPoint> tracks, int max_gap_frames);

struct SegmentResult {
  std::vector<GroundObservation> observations;
  std::vector<GroundState> states;  // same length as observations
  // Same length as observations: false for the first w frames of each run, whose filter
  // velocity is still settling and is kept out of collision prediction.
  std::vector<char> settled;
  std::vector<EventRecord> events;  // ordered by (t_e, t_s, type)
};

/// Smoothing, ground projection, kinematics and both event machines for one segment.
/// Frames whose projection fails split the segment into independent runs.
SegmentResult process_segment(const PipelineConfig& config, const CameraModel& camera,
                              const TrackSegment& segment);

struct PipelineResult {
  std::vector<EventRecord> events;            // ordered by (track_id, t_e, t_s, type)
  std::vector<CollisionAlert> collisions;     // ordered by (t_s, track_a, track_b)
  std::vector<PairDistance> pair_distances;   // filled only when requested
};

struct PipelineOptions {
  bool parallel = true;          // OpenMP across segments and collision pairs
  bool record_distances = false;
};

/// Deterministic regardless of `parallel`: results are reassembled in segment order.
PipelineResult run_pipeline(const PipelineConfig& config, const CameraModel& camera,
                            std::span<const TrackPoint> tracks, const PipelineOptions& options = {});

/// Single-threaded reference; identical output to run_pipeline.
PipelineResult run_pipeline_serial(const PipelineConfig& config, const CameraModel& camera,
                                   std::span<const TrackPoint> tracks);

}  // namespace kinevent
