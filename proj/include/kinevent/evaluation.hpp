#pragma once

#include <functional>
#include <map>
#include <span>
#include <utility>

#include "kinevent/types.hpp"

namespace kinevent {

using FrameBoxes = std::map<std::int64_t, BBox>;

struct GroundTruthEvent {
  std::string video_id;
  EventType type = EventType::turn_left;
  double t_s = 0.0;
  double t_e = 0.0;
  FrameBoxes frames;  // annotated object box per frame
};

/// 2D box trajectory of one tracked object.
struct TrackBoxes {
  std::string video_id;
  std::int64_t track_id = 0;
  FrameBoxes frames;
};

/// Frame grid of one video, used for time-based false alarms and video duration.
struct VideoTimeline {
  std::string video_id;
  double fps = 30.0;
  std::int64_t n_frames = 0;
  double minutes() const { return static_cast<double>(n_frames) / fps / 60.0; }
};

double object_iou(const BBox& a, const BBox& b);

/// Mean per-frame box IoU over the ground-truth frames; frames the track misses count 0.
double event_iou(const FrameBoxes& track, const GroundTruthEvent& gt);

/// Intersection over union of two closed time spans.
double temporal_iou(double a_start, double a_end, double b_start, double b_end);

using OverlapFn = std::function<double(const EventRecord&, const GroundTruthEvent&)>;

/// Temporal IoU of the detection and ground-truth spans.
double temporal_overlap(const EventRecord& det, const GroundTruthEvent& gt);

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (detection, gt) indices
  std::vector<double> overlaps;                            // parallel to pairs
  std::vector<std::size_t> unmatched_detections;           // false alarms
  std::vector<std::size_t> unmatched_gts;                  // misses
};

/// One-to-one maximum-overlap matching inside each (type, video) group. Pairs whose
/// overlap is below `threshold` are never matched.
Matching match_events(std::span<const EventRecord> detections,
                      std::span<const GroundTruthEvent> gts, const OverlapFn& overlap,
                      double threshold);

struct TypeMetrics {
  EventType type = EventType::turn_left;
  int n_true = 0;
  int n_detections = 0;
  int n_matched = 0;
  int n_missed = 0;
  int n_false_alarms = 0;
  double p_miss = 0.0;
  bool zero_support = false;   // n_true == 0, p_miss reported as 0
  double r_fa = 0.0;           // false alarms per minute
  std::optional<double> t_fa;  // absent when no frame is free of this event type
};

struct DetSample {
  double threshold = 0.0;  // +inf for the empty-detection starting point
  double p_miss = 0.0;
  double r_fa = 0.0;
  std::optional<double> t_fa;
};

struct MetricsReport {
  std::vector<TypeMetrics> per_type;  // one entry per event type, fixed order
  double mean_p_miss = 0.0;           // over types with ground truth
  std::map<EventType, std::vector<DetSample>> det;

  const TypeMetrics& at(EventType t) const;
};

/// P_miss, R_fa and T_fa per event type for a given matching.
MetricsReport compute_metrics(const Matching& matching, std::span<const EventRecord> detections,
                              std::span<const GroundTruthEvent> gts,
                              std::span<const VideoTimeline> timelines);

/// Score-threshold sweep for one event type: a leading point with no detections, then one
/// point per distinct score in descending order.
std::vector<DetSample> det_curve(EventType type, std::span<const EventRecord> detections,
                                 std::span<const GroundTruthEvent> gts,
                                 std::span<const VideoTimeline> timelines,
                                 double match_threshold = 0.2);

/// Matching, metrics and DET curves with the temporal-IoU criterion.
MetricsReport evaluate(std::span<const EventRecord> detections,
                       std::span<const GroundTruthEvent> gts,
                       std::span<const VideoTimeline> timelines, double match_threshold = 0.2);

struct RecallRow {
  EventType type = EventType::turn_left;
  int n_gts = 0;
  std::vector<double> recall;  // parallel to the thresholds
};

/// Fraction of ground-truth events whose assigned track reaches each event-IoU threshold.
/// Ground truths without an assigned track count as IoU 0.
std::vector<RecallRow> recall_table(std::span<const TrackBoxes> tracks,
                                    std::span<const GroundTruthEvent> gts,
                                    std::span<const double> thresholds);

}  // namespace kinevent
