#include "kinevent/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kinevent/assignment.hpp"

namespace kinevent {

namespace {

// Added to every eligible pair so that, among equal-overlap matchings, more pairs win.
constexpr double kCardinalityBonus = 1e-9;

using GroupKey = std::pair<EventType, std::string>;

std::int64_t first_frame_at_or_after(double t, double fps) {
  return static_cast<std::int64_t>(std::ceil(t * fps - 1e-9));
}

std::int64_t last_frame_at_or_before(double t, double fps) {
  return static_cast<std::int64_t>(std::floor(t * fps + 1e-9));
}

// Adds +1 over the frames of [t_s, t_e] into a difference array.
void add_span(std::vector<int>& diff, double t_s, double t_e, double fps) {
  const auto n = static_cast<std::int64_t>(diff.size()) - 1;
  const std::int64_t a = std::max<std::int64_t>(0, first_frame_at_or_after(t_s, fps));
  const std::int64_t b = std::min<std::int64_t>(n - 1, last_frame_at_or_before(t_e, fps));
  if (a > b) return;
  diff[static_cast<std::size_t>(a)] += 1;
  diff[static_cast<std::size_t>(b + 1)] -= 1;
}

const VideoTimeline& find_timeline(std::span<const VideoTimeline> timelines,
                                   const std::string& video_id) {
  for (const auto& tl : timelines) {
    if (tl.video_id == video_id) return tl;
  }
  throw std::invalid_argument("no timeline for video '" + video_id + "'");
}

TypeMetrics metrics_for_type(EventType type, int n_matched, std::span<const EventRecord> detections,
                             std::span<const GroundTruthEvent> gts,
                             std::span<const VideoTimeline> timelines) {
  TypeMetrics m;
  m.type = type;
  for (const auto& d : detections) m.n_detections += d.type == type;
  for (const auto& g : gts) m.n_true += g.type == type;
  m.n_matched = n_matched;
  m.n_missed = m.n_true - n_matched;
  m.n_false_alarms = m.n_detections - n_matched;
  m.zero_support = m.n_true == 0;
  m.p_miss = m.zero_support ? 0.0 : static_cast<double>(m.n_missed) / m.n_true;

  double minutes = 0.0;
  double excess = 0.0;
  std::int64_t free_frames = 0;
  for (const auto& tl : timelines) {
    minutes += tl.minutes();
    std::vector<int> det_diff(static_cast<std::size_t>(tl.n_frames) + 1, 0);
    std::vector<int> gt_diff(det_diff.size(), 0);
    for (const auto& d : detections) {
      if (d.type == type && d.video_id == tl.video_id) add_span(det_diff, d.t_s, d.t_e, tl.fps);
    }
    for (const auto& g : gts) {
      if (g.type == type && g.video_id == tl.video_id) add_span(gt_diff, g.t_s, g.t_e, tl.fps);
    }
    int D = 0, G = 0;
    for (std::int64_t i = 0; i < tl.n_frames; ++i) {
      D += det_diff[static_cast<std::size_t>(i)];
      G += gt_diff[static_cast<std::size_t>(i)];
      excess += std::max(0, D - G);
      free_frames += G == 0;
    }
  }
  m.r_fa = minutes > 0.0 ? m.n_false_alarms / minutes : 0.0;
  if (free_frames > 0) m.t_fa = excess / static_cast<double>(free_frames);
  return m;
}

void check_videos(std::span<const EventRecord> detections, std::span<const GroundTruthEvent> gts,
                  std::span<const VideoTimeline> timelines) {
  for (const auto& d : detections) (void)find_timeline(timelines, d.video_id);
  for (const auto& g : gts) (void)find_timeline(timelines, g.video_id);
}

}  // namespace

double object_iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

double event_iou(const FrameBoxes& track, const GroundTruthEvent& gt) {
  if (gt.frames.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [frame, box] : gt.frames) {
    const auto it = track.find(frame);
    if (it != track.end()) sum += object_iou(it->second, box);
  }
  return sum / static_cast<double>(gt.frames.size());
}

double temporal_iou(double a_start, double a_end, double b_start, double b_end) {
  const double inter = std::min(a_end, b_end) - std::max(a_start, b_start);
  if (inter <= 0.0) return 0.0;
  const double uni = std::max(a_end, b_end) - std::min(a_start, b_start);
  return uni > 0.0 ? inter / uni : 0.0;
}

double temporal_overlap(const EventRecord& det, const GroundTruthEvent& gt) {
  return temporal_iou(det.t_s, det.t_e, gt.t_s, gt.t_e);
}

Matching match_events(std::span<const EventRecord> detections,
                      std::span<const GroundTruthEvent> gts, const OverlapFn& overlap,
                      double threshold) {
  std::map<GroupKey, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    groups[{detections[i].type, detections[i].video_id}].first.push_back(i);
  }
  for (std::size_t j = 0; j < gts.size(); ++j) {
    groups[{gts[j].type, gts[j].video_id}].second.push_back(j);
  }

  Matching m;
  std::vector<char> det_used(detections.size(), 0), gt_used(gts.size(), 0);
  for (const auto& [key, members] : groups) {
    const auto& [dets, gidx] = members;
    if (dets.empty() || gidx.empty()) continue;
    Eigen::MatrixXd raw(dets.size(), gidx.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dets.size(), gidx.size());
    for (std::size_t a = 0; a < dets.size(); ++a) {
      for (std::size_t b = 0; b < gidx.size(); ++b) {
        raw(a, b) = overlap(detections[dets[a]], gts[gidx[b]]);
        if (raw(a, b) >= threshold && raw(a, b) > 0.0) w(a, b) = raw(a, b) + kCardinalityBonus;
      }
    }
    const std::vector<int> assign = max_weight_assignment(w);
    for (std::size_t a = 0; a < dets.size(); ++a) {
      const int b = assign[a];
      if (b < 0 || w(a, b) <= 0.0) continue;
      m.pairs.emplace_back(dets[a], gidx[static_cast<std::size_t>(b)]);
      m.overlaps.push_back(raw(a, b));
      det_used[dets[a]] = 1;
      gt_used[gidx[static_cast<std::size_t>(b)]] = 1;
    }
  }
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (!det_used[i]) m.unmatched_detections.push_back(i);
  }
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (!gt_used[j]) m.unmatched_gts.push_back(j);
  }
  return m;
}

const TypeMetrics& MetricsReport::at(EventType t) const {
  for (const auto& m : per_type) {
    if (m.type == t) return m;
  }
  throw std::out_of_range("event type missing from report");
}

MetricsReport compute_metrics(const Matching& matching, std::span<const EventRecord> detections,
                              std::span<const GroundTruthEvent> gts,
                              std::span<const VideoTimeline> timelines) {
  check_videos(detections, gts, timelines);
  MetricsReport report;
  double sum = 0.0;
  int supported = 0;
  for (EventType type : kAllEventTypes) {
    int matched = 0;
    for (const auto& [d, g] : matching.pairs) matched += detections[d].type == type;
    TypeMetrics m = metrics_for_type(type, matched, detections, gts, timelines);
    if (!m.zero_support) {
      sum += m.p_miss;
      ++supported;
    }
    report.per_type.push_back(m);
  }
  report.mean_p_miss = supported > 0 ? sum / supported : 0.0;
  return report;
}

std::vector<DetSample> det_curve(EventType type, std::span<const EventRecord> detections,
                                 std::span<const GroundTruthEvent> gts,
                                 std::span<const VideoTimeline> timelines,
                                 double match_threshold) {
  check_videos(detections, gts, timelines);
  std::vector<EventRecord> typed;
  for (const auto& d : detections) {
    if (d.type == type) typed.push_back(d);
  }
  std::vector<GroundTruthEvent> typed_gts;
  for (const auto& g : gts) {
    if (g.type == type) typed_gts.push_back(g);
  }
  std::vector<double> thresholds;
  for (const auto& d : typed) thresholds.push_back(d.score);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.insert(thresholds.begin(), std::numeric_limits<double>::infinity());

  std::vector<DetSample> samples;
  for (double thr : thresholds) {
    std::vector<EventRecord> kept;
    for (const auto& d : typed) {
      if (d.score >= thr) kept.push_back(d);
    }
    const Matching m = match_events(kept, typed_gts, temporal_overlap, match_threshold);
    const TypeMetrics tm =
        metrics_for_type(type, static_cast<int>(m.pairs.size()), kept, typed_gts, timelines);
    samples.push_back({thr, tm.zero_support ? 0.0 : tm.p_miss, tm.r_fa, tm.t_fa});
  }
  return samples;
}

MetricsReport evaluate(std::span<const EventRecord> detections,
                       std::span<const GroundTruthEvent> gts,
                       std::span<const VideoTimeline> timelines, double match_threshold) {
  const Matching m = match_events(detections, gts, temporal_overlap, match_threshold);
  MetricsReport report = compute_metrics(m, detections, gts, timelines);
  for (EventType type : kAllEventTypes) {
    report.det[type] = det_curve(type, detections, gts, timelines, match_threshold);
  }
  return report;
}

std::vector<RecallRow> recall_table(std::span<const TrackBoxes> tracks,
                                    std::span<const GroundTruthEvent> gts,
                                    std::span<const double> thresholds) {
  std::vector<RecallRow> rows;
  for (EventType type : kAllEventTypes) {
    RecallRow row;
    row.type = type;
    std::map<std::string, std::vector<std::size_t>> by_video;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (gts[j].type == type) by_video[gts[j].video_id].push_back(j);
    }
    std::vector<double> achieved;
    for (const auto& [video, gidx] : by_video) {
      std::vector<std::size_t> tidx;
      for (std::size_t k = 0; k < tracks.size(); ++k) {
        if (tracks[k].video_id == video) tidx.push_back(k);
      }
      std::vector<double> best(gidx.size(), 0.0);
      if (!tidx.empty()) {
        Eigen::MatrixXd w(gidx.size(), tidx.size());
        for (std::size_t a = 0; a < gidx.size(); ++a) {
          for (std::size_t b = 0; b < tidx.size(); ++b) {
            w(a, b) = event_iou(tracks[tidx[b]].frames, gts[gidx[a]]);
          }
        }
        const std::vector<int> assign = max_weight_assignment(w);
        for (std::size_t a = 0; a < gidx.size(); ++a) {
          if (assign[a] >= 0) best[a] = w(a, assign[a]);
        }
      }
      achieved.insert(achieved.end(), best.begin(), best.end());
    }
    row.n_gts = static_cast<int>(achieved.size());
    if (row.n_gts == 0) continue;
    for (double thr : thresholds) {
      const auto hits = std::count_if(achieved.begin(), achieved.end(),
                                      [&](double v) { return v >= thr; });
      row.recall.push_back(static_cast<double>(hits) / row.n_gts);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace kinevent
