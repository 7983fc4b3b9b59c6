#include "kinevent/event_detection.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace kinevent {

void DetectorParams::validate() const {
  if (!(a_theta_trigger > a_theta_border)) {
    throw std::invalid_argument("a_theta_trigger must exceed a_theta_border");
  }
  if (!(a_r_trigger > a_r_border)) {
    throw std::invalid_argument("a_r_trigger must exceed a_r_border");
  }
  if (!(theta_min > 0.0 && theta_min < theta_max && theta_max <= 180.0)) {
    throw std::invalid_argument("require 0 < theta_min < theta_max <= 180");
  }
  if (!(v_stop_max < v_move_min)) {
    throw std::invalid_argument("v_stop_max must be below v_move_min");
  }
  if (!(t_turn_min > 0.0 && t_linear_min > 0.0)) {
    throw std::invalid_argument("minimum event durations must be positive");
  }
}

std::vector<FrameInterval> run_trigger_machine(std::span<const bool> trigger,
                                               std::span<const bool> border) {
  std::vector<FrameInterval> out;
  const std::size_t n = std::min(trigger.size(), border.size());
  std::size_t lower = 0;  // first frame a new interval may start at
  for (std::size_t i = 0; i < n; ++i) {
    if (!trigger[i]) continue;
    std::size_t s = i;
    while (s > lower && border[s - 1]) --s;
    std::size_t e = i;
    while (e + 1 < n && border[e + 1]) ++e;
    out.push_back({s, e});
    lower = e + 1;
    i = e;
  }
  return out;
}

std::vector<FrameInterval> run_trigger_machine(
    std::span<const GroundState> series, const std::function<bool(const GroundState&)>& trigger,
    const std::function<bool(const GroundState&)>& border) {
  // std::vector<bool> has no contiguous storage to view as a span.
  const std::size_t n = series.size();
  auto t = std::make_unique<bool[]>(n);
  auto b = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool valid = series[i].window_valid;
    t[i] = valid && trigger(series[i]);
    b[i] = valid && border(series[i]);
  }
  return run_trigger_machine(std::span<const bool>(t.get(), n), std::span<const bool>(b.get(), n));
}

std::vector<EventRecord> detect_turning(std::span<const GroundState> series,
                                        const DetectorParams& params, std::int64_t track_id) {
  const auto trigger = [&](const GroundState& s) {
    return std::abs(s.a_theta) >= params.a_theta_trigger && s.v_r >= params.v_turn_min;
  };
  const auto border = [&](const GroundState& s) {
    return std::abs(s.a_theta) >= params.a_theta_border && s.v_r >= params.v_turn_min;
  };
  std::vector<EventRecord> events;
  for (const FrameInterval& iv : run_trigger_machine(series, trigger, border)) {
    const GroundState& s = series[iv.first];
    const GroundState& e = series[iv.last];
    const double theta = wrap_degrees(e.v_theta - s.v_theta);
    if (!(e.time_s - s.time_s >= params.t_turn_min && std::abs(theta) > params.theta_min)) {
      continue;
    }
    EventRecord ev;
    ev.track_id = track_id;
    ev.t_s = s.time_s;
    ev.t_e = e.time_s;
    ev.theta_deg = theta;
    if (theta >= params.theta_max || theta <= -params.theta_max) {
      ev.type = EventType::u_turn;
    } else if (theta > 0) {
      ev.type = EventType::turn_left;
    } else {
      ev.type = EventType::turn_right;
    }
    ev.score = score_event(ev, params);
    events.push_back(ev);
  }
  return events;
}

std::vector<EventRecord> detect_linear(std::span<const GroundState> series,
                                       const DetectorParams& params, std::int64_t track_id) {
  const auto trigger = [&](const GroundState& s) {
    return std::abs(s.a_r) >= params.a_r_trigger;
  };
  const auto border = [&](const GroundState& s) { return std::abs(s.a_r) >= params.a_r_border; };
  std::vector<EventRecord> events;
  for (const FrameInterval& iv : run_trigger_machine(series, trigger, border)) {
    const GroundState& s = series[iv.first];
    const GroundState& e = series[iv.last];
    const double vs = s.v_r;
    const double ve = e.v_r;
    const bool valid = e.time_s - s.time_s >= params.t_linear_min &&
                       std::min(vs, ve) <= params.v_stop_max &&
                       std::max(vs, ve) >= params.v_move_min;
    if (!valid) continue;
    EventRecord ev;
    ev.track_id = track_id;
    ev.t_s = s.time_s;
    ev.t_e = e.time_s;
    ev.v_start = vs;
    ev.v_end = ve;
    if (vs <= params.v_stop_max && ve >= params.v_move_min) {
      ev.type = EventType::start;
    } else if (vs >= params.v_move_min && ve <= params.v_stop_max) {
      ev.type = EventType::stop;
    } else {
      continue;
    }
    ev.score = score_event(ev, params);
    events.push_back(ev);
  }
  return events;
}

double score_event(const EventRecord& e, const DetectorParams& params) {
  double score = 0.0;
  switch (e.type) {
    case EventType::turn_left:
    case EventType::turn_right:
      score = 1.0 - std::abs(std::abs(e.theta_deg.value_or(0.0)) - 90.0) / 90.0;
      break;
    case EventType::u_turn:
      score = std::abs(e.theta_deg.value_or(0.0)) / 180.0;
      break;
    case EventType::start:
      score = 1.0 - e.v_start.value_or(0.0) / params.v_stop_max;
      break;
    case EventType::stop:
      score = 1.0 - e.v_end.value_or(0.0) / params.v_stop_max;
      break;
  }
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace kinevent
