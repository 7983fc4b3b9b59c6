#include "kinevent/types.hpp"

namespace kinevent {

std::string_view to_string(VehicleClass c) {
  switch (c) {
    case VehicleClass::car: return "car";
    case VehicleClass::bus: return "bus";
    case VehicleClass::truck: return "truck";
  }
  return "car";
}

std::optional<VehicleClass> vehicle_class_from_string(std::string_view s) {
  if (s == "car") return VehicleClass::car;
  if (s == "bus") return VehicleClass::bus;
  if (s == "truck") return VehicleClass::truck;
  return std::nullopt;
}

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::turn_left: return "turn_left";
    case EventType::turn_right: return "turn_right";
    case EventType::u_turn: return "u_turn";
    case EventType::start: return "start";
    case EventType::stop: return "stop";
  }
  return "turn_left";
}

std::optional<EventType> event_type_from_string(std::string_view s) {
  for (EventType t : kAllEventTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

}  // namespace kinevent
