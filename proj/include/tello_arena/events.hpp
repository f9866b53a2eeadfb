#pragma once

// Mission events: the audited, timestamped facts the scoring engine consumes.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tello_arena/behavior.hpp"

namespace tello {

enum class EventKind {
    TakeOff,
    Landed,
    LineLeave,
    LineRegain,
    BehaviorCompleted,
    RecordingStarted,
    RecordingStopped,
    VictimPickup,
    RingTouch,
    RingPass,
    PhaseComplete,
    Collision,
    Fall,
    Coverage,
    Warning,
    Abort,
};

enum class EventSource { SimulatorTruth, ControllerClaim };

const char* to_string(EventKind k);
const char* to_string(EventSource s);

struct MissionEvent {
    double t = 0;
    EventKind kind = EventKind::Warning;
    EventSource source = EventSource::SimulatorTruth;

    // Kind-specific payload; unused fields keep their defaults.
    double distance_cm = 0;       // Landed
    int index = 0;                // RingPass/RingTouch ring, PhaseComplete phase, Recording* frame count
    BehaviorKind behavior = BehaviorKind::StartRecording;  // BehaviorCompleted
    std::string detail;           // Collision object, Warning/Abort text, Recording* trigger marker
    bool verified = false;        // Recording*: frame count checked against the recording file
    double covered = 0;           // Coverage
    double aligned = 0;           // Coverage

    bool operator==(const MissionEvent&) const = default;
};

class EventFormatError : public std::runtime_error {
public:
    EventFormatError(std::size_t line, const std::string& detail);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Timestamps are rounded to milliseconds.
double event_time(double clock_s);

std::string to_json_line(const MissionEvent& e);
MissionEvent parse_event_line(const std::string& line, std::size_t line_no = 1);

void write_events(std::ostream& out, const std::vector<MissionEvent>& events);
void write_events(const std::filesystem::path& path, const std::vector<MissionEvent>& events);
std::vector<MissionEvent> read_events(std::istream& in);
std::vector<MissionEvent> read_events(const std::filesystem::path& path);

// Convenience constructors.
MissionEvent truth(double t, EventKind kind);
MissionEvent claim(double t, EventKind kind);

}  // namespace tello
