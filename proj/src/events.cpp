#include "tello_arena/events.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace tello {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EventKind, const char*>, 16> kKinds = {{
    {EventKind::TakeOff, "TakeOff"},
    {EventKind::Landed, "Landed"},
    {EventKind::LineLeave, "LineLeave"},
    {EventKind::LineRegain, "LineRegain"},
    {EventKind::BehaviorCompleted, "BehaviorCompleted"},
    {EventKind::RecordingStarted, "RecordingStarted"},
    {EventKind::RecordingStopped, "RecordingStopped"},
    {EventKind::VictimPickup, "VictimPickup"},
    {EventKind::RingTouch, "RingTouch"},
    {EventKind::RingPass, "RingPass"},
    {EventKind::PhaseComplete, "PhaseComplete"},
    {EventKind::Collision, "Collision"},
    {EventKind::Fall, "Fall"},
    {EventKind::Coverage, "Coverage"},
    {EventKind::Warning, "Warning"},
    {EventKind::Abort, "Abort"},
}};

constexpr std::array<std::pair<BehaviorKind, const char*>, 8> kBehaviors = {{
    {BehaviorKind::StartRecording, "StartRecording"},
    {BehaviorKind::StopRecording, "StopRecording"},
    {BehaviorKind::AscendHigh, "AscendHigh"},
    {BehaviorKind::DescendLow, "DescendLow"},
    {BehaviorKind::Spin360Left, "Spin360Left"},
    {BehaviorKind::Spin360Right, "Spin360Right"},
    {BehaviorKind::PickVictim, "PickVictim"},
    {BehaviorKind::LandGoal, "LandGoal"},
}};

}  // namespace

const char* to_string(BehaviorKind b)
{
    for (auto [k, name] : kBehaviors)
        if (k == b)
            return name;
    return "?";
}

std::optional<BehaviorKind> behavior_from_string(const char* name)
{
    for (auto [k, n] : kBehaviors)
        if (std::strcmp(n, name) == 0)
            return k;
    return std::nullopt;
}

std::optional<BehaviorKind> marker_semantics(ShapeClass shape, ColorClass color)
{
    switch (shape) {
    case ShapeClass::Rectangle:
        if (color == ColorClass::Red)
            return BehaviorKind::StartRecording;
        if (color == ColorClass::Blue)
            return BehaviorKind::StopRecording;
        break;
    case ShapeClass::Circle:
        if (color == ColorClass::Red)
            return BehaviorKind::AscendHigh;
        if (color == ColorClass::Blue)
            return BehaviorKind::DescendLow;
        if (color == ColorClass::Green)
            return BehaviorKind::PickVictim;
        if (color == ColorClass::Yellow)
            return BehaviorKind::LandGoal;
        break;
    case ShapeClass::Triangle:
        if (color == ColorClass::Red)
            return BehaviorKind::Spin360Left;
        if (color == ColorClass::Blue)
            return BehaviorKind::Spin360Right;
        break;
    case ShapeClass::Unknown: break;
    }
    return std::nullopt;
}

const char* to_string(EventKind k)
{
    for (auto [kind, name] : kKinds)
        if (kind == k)
            return name;
    return "?";
}

const char* to_string(EventSource s) { return s == EventSource::SimulatorTruth ? "simulator-truth" : "controller-claim"; }

EventFormatError::EventFormatError(std::size_t line, const std::string& detail)
    : std::runtime_error("events line " + std::to_string(line) + ": " + detail), line_(line)
{
}

double event_time(double clock_s) { return std::round(clock_s * 1000.0) / 1000.0; }

MissionEvent truth(double t, EventKind kind)
{
    MissionEvent e;
    e.t = event_time(t);
    e.kind = kind;
    e.source = EventSource::SimulatorTruth;
    return e;
}

MissionEvent claim(double t, EventKind kind)
{
    MissionEvent e = truth(t, kind);
    e.source = EventSource::ControllerClaim;
    return e;
}

std::string to_json_line(const MissionEvent& e)
{
    json payload = json::object();
    switch (e.kind) {
    case EventKind::Landed: payload["distance_to_goal_cm"] = e.distance_cm; break;
    case EventKind::BehaviorCompleted:
        payload["behavior"] = to_string(e.behavior);
        if (!e.detail.empty())
            payload["marker"] = e.detail;
        break;
    case EventKind::RecordingStarted:
    case EventKind::RecordingStopped:
        payload["frames"] = e.index;
        payload["trigger"] = e.detail;
        payload["verified"] = e.verified;
        break;
    case EventKind::RingTouch:
    case EventKind::RingPass: payload["ring"] = e.index; break;
    case EventKind::PhaseComplete: payload["phase"] = e.index; break;
    case EventKind::Collision: payload["with"] = e.detail; break;
    case EventKind::Coverage:
        payload["covered_fraction"] = e.covered;
        payload["heading_aligned_fraction"] = e.aligned;
        break;
    case EventKind::Warning:
    case EventKind::Abort: payload["message"] = e.detail; break;
    default: break;
    }
    json j;
    j["t"] = e.t;
    j["kind"] = to_string(e.kind);
    j["payload"] = payload;
    j["source"] = to_string(e.source);
    return j.dump();
}

MissionEvent parse_event_line(const std::string& line, std::size_t line_no)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error&) {
        throw EventFormatError(line_no, "not valid JSON");
    }
    auto fail = [&](const std::string& why) { return EventFormatError(line_no, why); };
    if (!j.is_object())
        throw fail("event must be an object");
    MissionEvent e;
    if (!j.contains("t") || !j["t"].is_number())
        throw fail("missing numeric 't'");
    e.t = j["t"].get<double>();
    if (!std::isfinite(e.t))
        throw fail("non-finite 't'");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw fail("missing 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    bool found = false;
    for (auto [k, name] : kKinds) {
        if (kind == name) {
            e.kind = k;
            found = true;
        }
    }
    if (!found)
        throw fail("unknown kind '" + kind + "'");
    const std::string source = j.value("source", std::string("simulator-truth"));
    if (source == "simulator-truth")
        e.source = EventSource::SimulatorTruth;
    else if (source == "controller-claim")
        e.source = EventSource::ControllerClaim;
    else
        throw fail("unknown source '" + source + "'");

    const json payload = j.value("payload", json::object());
    if (!payload.is_object())
        throw fail("payload must be an object");
    auto num = [&](const char* key) {
        if (!payload.contains(key) || !payload[key].is_number())
            throw fail(std::string("payload needs numeric '") + key + "'");
        return payload[key].get<double>();
    };
    auto integer = [&](const char* key) {
        if (!payload.contains(key) || !payload[key].is_number_integer())
            throw fail(std::string("payload needs integer '") + key + "'");
        return payload[key].get<int>();
    };
    auto str = [&](const char* key) {
        if (!payload.contains(key) || !payload[key].is_string())
            throw fail(std::string("payload needs string '") + key + "'");
        return payload[key].get<std::string>();
    };
    switch (e.kind) {
    case EventKind::Landed: e.distance_cm = num("distance_to_goal_cm"); break;
    case EventKind::BehaviorCompleted: {
        const std::string b = str("behavior");
        auto kind_b = behavior_from_string(b.c_str());
        if (!kind_b)
            throw fail("unknown behavior '" + b + "'");
        e.behavior = *kind_b;
        if (payload.contains("marker"))
            e.detail = str("marker");
        break;
    }
    case EventKind::RecordingStarted:
    case EventKind::RecordingStopped:
        e.index = integer("frames");
        e.detail = payload.value("trigger", std::string());
        e.verified = payload.value("verified", false);
        break;
    case EventKind::RingTouch:
    case EventKind::RingPass: e.index = integer("ring"); break;
    case EventKind::PhaseComplete: e.index = integer("phase"); break;
    case EventKind::Collision: e.detail = str("with"); break;
    case EventKind::Coverage:
        e.covered = num("covered_fraction");
        e.aligned = num("heading_aligned_fraction");
        break;
    case EventKind::Warning:
    case EventKind::Abort: e.detail = payload.value("message", std::string()); break;
    default: break;
    }
    return e;
}

void write_events(std::ostream& out, const std::vector<MissionEvent>& events)
{
    for (const auto& e : events)
        out << to_json_line(e) << '\n';
}

void write_events(const std::filesystem::path& path, const std::vector<MissionEvent>& events)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    write_events(out, events);
}

std::vector<MissionEvent> read_events(std::istream& in)
{
    std::vector<MissionEvent> events;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        events.push_back(parse_event_line(line, n));
    }
    return events;
}

std::vector<MissionEvent> read_events(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw EventFormatError(0, "cannot open " + path.string());
    return read_events(in);
}

}  // namespace tello
