#pragma once

// Autonomous client for the vision course: line following plus
// marker-triggered behaviors, driven one tick at a time.

#include <optional>
#include <vector>

#include "tello_arena/behavior.hpp"
#include "tello_arena/events.hpp"
#include "tello_arena/protocol.hpp"
#include "tello_arena/render.hpp"
#include "tello_arena/vision.hpp"

namespace tello {

struct ControllerConfig {
    double tick_s = 0.1;
    int cruise_altitude_cm = 120;
    int cruise_fb = 25;
    double k_heading = 1.2;  // yaw channel per degree
    int yaw_limit = 60;
    double k_lateral = 0.8;  // lr channel per (offset * 100)
    int lr_limit = 40;
    double k_altitude = 1.0;  // ud channel per cm
    int ud_limit = 60;
    double rc_speed = 1.0;    // m/s at channel 100, for dead reckoning

    int high_target_cm = 220;
    int low_target_cm = 70;
    double meter_travel = 1.3;  // m metered after reaching the altitude band

    double trigger_radius = 0.40;
    double dedupe_radius = 0.30;

    bool rescue = false;
    double k_center = 1.5;
    int center_limit = 20;
    double victim_tolerance = 0.08;
    int victim_altitude_cm = 50;
    double victim_hold_s = 2.4;
    double land_tolerance = 0.04;
    int land_settle_ticks = 5;

    double search_rate_dps = 20;
    int min_battery = 10;

    CameraModel camera;
    ClassifierConfig classifier;
};

struct MarkerSighting {
    ShapeClass shape = ShapeClass::Unknown;
    ColorClass color = ColorClass::Other;
    double cx = 0, cy = 0;   // image centroid, px
    std::size_t area = 0;
    Vec2 body_offset;        // m: x right, y forward of the drone
    Vec2 world;              // estimate from the dead-reckoned pose
};

/// Every competition color: threshold, open, label and classify. Regions touching the border are skipped.
std::vector<MarkerSighting> detect_markers(const Frame& frame, const Pose& pose_estimate = {0, 0, 1.0, 0},
                                           const CameraModel& camera = {}, const ClassifierConfig& classifier = {});

/// Proportional line-following law; throws LineLost when the estimate is not visible.
class LineLost : public std::runtime_error {
public:
    LineLost() : std::runtime_error("line not visible") {}
};
cmd::Rc follow_line_control(const LineEstimate& est, const ControllerConfig& config = {}, int ud = 0);

int altitude_hold(int target_cm, int height_cm, const ControllerConfig& config);

enum class MissionPhase { Grounded, TakingOff, Following, Executing, Searching, VictimApproach, Landing, Done, Aborted };
const char* to_string(MissionPhase p);

struct HandledMarker {
    ShapeClass shape;
    ColorClass color;
    Vec2 world;
};

struct Telemetry {
    double t = 0;
    int height_cm = 0;
    int yaw_deg = 0;
    int battery = 100;
    std::optional<bool> motion_result;  // outcome of the outstanding motion command, reported once
};

struct MissionState {
    MissionPhase phase = MissionPhase::Grounded;
    std::optional<BehaviorKind> behavior;
    MissionPhase resume_phase = MissionPhase::Following;
    std::vector<HandledMarker> handled;
    bool recording = false;
    double odometer_since_trigger = 0;
    Pose pose_estimate;
    int target_altitude_cm = 0;
    cmd::Rc last_rc{0, 0, 0, 0};
    bool motion_pending = false;
    double last_t = -1;
    int last_yaw = 0;
    double search_rotated = 0;
    double hold_s = 0;
    int settle_ticks = 0;
    int blind_ticks = 0;
    double landing_offset_cm = 0;
};

enum class RecorderAction { None, Start, Stop };

struct TickOutput {
    std::vector<Command> commands;
    std::vector<MissionEvent> events;  // controller claims
    RecorderAction recorder = RecorderAction::None;
};

/// One 10 Hz control step. Pure: the result depends only on the arguments.
TickOutput mission_tick(MissionState& state, const ControllerConfig& config, const Frame* frame,
                        const Telemetry& telemetry);

}  // namespace tello
