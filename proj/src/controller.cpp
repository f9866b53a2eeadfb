#include "tello_arena/controller.hpp"

#include <algorithm>
#include <cmath>

namespace tello {

namespace {

constexpr ColorClass kMarkerColors[] = {ColorClass::Red, ColorClass::Blue, ColorClass::Green, ColorClass::Yellow};

int clamp_channel(double v, int limit)
{
    return static_cast<int>(std::clamp(std::lround(v), static_cast<long>(-limit), static_cast<long>(limit)));
}

bool touches_border(const Region& r, int w, int h)
{
    return r.bbox.x0 == 0 || r.bbox.y0 == 0 || r.bbox.x1 == w - 1 || r.bbox.y1 == h - 1;
}

const char* trigger_name(ShapeClass s, ColorClass c)
{
    if (s == ShapeClass::Rectangle && c == ColorClass::Red)
        return "red-rectangle";
    if (s == ShapeClass::Rectangle && c == ColorClass::Blue)
        return "blue-rectangle";
    return "";
}

cmd::Rc centering_rc(Vec2 offset, int ud, const ControllerConfig& c)
{
    return {clamp_channel(c.k_center * offset.x * 100.0, c.center_limit),
            clamp_channel(c.k_center * offset.y * 100.0, c.center_limit), ud, 0};
}

const MarkerSighting* find_sighting(const std::vector<MarkerSighting>& sightings, ShapeClass shape, ColorClass color)
{
    for (const auto& s : sightings)
        if (s.shape == shape && s.color == color)
            return &s;
    return nullptr;
}

}  // namespace

const char* to_string(MissionPhase p)
{
    switch (p) {
    case MissionPhase::Grounded: return "Grounded";
    case MissionPhase::TakingOff: return "TakingOff";
    case MissionPhase::Following: return "Following";
    case MissionPhase::Executing: return "Executing";
    case MissionPhase::Searching: return "Searching";
    case MissionPhase::VictimApproach: return "VictimApproach";
    case MissionPhase::Landing: return "Landing";
    case MissionPhase::Done: return "Done";
    case MissionPhase::Aborted: return "Aborted";
    }
    return "?";
}

std::vector<MarkerSighting> detect_markers(const Frame& frame, const Pose& pose, const CameraModel& camera,
                                           const ClassifierConfig& classifier)
{
    std::vector<MarkerSighting> out;
    const double mpp = metres_per_pixel(std::max(pose.z, 0.05), camera);
    const Vec2 fwd = heading_vector(pose.yaw_deg);
    const Vec2 right = right_vector(pose.yaw_deg);
    const double sx = static_cast<double>(camera.width) / frame.width();
    const double sy = static_cast<double>(camera.height) / frame.height();
    for (ColorClass color : kMarkerColors) {
        const Mask raw = in_range(frame, ranges::of(color));
        const Mask opened = morphology(raw, MorphOp::Open, 2);
        // Raw components that survive the opening keep their full outline (opening by reconstruction).
        for (const Region& region : connected_components(raw)) {
            if (region.area < classifier.min_area)
                continue;
            const bool survives = std::any_of(region.pixels.begin(), region.pixels.end(),
                                              [&](Pixel p) { return opened.at(p.x, p.y); });
            if (!survives)
                continue;
            if (touches_border(region, frame.width(), frame.height()))
                continue;
            const ShapeReading reading = classify_shape(region, frame, classifier);
            if (reading.shape == ShapeClass::Unknown)
                continue;
            MarkerSighting s;
            s.shape = reading.shape;
            s.color = color;
            s.cx = region.cx + 0.5;
            s.cy = region.cy + 0.5;
            s.area = region.area;
            s.body_offset = {(s.cx * sx - camera.width / 2.0) * mpp, (camera.height / 2.0 - s.cy * sy) * mpp};
            s.world = Vec2{pose.x, pose.y} + right * s.body_offset.x + fwd * s.body_offset.y;
            const bool duplicate = std::any_of(out.begin(), out.end(), [&](const MarkerSighting& o) {
                return o.shape == s.shape && o.color == s.color && (o.world - s.world).norm() < 0.30;
            });
            if (!duplicate)
                out.push_back(s);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const MarkerSighting& a, const MarkerSighting& b) { return a.area > b.area; });
    return out;
}

cmd::Rc follow_line_control(const LineEstimate& est, const ControllerConfig& c, int ud)
{
    if (!est.visible)
        throw LineLost();
    return {clamp_channel(c.k_lateral * est.lateral_offset * 100.0, c.lr_limit), c.cruise_fb, ud,
            clamp_channel(c.k_heading * est.heading_error, c.yaw_limit)};
}

int altitude_hold(int target_cm, int height_cm, const ControllerConfig& c)
{
    return clamp_channel(c.k_altitude * (target_cm - height_cm), c.ud_limit);
}

TickOutput mission_tick(MissionState& s, const ControllerConfig& c, const Frame* frame, const Telemetry& tel)
{
    TickOutput out;
    const double dt = s.last_t < 0 ? 0.0 : tel.t - s.last_t;
    s.last_t = tel.t;

    // Dead reckoning from the last commanded rc, heading from the IMU.
    const Vec2 fwd = heading_vector(tel.yaw_deg);
    const Vec2 right = right_vector(tel.yaw_deg);
    const Vec2 vel = right * (s.last_rc.lr / 100.0 * c.rc_speed) + fwd * (s.last_rc.fb / 100.0 * c.rc_speed);
    s.pose_estimate.x += vel.x * dt;
    s.pose_estimate.y += vel.y * dt;
    s.pose_estimate.z = tel.height_cm / 100.0;
    s.pose_estimate.yaw_deg = tel.yaw_deg;
    const double travel = vel.norm() * dt;
    const double yaw_step = std::abs(wrap_degrees(tel.yaw_deg - s.last_yaw));
    s.last_yaw = tel.yaw_deg;

    auto send_rc = [&](cmd::Rc rc) {
        s.last_rc = rc;
        out.commands.emplace_back(rc);
    };
    auto send_motion = [&](Command command) {
        s.last_rc = {0, 0, 0, 0};
        s.motion_pending = true;
        out.commands.push_back(std::move(command));
    };
    auto abort = [&](const std::string& why) {
        MissionEvent e = claim(tel.t, EventKind::Abort);
        e.detail = why;
        out.events.push_back(e);
        s.phase = MissionPhase::Aborted;
        if (tel.height_cm > 0 && !s.motion_pending)
            send_motion(cmd::Land{});
    };
    auto complete = [&](BehaviorKind b) {
        MissionEvent e = claim(tel.t, EventKind::BehaviorCompleted);
        e.behavior = b;
        out.events.push_back(e);
        s.behavior.reset();
        s.target_altitude_cm = c.cruise_altitude_cm;
        s.phase = MissionPhase::Following;
    };

    if (s.motion_pending) {
        if (!tel.motion_result)
            return out;
        s.motion_pending = false;
        const bool ok = *tel.motion_result;
        switch (s.phase) {
        case MissionPhase::TakingOff:
            if (!ok) {
                abort("takeoff rejected");
                return out;
            }
            out.events.push_back(claim(tel.t, EventKind::TakeOff));
            s.phase = MissionPhase::Following;
            s.target_altitude_cm = c.cruise_altitude_cm;
            return out;
        case MissionPhase::Executing:
            if (ok && s.behavior)
                complete(*s.behavior);
            else {
                MissionEvent w = claim(tel.t, EventKind::Warning);
                w.detail = "behavior command rejected";
                out.events.push_back(w);
                s.behavior.reset();
                s.phase = MissionPhase::Following;
            }
            return out;
        case MissionPhase::Landing: {
            MissionEvent e = claim(tel.t, EventKind::Landed);
            e.distance_cm = s.landing_offset_cm;
            out.events.push_back(e);
            s.phase = ok ? MissionPhase::Done : MissionPhase::Aborted;
            return out;
        }
        default: return out;
        }
    }

    switch (s.phase) {
    case MissionPhase::Grounded:
        s.phase = MissionPhase::TakingOff;
        send_motion(cmd::TakeOff{});
        return out;
    case MissionPhase::Done:
    case MissionPhase::Aborted:
    case MissionPhase::TakingOff: return out;
    default: break;
    }

    if (tel.height_cm <= 0) {
        abort("grounded");
        return out;
    }
    if (tel.battery < c.min_battery) {
        abort("battery low");
        return out;
    }
    if (!frame)
        return out;

    const std::vector<MarkerSighting> sightings = detect_markers(*frame, s.pose_estimate, c.camera, c.classifier);
    const int ud = altitude_hold(s.target_altitude_cm, tel.height_cm, c);
    const LineEstimate line = estimate_line(in_range(*frame, ranges::kBlack));
    const MarkerSighting* goal = find_sighting(sightings, ShapeClass::Circle, ColorClass::Yellow);

    if (s.phase == MissionPhase::Following) {
        for (const MarkerSighting& m : sightings) {
            const auto behavior = marker_semantics(m.shape, m.color);
            if (!behavior || m.body_offset.norm() > c.trigger_radius)
                continue;
            const bool handled = std::any_of(s.handled.begin(), s.handled.end(), [&](const HandledMarker& h) {
                return h.shape == m.shape && h.color == m.color && (h.world - m.world).norm() < c.dedupe_radius;
            });
            if (handled)
                continue;
            s.handled.push_back({m.shape, m.color, m.world});
            s.odometer_since_trigger = 0;
            switch (*behavior) {
            case BehaviorKind::StartRecording:
            case BehaviorKind::StopRecording: {
                const bool start = *behavior == BehaviorKind::StartRecording;
                out.recorder = start ? RecorderAction::Start : RecorderAction::Stop;
                s.recording = start;
                MissionEvent e = claim(tel.t, EventKind::BehaviorCompleted);
                e.behavior = *behavior;
                e.detail = trigger_name(m.shape, m.color);
                out.events.push_back(e);
                break;
            }
            case BehaviorKind::AscendHigh:
                s.phase = MissionPhase::Executing;
                s.behavior = *behavior;
                s.target_altitude_cm = c.high_target_cm;
                break;
            case BehaviorKind::DescendLow:
                s.phase = MissionPhase::Executing;
                s.behavior = *behavior;
                s.target_altitude_cm = c.low_target_cm;
                break;
            case BehaviorKind::Spin360Left:
            case BehaviorKind::Spin360Right:
                s.phase = MissionPhase::Executing;
                s.behavior = *behavior;
                send_motion(cmd::Rotate{*behavior == BehaviorKind::Spin360Left ? RotateSense::Ccw : RotateSense::Cw,
                                        360});
                return out;
            case BehaviorKind::PickVictim:
                if (c.rescue) {
                    s.phase = MissionPhase::VictimApproach;
                    s.behavior = *behavior;
                    s.hold_s = 0;
                }
                break;
            case BehaviorKind::LandGoal:
                s.phase = MissionPhase::Landing;
                s.behavior = *behavior;
                s.settle_ticks = 0;
                s.blind_ticks = 0;
                break;
            }
            break;
        }
    }

    switch (s.phase) {
    case MissionPhase::Following:
    case MissionPhase::Executing: {
        if (s.phase == MissionPhase::Executing && s.behavior) {
            const bool in_band = *s.behavior == BehaviorKind::AscendHigh ? tel.height_cm >= 200 : tel.height_cm < 100;
            s.odometer_since_trigger = in_band ? s.odometer_since_trigger + travel : 0.0;
            if (s.odometer_since_trigger >= c.meter_travel)
                complete(*s.behavior);
        }
        if (!line.visible) {
            if (goal) {
                s.phase = MissionPhase::Landing;
                s.behavior = BehaviorKind::LandGoal;
                s.settle_ticks = 0;
                s.blind_ticks = 0;
                send_rc({0, 0, ud, 0});
                return out;
            }
            s.resume_phase = s.phase;
            s.phase = MissionPhase::Searching;
            s.search_rotated = 0;
            send_rc({0, 0, ud, clamp_channel(c.search_rate_dps, 100)});
            return out;
        }
        send_rc(follow_line_control(line, c, ud));
        return out;
    }
    case MissionPhase::Searching:
        s.search_rotated += yaw_step;
        if (line.visible) {
            s.phase = s.resume_phase;
            send_rc(follow_line_control(line, c, ud));
            return out;
        }
        if (goal) {
            s.phase = MissionPhase::Landing;
            s.behavior = BehaviorKind::LandGoal;
            send_rc({0, 0, ud, 0});
            return out;
        }
        if (s.search_rotated >= 360.0) {
            abort("line lost");
            return out;
        }
        send_rc({0, 0, ud, clamp_channel(c.search_rate_dps, 100)});
        return out;
    case MissionPhase::VictimApproach: {
        const MarkerSighting* victim = find_sighting(sightings, ShapeClass::Circle, ColorClass::Green);
        if (!victim) {
            if (++s.blind_ticks > 10) {
                MissionEvent w = claim(tel.t, EventKind::Warning);
                w.detail = "victim lost";
                out.events.push_back(w);
                s.phase = MissionPhase::Following;
                s.target_altitude_cm = c.cruise_altitude_cm;
                s.behavior.reset();
            }
            send_rc({0, 0, ud, 0});
            return out;
        }
        s.blind_ticks = 0;
        const double off = victim->body_offset.norm();
        s.target_altitude_cm = off < c.victim_tolerance ? c.victim_altitude_cm : s.target_altitude_cm;
        const bool holding = off < 1.5 * c.victim_tolerance && tel.height_cm <= c.victim_altitude_cm + 3;
        s.hold_s = holding ? s.hold_s + dt : 0.0;
        if (s.hold_s >= c.victim_hold_s) {
            out.events.push_back(claim(tel.t, EventKind::VictimPickup));
            s.behavior.reset();
            s.phase = MissionPhase::Following;
            s.target_altitude_cm = c.cruise_altitude_cm;
        }
        send_rc(centering_rc(victim->body_offset, altitude_hold(s.target_altitude_cm, tel.height_cm, c), c));
        return out;
    }
    case MissionPhase::Landing: {
        if (!goal) {
            if (++s.blind_ticks > 30) {
                s.landing_offset_cm = 0;
                send_motion(cmd::Land{});
                return out;
            }
            send_rc({0, 0, ud, 0});
            return out;
        }
        s.blind_ticks = 0;
        const double off = goal->body_offset.norm();
        s.settle_ticks = off < c.land_tolerance ? s.settle_ticks + 1 : 0;
        if (s.settle_ticks >= c.land_settle_ticks) {
            s.landing_offset_cm = std::round(off * 1000.0) / 10.0;
            send_motion(cmd::Land{});
            return out;
        }
        send_rc(centering_rc(goal->body_offset, ud, c));
        return out;
    }
    default: return out;
    }
}

}  // namespace tello
