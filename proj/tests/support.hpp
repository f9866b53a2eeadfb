#pragma once

// Generators and independent oracles shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tello_arena/controller.hpp"
#include "tello_arena/course.hpp"
#include "tello_arena/events.hpp"
#include "tello_arena/image.hpp"
#include "tello_arena/protocol.hpp"
#include "tello_arena/render.hpp"

namespace tello::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::array<int, 3> random_waypoint(Rng& rng)
{
    std::array<int, 3> p{};
    do {
        for (int& v : p)
            v = uniform_int(rng, -Limits::kMaxCoord, Limits::kMaxCoord);
    } while (std::abs(p[0]) < 20 && std::abs(p[1]) < 20 && std::abs(p[2]) < 20);
    return p;
}

inline std::string random_token(Rng& rng)
{
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-";
    std::string s(static_cast<std::size_t>(uniform_int(rng, 1, 12)), 'a');
    for (char& c : s)
        c = alphabet[uniform_int(rng, 0, sizeof alphabet - 2)];
    return s;
}

/// Any valid command, uniformly over the variant alternatives.
inline Command random_command(Rng& rng)
{
    switch (uniform_int(rng, 0, std::variant_size_v<Command> - 1)) {
    case 0: return cmd::ModeEnter{};
    case 1: return cmd::TakeOff{};
    case 2: return cmd::Land{};
    case 3: return cmd::StreamOn{};
    case 4: return cmd::StreamOff{};
    case 5: return cmd::Emergency{};
    case 6: return cmd::Move{static_cast<MoveDir>(uniform_int(rng, 0, 5)), uniform_int(rng, 20, 500)};
    case 7: return cmd::Rotate{static_cast<RotateSense>(uniform_int(rng, 0, 1)), uniform_int(rng, 1, 360)};
    case 8: return cmd::Flip{static_cast<FlipDir>(uniform_int(rng, 0, 7))};
    case 9: {
        const auto p = random_waypoint(rng);
        return cmd::Go{p[0], p[1], p[2], uniform_int(rng, 10, 100)};
    }
    case 10: {
        const auto a = random_waypoint(rng);
        const auto b = random_waypoint(rng);
        return cmd::Curve{a[0], a[1], a[2], b[0], b[1], b[2], uniform_int(rng, 10, 60)};
    }
    case 11: return cmd::SetSpeed{uniform_int(rng, 10, 100)};
    case 12:
        return cmd::Rc{uniform_int(rng, -100, 100), uniform_int(rng, -100, 100), uniform_int(rng, -100, 100),
                       uniform_int(rng, -100, 100)};
    case 13: return cmd::Wifi{random_token(rng), random_token(rng)};
    default: return cmd::Read{kAllQueries[static_cast<std::size_t>(uniform_int(rng, 0, kAllQueries.size() - 1))]};
    }
}

inline std::vector<std::string> split_words(const std::string& line)
{
    std::vector<std::string> words;
    std::string w;
    for (char c : line) {
        if (c == ' ') {
            if (!w.empty())
                words.push_back(w);
            w.clear();
        } else {
            w += c;
        }
    }
    if (!w.empty())
        words.push_back(w);
    return words;
}

inline std::string join_words(const std::vector<std::string>& words)
{
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i)
        out += (i ? " " : "") + words[i];
    return out;
}

/// A line derived from a valid command by a mutation that always makes it invalid.
inline std::string mutate_invalid(Rng& rng)
{
    const Command c = random_command(rng);
    auto words = split_words(serialize_command(c));
    std::vector<std::size_t> numeric;
    for (std::size_t i = 1; i < words.size(); ++i)
        if (!std::holds_alternative<cmd::Wifi>(c) && !std::holds_alternative<cmd::Flip>(c))
            numeric.push_back(i);

    switch (uniform_int(rng, 0, 4)) {
    case 0:  // unknown keyword
        words[0] += "x";
        break;
    case 1:  // extra argument
        words.push_back("1");
        break;
    case 2:  // missing argument, or a stray one for argument-free commands
        if (words.size() > 1)
            words.pop_back();
        else
            words.push_back("0");
        break;
    case 3:  // not a number
        if (numeric.empty())
            words[0] = "?" + words[0];
        else
            words[numeric[static_cast<std::size_t>(uniform_int(rng, 0, numeric.size() - 1))]] += "q";
        break;
    default:  // out of range
        if (numeric.empty())
            words.insert(words.begin(), "sdk");
        else
            words[numeric[static_cast<std::size_t>(uniform_int(rng, 0, numeric.size() - 1))]] =
                std::to_string(uniform_int(rng, 0, 1) ? uniform_int(rng, 1001, 99999) : -uniform_int(rng, 1001, 99999));
        break;
    }
    return join_words(words);
}

inline Mask random_mask(Rng& rng, int w, int h, double density)
{
    Mask m(w, h);
    std::bernoulli_distribution bit(density);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.set(x, y, bit(rng));
    return m;
}

/// Random blobs: rectangles and discs, closer to what thresholding produces than pixel noise.
inline Mask random_blob_mask(Rng& rng, int w, int h)
{
    Mask m(w, h);
    const int blobs = uniform_int(rng, 1, 8);
    for (int b = 0; b < blobs; ++b) {
        const int cx = uniform_int(rng, 0, w - 1), cy = uniform_int(rng, 0, h - 1);
        const int r = uniform_int(rng, 1, std::max(2, std::min(w, h) / 4));
        const bool disc = uniform_int(rng, 0, 1) == 1;
        for (int y = std::max(0, cy - r); y <= std::min(h - 1, cy + r); ++y)
            for (int x = std::max(0, cx - r); x <= std::min(w - 1, cx + r); ++x)
                if (!disc || (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                    m.set(x, y, true);
    }
    return m;
}

/// The eight marker kinds of the vision course with their painted sizes.
inline std::vector<Marker> marker_catalogue()
{
    const std::pair<MarkerShape, MarkerColor> kinds[] = {
        {MarkerShape::Rectangle, MarkerColor::Red},   {MarkerShape::Rectangle, MarkerColor::Blue},
        {MarkerShape::Circle, MarkerColor::Red},      {MarkerShape::Circle, MarkerColor::Blue},
        {MarkerShape::Triangle, MarkerColor::Red},    {MarkerShape::Triangle, MarkerColor::Blue},
        {MarkerShape::Circle, MarkerColor::Green},    {MarkerShape::Circle, MarkerColor::Yellow},
    };
    std::vector<Marker> out;
    for (auto [shape, color] : kinds) {
        Marker m;
        m.shape = shape;
        m.color = color;
        const auto size = expected_marker_size(shape, color);
        m.width_cm = size->first;
        m.height_cm = size->second;
        out.push_back(m);
    }
    return out;
}

/// Plain white floor holding one marker at its centre.
inline CourseSpec single_marker_course(Marker marker, double side = 4.0)
{
    CourseSpec c;
    c.name = "single-marker";
    c.width = side;
    c.depth = side;
    marker.center = {side / 2, side / 2};
    c.markers.push_back(marker);
    c.start_pad = {0.5, 0.5};
    return c;
}

inline ShapeClass shape_of(MarkerShape s)
{
    switch (s) {
    case MarkerShape::Rectangle: return ShapeClass::Rectangle;
    case MarkerShape::Circle: return ShapeClass::Circle;
    default: return ShapeClass::Triangle;
    }
}

inline ColorClass color_of(MarkerColor c)
{
    switch (c) {
    case MarkerColor::Red: return ColorClass::Red;
    case MarkerColor::Blue: return ColorClass::Blue;
    case MarkerColor::Green: return ColorClass::Green;
    default: return ColorClass::Yellow;
    }
}

/// A camera pose above the marker with random yaw and an offset that keeps the whole marker in view.
inline Pose random_view(Rng& rng, const CourseSpec& course, const CameraModel& cam, double z_lo, double z_hi)
{
    const Marker& m = course.markers.front();
    Pose p;
    p.z = uniform(rng, z_lo, z_hi);
    p.yaw_deg = uniform(rng, 0.0, 360.0);
    const double mpp = metres_per_pixel(p.z, cam);
    const double half_h = cam.height * mpp / 2;
    const double room = std::max(0.0, half_h - m.extent_m() - 4 * mpp);
    const double r = uniform(rng, 0.0, room);
    const double a = uniform(rng, 0.0, 2 * std::numbers::pi);
    p.x = m.center.x + r * std::cos(a);
    p.y = m.center.y + r * std::sin(a);
    return p;
}

// ---------------------------------------------------------------------------
// Rubric oracle. Written as a rule table evaluated independently of the
// scoring engine: every rule is a function of the full log.

struct OracleRule {
    const char* id;
    int (*points)(const std::vector<MissionEvent>&);
};

inline bool oracle_truth(const MissionEvent& e) { return e.source == EventSource::SimulatorTruth; }

inline int oracle_r1(const std::vector<MissionEvent>& ev)
{
    return std::any_of(ev.begin(), ev.end(),
                       [](const MissionEvent& e) { return oracle_truth(e) && e.kind == EventKind::TakeOff; })
               ? 5
               : 0;
}

inline int oracle_r2(const std::vector<MissionEvent>& ev)
{
    int pts = 0;
    for (BehaviorKind b :
         {BehaviorKind::AscendHigh, BehaviorKind::DescendLow, BehaviorKind::Spin360Left, BehaviorKind::Spin360Right}) {
        for (const auto& e : ev) {
            if (oracle_truth(e) && e.kind == EventKind::BehaviorCompleted && e.behavior == b) {
                pts += 5;
                break;
            }
        }
    }
    return pts;
}

inline int oracle_r3(const std::vector<MissionEvent>& ev)
{
    return -5 * static_cast<int>(std::count_if(ev.begin(), ev.end(), [](const MissionEvent& e) {
               return oracle_truth(e) && e.kind == EventKind::LineLeave;
           }));
}

inline int oracle_r4(const std::vector<MissionEvent>& ev)
{
    const MissionEvent* last = nullptr;
    for (const auto& e : ev)
        if (oracle_truth(e) && e.kind == EventKind::Coverage)
            last = &e;
    if (!last || last->aligned < 0.8)
        return 0;
    const std::pair<double, int> tiers[] = {{0.95, 25}, {0.75, 20}, {0.50, 15}};
    for (auto [threshold, pts] : tiers)
        if (last->covered >= threshold)
            return pts;
    return 0;
}

inline int oracle_r5(const std::vector<MissionEvent>& ev)
{
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& a = ev[i];
        if (a.kind != EventKind::RecordingStarted || !a.verified || a.detail != "red-rectangle")
            continue;
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            const auto& b = ev[j];
            if (b.kind == EventKind::RecordingStopped && b.verified && b.detail == "blue-rectangle" && b.index > 0)
                return 10;
        }
    }
    return 0;
}

inline int oracle_r6(const std::vector<MissionEvent>& ev)
{
    for (const auto& e : ev) {
        if (oracle_truth(e) && e.kind == EventKind::Landed) {
            if (e.distance_cm <= 10)
                return 10;
            return e.distance_cm <= 20 ? 5 : 0;
        }
    }
    return 0;
}

inline int oracle_r7(const std::vector<MissionEvent>& ev)
{
    for (const auto& e : ev)
        if (oracle_truth(e) && e.kind == EventKind::VictimPickup)
            return 10;
    return 0;
}

inline const std::vector<OracleRule>& oracle_rules_2023()
{
    static const std::vector<OracleRule> rules = {{"R1", oracle_r1}, {"R2", oracle_r2}, {"R3", oracle_r3},
                                                  {"R4", oracle_r4}, {"R5", oracle_r5}, {"R6", oracle_r6},
                                                  {"R7", oracle_r7}};
    return rules;
}

inline int oracle_score_2023(const std::vector<MissionEvent>& events)
{
    int sum = 0;
    for (const auto& rule : oracle_rules_2023())
        sum += rule.points(events);
    return std::max(0, sum);
}

/// Random time-ordered log of up to max_events events over every kind the rubric looks at.
inline std::vector<MissionEvent> random_event_log(Rng& rng, int max_events)
{
    const EventKind kinds[] = {EventKind::TakeOff,          EventKind::Landed,           EventKind::LineLeave,
                               EventKind::LineRegain,       EventKind::BehaviorCompleted, EventKind::RecordingStarted,
                               EventKind::RecordingStopped, EventKind::VictimPickup,     EventKind::Coverage,
                               EventKind::RingTouch,        EventKind::Warning};
    const char* triggers[] = {"red-rectangle", "blue-rectangle", "mission-end"};
    const int n = uniform_int(rng, 0, max_events);
    std::vector<MissionEvent> out;
    double t = 0;
    for (int i = 0; i < n; ++i) {
        t += uniform_int(rng, 0, 3) * 0.5;
        MissionEvent e;
        e.t = t;
        e.kind = kinds[uniform_int(rng, 0, std::size(kinds) - 1)];
        e.source = uniform_int(rng, 0, 3) == 0 ? EventSource::ControllerClaim : EventSource::SimulatorTruth;
        switch (e.kind) {
        case EventKind::Landed: e.distance_cm = uniform_int(rng, 0, 300) / 10.0; break;
        case EventKind::BehaviorCompleted: e.behavior = static_cast<BehaviorKind>(uniform_int(rng, 0, 7)); break;
        case EventKind::RecordingStarted:
        case EventKind::RecordingStopped:
            e.detail = triggers[uniform_int(rng, 0, 2)];
            e.verified = uniform_int(rng, 0, 3) != 0;
            e.index = uniform_int(rng, 0, 2) * 30;
            break;
        case EventKind::Coverage:
            e.covered = uniform_int(rng, 0, 20) / 20.0;
            e.aligned = uniform_int(rng, 0, 20) / 20.0;
            break;
        default: break;
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace tello::testing
