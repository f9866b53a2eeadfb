#include "tello_arena/sim.hpp"

#include <algorithm>
#include <cmath>

namespace tello {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ShapeClass shape_class(MarkerShape s)
{
    switch (s) {
    case MarkerShape::Rectangle: return ShapeClass::Rectangle;
    case MarkerShape::Circle: return ShapeClass::Circle;
    case MarkerShape::Triangle: return ShapeClass::Triangle;
    }
    return ShapeClass::Unknown;
}

ColorClass color_class(MarkerColor c)
{
    switch (c) {
    case MarkerColor::Red: return ColorClass::Red;
    case MarkerColor::Blue: return ColorClass::Blue;
    case MarkerColor::Green: return ColorClass::Green;
    case MarkerColor::Yellow: return ColorClass::Yellow;
    }
    return ColorClass::Other;
}

int steps_for(double seconds, double dt) { return std::max(1, static_cast<int>(std::ceil(seconds / dt - 1e-9))); }

double distance_to_box(Vec3 p, Vec3 lo, Vec3 hi)
{
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    const double dz = std::max({lo.z - p.z, 0.0, p.z - hi.z});
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Response error(const char* message) { return resp::Error{message}; }

}  // namespace

Vec3 MotionPlan::offset_at(double p) const
{
    switch (kind) {
    case Kind::Straight:
    case Kind::Go:
    case Kind::TakeOff:
    case Kind::Land: return displacement * p;
    case Kind::Rotate: return {};
    case Kind::Flip: {
        const double s = p >= 1.0 ? 0.0 : std::sin(std::numbers::pi * p);
        return {flip_dir.x * s, flip_dir.y * s, 0.0};
    }
    case Kind::Curve: {
        const double a = arc_angle * p;
        // Offset relative to the start point, which sits at angle 0.
        const Vec3 at = arc_center + arc_u * (arc_radius * std::cos(a)) + arc_v * (arc_radius * std::sin(a));
        const Vec3 start = arc_center + arc_u * arc_radius;
        return at - start;
    }
    }
    return {};
}

SimWorld::SimWorld(CourseSpec course, std::uint64_t seed, SimConfig config, CameraModel camera)
    : course_(std::move(course)), config_(config), camera_(camera), rng_(seed)
{
    drone_.position = course_.start_pad;
    drone_.speed_setting = config_.default_speed;
    for (std::size_t i = 0; i < course_.markers.size(); ++i) {
        MarkerWatch w;
        w.marker = i;
        const Marker& m = course_.markers[i];
        w.behavior = marker_semantics(shape_class(m.shape), color_class(m.color));
        watches_.push_back(w);
    }
}

void SimWorld::emit(EventKind kind) { emit(truth(clock(), kind)); }

void SimWorld::emit(MissionEvent e)
{
    e.t = event_time(clock());
    e.source = EventSource::SimulatorTruth;
    events_.push_back(std::move(e));
}

std::vector<Completion> SimWorld::take_completions()
{
    std::vector<Completion> out;
    out.swap(completions_);
    return out;
}

SimWorld::Applied SimWorld::apply_command(const Command& command, std::uint64_t reply_token)
{
    if (std::holds_alternative<cmd::ModeEnter>(command)) {
        drone_.sdk_mode = true;
        return {resp::Ok{}};
    }
    if (!drone_.sdk_mode)
        return {error("not in sdk mode")};
    if (const auto* read = std::get_if<cmd::Read>(&command))
        return {answer_query(read->query)};
    if (drone_.crashed && !std::holds_alternative<cmd::TakeOff>(command))
        return {error("crashed, take off first")};

    auto install = [&](MotionPlan plan, double seconds) -> Applied {
        plan.total_steps = steps_for(seconds, config_.dt);
        plan.reply_token = reply_token;
        drone_.rc = {0, 0, 0, 0};
        drone_.velocity = {};
        drone_.yaw_rate = 0;
        drone_.plan = plan;
        return {std::nullopt};
    };
    auto motion_gate = [&]() -> std::optional<Response> {
        if (!drone_.flying)
            return error("not flying");
        if (drone_.plan)
            return error("motion in progress");
        return std::nullopt;
    };

    return std::visit(
        overloaded{
            [&](const cmd::TakeOff&) -> Applied {
                if (drone_.flying)
                    return {error("already flying")};
                drone_.flying = true;
                drone_.crashed = false;
                MotionPlan plan;
                plan.kind = MotionPlan::Kind::TakeOff;
                plan.displacement = {0, 0, config_.hover_altitude - drone_.z};
                return install(plan, config_.hover_altitude / config_.vertical_rate);
            },
            [&](const cmd::Land&) -> Applied {
                if (auto e = motion_gate())
                    return {*e};
                MotionPlan plan;
                plan.kind = MotionPlan::Kind::Land;
                plan.displacement = {0, 0, -drone_.z};
                return install(plan, drone_.z / config_.vertical_rate);
            },
            [&](const cmd::Move& m) -> Applied {
                if (auto e = motion_gate())
                    return {*e};
                const double d = m.distance_cm / 100.0;
                const Vec2 fwd = heading_vector(drone_.yaw_deg);
                const Vec2 right = right_vector(drone_.yaw_deg);
                Vec3 disp;
                switch (m.direction) {
                case MoveDir::Forward: disp = {fwd.x * d, fwd.y * d, 0}; break;
                case MoveDir::Back: disp = {-fwd.x * d, -fwd.y * d, 0}; break;
                case MoveDir::Right: disp = {right.x * d, right.y * d, 0}; break;
                case MoveDir::Left: disp = {-right.x * d, -right.y * d, 0}; break;
                case MoveDir::Up: disp = {0, 0, d}; break;
                case MoveDir::Down: disp = {0, 0, -d}; break;
                }
                if (drone_.z + disp.z < config_.min_motion_altitude)
                    return {error("altitude too low")};
                MotionPlan plan;
                plan.kind = MotionPlan::Kind::Straight;
                plan.displacement = disp;
                return install(plan, m.distance_cm / static_cast<double>(drone_.speed_setting));
            },
            [&](const cmd::Rotate& r) -> Applied {
                if (auto e = motion_gate())
                    return {*e};
                MotionPlan plan;
                plan.kind = MotionPlan::Kind::Rotate;
                plan.yaw_start = drone_.yaw_deg;
                plan.yaw_delta = r.sense == RotateSense::Cw ? r.degrees : -r.degrees;
                return install(plan, r.degrees / config_.rotation_rate);
            },
            [&](const cmd::Flip& f) -> Applied {
                if (auto e = motion_gate())
                    return {*e};
                const Vec2 fwd = heading_vector(drone_.yaw_deg);
                const Vec2 right = right_vector(drone_.yaw_deg);
                Vec2 dir;
                switch (f.direction) {
                case FlipDir::F: dir = fwd; break;
                case FlipDir::B: dir = fwd * -1.0; break;
                case FlipDir::R: dir = right; break;
                case FlipDir::L: dir = right * -1.0; break;
                case FlipDir::FR: dir = (fwd + right) * kInvSqrt2; break;
                case FlipDir::FL: dir = (fwd - right) * kInvSqrt2; break;
                case FlipDir::BR: dir = (right - fwd) * kInvSqrt2; break;
                case FlipDir::BL: dir = (fwd + right) * -kInvSqrt2; break;
                }
                MotionPlan plan;
                plan.kind = MotionPlan::Kind::Flip;
                plan.flip_dir = dir * config_.flip_peak;
                return install(plan, config_.flip_duration);
            },
            [&](const cmd::Go& g) -> Applied {
                if (auto e = motion_gate())
                    return {*e};
                // Body frame: x forward, y left, z up.
                const Vec2 fwd = heading_vector(drone_.yaw_deg);
                const Vec2 right = right_vector(drone_.yaw_deg);
                const Vec2 h = fwd * (g.x / 100.0) - right * (g.y / 100.0);
                const Vec3 disp{h.x, h.y, g.z / 100.0};
                if (drone_.z + disp.z < config_.min_motion_altitude)
                    return {error("altitude too low")};
                MotionPlan plan;
                plan.kind = MotionPlan::Kind::Go;
                plan.displacement = disp;
                return install(plan, disp.norm() * 100.0 / g.speed);
            },
            [&](const cmd::Curve& c) -> Applied {
                if (auto e = motion_gate())
                    return {*e};
                const Vec2 fwd = heading_vector(drone_.yaw_deg);
                const Vec2 right = right_vector(drone_.yaw_deg);
                auto to_world = [&](int x, int y, int z) {
                    const Vec2 h = fwd * (x / 100.0) - right * (y / 100.0);
                    return Vec3{h.x, h.y, z / 100.0};
                };
                const Vec3 p1 = to_world(c.x1, c.y1, c.z1);
                const Vec3 p2 = to_world(c.x2, c.y2, c.z2);
                const Vec3 n = p1.cross(p2);
                const double nn = n.norm();
                if (nn < 1e-9)
                    return {error("curve points are collinear")};
                // Circumcentre of (0, p1, p2).
                const Vec3 center = (p2 * p1.dot(p1) - p1 * p2.dot(p2)).cross(n) * (1.0 / (2.0 * nn * nn));
                const double radius = center.norm();
                const Vec3 u = center * (-1.0 / radius);
                const Vec3 nhat = n * (1.0 / nn);
                Vec3 v = nhat.cross(u);
                auto angle_of = [&](Vec3 p) {
                    const Vec3 d = p - center;
                    double a = std::atan2(d.dot(v), d.dot(u));
                    if (a < 0)
                        a += 2 * std::numbers::pi;
                    return a;
                };
                if (angle_of(p1) > angle_of(p2))
                    v = v * -1.0;
                const double end_angle = angle_of(p2);
                if (drone_.z + std::min(p1.z, p2.z) < config_.min_motion_altitude)
                    return {error("altitude too low")};
                MotionPlan plan;
                plan.kind = MotionPlan::Kind::Curve;
                plan.arc_center = center;
                plan.arc_u = u;
                plan.arc_v = v;
                plan.arc_radius = radius;
                plan.arc_angle = end_angle;
                return install(plan, radius * end_angle * 100.0 / c.speed);
            },
            [&](const cmd::SetSpeed& s) -> Applied {
                drone_.speed_setting = s.speed;
                return {resp::Ok{}};
            },
            [&](const cmd::Rc& rc) -> Applied {
                if (auto e = motion_gate())
                    return {*e};
                drone_.rc = rc;
                return {resp::Ok{}};
            },
            [&](const cmd::StreamOn&) -> Applied {
                drone_.stream_on = true;
                return {resp::Ok{}};
            },
            [&](const cmd::StreamOff&) -> Applied {
                drone_.stream_on = false;
                return {resp::Ok{}};
            },
            [&](const cmd::Emergency&) -> Applied {
                if (drone_.flying)
                    ground(nullptr);
                return {resp::Ok{}};
            },
            [&](const cmd::Wifi&) -> Applied { return {resp::Ok{}}; },
            [&](const auto&) -> Applied { return {error("unsupported")}; },
        },
        command);
}

void SimWorld::finish_plan(Response response)
{
    if (drone_.plan) {
        completions_.push_back({drone_.plan->reply_token, std::move(response)});
        drone_.plan.reset();
    }
}

void SimWorld::ground(const char* cause)
{
    finish_plan(error(cause ? cause : "emergency stop"));
    drone_.flying = false;
    drone_.crashed = true;
    drone_.z = 0;
    drone_.velocity = {};
    drone_.yaw_rate = 0;
    drone_.rc = {0, 0, 0, 0};
    if (cause) {
        MissionEvent e = truth(clock(), EventKind::Collision);
        e.detail = cause;
        emit(e);
    }
    emit(EventKind::Fall);
}

void SimWorld::advance_plan()
{
    MotionPlan& plan = *drone_.plan;
    const Vec3 before = plan.offset_at(plan.progress());
    ++plan.steps_done;
    const double p = plan.progress();
    const Vec3 delta = plan.offset_at(p) - before;
    drone_.position = drone_.position + delta.xy();
    drone_.z = std::max(0.0, drone_.z + delta.z);
    drone_.velocity = delta * (1.0 / config_.dt);
    if (plan.kind == MotionPlan::Kind::Rotate)
        drone_.yaw_deg = wrap_degrees(plan.yaw_start + plan.yaw_delta * p);

    if (plan.steps_done < plan.total_steps)
        return;
    drone_.velocity = {};
    switch (plan.kind) {
    case MotionPlan::Kind::TakeOff:
        drone_.z = config_.hover_altitude;
        emit(EventKind::TakeOff);
        break;
    case MotionPlan::Kind::Land: {
        drone_.z = 0;
        drone_.flying = false;
        MissionEvent e = truth(clock(), EventKind::Landed);
        const Vec2 goal = course_.goal.value_or(course_.start_pad);
        e.distance_cm = std::round((drone_.position - goal).norm() * 1000.0) / 10.0;
        emit(e);
        break;
    }
    default: break;
    }
    finish_plan(resp::Ok{});
}

void SimWorld::advance_rc()
{
    const double alpha = 1.0 - std::exp(-config_.dt / config_.rc_tau);
    const Vec2 fwd = heading_vector(drone_.yaw_deg);
    const Vec2 right = right_vector(drone_.yaw_deg);
    const Vec2 h = right * (drone_.rc.lr / 100.0 * config_.rc_horizontal) +
                   fwd * (drone_.rc.fb / 100.0 * config_.rc_horizontal);
    const Vec3 target{h.x, h.y, drone_.rc.ud / 100.0 * config_.rc_vertical};
    const double yaw_target = drone_.rc.yaw / 100.0 * config_.rc_yaw_rate;
    drone_.velocity = drone_.velocity + (target - drone_.velocity) * alpha;
    drone_.yaw_rate += (yaw_target - drone_.yaw_rate) * alpha;
    drone_.position = drone_.position + drone_.velocity.xy() * config_.dt;
    drone_.z = std::max(config_.rc_min_altitude, drone_.z + drone_.velocity.z * config_.dt);
    drone_.yaw_deg = wrap_degrees(drone_.yaw_deg + drone_.yaw_rate * config_.dt);
}

double SimWorld::floor_variance() const
{
    const double half = std::max(config_.vps_min_half_width, drone_.z * std::tan(config_.vps_half_fov_deg * kDegToRad));
    const int n = config_.vps_grid;
    double sum = 0, sum2 = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Vec2 p{drone_.position.x - half + 2 * half * (i + 0.5) / n,
                         drone_.position.y - half + 2 * half * (j + 0.5) / n};
            const Rgb c = course_.in_field(p) ? sample_floor_unchecked(course_, p) : paint::kOutOfField;
            const double v = (c.r + c.g + c.b) / (3.0 * 255.0);
            sum += v;
            sum2 += v * v;
        }
    }
    const double count = static_cast<double>(n) * n;
    const double mean = sum / count;
    return std::max(0.0, sum2 / count - mean * mean);
}

Vec2 SimWorld::vps_drift()
{
    const double var = floor_variance();
    const bool locked = var >= config_.vps_variance_threshold;
    drone_.vps_confidence = std::min(1.0, var / config_.vps_variance_threshold);
    const double sigma = (locked ? config_.vps_sigma_textured : config_.vps_sigma_uniform) * kInvSqrt2;
    const double dx = normal_(rng_) * sigma;
    const double dy = normal_(rng_) * sigma;
    return {dx, dy};
}

void SimWorld::check_collision(Vec3 prev)
{
    const Vec3 p = position3();
    const double r = config_.drone_radius;
    if (p.x - r < 0 || p.y - r < 0 || p.x + r > course_.width || p.y + r > course_.depth) {
        drone_.position = {std::clamp(p.x, r, course_.width - r), std::clamp(p.y, r, course_.depth - r)};
        ground("wall");
        return;
    }
    if (p.z + r > config_.ceiling) {
        ground("ceiling");
        return;
    }
    if (course_.table) {
        const Table& t = *course_.table;
        const Vec3 lo{t.center.x - t.top_w / 2, t.center.y - t.top_d / 2, 0.0};
        const Vec3 hi{t.center.x + t.top_w / 2, t.center.y + t.top_d / 2, t.height};
        if (distance_to_box(p, lo, hi) < r) {
            ground("table");
            return;
        }
    }
    for (std::size_t i = 0; i < course_.rings.size(); ++i) {
        const Ring& ring = course_.rings[i];
        const Vec2 nh = heading_vector(ring.normal_yaw_deg);
        const Vec3 n{nh.x, nh.y, 0};
        const Vec3 c{ring.center.x, ring.center.y, ring.center_height};
        const double big_r = ring.diameter / 2;
        const double tube = ring.tube_radius_cm / 100.0;
        auto radial = [&](Vec3 q, double a) { return (q - c - n * a).norm(); };

        const double a = (p - c).dot(n);
        const double rho = radial(p, a);
        if (std::hypot(rho - big_r, a) < tube + r) {
            MissionEvent touch = truth(clock(), EventKind::RingTouch);
            touch.index = static_cast<int>(i);
            emit(touch);
            ground("ring");
            return;
        }
        const double a_prev = (prev - c).dot(n);
        if ((a_prev < 0 && a >= 0) || (a_prev > 0 && a <= 0)) {
            const double t = a_prev / (a_prev - a);
            const Vec3 cross = prev + (p - prev) * t;
            if (radial(cross, 0.0) < big_r - tube - r) {
                MissionEvent pass = truth(clock(), EventKind::RingPass);
                pass.index = static_cast<int>(i);
                emit(pass);
            }
        }
    }
}

void SimWorld::referee(Vec3 prev, double prev_yaw)
{
    const Vec2 ground_pt = drone_.position;
    const double travel = (ground_pt - prev.xy()).norm();

    if (course_.line.points.size() >= 2) {
        bool exempt = false;
        for (const Marker& m : course_.markers) {
            if (m.shape == MarkerShape::Circle && (m.color == MarkerColor::Green || m.color == MarkerColor::Yellow) &&
                (ground_pt - m.center).norm() <= m.extent_m() + config_.exempt_margin)
                exempt = true;
        }
        const double d = line_nearest(course_.line, ground_pt).distance;
        if (!off_line_ && !exempt && d > config_.line_leave_distance) {
            off_line_ = true;
            emit(EventKind::LineLeave);
        } else if (off_line_ && d < config_.line_regain_distance) {
            off_line_ = false;
            emit(EventKind::LineRegain);
        }
    }

    const double yaw_step = wrap_degrees(drone_.yaw_deg - prev_yaw);
    for (MarkerWatch& w : watches_) {
        if (!w.behavior || w.done)
            continue;
        const Marker& m = course_.markers[w.marker];
        const double d = (ground_pt - m.center).norm();
        w.near = d <= config_.arm_radius;
        if (w.near && !w.armed) {
            w.armed = true;
            w.travel_since_arm = w.sustained = w.spin_sum = w.spin_max = w.spin_min = w.hold = 0;
        }
        if (!w.armed)
            continue;
        w.travel_since_arm += travel;
        auto complete = [&]() {
            w.done = true;
            MissionEvent e = truth(clock(), EventKind::BehaviorCompleted);
            e.behavior = *w.behavior;
            emit(e);
        };
        switch (*w.behavior) {
        case BehaviorKind::AscendHigh:
            w.sustained = drone_.z >= config_.high_altitude ? w.sustained + travel : 0.0;
            if (w.sustained >= config_.sustain_travel)
                complete();
            break;
        case BehaviorKind::DescendLow:
            w.sustained = drone_.z < config_.low_altitude ? w.sustained + travel : 0.0;
            if (w.sustained >= config_.sustain_travel)
                complete();
            break;
        case BehaviorKind::Spin360Left:
        case BehaviorKind::Spin360Right:
            w.spin_sum += yaw_step;
            w.spin_max = std::max(w.spin_max, w.spin_sum);
            w.spin_min = std::min(w.spin_min, w.spin_sum);
            if (*w.behavior == BehaviorKind::Spin360Left ? w.spin_max - w.spin_sum >= config_.spin_tolerance_deg
                                                         : w.spin_sum - w.spin_min >= config_.spin_tolerance_deg)
                complete();
            break;
        case BehaviorKind::PickVictim: {
            const Vec2 victim = course_.victim.value_or(m.center);
            const bool holding =
                (ground_pt - victim).norm() <= config_.victim_radius && drone_.z <= config_.victim_altitude;
            w.hold = holding ? w.hold + config_.dt : 0.0;
            if (w.hold >= config_.victim_hold_s - 1e-9) {
                w.done = true;
                emit(EventKind::VictimPickup);
            }
            break;
        }
        default: break;
        }
        if (!w.near && w.travel_since_arm > config_.arm_expiry_travel)
            w.armed = false;
    }
}

bool SimWorld::marker_reached(MarkerShape shape, MarkerColor color) const
{
    for (const MarkerWatch& w : watches_) {
        const Marker& m = course_.markers[w.marker];
        if (m.shape == shape && m.color == color && (w.armed || w.near))
            return true;
    }
    return false;
}

void SimWorld::step()
{
    if (drone_.flying) {
        const Vec3 prev = position3();
        const double prev_yaw = drone_.yaw_deg;
        if (drone_.plan)
            advance_plan();
        else
            advance_rc();
        if (drone_.flying) {
            drone_.position = drone_.position + vps_drift();
            drone_.time_aloft += config_.dt;
            drone_.battery = std::max(0.0, drone_.battery - config_.dt / config_.battery_s_per_percent);
            check_collision(prev);
        }
        if (drone_.flying)
            referee(prev, prev_yaw);
    }
    ++steps_;
}

void SimWorld::run_for(double seconds)
{
    const int n = steps_for(seconds, config_.dt);
    for (int i = 0; i < n; ++i)
        step();
}

Response SimWorld::answer_query(ReadQuery q) const
{
    if (!drone_.sdk_mode)
        return error("not in sdk mode");
    const int height_cm = static_cast<int>(std::lround(drone_.z * 100.0));
    switch (q) {
    case ReadQuery::Speed: return resp::Value{q, drone_.speed_setting};
    case ReadQuery::Battery: return resp::Value{q, static_cast<int>(std::ceil(drone_.battery - 1e-9))};
    case ReadQuery::Time: return resp::Value{q, static_cast<int>(std::floor(drone_.time_aloft + 1e-9))};
    case ReadQuery::Height: return resp::Value{q, height_cm};
    case ReadQuery::Temp: return resp::Value{q, 55};
    case ReadQuery::Attitude:
        return resp::Value{q, Triple{0, 0, static_cast<int>(std::lround(wrap_degrees(drone_.yaw_deg)))}};
    case ReadQuery::Baro: return resp::Value{q, std::round(drone_.z * 100.0) / 100.0};
    case ReadQuery::Acceleration: return resp::Value{q, Triple{0, 0, 1000}};
    case ReadQuery::Tof:
        return resp::Value{q, std::max(static_cast<int>(config_.tof_floor_cm), height_cm)};
    case ReadQuery::Wifi: return resp::Value{q, 90};
    }
    return error("unknown query");
}

Frame SimWorld::render_camera() const
{
    Pose pose = drone_.pose();
    pose.z = std::max(pose.z, 0.05);
    return render_downward(course_, pose, camera_);
}

}  // namespace tello
