#pragma once

// Authoritative drone simulation: SDK state machine, fixed-timestep
// kinematics, VPS drift, collisions and the ground-truth referee.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "tello_arena/course.hpp"
#include "tello_arena/events.hpp"
#include "tello_arena/protocol.hpp"
#include "tello_arena/render.hpp"

namespace tello {

/// Physical constants of the emulated drone. None of them come from a datasheet;
/// tests pin the defaults.
struct SimConfig {
    double dt = 0.02;                 // s
    double hover_altitude = 0.8;      // m after takeoff
    double vertical_rate = 0.5;       // m/s for takeoff and land
    double rotation_rate = 90.0;      // deg/s for cw/ccw
    double rc_horizontal = 1.0;       // m/s at channel 100
    double rc_vertical = 0.8;         // m/s at channel 100
    double rc_yaw_rate = 100.0;       // deg/s at channel 100
    double rc_tau = 0.15;             // s, first-order response
    double battery_s_per_percent = 7.8;
    double drone_radius = 0.10;       // m
    double tof_floor_cm = 30;
    double ceiling = 2.5;             // m
    double min_motion_altitude = 0.2; // m, lowest target of a move command
    double rc_min_altitude = 0.1;     // m
    double flip_duration = 0.8;       // s
    double flip_peak = 0.25;          // m, lateral excursion, returns to start
    int default_speed = 100;          // cm/s

    // VPS model
    double vps_sigma_uniform = 0.012;     // m, 2-D step deviation over featureless floor
    double vps_sigma_textured = 0.0005;   // m, 2-D step deviation when locked
    double vps_variance_threshold = 0.001;
    double vps_min_half_width = 0.30;     // m
    double vps_half_fov_deg = 30.0;
    int vps_grid = 16;

    // Referee
    double line_leave_distance = 0.30;
    double line_regain_distance = 0.15;
    double exempt_margin = 0.10;       // around victim and goal circles
    double arm_radius = 0.60;          // m, marker proximity that arms a behavior check
    double arm_expiry_travel = 6.0;    // m of travel after arming
    double high_altitude = 2.0;
    double low_altitude = 1.0;
    double sustain_travel = 1.0;
    double spin_tolerance_deg = 355.0;
    double victim_radius = 0.15;
    double victim_altitude = 0.55;
    double victim_hold_s = 2.0;
};

struct MotionPlan {
    enum class Kind { Straight, Rotate, Flip, Go, Curve, TakeOff, Land };

    Kind kind = Kind::Straight;
    Vec3 displacement;  // Straight/Go: total; TakeOff/Land: vertical
    // Curve: circle centre offset and basis vectors; the arc spans [0, arc_angle].
    Vec3 arc_center, arc_u, arc_v;
    double arc_radius = 0, arc_angle = 0;
    Vec2 flip_dir;
    double yaw_start = 0, yaw_delta = 0;
    int total_steps = 1;
    int steps_done = 0;
    std::uint64_t reply_token = 0;

    double progress() const { return static_cast<double>(steps_done) / total_steps; }
    /// Offset from the plan start at a given progress.
    Vec3 offset_at(double p) const;
};

struct DroneState {
    Vec2 position;  // m
    double z = 0;   // m above ground
    double yaw_deg = 0;
    Vec3 velocity;  // world frame, m/s
    double yaw_rate = 0;
    bool flying = false;
    bool sdk_mode = false;
    bool crashed = false;
    double battery = 100.0;
    int speed_setting = 100;
    cmd::Rc rc{0, 0, 0, 0};
    bool stream_on = false;
    double time_aloft = 0;
    double vps_confidence = 1.0;
    std::optional<MotionPlan> plan;

    Pose pose() const { return {position.x, position.y, z, yaw_deg}; }
};

struct Completion {
    std::uint64_t reply_token = 0;
    Response response;
};

class SimWorld {
public:
    SimWorld(CourseSpec course, std::uint64_t seed, SimConfig config = {}, CameraModel camera = {});

    struct Applied {
        std::optional<Response> immediate;  // empty when the reply is deferred to plan completion
    };

    /// Applies one protocol command. Motion commands answer later through take_completions().
    Applied apply_command(const Command& command, std::uint64_t reply_token = 0);

    /// Advances one fixed timestep.
    void step();
    void run_for(double seconds);

    Response answer_query(ReadQuery q) const;

    /// Samples floor texture under the drone, updates vps_confidence and returns this step's drift.
    Vec2 vps_drift();
    /// Intensity variance of the floor patch the VPS sees.
    double floor_variance() const;

    std::vector<Completion> take_completions();

    Frame render_camera() const;

    const CourseSpec& course() const { return course_; }
    const SimConfig& config() const { return config_; }
    const CameraModel& camera() const { return camera_; }
    const DroneState& drone() const { return drone_; }
    DroneState& mutable_drone() { return drone_; }
    double clock() const { return static_cast<double>(steps_) * config_.dt; }
    std::uint64_t steps() const { return steps_; }
    const std::vector<MissionEvent>& events() const { return events_; }
    bool plan_active() const { return drone_.plan.has_value(); }

    /// True while the drone is (or recently was, within arm_radius) near a marker of this kind.
    bool marker_reached(MarkerShape shape, MarkerColor color) const;

private:
    void emit(EventKind kind);
    void emit(MissionEvent e);
    void advance_plan();
    void advance_rc();
    void finish_plan(Response response);
    void ground(const char* cause);
    void check_collision(Vec3 previous);
    void referee(Vec3 previous, double previous_yaw);
    Vec3 position3() const { return {drone_.position.x, drone_.position.y, drone_.z}; }

    struct MarkerWatch {
        std::size_t marker = 0;
        std::optional<BehaviorKind> behavior;
        bool armed = false;
        bool done = false;
        bool near = false;
        double travel_since_arm = 0;
        double sustained = 0;
        double spin_sum = 0, spin_max = 0, spin_min = 0;
        double hold = 0;
    };

    CourseSpec course_;
    SimConfig config_;
    CameraModel camera_;
    DroneState drone_;
    std::uint64_t steps_ = 0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::vector<MissionEvent> events_;
    std::vector<Completion> completions_;
    std::vector<MarkerWatch> watches_;
    bool off_line_ = false;
};

}  // namespace tello
