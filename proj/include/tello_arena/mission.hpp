#pragma once

// Scripted waypoint missions and the fast-mode match harness that couples the
// simulator and the controller on one virtual clock.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tello_arena/controller.hpp"
#include "tello_arena/scoring.hpp"
#include "tello_arena/sim.hpp"

namespace tello {

struct Checkpoint {
    enum class Kind { TakeOff, Ring, Table, Land, Waypoint };
    Kind kind = Kind::Waypoint;
    int ring = -1;
};

struct ScriptStep {
    Command command;
    std::optional<Checkpoint> checkpoint;
    int line = 0;
};

/// One SDK command per line, optionally followed by "@takeoff", "@ring N", "@table", "@land" or "@<label>".
/// '#' starts a comment. Throws ProtocolError for invalid commands.
std::vector<ScriptStep> parse_script(const std::string& text);
std::vector<ScriptStep> load_script_file(const std::filesystem::path& path);

/// Blocking command channel: returns the final reply (deferred ok for motion commands).
class CommandLink {
public:
    virtual ~CommandLink() = default;
    virtual Response send(const Command& command) = 0;
    virtual double now() const = 0;
};

/// Runs the script in order; a rejected command ends the run with an Abort event.
/// on_checkpoint is called after each acknowledged checkpoint with its phase index.
std::vector<MissionEvent> run_waypoint_mission(const std::vector<ScriptStep>& script, CommandLink& link,
                                               const std::function<void(int, const Checkpoint&)>& on_checkpoint = {});

/// CommandLink straight onto a SimWorld, stepping it until each reply arrives.
class SimLink : public CommandLink {
public:
    explicit SimLink(SimWorld& world, double timeout_s = 120.0) : world_(world), timeout_s_(timeout_s) {}
    Response send(const Command& command) override;
    double now() const override { return world_.clock(); }

private:
    SimWorld& world_;
    double timeout_s_;
    std::uint64_t token_ = 1;
};

struct MatchConfig {
    std::uint64_t seed = 42;
    int interview = 0;
    double time_limit_s = 900.0;
    std::filesystem::path record_dir = "recordings";
    ControllerConfig controller;
    SimConfig sim;
};

struct MatchResult {
    std::vector<MissionEvent> events;
    ScoreReport report;
    CoverageTrace coverage;
    MissionPhase final_phase = MissionPhase::Grounded;
    double sim_seconds = 0;
    std::optional<std::filesystem::path> recording;
    std::size_t recorded_frames = 0;
    std::vector<PoseSample> samples;
};

MatchResult run_match_2023(const CourseSpec& course, const MatchConfig& config);
MatchResult run_match_rings(const CourseSpec& course, const std::vector<ScriptStep>& script,
                            const MatchConfig& config);

/// Writes events.jsonl and report.json into dir.
void write_match_outputs(const MatchResult& result, const std::filesystem::path& dir);

}  // namespace tello
