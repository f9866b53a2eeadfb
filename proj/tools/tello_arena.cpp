#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tello_arena/client.hpp"
#include "tello_arena/mission.hpp"
#include "tello_arena/server.hpp"
#include "tello_arena/tfrm.hpp"

using namespace tello;

namespace {

enum Exit { kOk = 0, kInfrastructure = 1, kInput = 2, kPartial = 3 };

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int fail(int code, const std::string& message)
{
    std::cerr << "tello-arena: " << message << "\n";
    return code;
}

std::optional<CourseSpec> read_course(const std::string& path, int& code)
{
    try {
        return load_course_file(path);
    } catch (const CourseError& e) {
        code = fail(kInput, "course error at '" + e.path() + "': " + e.what());
    } catch (const std::exception& e) {
        code = fail(kInput, e.what());
    }
    return std::nullopt;
}

void apply_gains(ControllerConfig& c, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open gains file " + path);
    const nlohmann::json j = nlohmann::json::parse(in);
    c.k_heading = j.value("k_heading", c.k_heading);
    c.k_lateral = j.value("k_lateral", c.k_lateral);
    c.k_altitude = j.value("k_altitude", c.k_altitude);
    c.cruise_fb = j.value("cruise_fb", c.cruise_fb);
    c.cruise_altitude_cm = j.value("cruise_altitude_cm", c.cruise_altitude_cm);
    c.yaw_limit = j.value("yaw_limit", c.yaw_limit);
    c.lr_limit = j.value("lr_limit", c.lr_limit);
    c.ud_limit = j.value("ud_limit", c.ud_limit);
}

PortPair resolve_ports(int command_flag, int video_flag)
{
    PortPair p = ports_from_environment();
    if (command_flag >= 0)
        p.command = static_cast<std::uint16_t>(command_flag);
    if (video_flag >= 0)
        p.video = static_cast<std::uint16_t>(video_flag);
    return p;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Desk-scale drone arena: simulator, autonomous pilot and referee"};
    app.require_subcommand(1);

    // sim
    std::string course_path, events_path = "events.jsonl", host = "0.0.0.0";
    std::optional<std::uint64_t> seed;
    bool fast = false;
    int command_port = -1, video_port = -1;
    double duration = 0;
    auto* sim = app.add_subcommand("sim", "Serve the simulator over UDP commands and TCP video");
    sim->add_option("--course", course_path, "Course JSON")->required();
    sim->add_option("--seed", seed, "Random seed");
    sim->add_flag("--fast", fast, "Step on a virtual clock as fast as possible");
    sim->add_option("--host", host, "Bind address");
    sim->add_option("--command-port", command_port, "UDP command port (default 8889)");
    sim->add_option("--video-port", video_port, "TCP video port (default 11111)");
    sim->add_option("--events", events_path, "Event log written on shutdown");
    sim->add_option("--duration", duration, "Stop after this many wall-clock seconds (0: run until signalled)");

    // fly
    std::string mission = "2023", script_path, record_dir = "recordings", gains_path, fly_host = "127.0.0.1";
    bool rescue = false;
    auto* fly = app.add_subcommand("fly", "Fly a mission against a running simulator");
    fly->add_option("--host", fly_host, "Drone address");
    fly->add_option("--command-port", command_port, "UDP command port");
    fly->add_option("--video-port", video_port, "TCP video port");
    fly->add_option("--mission", mission, "2023 or rings")->check(CLI::IsMember({"2023", "rings"}));
    fly->add_option("--script", script_path, "Waypoint script for the rings mission");
    fly->add_option("--record-dir", record_dir, "Directory for video recordings");
    fly->add_option("--gains", gains_path, "JSON file overriding controller gains");
    fly->add_option("--events", events_path, "Controller event log");
    fly->add_flag("--rescue", rescue, "Attempt the victim pickup");

    // match
    std::string out_dir = "match";
    int interview = 0;
    auto* match = app.add_subcommand("match", "Run simulator and controller together on a virtual clock and score");
    match->add_option("--course", course_path, "Course JSON")->required();
    match->add_option("--seed", seed, "Random seed")->required();
    match->add_option("--mission", mission, "2023 or rings")->check(CLI::IsMember({"2023", "rings"}));
    match->add_option("--script", script_path, "Waypoint script for the rings mission");
    match->add_option("--record-dir", record_dir, "Directory for video recordings (default <out>/recordings)");
    match->add_option("--gains", gains_path, "JSON file overriding controller gains");
    match->add_option("--interview", interview, "Interview points 0..30")->check(CLI::Range(0, 30));
    match->add_option("--out", out_dir, "Output directory for events.jsonl and report.json");
    match->add_flag("--rescue", rescue, "Attempt the victim pickup");

    // score
    std::string profile = "2023", report_path;
    auto* score = app.add_subcommand("score", "Re-score a stored event log");
    score->add_option("--events", events_path, "Event log (JSON lines)")->required();
    score->add_option("--profile", profile, "2023 or rings")->check(CLI::IsMember({"2023", "rings"}));
    score->add_option("--interview", interview, "Interview points 0..30")->check(CLI::Range(0, 30));
    score->add_option("--out", report_path, "Report path (default stdout)");

    // preview
    int px_per_m = 100;
    std::string image_path = "course.ppm";
    auto* preview = app.add_subcommand("preview", "Write an orthographic PPM of a course");
    preview->add_option("--course", course_path, "Course JSON")->required();
    preview->add_option("--px-per-m", px_per_m, "Resolution")->check(CLI::Range(10, 2000));
    preview->add_option("--out", image_path, "Output PPM");

    // replay
    std::string recording_path, frames_dir = "frames";
    auto* replay = app.add_subcommand("replay", "Unpack a TFRM recording into numbered PPM frames");
    replay->add_option("--recording", recording_path, "TFRM file")->required();
    replay->add_option("--out-dir", frames_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    try {
        if (*sim) {
            if (fast && !seed)
                return fail(kInput, "--fast requires --seed");
            int code = kOk;
            auto course = read_course(course_path, code);
            if (!course)
                return code;
            ServerConfig cfg;
            cfg.host = host;
            cfg.ports = resolve_ports(command_port, video_port);
            cfg.fast = fast;
            SimServer server(SimWorld(*course, seed.value_or(0)), cfg);
            try {
                server.start();
            } catch (const net::NetError& e) {
                return fail(kInfrastructure, e.what());
            }
            std::cout << "listening on udp " << server.command_port() << " (commands), tcp " << server.video_port()
                      << " (video)" << std::endl;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            const auto t0 = std::chrono::steady_clock::now();
            while (!g_stop) {
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
                if (duration > 0 &&
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= duration)
                    break;
            }
            server.stop();
            write_events(std::filesystem::path(events_path), server.events());
            std::cout << "wrote " << events_path << "\n";
            return kOk;
        }

        if (*fly) {
            const PortPair ports = resolve_ports(command_port, video_port);
            std::vector<MissionEvent> events;
            if (mission == "rings") {
                if (script_path.empty())
                    return fail(kInput, "--mission rings needs --script");
                const auto script = load_script_file(script_path);
                DroneClient client(fly_host, ports.command);
                NetworkLink link(client);
                client.request(cmd::ModeEnter{}, 2000);
                events = run_waypoint_mission(script, link);
            } else {
                FlyConfig cfg;
                cfg.host = fly_host;
                cfg.ports = ports;
                cfg.record_dir = record_dir;
                cfg.controller.rescue = rescue;
                if (!gains_path.empty())
                    apply_gains(cfg.controller, gains_path);
                events = fly_vision_mission(cfg);
            }
            write_events(std::filesystem::path(events_path), events);
            std::cout << "wrote " << events_path << "\n";
            return kOk;
        }

        if (*match) {
            int code = kOk;
            auto course = read_course(course_path, code);
            if (!course)
                return code;
            MatchConfig cfg;
            cfg.seed = *seed;
            cfg.interview = interview;
            cfg.record_dir = match->count("--record-dir") ? std::filesystem::path(record_dir)
                                                           : std::filesystem::path(out_dir) / "recordings";
            cfg.controller.rescue = rescue;
            if (!gains_path.empty())
                apply_gains(cfg.controller, gains_path);
            MatchResult result;
            if (mission == "rings") {
                if (script_path.empty())
                    return fail(kInput, "--mission rings needs --script");
                result = run_match_rings(*course, load_script_file(script_path), cfg);
            } else {
                result = run_match_2023(*course, cfg);
            }
            write_match_outputs(result, out_dir);
            std::cout << "mission " << to_string(result.final_phase) << " after " << result.sim_seconds
                      << " s simulated; autonomous " << result.report.autonomous_subtotal << ", total "
                      << result.report.total << "\n";
            return kOk;
        }

        if (*score) {
            std::vector<MissionEvent> events;
            try {
                events = read_events(std::filesystem::path(events_path));
            } catch (const EventFormatError& e) {
                return fail(kInput, e.what());
            }
            ScoreReport report;
            try {
                report = profile == "rings" ? score_rings(events, interview) : score_2023(events, std::nullopt, interview);
            } catch (const ScoringError& e) {
                return fail(kInput, std::string(e.code() == ScoringErrc::UnorderedEvents ? "UnorderedEvents: " : "") +
                                        e.what());
            }
            const std::string text = report_to_json(report);
            if (report_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(report_path);
                out << text;
            }
            return kOk;
        }

        if (*preview) {
            int code = kOk;
            auto course = read_course(course_path, code);
            if (!course)
                return code;
            write_ppm(image_path, course_preview(*course, px_per_m));
            return kOk;
        }

        if (*replay) {
            TfrmFile file;
            try {
                file = read_tfrm_file(recording_path);
            } catch (const TfrmError& e) {
                return fail(kInput, e.what());
            }
            std::filesystem::create_directories(frames_dir);
            for (std::size_t i = 0; i < file.frames.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "frame_%05zu.ppm", i);
                write_ppm(std::filesystem::path(frames_dir) / name, file.frames[i].image);
            }
            std::cout << "wrote " << file.frames.size() << " frames to " << frames_dir << "\n";
            if (file.truncated)
                return fail(kPartial, "recording is truncated; the last partial frame was dropped");
            return kOk;
        }
    } catch (const ProtocolError& e) {
        return fail(kInput, e.what());
    } catch (const CourseError& e) {
        return fail(kInput, e.what());
    } catch (const net::NetError& e) {
        return fail(kInfrastructure, e.what());
    } catch (const std::exception& e) {
        return fail(kInfrastructure, e.what());
    }
    return kOk;
}
