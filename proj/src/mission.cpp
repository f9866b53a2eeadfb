#include "tello_arena/mission.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tello_arena/tfrm.hpp"

namespace tello {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Checkpoint parse_checkpoint(const std::string& text, int line)
{
    std::istringstream in(text);
    std::string name;
    in >> name;
    Checkpoint cp;
    if (name == "takeoff")
        cp.kind = Checkpoint::Kind::TakeOff;
    else if (name == "table")
        cp.kind = Checkpoint::Kind::Table;
    else if (name == "land")
        cp.kind = Checkpoint::Kind::Land;
    else if (name == "ring") {
        cp.kind = Checkpoint::Kind::Ring;
        if (!(in >> cp.ring) || cp.ring < 0)
            throw ProtocolError(ProtocolErrc::MalformedNumber, "line " + std::to_string(line),
                                "ring checkpoint needs an index");
    } else
        cp.kind = Checkpoint::Kind::Waypoint;
    return cp;
}

/// Protocol round trip: everything the controller issues must survive serialization.
Command through_wire(const Command& c) { return parse_command(serialize_command(c)); }

Response query(SimWorld& world, ReadQuery q)
{
    const std::string reply = serialize_response(world.answer_query(q));
    return parse_response(reply, q);
}

int int_payload(const Response& r, int fallback)
{
    if (const auto* v = std::get_if<resp::Value>(&r))
        if (const auto* i = std::get_if<int>(&v->payload))
            return *i;
    return fallback;
}

int yaw_payload(const Response& r)
{
    if (const auto* v = std::get_if<resp::Value>(&r))
        if (const auto* t = std::get_if<Triple>(&v->payload))
            return (*t)[2];
    return 0;
}

void sort_events(std::vector<MissionEvent>& events)
{
    std::stable_sort(events.begin(), events.end(),
                     [](const MissionEvent& a, const MissionEvent& b) { return a.t < b.t; });
}

}  // namespace

std::vector<ScriptStep> parse_script(const std::string& text)
{
    std::vector<ScriptStep> steps;
    std::istringstream in(text);
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        std::string line = raw.substr(0, raw.find('#'));
        std::optional<Checkpoint> cp;
        if (const auto at = line.find('@'); at != std::string::npos) {
            cp = parse_checkpoint(line.substr(at + 1), n);
            line = line.substr(0, at);
        }
        line = trim(line);
        if (line.empty())
            continue;
        Command c = parse_command(line);
        validate(c);
        steps.push_back({std::move(c), cp, n});
    }
    return steps;
}

std::vector<ScriptStep> load_script_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_script(ss.str());
}

std::vector<MissionEvent> run_waypoint_mission(const std::vector<ScriptStep>& script, CommandLink& link,
                                               const std::function<void(int, const Checkpoint&)>& on_checkpoint)
{
    std::vector<MissionEvent> events;
    int phase = 0;
    for (const ScriptStep& step : script) {
        const Response r = link.send(step.command);
        if (const auto* err = std::get_if<resp::Error>(&r)) {
            MissionEvent e = claim(link.now(), EventKind::Abort);
            e.detail = "line " + std::to_string(step.line) + ": " + serialize_command(step.command) + " rejected: " +
                       err->message;
            events.push_back(e);
            return events;
        }
        if (std::holds_alternative<cmd::TakeOff>(step.command))
            events.push_back(claim(link.now(), EventKind::TakeOff));
        if (std::holds_alternative<cmd::Land>(step.command))
            events.push_back(claim(link.now(), EventKind::Landed));
        if (step.checkpoint) {
            MissionEvent e = claim(link.now(), EventKind::PhaseComplete);
            e.index = phase;
            events.push_back(e);
            if (on_checkpoint)
                on_checkpoint(phase, *step.checkpoint);
            ++phase;
        }
    }
    return events;
}

Response SimLink::send(const Command& command)
{
    const std::uint64_t token = token_++;
    const auto applied = world_.apply_command(through_wire(command), token);
    if (applied.immediate)
        return *applied.immediate;
    const auto limit = world_.steps() + static_cast<std::uint64_t>(timeout_s_ / world_.config().dt);
    while (world_.steps() < limit) {
        world_.step();
        for (auto& c : world_.take_completions())
            if (c.reply_token == token)
                return c.response;
    }
    return resp::Error{"timeout"};
}

MatchResult run_match_2023(const CourseSpec& course, const MatchConfig& config)
{
    SimWorld world(course, config.seed, config.sim, config.controller.camera);
    VideoRecorder recorder(config.record_dir);
    MatchResult result;
    std::vector<MissionEvent> claims;

    for (const Command& c : {Command{cmd::ModeEnter{}}, Command{cmd::StreamOn{}}})
        world.apply_command(through_wire(c));

    const int steps_per_tick = std::max(1, static_cast<int>(std::lround(config.controller.tick_s / config.sim.dt)));
    MissionState state;
    std::uint64_t token = 1;
    std::optional<std::uint64_t> pending;
    std::optional<bool> motion_result;
    std::uint32_t seq = 0;
    std::optional<MissionEvent> started, stopped;
    bool trigger_start_ok = false, trigger_stop_ok = false;

    while (world.clock() < config.time_limit_s) {
        const double t = world.clock();
        Telemetry tel;
        tel.t = t;
        tel.height_cm = int_payload(query(world, ReadQuery::Height), 0);
        tel.yaw_deg = yaw_payload(query(world, ReadQuery::Attitude));
        tel.battery = int_payload(query(world, ReadQuery::Battery), 100);
        tel.motion_result = motion_result;
        motion_result.reset();

        std::optional<Frame> frame;
        if (world.drone().stream_on) {
            frame = world.render_camera();
            recorder.append({seq++, static_cast<std::uint64_t>(std::llround(t * 1000.0)), *frame});
        }
        if (world.drone().flying)
            result.samples.push_back({t, world.drone().pose()});

        TickOutput out = mission_tick(state, config.controller, frame ? &*frame : nullptr, tel);
        for (auto& e : out.events)
            claims.push_back(e);
        if (out.recorder == RecorderAction::Start) {
            MissionEvent e = recorder.start(t, "red-rectangle");
            if (e.kind == EventKind::RecordingStarted) {
                trigger_start_ok = world.marker_reached(MarkerShape::Rectangle, MarkerColor::Red);
                started = e;
            } else
                claims.push_back(e);
        } else if (out.recorder == RecorderAction::Stop) {
            try {
                stopped = recorder.stop(t, "blue-rectangle");
                trigger_stop_ok = world.marker_reached(MarkerShape::Rectangle, MarkerColor::Blue);
            } catch (const VideoRecorder::Error& err) {
                MissionEvent w = claim(t, EventKind::Warning);
                w.detail = err.what();
                claims.push_back(w);
            }
        }
        for (const Command& c : out.commands) {
            const std::uint64_t tk = token++;
            const auto applied = world.apply_command(through_wire(c), tk);
            if (is_motion(c)) {
                if (applied.immediate)
                    motion_result = std::holds_alternative<resp::Ok>(*applied.immediate);
                else
                    pending = tk;
            }
        }

        const bool finished = state.phase == MissionPhase::Done || state.phase == MissionPhase::Aborted;
        if (finished && !pending && !world.drone().flying)
            break;
        for (int i = 0; i < steps_per_tick; ++i) {
            world.step();
            for (const auto& c : world.take_completions()) {
                if (pending && c.reply_token == *pending) {
                    motion_result = std::holds_alternative<resp::Ok>(c.response);
                    pending.reset();
                }
            }
        }
    }

    const double end_t = world.clock();
    if (recorder.recording()) {
        MissionEvent w = claim(end_t, EventKind::Warning);
        w.detail = "recording still open at mission end";
        claims.push_back(w);
        stopped = recorder.stop(end_t, "mission-end");
    }
    if (started) {
        result.recording = recorder.path();
        result.recorded_frames = recorder.frames();
        bool file_ok = false;
        if (stopped) {
            const TfrmFile file = read_tfrm_file(recorder.path());
            file_ok = !file.truncated && static_cast<int>(file.frames.size()) == stopped->index;
        }
        started->verified = file_ok && trigger_start_ok;
        claims.push_back(*started);
        if (stopped) {
            stopped->verified = file_ok && trigger_stop_ok;
            claims.push_back(*stopped);
        }
    }

    result.events = world.events();
    result.events.insert(result.events.end(), claims.begin(), claims.end());
    if (!result.samples.empty() && !course.line.empty()) {
        result.coverage = build_coverage_trace(result.samples, course);
        MissionEvent cov = truth(end_t, EventKind::Coverage);
        cov.covered = std::round(result.coverage.covered_fraction * 1e6) / 1e6;
        cov.aligned = std::round(result.coverage.heading_aligned_fraction * 1e6) / 1e6;
        result.events.push_back(cov);
    }
    sort_events(result.events);
    result.final_phase = state.phase;
    result.sim_seconds = end_t;
    result.report = score_2023(result.events, std::nullopt, config.interview);
    return result;
}

MatchResult run_match_rings(const CourseSpec& course, const std::vector<ScriptStep>& script, const MatchConfig& config)
{
    SimWorld world(course, config.seed, config.sim, config.controller.camera);
    world.apply_command(cmd::ModeEnter{});
    SimLink link(world);
    std::vector<MissionEvent> verified;
    std::size_t since = 0;

    auto check = [&](int phase, const Checkpoint& cp) {
        const auto& ev = world.events();
        bool ok = false;
        for (std::size_t i = since; i < ev.size(); ++i) {
            const MissionEvent& e = ev[i];
            if (cp.kind == Checkpoint::Kind::TakeOff && e.kind == EventKind::TakeOff)
                ok = true;
            if (cp.kind == Checkpoint::Kind::Land && e.kind == EventKind::Landed)
                ok = true;
            if (cp.kind == Checkpoint::Kind::Ring && e.kind == EventKind::RingPass && e.index == cp.ring)
                ok = true;
        }
        if (cp.kind == Checkpoint::Kind::Table && course.table && world.drone().flying) {
            const Table& tb = *course.table;
            const Vec2 p = world.drone().position;
            ok = std::abs(p.x - tb.center.x) <= tb.top_w / 2 && std::abs(p.y - tb.center.y) <= tb.top_d / 2 &&
                 world.drone().z > tb.height;
        }
        if (cp.kind == Checkpoint::Kind::Waypoint)
            ok = world.drone().flying;
        since = ev.size();
        if (ok) {
            MissionEvent e = truth(world.clock(), EventKind::PhaseComplete);
            e.index = phase;
            verified.push_back(e);
        }
    };

    const std::vector<MissionEvent> claims = run_waypoint_mission(script, link, check);
    MatchResult result;
    result.events = world.events();
    result.events.insert(result.events.end(), verified.begin(), verified.end());
    result.events.insert(result.events.end(), claims.begin(), claims.end());
    sort_events(result.events);
    result.final_phase = world.drone().flying ? MissionPhase::Aborted : MissionPhase::Done;
    result.sim_seconds = world.clock();
    result.report = score_rings(result.events, config.interview);
    return result;
}

void write_match_outputs(const MatchResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_events(dir / "events.jsonl", result.events);
    std::ofstream out(dir / "report.json");
    if (!out)
        throw std::runtime_error("cannot write " + (dir / "report.json").string());
    out << report_to_json(result.report);
}

}  // namespace tello
