#include "tello_arena/client.hpp"

#include <chrono>

namespace tello {

DroneClient::DroneClient(const std::string& host, std::uint16_t command_port)
    : socket_(net::UdpSocket::client()), drone_(net::make_endpoint(host, command_port))
{
}

void DroneClient::send(const Command& command) { socket_.send_to(serialize_command(command), drone_); }

std::optional<Response> DroneClient::receive(std::optional<ReadQuery> expected, int timeout_ms)
{
    auto msg = socket_.receive(timeout_ms);
    if (!msg)
        return std::nullopt;
    try {
        return parse_response(msg->first, expected);
    } catch (const ProtocolError& e) {
        return resp::Error{e.what()};
    }
}

std::optional<Response> DroneClient::request(const Command& command, int timeout_ms)
{
    send(command);
    std::optional<ReadQuery> expected;
    if (const auto* r = std::get_if<cmd::Read>(&command))
        expected = r->query;
    return receive(expected, timeout_ms);
}

NetworkLink::NetworkLink(DroneClient& client, int motion_timeout_ms)
    : client_(client), motion_timeout_ms_(motion_timeout_ms), t0_(std::chrono::steady_clock::now())
{
}

Response NetworkLink::send(const Command& command)
{
    auto r = client_.request(command, is_motion(command) ? motion_timeout_ms_ : 2000);
    if (!r)
        return resp::Error{"timeout"};
    return *r;
}

double NetworkLink::now() const
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
}

VideoReceiver::VideoReceiver(const std::string& host, std::uint16_t video_port, Sink sink)
    : stream_(net::TcpStream::connect(host, video_port)), sink_(std::move(sink))
{
    thread_ = std::thread([this] { run(); });
}

VideoReceiver::~VideoReceiver()
{
    running_ = false;
    stream_.shutdown();
    if (thread_.joinable())
        thread_.join();
}

std::optional<VideoFrame> VideoReceiver::latest() const
{
    std::lock_guard lock(mutex_);
    return latest_;
}

void VideoReceiver::run()
{
    std::vector<std::uint8_t> header(kTfrmHeaderSize);
    while (running_) {
        if (!stream_.read_exact(header, 200)) {
            if (!running_)
                break;
            continue;
        }
        TfrmHeader h;
        try {
            h = decode_header(header.data());
        } catch (const TfrmError&) {
            connected_ = false;
            break;
        }
        VideoFrame f{h.seq, h.t_ms, Frame(h.width, h.height)};
        if (!stream_.read_exact(f.image.bytes(), 2000)) {
            connected_ = false;
            break;
        }
        ++received_;
        if (sink_)
            sink_(f);
        std::lock_guard lock(mutex_);
        latest_ = std::move(f);
    }
}

std::vector<MissionEvent> fly_vision_mission(const FlyConfig& config)
{
    using clock = std::chrono::steady_clock;
    DroneClient client(config.host, config.ports.command);
    std::vector<MissionEvent> events;
    const auto t0 = clock::now();
    auto now = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

    for (const Command& c : {Command{cmd::ModeEnter{}}, Command{cmd::StreamOn{}}}) {
        auto r = client.request(c, 2000);
        if (!r || !std::holds_alternative<resp::Ok>(*r))
            throw net::NetError(net::NetErrc::ConnectFailure, "drone did not acknowledge " + serialize_command(c));
    }

    VideoRecorder recorder(config.record_dir);
    std::mutex recorder_mutex;
    VideoReceiver video(config.host, config.ports.video, [&](const VideoFrame& f) {
        std::lock_guard lock(recorder_mutex);
        recorder.append(f);
    });

    MissionState state;
    Telemetry tel;
    const auto period = std::chrono::duration<double>(config.controller.tick_s);
    auto next = clock::now();
    while (now() < config.time_limit_s) {
        tel.t = now();
        tel.motion_result.reset();
        if (state.motion_pending) {
            if (auto r = client.receive(std::nullopt, 0))
                tel.motion_result = std::holds_alternative<resp::Ok>(*r);
        } else {
            auto read = [&](ReadQuery q) { return client.request(cmd::Read{q}, 500); };
            if (auto r = read(ReadQuery::Height))
                if (auto* v = std::get_if<resp::Value>(&*r))
                    tel.height_cm = std::get<int>(v->payload);
            if (auto r = read(ReadQuery::Attitude))
                if (auto* v = std::get_if<resp::Value>(&*r))
                    tel.yaw_deg = std::get<Triple>(v->payload)[2];
            if (auto r = read(ReadQuery::Battery))
                if (auto* v = std::get_if<resp::Value>(&*r))
                    tel.battery = std::get<int>(v->payload);
        }
        const auto frame = video.latest();
        TickOutput out = mission_tick(state, config.controller, frame ? &frame->image : nullptr, tel);
        events.insert(events.end(), out.events.begin(), out.events.end());
        {
            std::lock_guard lock(recorder_mutex);
            recorder.set_stream_connected(video.connected());
            try {
                if (out.recorder == RecorderAction::Start)
                    events.push_back(recorder.start(tel.t, "red-rectangle"));
                else if (out.recorder == RecorderAction::Stop)
                    events.push_back(recorder.stop(tel.t, "blue-rectangle"));
            } catch (const VideoRecorder::Error& e) {
                MissionEvent w = claim(tel.t, EventKind::Warning);
                w.detail = e.what();
                events.push_back(w);
            }
        }
        for (const Command& c : out.commands) {
            if (is_motion(c))
                client.send(c);
            else
                client.request(c, 500);
        }
        if (state.phase == MissionPhase::Done || state.phase == MissionPhase::Aborted) {
            if (!state.motion_pending)
                break;
        }
        next += std::chrono::duration_cast<clock::duration>(period);
        std::this_thread::sleep_until(next);
    }
    std::lock_guard lock(recorder_mutex);
    if (recorder.recording())
        events.push_back(recorder.stop(now(), "mission-end"));
    return events;
}

}  // namespace tello
