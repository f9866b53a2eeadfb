#pragma once

// Network side of the controller: SDK command client, video receiver and
// the realtime mission runners that use them.

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "tello_arena/mission.hpp"
#include "tello_arena/net.hpp"
#include "tello_arena/server.hpp"
#include "tello_arena/tfrm.hpp"

namespace tello {

class DroneClient {
public:
    DroneClient(const std::string& host, std::uint16_t command_port);

    void send(const Command& command);
    /// Next reply, parsed against the query it answers when given.
    std::optional<Response> receive(std::optional<ReadQuery> expected, int timeout_ms);
    /// send + receive.
    std::optional<Response> request(const Command& command, int timeout_ms);

private:
    net::UdpSocket socket_;
    net::Endpoint drone_;
};

/// Blocking CommandLink over the network; motion commands wait up to motion_timeout_ms.
class NetworkLink : public CommandLink {
public:
    explicit NetworkLink(DroneClient& client, int motion_timeout_ms = 60000);
    Response send(const Command& command) override;
    double now() const override;

private:
    DroneClient& client_;
    int motion_timeout_ms_;
    std::chrono::steady_clock::time_point t0_;
};

/// Reads TFRM frames on a background thread and keeps only the newest.
class VideoReceiver {
public:
    using Sink = std::function<void(const VideoFrame&)>;
    VideoReceiver(const std::string& host, std::uint16_t video_port, Sink sink = {});
    ~VideoReceiver();

    std::optional<VideoFrame> latest() const;
    std::uint64_t received() const { return received_; }
    bool connected() const { return connected_; }

private:
    void run();

    net::TcpStream stream_;
    Sink sink_;
    mutable std::mutex mutex_;
    std::optional<VideoFrame> latest_;
    std::atomic<bool> running_{true};
    std::atomic<bool> connected_{true};
    std::atomic<std::uint64_t> received_{0};
    std::thread thread_;
};

struct FlyConfig {
    std::string host = "127.0.0.1";
    PortPair ports;
    ControllerConfig controller;
    std::filesystem::path record_dir = "recordings";
    double time_limit_s = 900.0;
};

/// Flies the vision mission against a live endpoint at the controller's tick rate; returns the controller's events.
std::vector<MissionEvent> fly_vision_mission(const FlyConfig& config);

}  // namespace tello
