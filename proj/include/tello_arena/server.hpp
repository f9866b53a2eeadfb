#pragma once

// Network front end of the simulator: SDK commands over UDP, TFRM video over TCP.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "tello_arena/net.hpp"
#include "tello_arena/sim.hpp"

namespace tello {

inline constexpr std::uint16_t kDefaultCommandPort = 8889;
inline constexpr std::uint16_t kDefaultVideoPort = 11111;

struct PortPair {
    std::uint16_t command = kDefaultCommandPort;
    std::uint16_t video = kDefaultVideoPort;
};

/// Defaults, overridden by TELLO_ARENA_PORTS="command,video" when set and well formed.
PortPair ports_from_environment();

struct ServerConfig {
    std::string host = "0.0.0.0";
    PortPair ports;
    bool fast = false;  // step as fast as possible on the virtual clock
    double video_fps = 10.0;
};

class SimServer {
public:
    SimServer(SimWorld world, ServerConfig config);
    ~SimServer();
    SimServer(const SimServer&) = delete;
    SimServer& operator=(const SimServer&) = delete;

    /// Binds both endpoints (throws net::NetError PortBindFailure) and starts the loop.
    void start();
    void stop();
    bool running() const { return running_; }

    std::uint16_t command_port() const { return command_port_; }
    std::uint16_t video_port() const { return video_port_; }

    /// Event log; call after stop() for the complete list.
    std::vector<MissionEvent> events() const;
    double clock() const;
    DroneState drone() const;
    std::uint64_t frames_sent() const { return frames_sent_; }

private:
    struct Pending {
        std::string text;
        net::Endpoint from;
    };

    void receive_loop();
    void accept_loop();
    void sim_loop();
    void handle(const Pending& p, std::uint64_t token);

    mutable std::mutex world_mutex_;
    SimWorld world_;
    ServerConfig config_;
    std::unique_ptr<net::UdpSocket> udp_;
    std::unique_ptr<net::TcpListener> listener_;
    std::uint16_t command_port_ = 0;
    std::uint16_t video_port_ = 0;

    std::mutex queue_mutex_;
    std::vector<Pending> queue_;
    std::mutex clients_mutex_;
    std::vector<std::shared_ptr<net::TcpStream>> clients_;
    std::vector<std::pair<std::uint64_t, net::Endpoint>> reply_to_;

    std::atomic<bool> running_{false};
    std::atomic<std::uint64_t> frames_sent_{0};
    std::thread receiver_, acceptor_, loop_;
};

}  // namespace tello
