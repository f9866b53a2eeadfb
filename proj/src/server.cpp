#include "tello_arena/server.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "tello_arena/tfrm.hpp"

namespace tello {

PortPair ports_from_environment()
{
    PortPair p;
    const char* env = std::getenv("TELLO_ARENA_PORTS");
    if (!env)
        return p;
    std::istringstream in(env);
    unsigned cmd = 0, video = 0;
    char comma = 0;
    if (in >> cmd >> comma >> video && comma == ',' && cmd > 0 && cmd < 65536 && video > 0 && video < 65536) {
        p.command = static_cast<std::uint16_t>(cmd);
        p.video = static_cast<std::uint16_t>(video);
    }
    return p;
}

SimServer::SimServer(SimWorld world, ServerConfig config) : world_(std::move(world)), config_(std::move(config)) {}

SimServer::~SimServer() { stop(); }

void SimServer::start()
{
    udp_ = std::make_unique<net::UdpSocket>(net::UdpSocket::bind(config_.host, config_.ports.command));
    listener_ = std::make_unique<net::TcpListener>(net::TcpListener::bind(config_.host, config_.ports.video));
    command_port_ = udp_->local_port();
    video_port_ = listener_->local_port();
    running_ = true;
    receiver_ = std::thread([this] { receive_loop(); });
    acceptor_ = std::thread([this] { accept_loop(); });
    loop_ = std::thread([this] { sim_loop(); });
}

void SimServer::stop()
{
    running_ = false;
    for (std::thread* t : {&receiver_, &acceptor_, &loop_})
        if (t->joinable())
            t->join();
    std::lock_guard lock(clients_mutex_);
    for (auto& c : clients_)
        c->shutdown();
    clients_.clear();
}

std::vector<MissionEvent> SimServer::events() const
{
    std::lock_guard lock(world_mutex_);
    return world_.events();
}

double SimServer::clock() const
{
    std::lock_guard lock(world_mutex_);
    return world_.clock();
}

DroneState SimServer::drone() const
{
    std::lock_guard lock(world_mutex_);
    return world_.drone();
}

void SimServer::receive_loop()
{
    while (running_) {
        auto msg = udp_->receive(50);
        if (!msg)
            continue;
        std::lock_guard lock(queue_mutex_);
        queue_.push_back({std::move(msg->first), msg->second});
    }
}

void SimServer::accept_loop()
{
    while (running_) {
        auto stream = listener_->accept(50);
        if (!stream)
            continue;
        std::lock_guard lock(clients_mutex_);
        clients_.push_back(std::make_shared<net::TcpStream>(std::move(*stream)));
    }
}

void SimServer::handle(const Pending& p, std::uint64_t token)
{
    std::string line = p.text;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == '\0'))
        line.pop_back();
    Response reply;
    try {
        const Command command = parse_command(line);
        validate(command);
        const auto applied = world_.apply_command(command, token);
        if (!applied.immediate) {
            reply_to_.emplace_back(token, p.from);
            return;
        }
        reply = *applied.immediate;
    } catch (const ProtocolError& e) {
        reply = resp::Error{e.what()};
    }
    udp_->send_to(serialize_response(reply), p.from);
}

void SimServer::sim_loop()
{
    using clock = std::chrono::steady_clock;
    const double dt = world_.config().dt;
    const auto frame_every = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(1.0 / (config_.video_fps * dt))));
    const auto t0 = clock::now();
    std::uint64_t token = 1;
    std::uint32_t seq = 0;

    while (running_) {
        std::vector<Pending> batch;
        {
            std::lock_guard lock(queue_mutex_);
            batch.swap(queue_);
        }
        std::optional<VideoFrame> frame;
        {
            std::lock_guard lock(world_mutex_);
            for (const Pending& p : batch)
                handle(p, token++);
            world_.step();
            for (const Completion& c : world_.take_completions()) {
                for (auto it = reply_to_.begin(); it != reply_to_.end(); ++it) {
                    if (it->first == c.reply_token) {
                        udp_->send_to(serialize_response(c.response), it->second);
                        reply_to_.erase(it);
                        break;
                    }
                }
            }
            if (world_.drone().stream_on && world_.steps() % frame_every == 0)
                frame = VideoFrame{seq++, static_cast<std::uint64_t>(std::llround(world_.clock() * 1000.0)),
                                   world_.render_camera()};
        }
        if (frame) {
            const auto bytes = encode_frame(*frame);
            std::vector<std::shared_ptr<net::TcpStream>> targets;
            {
                std::lock_guard lock(clients_mutex_);
                targets = clients_;
            }
            std::vector<std::shared_ptr<net::TcpStream>> dead;
            for (const auto& c : targets) {
                if (c->send_all(bytes))
                    ++frames_sent_;
                else
                    dead.push_back(c);
            }
            if (!dead.empty()) {
                std::lock_guard lock(clients_mutex_);
                std::erase_if(clients_, [&](const auto& c) { return std::find(dead.begin(), dead.end(), c) != dead.end(); });
            }
        }
        if (!config_.fast) {
            const auto due = t0 + std::chrono::duration_cast<clock::duration>(
                                      std::chrono::duration<double>(static_cast<double>(world_.steps()) * dt));
            std::this_thread::sleep_until(due);
        }
    }
}

}  // namespace tello
