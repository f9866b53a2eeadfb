#pragma once

// Thin RAII wrappers over POSIX UDP and TCP sockets (IPv4).

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include <netinet/in.h>

namespace tello::net {

enum class NetErrc { PortBindFailure, ConnectFailure, IoError, BadAddress };

class NetError : public std::runtime_error {
public:
    NetError(NetErrc code, const std::string& detail) : std::runtime_error(detail), code_(code) {}
    NetErrc code() const noexcept { return code_; }

private:
    NetErrc code_;
};

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Fd& operator=(Fd&& o) noexcept;
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd();

    int get() const noexcept { return fd_; }
    explicit operator bool() const noexcept { return fd_ >= 0; }

private:
    int fd_ = -1;
};

struct Endpoint {
    sockaddr_in addr{};
    std::string to_string() const;
    bool operator==(const Endpoint& o) const;
};

Endpoint make_endpoint(const std::string& host, std::uint16_t port);

class UdpSocket {
public:
    /// Binds host:port; port 0 picks a free port.
    static UdpSocket bind(const std::string& host, std::uint16_t port);
    /// Unbound socket for a client; the OS assigns a port on first send.
    static UdpSocket client();

    void send_to(const std::string& data, const Endpoint& to) const;
    /// Waits up to timeout_ms for one datagram.
    std::optional<std::pair<std::string, Endpoint>> receive(int timeout_ms) const;
    std::uint16_t local_port() const;

private:
    Fd fd_;
};

class TcpStream {
public:
    TcpStream() = default;
    explicit TcpStream(Fd fd) : fd_(std::move(fd)) {}
    static TcpStream connect(const std::string& host, std::uint16_t port, int timeout_ms = 2000);

    /// False when the peer has gone.
    bool send_all(std::span<const std::uint8_t> data) const;
    /// Reads exactly out.size() bytes; false on EOF, error or timeout.
    bool read_exact(std::span<std::uint8_t> out, int timeout_ms) const;
    void shutdown() const;
    bool valid() const { return static_cast<bool>(fd_); }

private:
    Fd fd_;
};

class TcpListener {
public:
    static TcpListener bind(const std::string& host, std::uint16_t port);
    std::optional<TcpStream> accept(int timeout_ms) const;
    std::uint16_t local_port() const;

private:
    Fd fd_;
};

}  // namespace tello::net
